"""Boolean predicates over propositions, in canonical truth-table form.

Automaton edges are labelled with predicates over the proposition set rather
than with explicit letters, so alphabets of size 2^|props| never get
enumerated wholesale.  A predicate is stored as its sorted support (the
propositions it actually depends on) plus a bitmask with one bit per
assignment of the support.  The representation is canonical: propositions a
predicate does not depend on are pruned, so structural equality coincides
with logical equivalence.

Assignment indexing: bit ``i`` of ``prop`` number ``k`` in the support
contributes ``(idx >> k) & 1`` — i.e. assignment index ``idx`` sets
``support[k]`` true iff bit ``k`` of ``idx`` is set.

Explicit expansion (``assignments``/``letters``) is deliberately capped at
16 support propositions; larger requests raise, matching the documented
limit of the explicit game-alphabet construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import AbstractSet, Iterable, Iterator

from .errors import HyperfenceError

MAX_EXPLICIT_SUPPORT = 16


def _full_mask(nprops: int) -> int:
    return (1 << (1 << nprops)) - 1


@dataclass(frozen=True)
class Pred:
    """A boolean function of finitely many propositions."""

    support: tuple[str, ...]
    table: int

    # -- construction ------------------------------------------------------

    @staticmethod
    def true() -> "Pred":
        return Pred((), 1)

    @staticmethod
    def false() -> "Pred":
        return Pred((), 0)

    @staticmethod
    def var(name: str, value: bool = True) -> "Pred":
        return Pred((name,), 0b10 if value else 0b01)

    @staticmethod
    def cube(positive: Iterable[str] = (), negative: Iterable[str] = ()) -> "Pred":
        """Conjunction of positive and negated propositions.

        Contradictory cubes collapse to false.
        """
        pos = frozenset(positive)
        neg = frozenset(negative)
        if pos & neg:
            return Pred.false()
        support = tuple(sorted(pos | neg))
        if len(support) > MAX_EXPLICIT_SUPPORT:
            raise HyperfenceError(
                f"cube over {len(support)} propositions exceeds the explicit limit"
            )
        table = 0
        for idx in range(1 << len(support)):
            ok = True
            for k, name in enumerate(support):
                bit = (idx >> k) & 1
                if name in pos and not bit:
                    ok = False
                    break
                if name in neg and bit:
                    ok = False
                    break
            if ok:
                table |= 1 << idx
        return Pred(support, table)

    @staticmethod
    def of_letter(letter: AbstractSet[str], universe: Iterable[str]) -> "Pred":
        """The minterm that is true exactly on ``letter`` within ``universe``."""
        uni = set(universe)
        return Pred.cube(letter & uni, uni - set(letter))

    def __post_init__(self) -> None:
        pruned = _prune(self.support, self.table)
        if pruned != (self.support, self.table):
            object.__setattr__(self, "support", pruned[0])
            object.__setattr__(self, "table", pruned[1])

    # -- queries -----------------------------------------------------------

    @property
    def is_false(self) -> bool:
        return not self.table

    @property
    def is_true(self) -> bool:
        return not self.support and self.table == 1

    def evaluate(self, letter: AbstractSet[str]) -> bool:
        """Truth value on the letter (set of propositions holding)."""
        idx = 0
        for k, name in enumerate(self.support):
            if name in letter:
                idx |= 1 << k
        return bool((self.table >> idx) & 1)

    def assignments(self) -> Iterator[frozenset[str]]:
        """All satisfying assignments of the support, as letters."""
        for idx in range(1 << len(self.support)):
            if (self.table >> idx) & 1:
                yield frozenset(
                    name for k, name in enumerate(self.support) if (idx >> k) & 1
                )

    def restrict(self, assignment: dict[str, bool]) -> "Pred":
        """Partially evaluate: fix the given propositions to constants."""
        support = self.support
        keep = [k for k, name in enumerate(support) if name not in assignment]
        new_support = tuple(support[k] for k in keep)
        table = 0
        for new_idx in range(1 << len(new_support)):
            idx = 0
            for pos, k in enumerate(keep):
                if (new_idx >> pos) & 1:
                    idx |= 1 << k
            for k, name in enumerate(support):
                if name in assignment and assignment[name]:
                    idx |= 1 << k
            if (self.table >> idx) & 1:
                table |= 1 << new_idx
        return Pred(new_support, table)

    def sort_key(self) -> tuple:
        return (self.support, self.table)

    # -- boolean algebra ----------------------------------------------------

    def _align(self, other: "Pred") -> tuple[tuple[str, ...], int, int]:
        support = tuple(sorted(set(self.support) | set(other.support)))
        if len(support) > MAX_EXPLICIT_SUPPORT:
            raise HyperfenceError(
                f"predicate support {len(support)} exceeds the explicit limit"
            )
        return support, _expand(self, support), _expand(other, support)

    def __and__(self, other: "Pred") -> "Pred":
        support, a, b = self._align(other)
        return Pred(support, a & b)

    def __or__(self, other: "Pred") -> "Pred":
        support, a, b = self._align(other)
        return Pred(support, a | b)

    def __invert__(self) -> "Pred":
        return Pred(self.support, self.table ^ _full_mask(len(self.support)))

    def implies(self, other: "Pred") -> bool:
        return (self & ~other).is_false

    def equivalent(self, other: "Pred") -> bool:
        return self == other

    def __str__(self) -> str:
        if self.is_true:
            return "true"
        if self.is_false:
            return "false"
        terms = []
        for letter in self.assignments():
            lits = [
                name if name in letter else f"!{name}" for name in self.support
            ]
            terms.append(" & ".join(lits))
        return " | ".join(f"({t})" for t in terms)


def _expand(pred: Pred, support: tuple[str, ...]) -> int:
    """Re-express ``pred.table`` over a superset support."""
    if support == pred.support:
        return pred.table
    positions = [support.index(name) for name in pred.support]
    table = 0
    for idx in range(1 << len(support)):
        sub = 0
        for k, pos in enumerate(positions):
            if (idx >> pos) & 1:
                sub |= 1 << k
        if (pred.table >> sub) & 1:
            table |= 1 << idx
    return table


def _prune(support: tuple[str, ...], table: int) -> tuple[tuple[str, ...], int]:
    """Drop propositions the table does not depend on."""
    n = len(support)
    if n == 0:
        return support, table & 1
    table &= _full_mask(n)
    keep: list[int] = []
    for k in range(n):
        lo = 0
        hi = 0
        pos_lo = 0
        pos_hi = 0
        for idx in range(1 << n):
            bit = (table >> idx) & 1
            if (idx >> k) & 1:
                hi |= bit << pos_hi
                pos_hi += 1
            else:
                lo |= bit << pos_lo
                pos_lo += 1
        if lo != hi:
            keep.append(k)
    if len(keep) == n:
        return support, table
    new_support = tuple(support[k] for k in keep)
    new_table = 0
    for new_idx in range(1 << len(keep)):
        idx = 0
        for pos, k in enumerate(keep):
            if (new_idx >> pos) & 1:
                idx |= 1 << k
        if (table >> idx) & 1:
            new_table |= 1 << new_idx
    return new_support, new_table


def disjoint(a: Pred, b: Pred) -> bool:
    return (a & b).is_false


def cover_is_total(preds: Iterable[Pred]) -> bool:
    """True iff the disjunction of the predicates is a tautology."""
    acc = Pred.false()
    for p in preds:
        acc = acc | p
    return acc.is_true
