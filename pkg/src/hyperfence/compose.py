"""Formula-level translations between hyperproperties and plain LTL.

Self-composition expands a universally quantified property over n trace
copies into one LTL formula over indexed propositions (``a`` on copy 3
becomes ``a_3``).  The remaining helpers encode observed finite traces as
LTL constraints and emit satisfiability queries for them as text in the
input grammar (with ``exists`` quantifiers); emission is text-only, no
solver is attached.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterable, Sequence

from .errors import AlphabetError, BudgetExceededError
from .logic import (
    END_PROP,
    Alphabet,
    And,
    Atom,
    Formula,
    Globally,
    HyperSpec,
    Iff,
    LassoWord,
    Not,
    WeakUntil,
    conj,
    disj,
    format_formula,
    formula_size,
    map_atoms,
    nest_next,
)

DEFAULT_NODE_BUDGET = 10_000_000


def indexed_name(prop: str, idx: int) -> str:
    """Name of proposition ``prop`` on trace copy ``idx`` (1-based)."""
    if idx < 1:
        raise ValueError(f"copy index must be positive, got {idx}")
    return f"{prop}_{idx}"


@dataclass(frozen=True)
class IndexedAlphabet:
    """Alphabet of ``n`` disjoint indexed copies of a base alphabet."""

    base: Alphabet
    n: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise AlphabetError(f"copy count must be positive, got {self.n}")
        derived = self.props
        # str(idx) never contains an underscore, so derived names are unique.
        assert len(set(derived)) == self.n * len(self.base.props)

    def _derive(self, names: tuple[str, ...]) -> tuple[str, ...]:
        return tuple(indexed_name(a, i) for i in range(1, self.n + 1) for a in names)

    @property
    def inputs(self) -> tuple[str, ...]:
        return self._derive(self.base.inputs)

    @property
    def outputs(self) -> tuple[str, ...]:
        return self._derive(self.base.outputs)

    @property
    def props(self) -> tuple[str, ...]:
        return self._derive(self.base.props)

    def copy_inputs(self, idx: int) -> tuple[str, ...]:
        return tuple(indexed_name(a, idx) for a in self.base.inputs)

    def copy_outputs(self, idx: int) -> tuple[str, ...]:
        return tuple(indexed_name(a, idx) for a in self.base.outputs)


@dataclass(frozen=True)
class FiniteTrace:
    """Finite observation over an alphabet's declared propositions."""

    alphabet: Alphabet
    events: tuple[frozenset[str], ...]

    def __post_init__(self) -> None:
        for ev in self.events:
            self.alphabet.validate_event(ev, allow_end=False)

    @staticmethod
    def make(alphabet: Alphabet, events: Iterable[Iterable[str]]) -> "FiniteTrace":
        return FiniteTrace(alphabet, tuple(frozenset(ev) for ev in events))

    def __len__(self) -> int:
        return len(self.events)

    def input_part(self, pos: int) -> frozenset[str]:
        return self.events[pos] & frozenset(self.alphabet.inputs)

    def output_part(self, pos: int) -> frozenset[str]:
        return self.events[pos] & frozenset(self.alphabet.declared_outputs)

    def lift(self) -> LassoWord:
        """Infinite continuation of a finished trace: loop forever on {end}."""
        return LassoWord(self.events, (frozenset({END_PROP}),))


def instantiate_body(body: Formula, assignment: dict[str, int]) -> Formula:
    """Rewrite trace-variable atoms to plain indexed propositions."""

    def fn(a: Atom) -> Formula:
        if isinstance(a.ref, str):
            return Atom(indexed_name(a.name, assignment[a.ref]))
        return a

    return map_atoms(body, fn)


def index_tuples(n: int, k: int) -> Iterable[tuple[int, ...]]:
    """All copy-index tuples in [1, n]^k, lexicographic."""
    return product(range(1, n + 1), repeat=k)


def self_compose(spec: HyperSpec, n: int, budget: int = DEFAULT_NODE_BUDGET) -> Formula:
    """Conjunction of the body over every assignment of the k trace
    variables to the n copies; diagonal assignments included."""
    if n < 1:
        raise ValueError(f"copy count must be positive, got {n}")
    combos = n**spec.k
    estimated = combos * formula_size(spec.body) + (combos - 1)
    if estimated > budget:
        raise BudgetExceededError(
            f"self-composition too large: {estimated} nodes exceed the budget of {budget}"
        )
    return conj(
        instantiate_body(spec.body, dict(zip(spec.variables, combo)))
        for combo in index_tuples(n, spec.k)
    )


# ---------------------------------------------------------------------------
# Trace-prefix encodings
# ---------------------------------------------------------------------------


def _event_chars(event: frozenset[str], props: Sequence[str], mk) -> Formula:
    """Exact characterization of one event: each prop asserted or negated."""
    return conj(mk(p) if p in event else Not(mk(p)) for p in props)


def encode_trace_prefix(t: FiniteTrace, idx: int) -> Formula:
    """LTL constraint pinning copy ``idx`` to start with exactly ``t``.

    Each encoded position also asserts that the copy has not ended, so the
    encoding describes a still-running session.
    """
    props = t.alphabet.props  # includes end, never in a live event
    mk = lambda p: Atom(indexed_name(p, idx))
    return conj(
        nest_next(_event_chars(ev, props, mk), j) for j, ev in enumerate(t.events)
    )


def encode_finished_session(t: FiniteTrace, idx: int) -> Formula:
    """Like :func:`encode_trace_prefix`, plus a permanent ``end`` marker
    from position ``len(t)`` on."""
    terminal = nest_next(Globally(Atom(indexed_name(END_PROP, idx))), len(t))
    if not t.events:
        return terminal
    return And(encode_trace_prefix(t, idx), terminal)


# ---------------------------------------------------------------------------
# Input-determinism gadget
# ---------------------------------------------------------------------------


def _fresh_variables(taken: Iterable[str], count: int) -> tuple[str, ...]:
    used = set(taken)
    out: list[str] = []
    i = 1
    while len(out) < count:
        name = f"q{i}"
        if name not in used:
            out.append(name)
            used.add(name)
        i += 1
    return tuple(out)


def build_undecidability_gadget(spec: HyperSpec) -> HyperSpec:
    """Conjoin the requirement that any two traces produce equal outputs
    for as long as their inputs agree (two fresh trace variables)."""
    v1, v2 = _fresh_variables(spec.variables, 2)
    ab = spec.alphabet
    agree = conj(Iff(Atom(o, v1), Atom(o, v2)) for o in ab.declared_outputs)
    diverge = disj(Not(Iff(Atom(i, v1), Atom(i, v2))) for i in ab.inputs)
    gadget = WeakUntil(agree, diverge)
    return HyperSpec(spec.variables + (v1, v2), And(spec.body, gadget), ab)


# ---------------------------------------------------------------------------
# Satisfiability-query emission
# ---------------------------------------------------------------------------


def _trace_var(i: int) -> str:
    return f"p{i}"


def _instantiated_conjuncts(spec: HyperSpec, n: int) -> list[Formula]:
    out = []
    for combo in index_tuples(n, spec.k):
        mapping = dict(zip(spec.variables, combo))
        out.append(
            map_atoms(
                spec.body,
                lambda a, m=mapping: Atom(a.name, _trace_var(m[a.ref]))
                if isinstance(a.ref, str)
                else a,
            )
        )
    return out


def _render(conjuncts: Sequence[Formula], prefix_vars: int) -> str:
    head = "".join(f"exists {_trace_var(i)}. " for i in range(1, prefix_vars + 1))
    body = " & ".join(f"({format_formula(c)})" for c in conjuncts)
    return head + body


def emit_parallel_sat_encoding(spec: HyperSpec, observed: Sequence[FiniteTrace]) -> str:
    """Text of an existential query: does some trace set of size n satisfy
    the property while extending the n observed prefixes?

    Observed events are characterized over the declared propositions only;
    running traces have no session marker.
    """
    n = len(observed)
    if n < 1:
        raise ValueError("need at least one observed trace")
    lengths = {len(t) for t in observed}
    if len(lengths) > 1:
        raise ValueError("observed traces must all have the same length")
    declared = spec.alphabet.inputs + spec.alphabet.declared_outputs
    conjuncts = _instantiated_conjuncts(spec, n)
    for i, t in enumerate(observed, 1):
        mk = lambda p, v=_trace_var(i): Atom(p, v)
        for j, ev in enumerate(t.events):
            conjuncts.append(nest_next(_event_chars(ev, declared, mk), j))
    return _render(conjuncts, n)


def emit_sequential_sat_encoding(
    spec: HyperSpec, finished: Sequence[FiniteTrace], current: FiniteTrace
) -> str:
    """Text of an existential query covering finished sessions (pinned to
    their exact words, then marked ended forever) and the running session's
    strict prefix (not yet ended)."""
    m = len(finished) + 1
    props = spec.alphabet.props
    conjuncts = _instantiated_conjuncts(spec, m)
    for i, t in enumerate(finished, 1):
        mk = lambda p, v=_trace_var(i): Atom(p, v)
        parts = [nest_next(_event_chars(ev, props, mk), j) for j, ev in enumerate(t.events)]
        parts.append(nest_next(Globally(Atom(END_PROP, _trace_var(i))), len(t)))
        conjuncts.append(conj(parts))
    mk = lambda p, v=_trace_var(m): Atom(p, v)
    for j, ev in enumerate(current.events):
        conjuncts.append(nest_next(_event_chars(ev, props, mk), j))
    return _render(conjuncts, m)
