"""Temporal-logic core: formulas, parsing, normal forms, lasso evaluation.

Formulas are immutable trees.  Atoms optionally carry a reference: a trace
variable name (``str``) inside quantified hyperproperty bodies, or a trace
copy index (``int``) after self-composition.  A resolved atom (index or no
reference) names the proposition ``a_<idx>`` respectively ``a``.

Ultimately periodic words (``LassoWord``) are the testing currency of the
whole package: every automaton and game construction is cross-checked
against direct formula evaluation on lassos.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Iterable, Iterator, Sequence

from .errors import AlphabetError, FormulaSyntaxError

END_PROP = "end"

_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_RESERVED_WORDS = {"forall", "exists", "true", "false", "X", "U", "W", "R", "G", "F"}

Span = tuple[int, int]


# ---------------------------------------------------------------------------
# Formula AST
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Formula:
    span: Span | None = field(default=None, compare=False, repr=False, kw_only=True)

    def __str__(self) -> str:
        return format_formula(self)


@dataclass(frozen=True)
class Const(Formula):
    value: bool


@dataclass(frozen=True)
class Atom(Formula):
    name: str
    ref: str | int | None = None

    @property
    def resolved(self) -> str:
        """Proposition name with any copy index folded in."""
        if isinstance(self.ref, str):
            raise ValueError(f"atom {self.name}[{self.ref}] has an unresolved trace variable")
        if self.ref is None:
            return self.name
        return f"{self.name}_{self.ref}"


@dataclass(frozen=True)
class Not(Formula):
    arg: Formula


@dataclass(frozen=True)
class Next(Formula):
    arg: Formula


@dataclass(frozen=True)
class Globally(Formula):
    arg: Formula


@dataclass(frozen=True)
class Finally(Formula):
    arg: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Iff(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Until(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class WeakUntil(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Release(Formula):
    left: Formula
    right: Formula


TRUE = Const(True)
FALSE = Const(False)

_UNARY = (Not, Next, Globally, Finally)
_BINARY = (And, Or, Implies, Iff, Until, WeakUntil, Release)


def children(f: Formula) -> tuple[Formula, ...]:
    if isinstance(f, _UNARY):
        return (f.arg,)
    if isinstance(f, _BINARY):
        return (f.left, f.right)
    return ()


def subformulas(f: Formula) -> Iterator[Formula]:
    """Postorder traversal (children before parents)."""
    for child in children(f):
        yield from subformulas(child)
    yield f


def formula_size(f: Formula) -> int:
    """Node count of the formula tree."""
    return 1 + sum(formula_size(c) for c in children(f))


def atoms(f: Formula) -> Iterator[Atom]:
    for sub in subformulas(f):
        if isinstance(sub, Atom):
            yield sub


def support(f: Formula) -> frozenset[str]:
    """Resolved proposition names occurring in the formula."""
    return frozenset(a.resolved for a in atoms(f))


def map_atoms(f: Formula, fn: Callable[[Atom], Formula]) -> Formula:
    if isinstance(f, Atom):
        return fn(f)
    if isinstance(f, Const):
        return f
    if isinstance(f, _UNARY):
        return type(f)(map_atoms(f.arg, fn))
    assert isinstance(f, _BINARY)
    return type(f)(map_atoms(f.left, fn), map_atoms(f.right, fn))


def resolve_vars(f: Formula, mapping: dict[str, int | None]) -> Formula:
    """Replace trace-variable references per ``mapping``."""

    def fn(a: Atom) -> Formula:
        if isinstance(a.ref, str):
            if a.ref not in mapping:
                raise ValueError(f"unbound trace variable {a.ref!r}")
            return Atom(a.name, mapping[a.ref])
        return a

    return map_atoms(f, fn)


def conj(parts: Iterable[Formula]) -> Formula:
    """Left-associated conjunction; empty conjunction is true."""
    out: Formula | None = None
    for p in parts:
        out = p if out is None else And(out, p)
    return TRUE if out is None else out


def disj(parts: Iterable[Formula]) -> Formula:
    out: Formula | None = None
    for p in parts:
        out = p if out is None else Or(out, p)
    return FALSE if out is None else out


def nest_next(f: Formula, depth: int) -> Formula:
    for _ in range(depth):
        f = Next(f)
    return f


# ---------------------------------------------------------------------------
# Pretty printing
# ---------------------------------------------------------------------------

_PREC_IFF, _PREC_IMPL, _PREC_OR, _PREC_AND, _PREC_TEMP, _PREC_UNARY = 1, 2, 3, 4, 5, 6


def _fmt(f: Formula, parent: int, right_of_same: bool) -> str:
    if isinstance(f, Const):
        return "true" if f.value else "false"
    if isinstance(f, Atom):
        if isinstance(f.ref, str):
            return f"{f.name}[{f.ref}]"
        return f.resolved
    if isinstance(f, Not):
        return "!" + _fmt(f.arg, _PREC_UNARY, False)
    if isinstance(f, (Next, Globally, Finally)):
        op = {Next: "X", Globally: "G", Finally: "F"}[type(f)]
        return f"{op} " + _fmt(f.arg, _PREC_UNARY, False)

    op, prec, right_assoc = {
        And: ("&", _PREC_AND, False),
        Or: ("|", _PREC_OR, False),
        Implies: ("->", _PREC_IMPL, True),
        Iff: ("<->", _PREC_IFF, True),
        Until: ("U", _PREC_TEMP, True),
        WeakUntil: ("W", _PREC_TEMP, True),
        Release: ("R", _PREC_TEMP, True),
    }[type(f)]
    left = _fmt(f.left, prec, right_assoc)
    right = _fmt(f.right, prec, not right_assoc)
    text = f"{left} {op} {right}"
    if prec < parent or (prec == parent and right_of_same):
        return f"({text})"
    return text


def format_formula(f: Formula) -> str:
    return _fmt(f, 0, False)


# ---------------------------------------------------------------------------
# Alphabets and specs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Alphabet:
    """Input and output propositions; ``end`` is always the last output."""

    inputs: tuple[str, ...]
    outputs: tuple[str, ...]

    @staticmethod
    def make(inputs: Iterable[str], outputs: Iterable[str]) -> "Alphabet":
        ins = tuple(inputs)
        outs = tuple(outputs)
        for name in (*ins, *outs):
            if not _IDENT_RE.fullmatch(name) or name in _RESERVED_WORDS:
                raise AlphabetError(f"invalid proposition name {name!r}")
            if name == END_PROP:
                raise AlphabetError(f"{END_PROP!r} is reserved and cannot be declared")
        if len(set(ins)) != len(ins) or len(set(outs)) != len(outs):
            raise AlphabetError("duplicate proposition names")
        if set(ins) & set(outs):
            raise AlphabetError("inputs and outputs must be disjoint")
        if not ins and not outs:
            raise AlphabetError("alphabet must declare at least one proposition")
        return Alphabet(ins, outs + (END_PROP,))

    @property
    def declared_outputs(self) -> tuple[str, ...]:
        return tuple(o for o in self.outputs if o != END_PROP)

    @property
    def props(self) -> tuple[str, ...]:
        return self.inputs + self.outputs

    def validate_event(self, event: Iterable[str], allow_end: bool = False) -> frozenset[str]:
        ev = frozenset(event)
        allowed = set(self.props if allow_end else (*self.inputs, *self.declared_outputs))
        extra = ev - allowed
        if extra:
            raise AlphabetError(f"event mentions unknown propositions {sorted(extra)}")
        return ev


@dataclass(frozen=True)
class HyperSpec:
    """Universally quantified hyperproperty: prefix of trace variables plus body."""

    variables: tuple[str, ...]
    body: Formula
    alphabet: Alphabet

    @property
    def k(self) -> int:
        return len(self.variables)

    def __str__(self) -> str:
        prefix = "".join(f"forall {v}. " for v in self.variables)
        return prefix + format_formula(self.body)


# ---------------------------------------------------------------------------
# Tokenizer / parser
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _Token:
    kind: str
    value: str
    pos: int


_SYMBOLS = [
    ("<->", "IFF"),
    ("->", "IMPLIES"),
    ("(", "LPAREN"),
    (")", "RPAREN"),
    ("[", "LBRACK"),
    ("]", "RBRACK"),
    (".", "DOT"),
    (",", "COMMA"),
    ("!", "NOT"),
    ("&", "AND"),
    ("|", "OR"),
]


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if text.startswith("//", i):
            j = text.find("\n", i)
            i = n if j < 0 else j + 1
            continue
        m = _IDENT_RE.match(text, i)
        if m:
            tokens.append(_Token("IDENT", m.group(), i))
            i = m.end()
            continue
        for sym, kind in _SYMBOLS:
            if text.startswith(sym, i):
                tokens.append(_Token(kind, sym, i))
                i += len(sym)
                break
        else:
            raise FormulaSyntaxError(f"unexpected character {c!r}", i)
    tokens.append(_Token("EOF", "", n))
    return tokens


class _Parser:
    def __init__(
        self,
        text: str,
        *,
        hyper: bool,
        props: frozenset[str] | None,
        allow_exists: bool = False,
        allow_end: bool = False,
    ):
        self.tokens = _tokenize(text)
        self.pos = 0
        self.hyper = hyper
        self.props = props
        self.allow_exists = allow_exists
        self.allow_end = allow_end
        self.bound_vars: list[str] = []

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str, what: str) -> _Token:
        tok = self.peek()
        if tok.kind != kind:
            raise FormulaSyntaxError(
                f"unexpected {tok.kind.lower() if tok.kind != 'EOF' else 'end of input'}",
                tok.pos,
                (what,),
            )
        return self.advance()

    # quantifier prefix -----------------------------------------------------

    def parse_prefix(self) -> tuple[str, ...]:
        names: list[str] = []
        while True:
            tok = self.peek()
            if tok.kind != "IDENT" or tok.value not in ("forall", "exists"):
                break
            if tok.value == "exists" and not self.allow_exists:
                raise FormulaSyntaxError(
                    "existential quantifiers are not allowed: specs must be universal",
                    tok.pos,
                )
            self.advance()
            name_tok = self.expect("IDENT", "trace variable")
            if name_tok.value in _RESERVED_WORDS:
                raise FormulaSyntaxError(
                    f"reserved word {name_tok.value!r} cannot name a trace variable",
                    name_tok.pos,
                )
            if name_tok.value in names:
                raise FormulaSyntaxError(
                    f"duplicate trace variable {name_tok.value!r}", name_tok.pos
                )
            names.append(name_tok.value)
            self.expect("DOT", "'.'")
        self.bound_vars = names
        return tuple(names)

    # precedence-climbing body ----------------------------------------------

    def parse_formula(self) -> Formula:
        f = self._iff()
        tok = self.peek()
        if tok.kind != "EOF":
            raise FormulaSyntaxError(
                f"trailing input {tok.value!r}", tok.pos, ("end of input",)
            )
        return f

    def _iff(self) -> Formula:
        start = self.peek().pos
        left = self._impl()
        if self.peek().kind == "IFF":
            self.advance()
            right = self._iff()
            return Iff(left, right, span=(start, self._last_end()))
        return left

    def _impl(self) -> Formula:
        start = self.peek().pos
        left = self._or()
        if self.peek().kind == "IMPLIES":
            self.advance()
            right = self._impl()
            return Implies(left, right, span=(start, self._last_end()))
        return left

    def _or(self) -> Formula:
        start = self.peek().pos
        out = self._and()
        while self.peek().kind == "OR":
            self.advance()
            out = Or(out, self._and(), span=(start, self._last_end()))
        return out

    def _and(self) -> Formula:
        start = self.peek().pos
        out = self._until()
        while self.peek().kind == "AND":
            self.advance()
            out = And(out, self._until(), span=(start, self._last_end()))
        return out

    def _until(self) -> Formula:
        start = self.peek().pos
        left = self._unary()
        tok = self.peek()
        if tok.kind == "IDENT" and tok.value in ("U", "W", "R"):
            self.advance()
            right = self._until()
            cls = {"U": Until, "W": WeakUntil, "R": Release}[tok.value]
            return cls(left, right, span=(start, self._last_end()))
        return left

    def _unary(self) -> Formula:
        tok = self.peek()
        if tok.kind == "NOT":
            self.advance()
            return Not(self._unary(), span=(tok.pos, self._last_end()))
        if tok.kind == "IDENT" and tok.value in ("X", "G", "F"):
            self.advance()
            cls = {"X": Next, "G": Globally, "F": Finally}[tok.value]
            return cls(self._unary(), span=(tok.pos, self._last_end()))
        return self._atom()

    def _atom(self) -> Formula:
        tok = self.peek()
        if tok.kind == "LPAREN":
            self.advance()
            f = self._iff()
            self.expect("RPAREN", "')'")
            return f
        if tok.kind != "IDENT":
            raise FormulaSyntaxError(
                f"unexpected {tok.value!r}" if tok.kind != "EOF" else "unexpected end of input",
                tok.pos,
                ("proposition", "'('", "'true'", "'false'"),
            )
        self.advance()
        if tok.value == "true":
            return Const(True, span=(tok.pos, tok.pos + 4))
        if tok.value == "false":
            return Const(False, span=(tok.pos, tok.pos + 5))
        if tok.value in _RESERVED_WORDS:
            raise FormulaSyntaxError(
                f"misplaced keyword {tok.value!r}", tok.pos, ("proposition",)
            )
        name = tok.value
        if self.hyper:
            if self.peek().kind != "LBRACK":
                raise FormulaSyntaxError(
                    f"atom {name!r} needs a trace variable, e.g. {name}[{self.bound_vars[0] if self.bound_vars else 'p'}]",
                    tok.pos,
                )
            self.advance()
            var_tok = self.expect("IDENT", "trace variable")
            self.expect("RBRACK", "']'")
            if var_tok.value not in self.bound_vars:
                raise FormulaSyntaxError(
                    f"free trace variable {var_tok.value!r}", var_tok.pos
                )
            self._check_prop(name, tok.pos)
            return Atom(name, var_tok.value, span=(tok.pos, self._last_end()))
        self._check_prop(name, tok.pos)
        return Atom(name, None, span=(tok.pos, tok.pos + len(name)))

    def _check_prop(self, name: str, pos: int) -> None:
        if name == END_PROP and not self.allow_end:
            raise FormulaSyntaxError(
                f"{END_PROP!r} is reserved for session termination", pos
            )
        if self.props is not None and name not in self.props:
            raise FormulaSyntaxError(f"unknown proposition {name!r}", pos)

    def _last_end(self) -> int:
        tok = self.tokens[self.pos - 1]
        return tok.pos + len(tok.value)


def parse_ltl(text: str, props: Iterable[str] | None = None) -> Formula:
    """Parse a plain (unquantified) formula; atoms are bare propositions."""
    prop_set = None if props is None else frozenset(props)
    p = _Parser(text, hyper=False, props=prop_set, allow_end=True)
    if p.parse_prefix():
        raise FormulaSyntaxError("quantifiers are not allowed here", 0)
    return p.parse_formula()


def parse_hyperltl(
    text: str,
    alphabet: Alphabet,
    *,
    allow_exists: bool = False,
) -> HyperSpec:
    """Parse a prenex hyperproperty over the alphabet.

    Strict mode accepts only universal quantifiers and rejects the reserved
    ``end`` proposition.  The permissive mode (``allow_exists=True``) exists
    to round-trip emitted existential encodings, where ``end`` is also legal.
    """
    user_props = frozenset((*alphabet.inputs, *alphabet.declared_outputs, END_PROP))
    p = _Parser(
        text,
        hyper=True,
        props=user_props,
        allow_exists=allow_exists,
        allow_end=allow_exists,
    )
    variables = p.parse_prefix()
    if not variables:
        raise FormulaSyntaxError("expected a quantifier prefix ('forall p. ...')", 0)
    body = p.parse_formula()
    return HyperSpec(variables, body, alphabet)


def parse_spec_file(text: str) -> HyperSpec:
    """Parse a ``.hltl`` spec file: inputs/outputs declarations plus formula."""
    inputs: list[str] | None = None
    outputs: list[str] | None = None
    spec_text: str | None = None
    offset = 0
    lines = text.splitlines(keepends=True)
    for lineno, raw in enumerate(lines):
        line = raw.split("//", 1)[0].strip()
        if line:
            if line.startswith("inputs:"):
                inputs = [w.strip() for w in line[len("inputs:"):].split(",") if w.strip()]
            elif line.startswith("outputs:"):
                outputs = [w.strip() for w in line[len("outputs:"):].split(",") if w.strip()]
            elif line.startswith("spec:"):
                rest = raw.split("//", 1)[0]
                rest = rest[rest.index("spec:") + len("spec:"):]
                tail = "".join(lines[lineno + 1:])
                spec_text = rest + tail
                break
            else:
                raise FormulaSyntaxError(
                    "expected 'inputs:', 'outputs:' or 'spec:'", offset
                )
        offset += len(raw)
    if inputs is None or outputs is None:
        raise FormulaSyntaxError("missing inputs/outputs declarations", 0)
    if spec_text is None:
        raise FormulaSyntaxError("missing spec: section", len(text))
    alphabet = Alphabet.make(inputs, outputs)
    return parse_hyperltl(spec_text, alphabet)


# ---------------------------------------------------------------------------
# Normal forms
# ---------------------------------------------------------------------------


def to_nnf(f: Formula, *, keep_weak: bool = False) -> Formula:
    """Negation normal form.

    Negations end up on atoms only.  By default ``W`` is rewritten as
    ``(l U r) | G l``; with ``keep_weak=True`` it survives as a primitive
    (useful for constructions that treat it as a greatest fixpoint).
    """
    return _nnf(f, False, "keep" if keep_weak else "expand")


def _nnf(f: Formula, neg: bool, weak_mode: str) -> Formula:
    if isinstance(f, Const):
        return Const(f.value != neg)
    if isinstance(f, Atom):
        return Not(f) if neg else f
    if isinstance(f, Not):
        return _nnf(f.arg, not neg, weak_mode)
    if isinstance(f, Implies):
        return _nnf(Or(Not(f.left), f.right), neg, weak_mode)
    if isinstance(f, Iff):
        both = And(f.left, f.right)
        neither = And(Not(f.left), Not(f.right))
        return _nnf(Or(both, neither), neg, weak_mode)
    if isinstance(f, Next):
        return Next(_nnf(f.arg, neg, weak_mode))
    if isinstance(f, Globally):
        if neg:
            return Finally(_nnf(f.arg, True, weak_mode))
        return Globally(_nnf(f.arg, False, weak_mode))
    if isinstance(f, Finally):
        if neg:
            return Globally(_nnf(f.arg, True, weak_mode))
        return Finally(_nnf(f.arg, False, weak_mode))
    if isinstance(f, And):
        cls = Or if neg else And
        return cls(_nnf(f.left, neg, weak_mode), _nnf(f.right, neg, weak_mode))
    if isinstance(f, Or):
        cls = And if neg else Or
        return cls(_nnf(f.left, neg, weak_mode), _nnf(f.right, neg, weak_mode))
    if isinstance(f, Until):
        if neg:
            return Release(_nnf(f.left, True, weak_mode), _nnf(f.right, True, weak_mode))
        return Until(_nnf(f.left, False, weak_mode), _nnf(f.right, False, weak_mode))
    if isinstance(f, Release):
        if neg:
            return Until(_nnf(f.left, True, weak_mode), _nnf(f.right, True, weak_mode))
        return Release(_nnf(f.left, False, weak_mode), _nnf(f.right, False, weak_mode))
    if isinstance(f, WeakUntil):
        if neg:
            # !(l W r) == !r U (!l & !r)
            return Until(
                _nnf(f.right, True, weak_mode),
                And(_nnf(f.left, True, weak_mode), _nnf(f.right, True, weak_mode)),
            )
        left = _nnf(f.left, False, weak_mode)
        right = _nnf(f.right, False, weak_mode)
        if weak_mode == "keep":
            return WeakUntil(left, right)
        if weak_mode == "release":
            # l W r == r R (l | r): keeps the safety fragment U-free.
            return Release(right, Or(left, right))
        return Or(Until(left, right), Globally(left))
    raise TypeError(f"unknown formula node {type(f).__name__}")


def classify_syntactic_safety(f: Formula) -> bool:
    """True iff the formula is syntactically safe.

    Checked on a negation normal form that rewrites ``W`` into its release
    form (``l W r == r R (l | r)``), so weak-until specs stay inside the
    fragment: safe means no ``U`` and no ``F`` remain.
    """
    g = _nnf(f, False, "release")
    return not any(isinstance(s, (Until, Finally)) for s in subformulas(g))


def nnf_for_safety(f: Formula) -> Formula:
    """NNF in the release form of W; only valid input to safety constructions."""
    return _nnf(f, False, "release")


# ---------------------------------------------------------------------------
# Simplification
# ---------------------------------------------------------------------------


def sort_key(f: Formula) -> str:
    return format_formula(f)


def _flatten(cls: type, f: Formula) -> Iterator[Formula]:
    if isinstance(f, cls):
        yield from _flatten(cls, f.left)
        yield from _flatten(cls, f.right)
    else:
        yield f


def simplify(f: Formula) -> Formula:
    """Language-preserving cleanup: constant folding, idempotence, canonical
    operand order for commutative connectives.  Meant to run before automaton
    construction; it never touches the published composition output."""
    if isinstance(f, (Const, Atom)):
        return f
    if isinstance(f, Not):
        a = simplify(f.arg)
        if isinstance(a, Const):
            return Const(not a.value)
        if isinstance(a, Not):
            return a.arg
        return Not(a)
    if isinstance(f, Next):
        a = simplify(f.arg)
        return a if isinstance(a, Const) else Next(a)
    if isinstance(f, Globally):
        a = simplify(f.arg)
        if isinstance(a, Const):
            return a
        if isinstance(a, Globally):
            return a
        return Globally(a)
    if isinstance(f, Finally):
        a = simplify(f.arg)
        if isinstance(a, Const):
            return a
        if isinstance(a, Finally):
            return a
        return Finally(a)
    if isinstance(f, (And, Or)):
        neutral = isinstance(f, And)
        parts: list[Formula] = []
        seen: set[str] = set()
        for raw in _flatten(type(f), f):
            p = simplify(raw)
            if isinstance(p, Const):
                if p.value != neutral:
                    return Const(not neutral)
                continue
            key = sort_key(p)
            if key not in seen:
                seen.add(key)
                parts.append(p)
        parts.sort(key=sort_key)
        if not parts:
            return Const(neutral)
        out = parts[0]
        for p in parts[1:]:
            out = type(f)(out, p)
        return out
    if isinstance(f, Implies):
        l, r = simplify(f.left), simplify(f.right)
        if isinstance(l, Const):
            return r if l.value else TRUE
        if isinstance(r, Const):
            return TRUE if r.value else simplify(Not(l))
        if l == r:
            return TRUE
        return Implies(l, r)
    if isinstance(f, Iff):
        l, r = simplify(f.left), simplify(f.right)
        if isinstance(l, Const):
            return r if l.value else simplify(Not(r))
        if isinstance(r, Const):
            return l if r.value else simplify(Not(l))
        if l == r:
            return TRUE
        if sort_key(l) > sort_key(r):
            l, r = r, l
        return Iff(l, r)
    if isinstance(f, Until):
        l, r = simplify(f.left), simplify(f.right)
        if isinstance(r, Const):
            return r
        if isinstance(l, Const):
            return r if not l.value else Finally(r)
        if l == r:
            return l
        return Until(l, r)
    if isinstance(f, WeakUntil):
        l, r = simplify(f.left), simplify(f.right)
        if isinstance(r, Const):
            return TRUE if r.value else simplify(Globally(l))
        if isinstance(l, Const):
            return TRUE if l.value else r
        if l == r:
            return l
        return WeakUntil(l, r)
    if isinstance(f, Release):
        l, r = simplify(f.left), simplify(f.right)
        if isinstance(r, Const):
            return r
        if isinstance(l, Const):
            return r if l.value else simplify(Globally(r))
        if l == r:
            return l
        return Release(l, r)
    raise TypeError(f"unknown formula node {type(f).__name__}")


# ---------------------------------------------------------------------------
# Lasso words and evaluation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LassoWord:
    """Ultimately periodic word: finite stem followed by a repeated loop."""

    stem: tuple[frozenset[str], ...]
    loop: tuple[frozenset[str], ...]

    def __post_init__(self) -> None:
        if not self.loop:
            raise ValueError("lasso loop must be nonempty")

    @staticmethod
    def make(stem: Iterable[Iterable[str]], loop: Iterable[Iterable[str]]) -> "LassoWord":
        return LassoWord(
            tuple(frozenset(e) for e in stem),
            tuple(frozenset(e) for e in loop),
        )

    @property
    def positions(self) -> int:
        return len(self.stem) + len(self.loop)

    def event_at(self, p: int) -> frozenset[str]:
        if p < len(self.stem):
            return self.stem[p]
        return self.loop[(p - len(self.stem)) % len(self.loop)]

    def successor(self, p: int) -> int:
        return p + 1 if p + 1 < self.positions else len(self.stem)


def evaluate_ltl(f: Formula, word: LassoWord) -> bool:
    """Evaluate a resolved formula on an ultimately periodic word.

    Temporal operators are solved by fixpoint iteration over the stem plus a
    single loop unrolling; least fixpoints (U, F) start from all-false,
    greatest fixpoints (R, G, W) from all-true.
    """
    n = word.positions
    succ = [word.successor(p) for p in range(n)]
    events = [word.event_at(p) for p in range(n)]
    tables: dict[Formula, list[bool]] = {}

    def table(g: Formula) -> list[bool]:
        cached = tables.get(g)
        if cached is not None:
            return cached
        if isinstance(g, Const):
            t = [g.value] * n
        elif isinstance(g, Atom):
            name = g.resolved
            t = [name in events[p] for p in range(n)]
        elif isinstance(g, Not):
            sub = table(g.arg)
            t = [not v for v in sub]
        elif isinstance(g, And):
            a, b = table(g.left), table(g.right)
            t = [x and y for x, y in zip(a, b)]
        elif isinstance(g, Or):
            a, b = table(g.left), table(g.right)
            t = [x or y for x, y in zip(a, b)]
        elif isinstance(g, Implies):
            a, b = table(g.left), table(g.right)
            t = [(not x) or y for x, y in zip(a, b)]
        elif isinstance(g, Iff):
            a, b = table(g.left), table(g.right)
            t = [x == y for x, y in zip(a, b)]
        elif isinstance(g, Next):
            sub = table(g.arg)
            t = [sub[succ[p]] for p in range(n)]
        elif isinstance(g, (Until, Finally)):
            if isinstance(g, Until):
                hold, goal = table(g.left), table(g.right)
            else:
                hold, goal = [True] * n, table(g.arg)
            t = [False] * n
            changed = True
            while changed:
                changed = False
                for p in range(n - 1, -1, -1):
                    v = goal[p] or (hold[p] and t[succ[p]])
                    if v != t[p]:
                        t[p] = v
                        changed = True
        elif isinstance(g, (Release, Globally, WeakUntil)):
            if isinstance(g, Release):
                lock, always = table(g.left), table(g.right)
                step = lambda p: always[p] and (lock[p] or t[succ[p]])
            elif isinstance(g, WeakUntil):
                hold, goal = table(g.left), table(g.right)
                step = lambda p: goal[p] or (hold[p] and t[succ[p]])
            else:
                sub = table(g.arg)
                step = lambda p: sub[p] and t[succ[p]]
            t = [True] * n
            changed = True
            while changed:
                changed = False
                for p in range(n - 1, -1, -1):
                    v = step(p)
                    if v != t[p]:
                        t[p] = v
                        changed = True
        else:
            raise TypeError(f"unknown formula node {type(g).__name__}")
        tables[g] = t
        return t

    return table(f)[0]


def zip_lassos(words: Sequence[LassoWord], indices: Sequence[int]) -> LassoWord:
    """Synchronous product word; word j's propositions get copy index ``indices[j]``.

    Stem length is the longest stem, loop length the lcm of the loops.
    """
    if not words:
        raise ValueError("need at least one word")
    stem_len = max(len(w.stem) for w in words)
    loop_len = math.lcm(*(len(w.loop) for w in words))

    # positions 0..stem_len-1 form the stem; the loop covers stem_len..stem_len+loop_len-1
    def event(p: int) -> frozenset[str]:
        out: set[str] = set()
        for w, idx in zip(words, indices):
            if p < len(w.stem):
                ev = w.stem[p]
            else:
                ev = w.loop[(p - len(w.stem)) % len(w.loop)]
            out.update(f"{a}_{idx}" for a in ev)
        return frozenset(out)

    stem = tuple(event(p) for p in range(stem_len))
    loop = tuple(event(stem_len + j) for j in range(loop_len))
    return LassoWord(stem, loop)


def evaluate_hyperltl(spec: HyperSpec, traces: Sequence[LassoWord]) -> bool:
    """Ground-truth hyperproperty check: all |T|^k assignments of traces to
    the universal variables, each checked on the zipped product word."""
    k = spec.k
    copies = list(range(1, k + 1))
    body = resolve_vars(spec.body, {v: i for v, i in zip(spec.variables, copies)})
    for assignment in product(range(len(traces)), repeat=k):
        chosen = [traces[t] for t in assignment]
        word = zip_lassos(chosen, copies)
        if not evaluate_ltl(body, word):
            return False
    return True
