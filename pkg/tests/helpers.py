"""Shared test utilities: random formulas, lasso enumeration, reference scanners."""

from __future__ import annotations

from itertools import product
from random import Random
from typing import Iterator, Sequence

from hyperfence.logic import (
    And,
    Atom,
    Const,
    Finally,
    Formula,
    Globally,
    Iff,
    Implies,
    LassoWord,
    Next,
    Not,
    Or,
    Release,
    Until,
    WeakUntil,
)

BINARY_OPS = (And, Or, Implies, Iff, Until, WeakUntil, Release)
UNARY_OPS = (Not, Next, Globally, Finally)


def random_formula(rng: Random, depth: int, props: Sequence[str]) -> Formula:
    """Random formula tree of the given maximum depth over plain atoms."""
    if depth == 0 or rng.random() < 0.25:
        r = rng.random()
        if r < 0.08:
            return Const(rng.random() < 0.5)
        return Atom(rng.choice(list(props)))
    if rng.random() < 0.4:
        op = rng.choice(UNARY_OPS)
        return op(random_formula(rng, depth - 1, props))
    op = rng.choice(BINARY_OPS)
    return op(
        random_formula(rng, depth - 1, props),
        random_formula(rng, depth - 1, props),
    )


def random_nnf_formula(rng: Random, depth: int, props: Sequence[str]) -> Formula:
    """Random formula already in negation normal form (literals at leaves)."""
    if depth == 0 or rng.random() < 0.25:
        atom = Atom(rng.choice(list(props)))
        return Not(atom) if rng.random() < 0.4 else atom
    if rng.random() < 0.3:
        op = rng.choice((Next, Globally, Finally))
        return op(random_nnf_formula(rng, depth - 1, props))
    op = rng.choice((And, Or, Until, WeakUntil, Release))
    return op(
        random_nnf_formula(rng, depth - 1, props),
        random_nnf_formula(rng, depth - 1, props),
    )


def all_letters(props: Sequence[str]) -> list[frozenset[str]]:
    out = []
    for bits in product((False, True), repeat=len(props)):
        out.append(frozenset(p for p, b in zip(props, bits) if b))
    return out


def all_lassos(
    props: Sequence[str], max_stem: int, max_loop: int
) -> Iterator[LassoWord]:
    """Every lasso word with stem length <= max_stem, loop length in [1, max_loop]."""
    letters = all_letters(props)
    for stem_len in range(max_stem + 1):
        for loop_len in range(1, max_loop + 1):
            for stem in product(letters, repeat=stem_len):
                for loop in product(letters, repeat=loop_len):
                    yield LassoWord(tuple(stem), tuple(loop))


def random_lasso(
    rng: Random, props: Sequence[str], max_stem: int, max_loop: int
) -> LassoWord:
    letters = all_letters(props)
    stem_len = rng.randrange(max_stem + 1)
    loop_len = rng.randrange(1, max_loop + 1)
    stem = tuple(rng.choice(letters) for _ in range(stem_len))
    loop = tuple(rng.choice(letters) for _ in range(loop_len))
    return LassoWord(stem, loop)


def od_holds_pairwise(
    traces: Sequence[Sequence[tuple[frozenset[str], frozenset[str]]]],
) -> bool:
    """Direct observational-determinism scan over finite traces.

    Each trace is a sequence of (inputs, outputs) pairs; all traces must have
    equal length here.  For every ordered pair of traces, outputs must agree
    at every step up to and excluding the first step whose inputs differ.
    """
    for ta in traces:
        for tb in traces:
            for (ia, oa), (ib, ob) in zip(ta, tb):
                if ia != ib:
                    break
                if oa != ob:
                    return False
    return True


def od_lassos_hold(words: Sequence[LassoWord], inputs, outputs, horizon: int) -> bool:
    """OD scan on lasso words, unrolled to a horizon covering stem+loop."""
    ins = frozenset(inputs)
    outs = frozenset(outputs)
    for wa in words:
        for wb in words:
            for p in range(horizon):
                ea, eb = wa.event_at(p), wb.event_at(p)
                if ea & ins != eb & ins:
                    break
                if ea & outs != eb & outs:
                    return False
    return True


def random_nba(rng: Random, max_states: int, props: Sequence[str]):
    """Small random Büchi automaton with cube-labeled edges."""
    from hyperfence.automata import Nba
    from hyperfence.preds import Pred

    n = rng.randint(1, max_states)
    states = tuple(f"n{i}" for i in range(n))
    edges = {}
    for s in states:
        out = []
        for _ in range(rng.randint(0, 3)):
            pos = [p for p in props if rng.random() < 0.4]
            neg = [p for p in props if p not in pos and rng.random() < 0.4]
            out.append((Pred.cube(pos, neg), states[rng.randrange(n)]))
        edges[s] = tuple(out)
    accepting = frozenset(s for s in states if rng.random() < 0.5)
    return Nba(tuple(props), states, states[0], edges, accepting)


def random_parity_game(
    rng: Random,
    max_v0: int = 5,
    max_v1: int = 5,
    max_color: int = 3,
    two_sided_actions: bool = True,
):
    """Random alternating parity game with at most two actions per side."""
    from hyperfence.games import ParityGame

    n0 = rng.randint(1, max_v0)
    n1 = rng.randint(1, max_v1)
    v0 = tuple(f"g{i}" for i in range(n0))
    v1 = tuple(f"h{i}" for i in range(n1))
    acts0 = (frozenset(), frozenset({"o"})) if two_sided_actions else (frozenset(),)
    acts1 = (frozenset(), frozenset({"i"})) if two_sided_actions else (frozenset(),)
    e0 = {(v, a): v1[rng.randrange(n1)] for v in v0 for a in acts0}
    e1 = {(v, a): v0[rng.randrange(n0)] for v in v1 for a in acts1}
    colors = {v: rng.randint(0, max_color) for v in v0 + v1}
    return ParityGame(v0, v1, acts0, acts1, e0, e1, "g0", colors)


def random_safety_game(rng: Random, max_v0: int = 4, max_v1: int = 4):
    """Random alternating safety game containing one absorbing losing pair."""
    from hyperfence.games import SafetyGame

    n0 = rng.randint(1, max_v0)
    n1 = rng.randint(1, max_v1)
    v0 = tuple(f"g{i}" for i in range(n0)) + ("gbad",)
    v1 = tuple(f"h{i}" for i in range(n1)) + ("hbad",)
    acts0 = (frozenset(), frozenset({"o"}))
    acts1 = (frozenset(), frozenset({"i"}))
    e0 = {}
    e1 = {}
    for v in v0[:-1]:
        for a in acts0:
            e0[(v, a)] = "hbad" if rng.random() < 0.2 else v1[rng.randrange(n1)]
    for v in v1[:-1]:
        for a in acts1:
            e1[(v, a)] = "gbad" if rng.random() < 0.2 else v0[rng.randrange(n0)]
    for a in acts0:
        e0[("gbad", a)] = "hbad"
    for a in acts1:
        e1[("hbad", a)] = "gbad"
    colors = {v: 0 for v in v0 + v1}
    colors["gbad"] = 1
    colors["hbad"] = 1
    return SafetyGame(v0, v1, acts0, acts1, e0, e1, "g0", colors)


def _induced_successors(game, strategy, player):
    """Successor map once `player` fixes `strategy`; the other side is free."""
    succ: dict[str, list[str]] = {}
    for v in game.v0:
        if player == 0 and v in strategy:
            succ[v] = [game.e0[(v, strategy[v])]]
        else:
            succ[v] = sorted({game.e0[(v, a)] for a in game.actions0})
    for v in game.v1:
        if player == 1 and v in strategy:
            succ[v] = [game.e1[(v, strategy[v])]]
        else:
            succ[v] = sorted({game.e1[(v, a)] for a in game.actions1})
    return succ


def _reachable(succ, start):
    seen = {start}
    stack = [start]
    while stack:
        x = stack.pop()
        for t in succ[x]:
            if t not in seen:
                seen.add(t)
                stack.append(t)
    return seen


def states_winning_under(game, strategy, player) -> frozenset[str]:
    """States from which `player` wins every play after fixing `strategy`.

    A play loses for player 0 exactly when the maximum color it visits
    infinitely often is odd, i.e. when the adversary can steer into a
    reachable cycle whose maximum color has the wrong parity.
    """
    succ = _induced_successors(game, strategy, player)
    # a cycle is bad for the player when its maximum color has this parity
    bad_parity = 1 if player == 0 else 0
    colors = game.colors
    nodes = list(game.v0 + game.v1)
    bad_targets = set()
    for d in sorted({colors[v] for v in nodes if colors[v] % 2 == bad_parity}):
        sd = {v for v in nodes if colors[v] <= d}
        for u in sd:
            if colors[u] != d:
                continue
            stack = [t for t in succ[u] if t in sd]
            seen = set(stack)
            while stack:
                x = stack.pop()
                for t in succ[x]:
                    if t in sd and t not in seen:
                        seen.add(t)
                        stack.append(t)
            if u in seen:
                bad_targets.add(u)
    good = set()
    for v in nodes:
        if not (_reachable(succ, v) & bad_targets):
            good.add(v)
    return frozenset(good)


def brute_force_winning0(game) -> frozenset[str]:
    """Player-0 winning region by enumerating every positional strategy."""
    v0 = list(game.v0)
    win: set[str] = set()
    for combo in product(game.actions0, repeat=len(v0)):
        sigma = dict(zip(v0, combo))
        win |= states_winning_under(game, sigma, 0)
    return frozenset(win)
