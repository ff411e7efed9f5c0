"""Alternating two-player games on graphs: arena construction from
automata, Zielonka parity solving, linear-time safety solving, positional
strategy extraction, winning-region restriction, synchronous products, and
PGSolver-format import/export.

Player 0 (the system) owns the output choice, player 1 (the environment)
the input choice; a round consists of one output move followed by one
input move.  Acceptance is max-even parity on state colors.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from itertools import chain, product
from typing import Iterable, Mapping, Sequence

from .automata import Dpa, SafetyAutomaton
from .errors import BudgetExceededError, UnrealizableError
from .preds import MAX_EXPLICIT_SUPPORT

Action = frozenset  # frozenset[str]: the set of propositions chosen true


def action_key(a: Action) -> tuple[str, ...]:
    return tuple(sorted(a))


def all_actions(props: Sequence[str]) -> tuple[Action, ...]:
    """Every subset of the propositions, lexicographically ordered."""
    subsets = [
        frozenset(p for p, b in zip(props, bits) if b)
        for bits in product((False, True), repeat=len(props))
    ]
    return tuple(sorted(subsets, key=action_key))


@dataclass(frozen=True)
class ParityGame:
    """Alternating parity game with explicit action alphabets."""

    v0: tuple[str, ...]
    v1: tuple[str, ...]
    actions0: tuple[Action, ...]
    actions1: tuple[Action, ...]
    e0: dict[tuple[str, Action], str]
    e1: dict[tuple[str, Action], str]
    initial: str
    colors: dict[str, int]

    def __post_init__(self) -> None:
        object.__setattr__(self, "actions0", tuple(sorted(set(self.actions0), key=action_key)))
        object.__setattr__(self, "actions1", tuple(sorted(set(self.actions1), key=action_key)))
        if set(self.v0) & set(self.v1):
            raise ValueError("player state sets must be disjoint")
        if self.initial not in self.v0:
            raise ValueError("initial state must belong to player 0")
        for v in self.v0:
            for a in self.actions0:
                t = self.e0.get((v, a))
                if t is None or t not in set(self.v1):
                    raise ValueError(f"output move missing or non-alternating at ({v}, {set(a)})")
        for v in self.v1:
            for a in self.actions1:
                t = self.e1.get((v, a))
                if t is None or t not in set(self.v0):
                    raise ValueError(f"input move missing or non-alternating at ({v}, {set(a)})")
        for v in chain(self.v0, self.v1):
            if v not in self.colors:
                raise ValueError(f"state {v} has no color")

    @property
    def states(self) -> tuple[str, ...]:
        return self.v0 + self.v1

    def moves(self, v: str) -> list[tuple[Action, str]]:
        if v in set(self.v0):
            return [(a, self.e0[(v, a)]) for a in self.actions0]
        return [(a, self.e1[(v, a)]) for a in self.actions1]


class SafetyGame(ParityGame):
    """Parity game with colors in {0, 1} where color-1 states are absorbing."""

    def __post_init__(self) -> None:
        super().__post_init__()
        for v in self.states:
            if self.colors[v] not in (0, 1):
                raise ValueError(f"safety game color out of range at {v}")
        for v in self.states:
            if self.colors[v] == 1:
                for _, t in self.moves(v):
                    if self.colors[t] != 1:
                        raise ValueError(f"losing state {v} is not absorbing")


@dataclass(frozen=True)
class Solution:
    winning0: frozenset[str]
    winning1: frozenset[str]
    strategy0: dict[str, Action]
    strategy1: dict[str, Action]


# ---------------------------------------------------------------------------
# Arena construction
# ---------------------------------------------------------------------------


def _choice_name(state: str, action: Action) -> str:
    return f"{state}|{'+'.join(sorted(action)) or '-'}"


def _check_sides(inputs: Sequence[str], outputs: Sequence[str]) -> None:
    if len(inputs) > MAX_EXPLICIT_SUPPORT or len(outputs) > MAX_EXPLICIT_SUPPORT:
        raise BudgetExceededError(
            "explicit action alphabets over 16 propositions per side refused"
        )


def dpa_to_game(dpa: Dpa, inputs: Sequence[str], outputs: Sequence[str]) -> ParityGame:
    """Split every automaton step into an output move followed by an input
    move; the intermediate state remembers the pending output choice and
    carries its source's color."""
    _check_sides(inputs, outputs)
    missing = set(dpa.aps) - set(inputs) - set(outputs)
    if missing:
        raise ValueError(f"automaton propositions outside the alphabet: {sorted(missing)}")
    acts0 = all_actions(outputs)
    acts1 = all_actions(inputs)
    v0 = tuple(dpa.states)
    v1 = []
    e0: dict[tuple[str, Action], str] = {}
    e1: dict[tuple[str, Action], str] = {}
    colors: dict[str, int] = dict(dpa.colors)
    for q in dpa.states:
        for o in acts0:
            mid = _choice_name(q, o)
            v1.append(mid)
            e0[(q, o)] = mid
            colors[mid] = dpa.colors[q]
            for i in acts1:
                e1[(mid, i)] = dpa.step(q, o | i)
    return ParityGame(v0, tuple(v1), acts0, acts1, e0, e1, dpa.initial, colors)


def safety_automaton_to_game(
    aut: SafetyAutomaton, inputs: Sequence[str], outputs: Sequence[str]
) -> SafetyGame:
    """Same split as :func:`dpa_to_game`; the reject sink and its choice
    states get color 1, everything else color 0."""
    _check_sides(inputs, outputs)
    missing = set(aut.aps) - set(inputs) - set(outputs)
    if missing:
        raise ValueError(f"automaton propositions outside the alphabet: {sorted(missing)}")
    acts0 = all_actions(outputs)
    acts1 = all_actions(inputs)
    v0 = tuple(aut.states)
    v1 = []
    e0: dict[tuple[str, Action], str] = {}
    e1: dict[tuple[str, Action], str] = {}
    colors: dict[str, int] = {q: int(q == aut.reject) for q in aut.states}
    for q in aut.states:
        for o in acts0:
            mid = _choice_name(q, o)
            v1.append(mid)
            e0[(q, o)] = mid
            colors[mid] = colors[q]
            for i in acts1:
                e1[(mid, i)] = aut.step(q, o | i)
    return SafetyGame(v0, tuple(v1), acts0, acts1, e0, e1, aut.initial, colors)


# ---------------------------------------------------------------------------
# Graph-level solving (Zielonka)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GraphGame:
    """Ownership-labeled parity graph; the action-erased view of a game."""

    nodes: tuple[str, ...]
    owner: dict[str, int]
    color: dict[str, int]
    succs: dict[str, tuple[str, ...]]


def graph_of(game: ParityGame) -> GraphGame:
    owner = {v: 0 for v in game.v0} | {v: 1 for v in game.v1}
    succs = {}
    for v in game.states:
        seen: dict[str, None] = {}
        for _, t in game.moves(v):
            seen.setdefault(t)
        succs[v] = tuple(seen)
    return GraphGame(game.states, owner, dict(game.colors), succs)


def _attractor(
    g: GraphGame, region: frozenset[str], target: Iterable[str], player: int,
    preds: Mapping[str, Sequence[str]],
) -> tuple[frozenset[str], dict[str, str]]:
    """Player's attractor to the target within the region, with the move
    the player's attracted states use to approach the target.

    States are tagged with their attraction level (BFS round), and the
    strategy takes the first successor in preference order that strictly
    decreases the level.  Levels do not depend on state names, so the
    strategy is invariant under relabeling.
    """
    level = {t: 0 for t in sorted(target) if t in region}
    counts = {
        v: sum(1 for s in g.succs[v] if s in region)
        for v in region
        if g.owner[v] != player
    }
    queue = deque(sorted(level))
    while queue:
        w = queue.popleft()
        for v in preds.get(w, ()):
            if v not in region or v in level:
                continue
            if g.owner[v] == player:
                level[v] = level[w] + 1
                queue.append(v)
            else:
                counts[v] -= 1
                if counts[v] == 0:
                    level[v] = level[w] + 1
                    queue.append(v)
    strategy: dict[str, str] = {}
    for v, lv in level.items():
        if lv > 0 and g.owner[v] == player:
            for t in g.succs[v]:
                if level.get(t, -1) == lv - 1:
                    strategy[v] = t
                    break
    return frozenset(level), strategy


def _predecessors(g: GraphGame) -> dict[str, list[str]]:
    preds: dict[str, list[str]] = {v: [] for v in g.nodes}
    for v in g.nodes:
        for t in g.succs[v]:
            preds[t].append(v)
    for t in preds:
        preds[t].sort()
    return preds


def solve_graph(g: GraphGame) -> tuple[frozenset[str], frozenset[str], dict[str, str], dict[str, str]]:
    """Zielonka recursion; returns winning node sets and, per winning state
    of its owner, the successor the positional strategy moves to."""
    preds = _predecessors(g)

    def rec(region: frozenset[str]):
        if not region:
            return frozenset(), frozenset(), {}, {}
        d = max(g.color[v] for v in region)
        player = d % 2  # max-even parity: even top color favors player 0
        top = frozenset(v for v in region if g.color[v] == d)
        attr, attr_strat = _attractor(g, region, top, player, preds)
        w0a, w1a, s0a, s1a = rec(region - attr)
        win_opp = (w1a, w0a)[player]
        strat_own = (s0a, s1a)[player]
        strat_opp = (s1a, s0a)[player]
        if not win_opp:
            strategy = dict(strat_own)
            strategy.update(attr_strat)
            for v in top:
                if g.owner[v] == player and v not in strategy:
                    for t in g.succs[v]:
                        if t in region:
                            strategy[v] = t
                            break
            if player == 0:
                return frozenset(region), frozenset(), strategy, {}
            return frozenset(), frozenset(region), {}, strategy
        br, b_strat = _attractor(g, region, win_opp, 1 - player, preds)
        w0b, w1b, s0b, s1b = rec(region - br)
        opp_region = ((w1b, w0b)[player]) | br
        opp_strategy = dict((s1b, s0b)[player])
        opp_strategy.update(b_strat)
        opp_strategy.update(strat_opp)
        own_region = (w0b, w1b)[player]
        own_strategy = (s0b, s1b)[player]
        if player == 0:
            return own_region, frozenset(opp_region), own_strategy, opp_strategy
        return frozenset(opp_region), own_region, opp_strategy, own_strategy

    return rec(frozenset(g.nodes))


def _actions_for(game: ParityGame, v: str, target: str) -> Action:
    """Lexicographically smallest action moving from v to the target."""
    for a, t in game.moves(v):
        if t == target:
            return a
    raise ValueError(f"no action from {v} to {target}")


def solve_parity(game: ParityGame) -> Solution:
    """Winning regions and positional strategies under max-even parity.

    Among equally winning moves the strategy picks the lexicographically
    smallest action set, so solutions are reproducible.
    """
    g = graph_of(game)
    w0, w1, s0, s1 = solve_graph(g)
    v0set, v1set = set(game.v0), set(game.v1)
    strategy0 = {v: _actions_for(game, v, s0[v]) for v in s0 if v in v0set}
    strategy1 = {v: _actions_for(game, v, s1[v]) for v in s1 if v in v1set}
    # Zielonka leaves some winning top-color states without an explicit
    # choice only when they never needed one; fill deterministically.
    for v in game.v0:
        if v in w0 and v not in strategy0:
            for a, t in game.moves(v):
                if t in w0:
                    strategy0[v] = a
                    break
    for v in game.v1:
        if v in w1 and v not in strategy1:
            for a, t in game.moves(v):
                if t in w1:
                    strategy1[v] = a
                    break
    return Solution(w0, w1, strategy0, strategy1)


def solve_safety(game: SafetyGame) -> Solution:
    """Linear-time safety solving: player 1 wins exactly its attractor of
    the color-1 states; player 0 wins the complement by staying inside it."""
    g = graph_of(game)
    preds = _predecessors(g)
    losing = [v for v in g.nodes if g.color[v] == 1]
    w1, s1_graph = _attractor(g, frozenset(g.nodes), losing, 1, preds)
    w0 = frozenset(v for v in g.nodes if v not in w1)
    strategy0: dict[str, Action] = {}
    for v in game.v0:
        if v in w0:
            for a, t in game.moves(v):
                if t in w0:
                    strategy0[v] = a
                    break
    strategy1: dict[str, Action] = {}
    for v in game.v1:
        if v in w1:
            target = s1_graph.get(v)
            if target is None:
                for a, t in game.moves(v):
                    if t in w1:
                        strategy1[v] = a
                        break
            else:
                strategy1[v] = _actions_for(game, v, target)
    return Solution(w0, w1, strategy0, strategy1)


def render_solution(solution: Solution) -> str:
    """Deterministic text form of a solution, for reports and goldens."""
    lines = [
        "W0: " + " ".join(sorted(solution.winning0)),
        "W1: " + " ".join(sorted(solution.winning1)),
    ]
    for owner, strategy in (("S0", solution.strategy0), ("S1", solution.strategy1)):
        for v in sorted(strategy):
            action = "+".join(sorted(strategy[v])) or "-"
            lines.append(f"{owner} {v} -> {action}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Winning-region restriction and products
# ---------------------------------------------------------------------------

TRAP0 = "trap0"
TRAP1 = "trap1"


def restrict_to_winning_region(game: SafetyGame, solution: Solution) -> SafetyGame:
    """Arena restricted to player 0's winning region; moves that would
    leave it are redirected to a fresh absorbing losing pair, keeping the
    game total."""
    if game.initial not in solution.winning0:
        raise UnrealizableError("initial state is losing; nothing to restrict to")
    w0 = solution.winning0
    v0 = tuple(v for v in game.v0 if v in w0) + (TRAP0,)
    v1 = tuple(v for v in game.v1 if v in w0) + (TRAP1,)
    e0: dict[tuple[str, Action], str] = {}
    e1: dict[tuple[str, Action], str] = {}
    colors = {v: game.colors[v] for v in chain(v0[:-1], v1[:-1])}
    colors[TRAP0] = 1
    colors[TRAP1] = 1
    for v in v0[:-1]:
        for a in game.actions0:
            t = game.e0[(v, a)]
            e0[(v, a)] = t if t in w0 else TRAP1
    for v in v1[:-1]:
        for a in game.actions1:
            t = game.e1[(v, a)]
            e1[(v, a)] = t if t in w0 else TRAP0
    for a in game.actions0:
        e0[(TRAP0, a)] = TRAP1
    for a in game.actions1:
        e1[(TRAP1, a)] = TRAP0
    return SafetyGame(
        v0, v1, game.actions0, game.actions1, e0, e1, game.initial, colors
    )


def game_product(g1: SafetyGame, g2: SafetyGame) -> SafetyGame:
    """Synchronous product over shared action alphabets; a pair is losing
    iff either component is."""
    if g1.actions0 != g2.actions0 or g1.actions1 != g2.actions1:
        raise ValueError("games must share their action alphabets")

    def name(a: str, b: str) -> str:
        return f"{a}*{b}"

    initial = name(g1.initial, g2.initial)
    v0: list[str] = []
    v1: list[str] = []
    e0: dict[tuple[str, Action], str] = {}
    e1: dict[tuple[str, Action], str] = {}
    colors: dict[str, int] = {}
    seen = {(g1.initial, g2.initial)}
    queue = [(g1.initial, g2.initial)]
    v0set1 = set(g1.v0)
    while queue:
        a, b = queue.pop(0)
        s = name(a, b)
        colors[s] = max(g1.colors[a], g2.colors[b])
        if a in v0set1:
            v0.append(s)
            for act in g1.actions0:
                ta, tb = g1.e0[(a, act)], g2.e0[(b, act)]
                e0[(s, act)] = name(ta, tb)
                if (ta, tb) not in seen:
                    seen.add((ta, tb))
                    queue.append((ta, tb))
        else:
            v1.append(s)
            for act in g1.actions1:
                ta, tb = g1.e1[(a, act)], g2.e1[(b, act)]
                e1[(s, act)] = name(ta, tb)
                if (ta, tb) not in seen:
                    seen.add((ta, tb))
                    queue.append((ta, tb))
    return SafetyGame(
        tuple(v0), tuple(v1), g1.actions0, g1.actions1, e0, e1, initial, colors
    )


# ---------------------------------------------------------------------------
# PGSolver format
# ---------------------------------------------------------------------------


def export_pgsolver(game: ParityGame) -> str:
    """PGSolver text form; player-0 states get even node ids, player-1
    states odd ids, both in arena order."""
    ids: dict[str, int] = {}
    for k, v in enumerate(game.v0):
        ids[v] = 2 * k
    for k, v in enumerate(game.v1):
        ids[v] = 2 * k + 1
    lines = [f"parity {max(ids.values())};"]
    for v in sorted(ids, key=ids.get):
        succ = sorted({ids[t] for _, t in game.moves(v)})
        owner = 0 if v in set(game.v0) else 1
        succ_text = ",".join(str(s) for s in succ)
        lines.append(f'{ids[v]} {game.colors[v]} {owner} {succ_text} "{v}";')
    return "\n".join(lines) + "\n"


def import_pgsolver(text: str) -> tuple[GraphGame, dict[str, str]]:
    """Parse the PGSolver format into a graph game plus the node labels
    (actions are not part of the format, so only graph-level solving
    applies to imported games)."""
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("parity"):
        raise ValueError("missing 'parity <maxId>;' header")
    owner: dict[str, int] = {}
    color: dict[str, int] = {}
    succs: dict[str, tuple[str, ...]] = {}
    labels: dict[str, str] = {}
    order: list[str] = []
    for ln in lines[1:]:
        body = ln.rstrip(";").strip()
        label = ""
        if '"' in body:
            body, _, rest = body.partition('"')
            label = rest.rstrip('"')
        parts = body.split()
        if len(parts) != 4:
            raise ValueError(f"malformed node line: {ln!r}")
        node, col, own, succ_text = parts
        if own not in ("0", "1"):
            raise ValueError(f"owner must be 0 or 1 in line: {ln!r}")
        owner[node] = int(own)
        color[node] = int(col)
        succs[node] = tuple(succ_text.split(","))
        labels[node] = label
        order.append(node)
    for v, ts in succs.items():
        for t in ts:
            if t not in owner:
                raise ValueError(f"successor {t} of node {v} is undeclared")
    return GraphGame(tuple(order), owner, color, succs), labels
