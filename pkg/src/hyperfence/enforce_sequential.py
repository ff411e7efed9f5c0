"""Sequential-model enforcement: traces arrive one session at a time.

Each session is enforced against the finished history: the property is
re-instantiated with copy n live and copies 1..n-1 pinned to their
recorded traces, the resulting single-copy game is solved, and the
session runs under the parallel module's monitor.  Finished traces are
immutable; a fresh session may turn out unrealizable because the history
already rules out every continuation.

Dead copies make no moves of their own: their propositions are
partially evaluated into the automaton (the game tracks only the live
copy), which is equivalent to conjoining the usual LTL trace encodings
but keeps the arena small.

For syntactic-safety properties a fast path avoids rebuilding the whole
conjunction: only the conjuncts that mention the new copy are turned
into a game, and the previous session's game — restricted to its winning
region — is reused as a product factor.  Both paths answer alike; the
generic build doubles as the oracle for that claim.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Iterable, Sequence

from .automata import (
    SafetyAutomaton,
    ltl_to_dpa,
    product_automaton,
    restrict_dpa_to_word,
    restrict_safety_to_word,
    safety_ltl_to_safety_automaton,
)
from .compose import (
    DEFAULT_NODE_BUDGET,
    FiniteTrace,
    encode_finished_session,
    index_tuples,
    indexed_name,
)
from .enforce_parallel import (
    EnforcerSession,
    drive,
    harden_for_session_end,
    stop_safe_dpa_states,
    stop_safe_safety_states,
)
from .errors import BudgetExceededError, SessionOrderError, UnrealizableError
from .games import (
    ParityGame,
    SafetyGame,
    Solution,
    dpa_to_game,
    game_product,
    restrict_to_winning_region,
    safety_automaton_to_game,
    solve_parity,
    solve_safety,
)
from .logic import (
    END_PROP,
    Atom,
    Formula,
    HyperSpec,
    LassoWord,
    classify_syntactic_safety,
    conj,
    formula_size,
    map_atoms,
    simplify,
)
from . import streams


class SequentialState:
    """History accumulated across sessions, plus the recycled game."""

    def __init__(self, spec: HyperSpec) -> None:
        self.spec = spec
        self.history: list[FiniteTrace] = []
        self.safety = classify_syntactic_safety(spec.body)
        self.recycled: SafetyGame | None = None

    @property
    def session_index(self) -> int:
        return len(self.history) + 1

    def history_formula(self) -> Formula:
        """Conjunction pinning every finished copy to its recorded trace."""
        return conj(
            encode_finished_session(t, j)
            for j, t in enumerate(self.history, start=1)
        )


@dataclass(frozen=True)
class SessionOutcome:
    """One closed session: whether it ran untouched, what was emitted, and
    where the first correction happened."""

    ok: bool
    trace: FiniteTrace
    intervention: int | None


@dataclass(frozen=True)
class SessionReport:
    index: int
    init_seconds: float
    steps: int | None = None
    interventions: int | None = None
    first_intervention: int | None = None
    enforce_seconds: float | None = None
    error: str | None = None


def _session_conjunct(
    spec: HyperSpec, combo: tuple[int, ...], live: int
) -> Formula:
    """Body instance for one copy-index tuple: the live copy keeps bare
    proposition names, finished copies get indexed ones."""
    assignment = dict(zip(spec.variables, combo))

    def fn(a: Atom) -> Formula:
        if not isinstance(a.ref, str):
            return a
        idx = assignment[a.ref]
        if idx == live:
            return Atom(a.name)
        return Atom(indexed_name(a.name, idx))

    return map_atoms(spec.body, fn)


def _dead_word(trace: FiniteTrace, idx: int) -> LassoWord:
    """The recorded trace of copy ``idx`` as an indexed lasso: its events,
    then the end marker forever."""
    stem = tuple(
        frozenset(indexed_name(p, idx) for p in ev) for ev in trace.events
    )
    loop = (frozenset({indexed_name(END_PROP, idx)}),)
    return LassoWord(stem, loop)


def _fixed_props(spec: HyperSpec, idx: int) -> frozenset[str]:
    return frozenset(indexed_name(p, idx) for p in spec.alphabet.props)


def _check_budget(spec: HyperSpec, n: int, budget: int) -> None:
    combos = n**spec.k
    estimated = combos * formula_size(spec.body) + (combos - 1)
    if estimated > budget:
        raise BudgetExceededError(
            f"self-composition too large: {estimated} nodes exceed the budget of {budget}"
        )


def _wrap_session(
    spec: HyperSpec, game: ParityGame, solution: Solution, hand_back: bool
) -> EnforcerSession:
    out_maps = ({p: p for p in spec.alphabet.declared_outputs},)
    in_maps = ({p: p for p in spec.alphabet.inputs},)
    return EnforcerSession(game, solution, spec.alphabet, out_maps, in_maps, hand_back)


def _generic_session_game(
    spec: HyperSpec, history: Sequence[FiniteTrace], budget: int
) -> tuple[ParityGame, Solution]:
    """Full rebuild: every copy-index tuple, finished copies evaluated away."""
    n = len(history) + 1
    _check_budget(spec, n, budget)
    body = conj(_session_conjunct(spec, c, n) for c in index_tuples(n, spec.k))
    dpa = ltl_to_dpa(simplify(body))
    for j, trace in enumerate(history, start=1):
        dpa = restrict_dpa_to_word(dpa, _dead_word(trace, j), _fixed_props(spec, j))
    game = dpa_to_game(
        dpa, spec.alphabet.inputs, spec.alphabet.declared_outputs
    )
    game = harden_for_session_end(game, stop_safe_dpa_states(dpa))
    return game, solve_parity(game)


def _safety_session_game(
    state: SequentialState, budget: int
) -> tuple[SafetyGame, Solution]:
    """Fast path: only the conjuncts mentioning the new copy become a game;
    the previous session's winning-region restriction joins as a product
    factor.

    Each conjunct gets its own small automaton and is partially evaluated
    against the finished traces it mentions before the automata are
    multiplied out; the products stay small because the evaluated pieces
    read only the live copy's propositions.
    """
    spec = state.spec
    n = state.session_index
    _check_budget(spec, n, budget)
    aut: SafetyAutomaton | None = None
    for combo in index_tuples(n, spec.k):
        if n not in combo:
            continue
        piece = safety_ltl_to_safety_automaton(_session_conjunct(spec, combo, n))
        for j in sorted(set(combo) - {n}):
            piece = restrict_safety_to_word(
                piece, _dead_word(state.history[j - 1], j), _fixed_props(spec, j)
            )
        aut = piece if aut is None else product_automaton(aut, piece)
    assert aut is not None
    game = safety_automaton_to_game(
        aut, spec.alphabet.inputs, spec.alphabet.declared_outputs
    )
    game = harden_for_session_end(game, stop_safe_safety_states(aut))
    if state.recycled is not None:
        game = game_product(state.recycled, game)
    return game, solve_safety(game)


def start_session(
    state: SequentialState,
    *,
    hand_back: bool = False,
    budget: int = DEFAULT_NODE_BUDGET,
) -> EnforcerSession:
    """Build and solve the game for the next session over the recorded
    history; raises UnrealizableError when the history already rules out
    every continuation."""
    if state.safety:
        game, solution = _safety_session_game(state, budget)
    else:
        game, solution = _generic_session_game(state.spec, state.history, budget)
    if game.initial not in solution.winning0:
        raise UnrealizableError("unrealizable for next session")
    return _wrap_session(state.spec, game, solution, hand_back)


def monolithic_session(
    spec: HyperSpec,
    history: Sequence[FiniteTrace],
    *,
    hand_back: bool = False,
    budget: int = DEFAULT_NODE_BUDGET,
) -> EnforcerSession:
    """Session built by the full rebuild regardless of the property class;
    the reference point for the fast path."""
    game, solution = _generic_session_game(spec, history, budget)
    if game.initial not in solution.winning0:
        raise UnrealizableError("unrealizable for next session")
    return _wrap_session(spec, game, solution, hand_back)


def close_session(
    state: SequentialState, session: EnforcerSession, trace: FiniteTrace
) -> SessionOutcome:
    """Fold the emitted trace into the history; on the safety path, keep
    the session game restricted to its winning region for recycling."""
    if session.awaiting_inputs:
        raise SessionOrderError("cannot close a session between outputs and inputs")
    outcome = SessionOutcome(
        session.interventions == 0, trace, session.first_intervention
    )
    state.history.append(trace)
    if state.safety:
        assert isinstance(session.game, SafetyGame)
        state.recycled = restrict_to_winning_region(session.game, session.solution)
    return outcome


def split_sessions(lines: Iterable[str]) -> list[list[str]]:
    """Split a line stream on the session sentinel; the empty stream is one
    empty session, and a trailing sentinel opens another empty one."""
    sessions: list[list[str]] = [[]]
    for line in lines:
        if line.strip() == streams.NEWSESSION:
            sessions.append([])
        else:
            sessions[-1].append(line)
    return sessions


def run_sequential(
    spec: HyperSpec,
    session_streams: Sequence[Iterable[str]],
    *,
    hand_back: bool = False,
    budget: int = DEFAULT_NODE_BUDGET,
) -> tuple[list[SessionOutcome], list[str], list[SessionReport]]:
    """Enforce a list of session streams in order.

    Returns the closed sessions' outcomes, the echoed protocol lines
    (session sentinels preserved), and one report per attempted session.
    An unrealizable session is reported and processing stops there.
    """
    state = SequentialState(spec)
    outcomes: list[SessionOutcome] = []
    echoed: list[str] = []
    reports: list[SessionReport] = []
    for k, lines in enumerate(session_streams, start=1):
        if k > 1:
            echoed.append(streams.NEWSESSION)
        t0 = time.perf_counter()
        try:
            session = start_session(state, hand_back=hand_back, budget=budget)
        except UnrealizableError as exc:
            reports.append(
                SessionReport(
                    index=k, init_seconds=time.perf_counter() - t0, error=str(exc)
                )
            )
            break
        t1 = time.perf_counter()
        items = list(streams.parse_stream(lines, 1))
        t2 = time.perf_counter()
        traces, lines_out = drive(session, items)
        t3 = time.perf_counter()
        echoed.extend(lines_out)
        outcomes.append(close_session(state, session, traces[0]))
        reports.append(
            SessionReport(
                index=k,
                init_seconds=t1 - t0,
                steps=session.steps,
                interventions=session.interventions,
                first_intervention=session.first_intervention,
                enforce_seconds=t3 - t2,
            )
        )
    return outcomes, echoed, reports
