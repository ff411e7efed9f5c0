"""Parallel-model enforcement: all trace copies advance in lock step.

The composed specification becomes a deterministic parity automaton, the
automaton becomes an alternating game, and the solved game drives a
monitor: output moves proposed by the system are committed only while
they stay inside player 0's winning region; the first violating move
switches the session to enforcing mode, where the positional winning
strategy chooses the outputs instead.

A stream may end at any step boundary, and finished traces are padded
with end-only events for verdict checking.  The game therefore treats
automaton states whose padded continuation is rejected as losing: the
environment can always force that outcome by ending the stream.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, replace
from typing import AbstractSet, Iterable, Sequence

from .automata import Dpa, SafetyAutomaton, dpa_accepts_lasso, ltl_to_dpa
from .compose import DEFAULT_NODE_BUDGET, FiniteTrace, indexed_name, self_compose
from .errors import AlphabetError, SessionOrderError, StreamFormatError, UnrealizableError
from .games import ParityGame, SafetyGame, Solution, dpa_to_game, solve_parity
from .logic import Alphabet, HyperSpec, LassoWord, simplify
from . import streams

MONITORING = "monitoring"
ENFORCING = "enforcing"

HALT0 = "halt0"
HALT1 = "halt1"


@dataclass(frozen=True)
class Verdict:
    """Outcome of one monitored output move: the committed per-copy output
    sets, and whether they came from the enforcer rather than the system."""

    took_over: bool
    outputs: tuple[frozenset[str], ...]


@dataclass(frozen=True)
class RunStats:
    steps: int
    interventions: int
    first_intervention: int | None
    init_seconds: float
    enforce_seconds: float


def stop_safe_dpa_states(dpa: Dpa) -> frozenset[str]:
    """States whose run over the all-empty padding word is accepting.

    Padding events carry only the reserved end marker, which composed
    formulas never mention, so the padded future reads as empty letters.
    """
    pad = LassoWord((), (frozenset(),))
    return frozenset(
        q for q in dpa.states if dpa_accepts_lasso(replace(dpa, initial=q), pad)
    )


def stop_safe_safety_states(aut: SafetyAutomaton) -> frozenset[str]:
    """States from which the all-empty padding word never hits reject."""
    safe = set()
    for q in aut.states:
        cur = q
        visited: set[str] = set()
        while cur not in visited and cur != aut.reject:
            visited.add(cur)
            cur = aut.step(cur, frozenset())
        if cur != aut.reject:
            safe.add(q)
    return frozenset(safe)


def harden_for_session_end(game: ParityGame, stop_safe: AbstractSet[str]) -> ParityGame:
    """Make every stop-unsafe P0 state losing.

    The environment may end the session at any step boundary; reaching a
    boundary whose padded continuation violates the specification already
    forfeits the play, so such states get absorbing losing moves.
    """
    unsafe = [q for q in game.v0 if q not in stop_safe]
    if not unsafe:
        return game
    is_safety = isinstance(game, SafetyGame)
    v0 = game.v0 + (HALT0,)
    v1 = game.v1 + (HALT1,)
    e0 = dict(game.e0)
    e1 = dict(game.e1)
    colors = dict(game.colors)
    colors[HALT0] = 1
    colors[HALT1] = 1
    for q in unsafe:
        for a in game.actions0:
            e0[(q, a)] = HALT1
        if is_safety:
            colors[q] = 1
    for a in game.actions0:
        e0[(HALT0, a)] = HALT1
    for a in game.actions1:
        e1[(HALT1, a)] = HALT0
    return type(game)(
        v0, v1, game.actions0, game.actions1, e0, e1, game.initial, colors
    )


class EnforcerSession:
    """One monitored run over a solved game.

    The protocol alternates strictly: one output move, then one input
    move.  Sessions sharing a game and solution are independent; the
    shared parts are immutable.
    """

    def __init__(
        self,
        game: ParityGame,
        solution: Solution,
        alphabet: Alphabet,
        out_maps: tuple[dict[str, str], ...],
        in_maps: tuple[dict[str, str], ...],
        hand_back: bool = False,
    ) -> None:
        self.game = game
        self.solution = solution
        self.alphabet = alphabet
        self.out_maps = out_maps
        self.in_maps = in_maps
        self.hand_back = hand_back
        self.mode = MONITORING
        self.lastq = game.initial
        self.steps = 0
        self.interventions = 0
        self.first_intervention: int | None = None
        self._awaiting_inputs = False

    @property
    def n(self) -> int:
        return len(self.out_maps)

    @property
    def awaiting_inputs(self) -> bool:
        return self._awaiting_inputs

    def fresh(self) -> "EnforcerSession":
        """New session over the same solved game."""
        return EnforcerSession(
            self.game, self.solution, self.alphabet,
            self.out_maps, self.in_maps, self.hand_back,
        )

    def _encode(
        self,
        sets: Sequence[AbstractSet[str]],
        maps: tuple[dict[str, str], ...],
        side: str,
    ) -> frozenset[str]:
        if len(sets) != len(maps):
            raise StreamFormatError(
                f"expected {len(maps)} event set(s), got {len(sets)}"
            )
        letter = set()
        for copy_map, s in zip(maps, sets):
            for p in s:
                arena = copy_map.get(p)
                if arena is None:
                    raise AlphabetError(f"{p!r} is not a declared {side} proposition")
                letter.add(arena)
        return frozenset(letter)

    def _decode_outputs(self, action: frozenset[str]) -> tuple[frozenset[str], ...]:
        return tuple(
            frozenset(p for p, arena in copy_map.items() if arena in action)
            for copy_map in self.out_maps
        )

    def observe_outputs(self, outputs: Sequence[AbstractSet[str]]) -> Verdict:
        if self._awaiting_inputs:
            raise SessionOrderError("expected inputs for the current step")
        if self.mode == ENFORCING:
            raise SessionOrderError(
                "session is enforcing; outputs come from enforce_step"
            )
        action = self._encode(outputs, self.out_maps, "output")
        target = self.game.e0[(self.lastq, action)]
        self._awaiting_inputs = True
        if target in self.solution.winning0:
            self.lastq = target
            return Verdict(False, tuple(frozenset(s) for s in outputs))
        # the proposed move leaves the winning region: discard and override
        if self.first_intervention is None:
            self.first_intervention = self.steps
        self.interventions += 1
        if not self.hand_back:
            self.mode = ENFORCING
        corrected = self.solution.strategy0[self.lastq]
        self.lastq = self.game.e0[(self.lastq, corrected)]
        return Verdict(True, self._decode_outputs(corrected))

    def enforce_step(self) -> tuple[frozenset[str], ...]:
        if self._awaiting_inputs:
            raise SessionOrderError("expected inputs for the current step")
        if self.mode != ENFORCING:
            raise SessionOrderError(
                "session is monitoring; outputs go to observe_outputs"
            )
        action = self.solution.strategy0[self.lastq]
        self.lastq = self.game.e0[(self.lastq, action)]
        self._awaiting_inputs = True
        return self._decode_outputs(action)

    def observe_inputs(self, inputs: Sequence[AbstractSet[str]]) -> None:
        if not self._awaiting_inputs:
            raise SessionOrderError("expected outputs for the current step")
        action = self._encode(inputs, self.in_maps, "input")
        self.lastq = self.game.e1[(self.lastq, action)]
        self._awaiting_inputs = False
        self.steps += 1
        # environment moves cannot leave the winning region
        assert self.lastq in self.solution.winning0


def initialize(
    spec: HyperSpec,
    n: int,
    *,
    hand_back: bool = False,
    budget: int = DEFAULT_NODE_BUDGET,
) -> EnforcerSession:
    """Compose the specification over n copies, solve the game, and open a
    session; raises UnrealizableError when no winning strategy exists."""
    if n < 1:
        raise ValueError("need at least one parallel trace")
    composed = simplify(self_compose(spec, n, budget))
    dpa = ltl_to_dpa(composed)
    ins = [indexed_name(p, k) for k in range(1, n + 1) for p in spec.alphabet.inputs]
    outs = [
        indexed_name(p, k)
        for k in range(1, n + 1)
        for p in spec.alphabet.declared_outputs
    ]
    game = dpa_to_game(dpa, ins, outs)
    game = harden_for_session_end(game, stop_safe_dpa_states(dpa))
    solution = solve_parity(game)
    if game.initial not in solution.winning0:
        raise UnrealizableError(
            f"specification is unrealizable for {n} parallel trace(s)"
        )
    out_maps = tuple(
        {p: indexed_name(p, k) for p in spec.alphabet.declared_outputs}
        for k in range(1, n + 1)
    )
    in_maps = tuple(
        {p: indexed_name(p, k) for p in spec.alphabet.inputs}
        for k in range(1, n + 1)
    )
    return EnforcerSession(game, solution, spec.alphabet, out_maps, in_maps, hand_back)


def drive(
    session: EnforcerSession, items: Iterable[streams.StreamItem]
) -> tuple[tuple[FiniteTrace, ...], list[str]]:
    """Feed parsed stream items through a session.

    Returns the emitted per-copy traces and the echoed protocol lines
    (corrected output lines carry the enforced marker).
    """
    emitted: list[list[frozenset[str]]] = [[] for _ in range(session.n)]
    echoed: list[str] = []
    pending: tuple[frozenset[str], ...] | None = None
    for item in items:
        if item.kind == "newsession":
            raise StreamFormatError(
                f"line {item.line_no}: unexpected {streams.NEWSESSION} marker"
            )
        if item.kind == "outputs":
            if pending is not None:
                raise StreamFormatError(
                    f"line {item.line_no}: expected an 'I:' line"
                )
            if session.mode == ENFORCING:
                outs = session.enforce_step()
                echoed.append(streams.format_output_line(outs, enforced=True))
            else:
                verdict = session.observe_outputs(item.sets)
                outs = verdict.outputs
                echoed.append(
                    streams.format_output_line(outs, enforced=verdict.took_over)
                )
            pending = outs
        else:
            if pending is None:
                raise StreamFormatError(
                    f"line {item.line_no}: 'I:' line without a preceding 'O:' line"
                )
            session.observe_inputs(item.sets)
            echoed.append(streams.format_input_line(item.sets))
            for k in range(session.n):
                emitted[k].append(pending[k] | item.sets[k])
            pending = None
    if pending is not None:
        raise StreamFormatError("stream ended between an output line and its inputs")
    traces = tuple(
        FiniteTrace(session.alphabet, tuple(events)) for events in emitted
    )
    return traces, echoed


def run_stream(
    spec: HyperSpec,
    n: int,
    lines: Iterable[str],
    *,
    hand_back: bool = False,
    budget: int = DEFAULT_NODE_BUDGET,
) -> tuple[tuple[FiniteTrace, ...], list[str], RunStats]:
    """Build the game, then enforce one parallel run from a text stream."""
    t0 = time.perf_counter()
    session = initialize(spec, n, hand_back=hand_back, budget=budget)
    t1 = time.perf_counter()
    items = list(streams.parse_stream(lines, n))
    t2 = time.perf_counter()
    traces, echoed = drive(session, items)
    t3 = time.perf_counter()
    stats = RunStats(
        steps=session.steps,
        interventions=session.interventions,
        first_intervention=session.first_intervention,
        init_seconds=t1 - t0,
        enforce_seconds=t3 - t2,
    )
    return traces, echoed, stats
