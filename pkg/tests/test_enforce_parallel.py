"""Tests for lock-step enforcement over multiple parallel traces."""

from __future__ import annotations

import random

import pytest

from hyperfence import streams
from hyperfence.enforce_parallel import (
    ENFORCING,
    MONITORING,
    drive,
    initialize,
    run_stream,
)
from hyperfence.errors import (
    AlphabetError,
    SessionOrderError,
    StreamFormatError,
    UnrealizableError,
)
from hyperfence.logic import Alphabet, evaluate_hyperltl, parse_hyperltl

OD_TEXT = "forall p1. forall p2. (o[p1] <-> o[p2]) W !(i[p1] <-> i[p2])"


def od_spec():
    return parse_hyperltl(OD_TEXT, Alphabet.make(["i"], ["o"]))


def od_holds_pairwise(traces) -> bool:
    """Independent scan: outputs must agree pairwise strictly before the
    first step whose inputs differ."""
    for a in traces:
        for b in traces:
            for ea, eb in zip(a.events, b.events):
                if ("i" in ea) != ("i" in eb):
                    break
                if ("o" in ea) != ("o" in eb):
                    return False
    return True


def random_lines(rng: random.Random, n: int, length: int) -> list[str]:
    lines = []
    for _ in range(length):
        outs = [
            frozenset(["o"]) if rng.random() < 0.5 else frozenset()
            for _ in range(n)
        ]
        ins = [
            frozenset(["i"]) if rng.random() < 0.5 else frozenset()
            for _ in range(n)
        ]
        lines.append(streams.format_output_line(outs))
        lines.append(streams.format_input_line(ins))
    return lines


def clean_od_lines(rng: random.Random, n: int, length: int) -> list[str]:
    """Streams that keep outputs equal across copies are always compliant."""
    lines = []
    for _ in range(length):
        out = frozenset(["o"]) if rng.random() < 0.5 else frozenset()
        ins = [
            frozenset(["i"]) if rng.random() < 0.5 else frozenset()
            for _ in range(n)
        ]
        lines.append(streams.format_output_line([out] * n))
        lines.append(streams.format_input_line(ins))
    return lines


# ---------------------------------------------------------------------------
# Initialization and realizability


def test_initialize_od2_realizable():
    session = initialize(od_spec(), 2)
    assert session.game.initial in session.solution.winning0
    assert session.mode == MONITORING
    assert session.n == 2
    assert session.steps == 0


def test_initialize_rejects_nonpositive_n():
    with pytest.raises(ValueError):
        initialize(od_spec(), 0)


@pytest.mark.parametrize(
    "text",
    [
        "forall p1. (o[p1] & !o[p1])",
        "forall p1. G (o[p1] <-> i[p1])",  # outputs commit before inputs arrive
        "forall p1. F o[p1]",  # the stream may end before any output
    ],
)
def test_unrealizable_specs(text):
    spec = parse_hyperltl(text, Alphabet.make(["i"], ["o"]))
    with pytest.raises(UnrealizableError):
        initialize(spec, 1)


def test_response_spec_realizable_and_always_answers():
    spec = parse_hyperltl("forall p1. G (i[p1] -> F o[p1])", Alphabet.make(["i"], ["o"]))
    lines = ["O: -", "I: i", "O: -", "I: -"]
    traces, echoed, stats = run_stream(spec, 1, lines)
    # waiting is losing: an input could arrive and the stream end unanswered
    assert echoed[0].endswith(streams.ENFORCED_FLAG)
    assert all("o" in e for e in traces[0].events)
    word = traces[0].lift()
    assert evaluate_hyperltl(spec, (word,))


# ---------------------------------------------------------------------------
# Step-by-step verdicts


def test_agreeing_outputs_pass():
    session = initialize(od_spec(), 2)
    verdict = session.observe_outputs([frozenset(["o"]), frozenset(["o"])])
    assert not verdict.took_over
    assert verdict.outputs == (frozenset(["o"]), frozenset(["o"]))
    session.observe_inputs([frozenset(), frozenset()])
    assert session.steps == 1
    assert session.interventions == 0


def test_diverging_outputs_trigger_takeover():
    session = initialize(od_spec(), 2)
    verdict = session.observe_outputs([frozenset(["o"]), frozenset()])
    assert verdict.took_over
    assert verdict.outputs[0] == verdict.outputs[1]
    assert session.mode == ENFORCING
    assert session.interventions == 1
    assert session.first_intervention == 0


def test_post_divergence_outputs_are_free():
    session = initialize(od_spec(), 2)
    session.observe_outputs([frozenset(), frozenset()])
    session.observe_inputs([frozenset(["i"]), frozenset()])  # inputs diverge
    verdict = session.observe_outputs([frozenset(["o"]), frozenset()])
    assert not verdict.took_over
    assert session.interventions == 0


def test_enforcing_mode_is_sticky():
    session = initialize(od_spec(), 2)
    session.observe_outputs([frozenset(["o"]), frozenset()])
    session.observe_inputs([frozenset(), frozenset()])
    assert session.mode == ENFORCING
    outs = session.enforce_step()
    assert outs[0] == outs[1]
    session.observe_inputs([frozenset(["i"]), frozenset(["i"])])
    assert session.mode == ENFORCING


def test_hand_back_returns_control_to_compliant_system():
    session = initialize(od_spec(), 2, hand_back=True)
    verdict = session.observe_outputs([frozenset(["o"]), frozenset()])
    assert verdict.took_over
    assert session.mode == MONITORING
    session.observe_inputs([frozenset(), frozenset()])
    verdict = session.observe_outputs([frozenset(["o"]), frozenset(["o"])])
    assert not verdict.took_over
    assert session.interventions == 1


def test_state_stays_in_winning_region(seed=13):
    rng = random.Random(seed)
    session = initialize(od_spec(), 2)
    for _ in range(40):
        outs = [
            frozenset(["o"]) if rng.random() < 0.5 else frozenset()
            for _ in range(2)
        ]
        if session.mode == ENFORCING:
            session.enforce_step()
        else:
            session.observe_outputs(outs)
        assert session.lastq in session.solution.winning0
        ins = [
            frozenset(["i"]) if rng.random() < 0.5 else frozenset()
            for _ in range(2)
        ]
        session.observe_inputs(ins)
        assert session.lastq in session.solution.winning0


# ---------------------------------------------------------------------------
# Protocol-order and alphabet errors


def test_outputs_twice_is_an_order_error():
    session = initialize(od_spec(), 2)
    session.observe_outputs([frozenset(), frozenset()])
    with pytest.raises(SessionOrderError):
        session.observe_outputs([frozenset(), frozenset()])


def test_inputs_first_is_an_order_error():
    session = initialize(od_spec(), 2)
    with pytest.raises(SessionOrderError):
        session.observe_inputs([frozenset(), frozenset()])


def test_observe_outputs_rejected_while_enforcing():
    session = initialize(od_spec(), 2)
    session.observe_outputs([frozenset(["o"]), frozenset()])
    session.observe_inputs([frozenset(), frozenset()])
    with pytest.raises(SessionOrderError):
        session.observe_outputs([frozenset(), frozenset()])


def test_enforce_step_rejected_while_monitoring():
    session = initialize(od_spec(), 2)
    with pytest.raises(SessionOrderError):
        session.enforce_step()


def test_unknown_output_proposition():
    session = initialize(od_spec(), 2)
    with pytest.raises(AlphabetError):
        session.observe_outputs([frozenset(["x"]), frozenset()])


def test_unknown_input_proposition():
    session = initialize(od_spec(), 2)
    session.observe_outputs([frozenset(), frozenset()])
    with pytest.raises(AlphabetError):
        session.observe_inputs([frozenset(["o"]), frozenset()])


def test_end_marker_is_not_emittable():
    session = initialize(od_spec(), 2)
    with pytest.raises(AlphabetError):
        session.observe_outputs([frozenset(["end"]), frozenset()])


def test_wrong_copy_count_rejected():
    session = initialize(od_spec(), 2)
    with pytest.raises(StreamFormatError):
        session.observe_outputs([frozenset()])


# ---------------------------------------------------------------------------
# Stream driving


def test_clean_stream_echoes_byte_identically(seed=20260816):
    rng = random.Random(seed)
    spec = od_spec()
    for _ in range(25):
        lines = clean_od_lines(rng, 2, rng.randint(0, 8))
        traces, echoed, stats = run_stream(spec, 2, lines)
        assert echoed == lines
        assert stats.interventions == 0
        assert stats.first_intervention is None


def test_random_streams_emit_compliant_traces(seed=424):
    rng = random.Random(seed)
    spec = od_spec()
    session = initialize(spec, 2)
    for _ in range(30):
        lines = random_lines(rng, 2, rng.randint(1, 8))
        run = session.fresh()
        traces, echoed = drive(run, list(streams.parse_stream(lines, 2)))
        assert od_holds_pairwise(traces)
        words = tuple(t.lift() for t in traces)
        assert evaluate_hyperltl(spec, words)


def test_corrected_lines_carry_the_enforced_flag():
    lines = ["O: o|-", "I: i|i", "O: o|o", "I: -|-"]
    traces, echoed, stats = run_stream(od_spec(), 2, lines)
    assert echoed[0].endswith(streams.ENFORCED_FLAG)
    assert echoed[2].endswith(streams.ENFORCED_FLAG)  # enforcing is sticky
    assert not echoed[1].endswith(streams.ENFORCED_FLAG)
    assert stats.interventions == 1
    assert stats.first_intervention == 0
    assert stats.steps == 2


def test_drive_rejects_session_marker():
    items = list(streams.parse_stream(["NEWSESSION"], 2))
    session = initialize(od_spec(), 2)
    with pytest.raises(StreamFormatError):
        drive(session, items)


def test_drive_rejects_input_without_output():
    items = list(streams.parse_stream(["I: -|-"], 2))
    session = initialize(od_spec(), 2)
    with pytest.raises(StreamFormatError):
        drive(session, items)


def test_drive_rejects_consecutive_outputs():
    items = list(streams.parse_stream(["O: -|-", "O: -|-"], 2))
    session = initialize(od_spec(), 2)
    with pytest.raises(StreamFormatError):
        drive(session, items)


def test_drive_rejects_eof_between_outputs_and_inputs():
    items = list(streams.parse_stream(["O: -|-", "I: -|-", "O: o|o"], 2))
    session = initialize(od_spec(), 2)
    with pytest.raises(StreamFormatError):
        drive(session, items)


def test_run_stream_stats_and_timing():
    lines = ["O: -|-", "I: i|i", "O: o|o", "I: -|-"]
    traces, echoed, stats = run_stream(od_spec(), 2, lines)
    assert stats.steps == 2
    assert stats.interventions == 0
    assert stats.init_seconds >= 0.0
    assert stats.enforce_seconds >= 0.0
    assert len(traces) == 2
    assert traces[0].events == (frozenset(["i"]), frozenset(["o"]))


def test_fresh_session_shares_game_but_resets_state():
    session = initialize(od_spec(), 2)
    session.observe_outputs([frozenset(["o"]), frozenset()])
    run = session.fresh()
    assert run.game is session.game
    assert run.solution is session.solution
    assert run.mode == MONITORING
    assert run.steps == 0
    assert run.interventions == 0
    assert run.lastq == run.game.initial


def test_three_copies_clean_stream():
    lines = ["O: o|o|o", "I: i|-|i", "O: o|o|o", "I: -|-|-"]
    traces, echoed, stats = run_stream(od_spec(), 3, lines)
    assert echoed == lines
    assert stats.interventions == 0
    assert len(traces) == 3
