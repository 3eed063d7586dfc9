import pytest

from mixdialog.engine import EngineConfig, new_session, run_batch
from mixdialog.errors import MalformedLogError
from mixdialog.trace import build_trace, render_notation, render_notation_with_indices

from conftest import caller_lines

DIALOG1_NOTATION = "(Ic Rs) (Is Rc) (Is Rc) (Is Rc) (Is Rc)"
DIALOG2_NOTATION = "(Ic Rs) (Is (Ic Rs) Rc) (Is Rc) (Is Rc)"
DIALOG4_NOTATION = "(Ic Rs) (Is Rc) (Is Rc)"


def _trace_for(pizza_bundle, name, **kwargs):
    script, grammars = pizza_bundle
    session = new_session(script, grammars, EngineConfig(**kwargs))
    turns = run_batch(session, caller_lines(name))
    greeting = kwargs.get("greeting_as_response", True)
    return turns, build_trace(turns, greeting)


def test_flat_trace_for_all_responsive(pizza_bundle):
    _, trace = _trace_for(pizza_bundle, "dialog1")
    assert render_notation(trace) == DIALOG1_NOTATION
    assert all(pair.children == () for pair in trace.pairs)


def test_nested_trace_for_out_of_turn(pizza_bundle):
    _, trace = _trace_for(pizza_bundle, "dialog2")
    assert render_notation(trace) == DIALOG2_NOTATION
    nested = trace.pairs[1]
    assert len(nested.children) == 1
    # the size prompt and its re-prompt belong to the same pair
    assert len(nested.initiator_refs) == 2


def test_mixed_turn_closes_pair_without_nesting(pizza_bundle):
    _, trace = _trace_for(pizza_bundle, "dialog4")
    assert render_notation(trace) == DIALOG4_NOTATION


def test_empty_log_empty_trace():
    assert build_trace([], greeting_as_response=False).pairs == ()
    assert render_notation(build_trace([], True)) == ""


def test_no_greeting_pair(pizza_bundle):
    _, trace = _trace_for(pizza_bundle, "dialog1", greeting_as_response=False)
    assert render_notation(trace) == "(Is Rc) (Is Rc) (Is Rc) (Is Rc)"


def test_single_prompt_and_answer(pizza_bundle):
    script, grammars = pizza_bundle
    session = new_session(script, grammars)
    run_batch(session, ["medium"])
    trace = build_trace(session.turn_log, greeting_as_response=False)
    assert render_notation(trace) == "(Is Rc)"


def test_trailing_unanswered_prompt_excluded(pizza_bundle):
    script, grammars = pizza_bundle
    session = new_session(script, grammars)
    run_batch(session, [])
    trace = build_trace(session.turn_log, True)
    assert render_notation(trace) == "(Ic Rs)"


def test_balanced_parentheses_and_pair_count(pizza_bundle):
    for name, answered in [("dialog1", 4), ("dialog2", 3), ("dialog4", 2)]:
        _, trace = _trace_for(pizza_bundle, name)
        notation = render_notation(trace)
        depth = 0
        for ch in notation:
            depth += ch == "("
            depth -= ch == ")"
            assert depth >= 0
        assert depth == 0
        assert len(trace.pairs) == answered + 1


def test_covered_turns_chronological(pizza_bundle):
    for name in ("dialog1", "dialog2", "dialog4"):
        turns, trace = _trace_for(pizza_bundle, name)
        refs = trace.covered_turns()
        assert refs == sorted(refs)
        assert len(refs) == len(set(refs))
        assert all(0 <= r < len(turns) for r in refs)


def test_covered_turns_account_for_log(pizza_bundle):
    # everything except the final thank-you is part of a pair
    turns, trace = _trace_for(pizza_bundle, "dialog2")
    assert len(trace.covered_turns()) == len(turns) - 1


def test_unrecognized_dropped_by_default(pizza_bundle):
    script, grammars = pizza_bundle
    session = new_session(script, grammars)
    run_batch(session, ["mumble", "medium", "sausage", "deep dish", "yes"])
    trace = build_trace(session.turn_log, True)
    assert render_notation(trace) == DIALOG1_NOTATION


def test_unrecognized_flagged_in_extended_mode(pizza_bundle):
    script, grammars = pizza_bundle
    session = new_session(script, grammars)
    run_batch(session, ["mumble", "medium", "sausage", "deep dish", "yes"])
    trace = build_trace(session.turn_log, True, extended=True)
    assert "(Is Rc)!" in render_notation(trace)


def test_malformed_log_rejected(pizza_bundle):
    script, grammars = pizza_bundle
    session = new_session(script, grammars)
    run_batch(session, ["medium"])
    # drop the prompts, keeping an utterance with no initiative
    log = [t for t in session.turn_log if type(t).__name__ != "SystemPrompt"]
    with pytest.raises(MalformedLogError):
        build_trace(log, greeting_as_response=False)


def test_indices_rendering_lines_up(pizza_bundle):
    _, trace = _trace_for(pizza_bundle, "dialog2")
    top, bottom = render_notation_with_indices(trace).splitlines()
    assert top.split() == DIALOG2_NOTATION.split()
    # the outer size pair points at both the prompt and the re-prompt
    assert "1,4" in bottom
