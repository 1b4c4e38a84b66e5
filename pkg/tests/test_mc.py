"""Model checker verdicts, trace validity, and the explicit oracle."""

import numpy as np
import pytest

from aigsynt.aiger import AigerDoc, evaluate_vars, values_lit
from aigsynt.mc import (
    McError, check_justice_universal, check_safety, find_fair_trace,
    solve_explicit,
)

from helpers import enumerate_lasso_fg_not_just, random_game_doc
from test_game import doc_with
from test_transforms import closed_doc


def replay(doc: AigerDoc, trace):
    """Replay a trace against the document; returns per-step valuations."""
    latch_vals = [False] * len(doc.latches)
    out = []
    for inputs, latches in trace.steps:
        assert tuple(latch_vals) == latches, "trace latches diverge"
        values = evaluate_vars(doc, latch_vals, list(inputs))
        out.append(values)
        latch_vals = [values_lit(values, nl) for _, nl, _ in doc.latches]
    return out, tuple(latch_vals)


def test_safety_holds_without_bad():
    assert check_safety(doc_with()).holds


def test_safety_bad_true_counterexample_length_one():
    result = check_safety(doc_with(bad=lambda aig, u, c, l: 1))
    assert not result.holds
    assert len(result.trace.steps) == 1


def test_safety_counterexample_replays():
    # bad reachable only after two steps: bad = l1, next(l1) = l0, next(l0) = u
    def nexts(aig, u, c, l):
        return [u[0], l[0]]

    doc = doc_with(next_of=nexts, bad=lambda aig, u, c, l: l[1], n_latches=2)
    result = check_safety(doc)
    assert not result.holds
    values, _ = replay(doc, result.trace)
    assert values_lit(values[-1], doc.bad[0][0])
    # constraints held at every step (there are none, trivially)
    assert len(result.trace.steps) == 3


def test_safety_respects_constraint_discharge():
    # bad can only fire together with a constraint violation: holds
    doc = doc_with(bad=lambda aig, u, c, l: u[0],
                   constraint=lambda aig, u, c, l: u[0] ^ 1)
    assert check_safety(doc).holds


def test_safety_old_format_outputs():
    doc = AigerDoc(fmt="old")
    u = doc.add_input("u")
    doc.outputs.append((u, "bad"))
    result = check_safety(doc)
    assert not result.holds


def test_justice_vacuous_without_section():
    assert check_justice_universal(doc_with()).holds


def test_justice_constant_true_holds():
    doc = doc_with(justice=lambda aig, u, c, l: 1)
    assert check_justice_universal(doc).holds


def test_justice_constant_false_lasso():
    doc = doc_with(next_of=lambda aig, u, c, l: [l[0]],
                   justice=lambda aig, u, c, l: 0)
    result = check_justice_universal(doc)
    assert not result.holds
    assert result.trace.loop_start is not None
    # the loop closes: replaying ends in the state the loop started from
    values, final_state = replay(doc, result.trace)
    assert final_state == result.trace.steps[result.trace.loop_start][1]
    # justice is never raised on the loop and constraints hold throughout
    jlit = doc.justice_literal()
    for v in values[result.trace.loop_start:]:
        assert not values_lit(v, jlit)


def test_justice_agrees_with_enumeration_on_hand_models():
    cases = [
        closed_doc(lambda aig, u, l: [l[0], l[1]], lambda aig, u, l: l[0]),
        closed_doc(lambda aig, u, l: [l[0] ^ 1, l[1]], lambda aig, u, l: l[0]),
        closed_doc(lambda aig, u, l: [u[0], l[0]],
                   lambda aig, u, l: aig.and_(l[0], l[1])),
        closed_doc(lambda aig, u, l: [u[0], l[0]],
                   lambda aig, u, l: aig.or_(l[0], l[1]),
                   constraint=lambda aig, u, l: aig.or_(u[0], l[0])),
        closed_doc(lambda aig, u, l: [aig.ite_(l[1], l[0], u[0]),
                                      aig.or_(l[1], u[0])],
                   lambda aig, u, l: aig.and_(l[0] ^ 1, l[1]) ^ 1),
    ]
    for seed in range(8):
        cases.append(random_game_doc(seed + 500, n_latches=3, n_u=1, n_c=0,
                                     n_gates=6))
    for i, doc in enumerate(cases):
        expected_violation = enumerate_lasso_fg_not_just(doc)
        got = check_justice_universal(doc)
        assert got.holds == (not expected_violation), f"case {i}"


def test_fair_trace_none_when_justice_false():
    doc = doc_with(next_of=lambda aig, u, c, l: [l[0]],
                   justice=lambda aig, u, c, l: 0)
    assert not find_fair_trace(doc).found


def test_fair_trace_self_loop_initial():
    doc = doc_with(next_of=lambda aig, u, c, l: [l[0]],
                   justice=lambda aig, u, c, l: 1)
    result = find_fair_trace(doc)
    assert result.found
    assert result.trace.loop_start == 0  # stem of length zero


def test_fair_trace_replays_with_justice_on_loop():
    doc = closed_doc(lambda aig, u, l: [u[0], l[0]],
                     lambda aig, u, l: aig.and_(l[0], l[1]))
    result = find_fair_trace(doc)
    assert result.found
    values, final_state = replay(doc, result.trace)
    assert final_state == result.trace.steps[result.trace.loop_start][1]
    jlit = doc.justice_literal()
    assert any(values_lit(v, jlit) for v in values[result.trace.loop_start:])
    for v in values:
        assert all(values_lit(v, lit) for lit, _ in doc.constraints)


def test_random_counterexamples_replay_faithfully():
    """Every counterexample or lasso the checker produces is a real run
    of the document with the claimed step properties."""
    safety_violations = 0
    justice_violations = 0
    for seed in range(40):
        doc = random_game_doc(seed + 1000, n_latches=4, n_u=2, n_c=1,
                              n_gates=10)
        sresult = check_safety(doc)
        if not sresult.holds:
            safety_violations += 1
            values, _ = replay(doc, sresult.trace)
            for v in values:
                assert all(values_lit(v, lit) for lit, _ in doc.constraints)
            assert any(values_lit(values[-1], lit) for lit, _ in doc.bad)
        jresult = check_justice_universal(doc)
        if not jresult.holds:
            justice_violations += 1
            trace = jresult.trace
            values, final_state = replay(doc, trace)
            assert final_state == trace.steps[trace.loop_start][1]
            jlit = doc.justice_literal()
            for v in values:
                assert all(values_lit(v, lit) for lit, _ in doc.constraints)
            for v in values[trace.loop_start:]:
                assert not values_lit(v, jlit)
    assert safety_violations >= 5
    assert justice_violations >= 5


def test_trace_render_format():
    doc = doc_with(bad=lambda aig, u, c, l: 1)
    trace = check_safety(doc).trace
    text = trace.render()
    lines = text.splitlines()
    assert lines[0].startswith("# inputs: ")
    assert lines[1].startswith("# latches: ")
    assert lines[2] == "00 0"


# explicit oracle ---------------------------------------------------------


def test_explicit_trivial_safe_game_all_states():
    doc = doc_with(next_of=lambda aig, u, c, l: [l[0]])
    result = solve_explicit(doc)
    assert result.realizable
    assert result.winning.all()


def test_explicit_bad_true_empty():
    doc = doc_with(bad=lambda aig, u, c, l: 1)
    result = solve_explicit(doc)
    assert not result.realizable
    assert not result.winning.any()


def test_explicit_hand_solved_two_state_game():
    # next(l) = c; bad = l & u: only l=0 is winning (c must stay 0)
    doc = doc_with(next_of=lambda aig, u, c, l: [c[0]],
                   bad=lambda aig, u, c, l: aig.and_(l[0], u[0]))
    result = solve_explicit(doc)
    assert result.winning_set() == {0}


def test_explicit_weak_until_discharge():
    # bad fires only when the constraint fails the same step: all states win
    doc = doc_with(bad=lambda aig, u, c, l: u[0],
                   constraint=lambda aig, u, c, l: u[0] ^ 1)
    assert solve_explicit(doc).winning.all()


def test_explicit_rejects_input_dependent_justice():
    doc = doc_with(justice=lambda aig, u, c, l: u[0])
    with pytest.raises(McError, match="justice literal depends"):
        solve_explicit(doc)


def test_explicit_too_many_states_rejected():
    doc = AigerDoc(fmt="new")
    for i in range(13):
        lit = doc.add_latch(f"l{i}")
        doc.set_latch_next(lit, lit)
    with pytest.raises(McError, match="too large"):
        solve_explicit(doc, max_states=4096)


def test_explicit_reachable_agrees_on_verdict():
    for seed in range(10):
        doc = random_game_doc(seed + 700, n_latches=4)
        full = solve_explicit(doc, mode="full")
        reach = solve_explicit(doc, mode="reachable")
        assert full.realizable == reach.realizable, seed
        # reachable winning states agree with the full analysis
        for code in reach.states:
            assert bool(full.is_winning(int(code))) == \
                bool(reach.is_winning(int(code))), (seed, code)


def test_explicit_safe_reachable_old_format_only():
    doc = doc_with(justice=lambda aig, u, c, l: l[0])
    with pytest.raises(McError, match="old-format"):
        solve_explicit(doc, mode="safe_reachable")


def _explicit_safety_violation(doc: AigerDoc) -> bool:
    """Bounded explicit search for a weak-until safety violation."""
    n_latches = len(doc.latches)
    n_inputs = len(doc.inputs)
    if doc.fmt == "old":
        bad_lits = [lit for lit, _ in doc.outputs]
        constraint_lits = []
    else:
        bad_lits = [lit for lit, _ in doc.bad]
        constraint_lits = [lit for lit, _ in doc.constraints]
    seen = {0}
    frontier = [0]
    while frontier:
        s = frontier.pop()
        latch_vals = [bool((s >> i) & 1) for i in range(n_latches)]
        for combo in range(1 << n_inputs):
            input_vals = [bool((combo >> i) & 1) for i in range(n_inputs)]
            values = evaluate_vars(doc, latch_vals, input_vals)
            inv = all(values_lit(values, lit) for lit in constraint_lits)
            if not inv:
                continue  # history breaks here; nothing beyond can violate
            if any(values_lit(values, lit) for lit in bad_lits):
                return True
            nxt = 0
            for i, (_, next_lit, _) in enumerate(doc.latches):
                if values_lit(values, next_lit):
                    nxt |= 1 << i
            if nxt not in seen:
                seen.add(nxt)
                frontier.append(nxt)
    return False


def test_check_safety_agrees_with_explicit_simulation():
    cases = [doc_with(bad=lambda aig, u, c, l: 1),
             doc_with(bad=lambda aig, u, c, l: u[0],
                      constraint=lambda aig, u, c, l: u[0] ^ 1)]
    for seed in range(20):
        cases.append(random_game_doc(seed + 600, n_latches=4, n_u=2, n_c=1,
                                     n_gates=10))
    for i, doc in enumerate(cases):
        expected = _explicit_safety_violation(doc)
        assert check_safety(doc).holds == (not expected), f"case {i}"


def test_fair_trace_iff_justice_violation():
    """find_fair_trace on the reversed model agrees with the universal
    justice check on the original, across the small-model suite."""
    from aigsynt.transforms import reverse_justice
    cases = [random_game_doc(seed + 640, n_latches=3, n_u=1, n_c=0,
                             n_gates=6) for seed in range(12)]
    for i, doc in enumerate(cases):
        violated = not check_justice_universal(doc).holds
        found = find_fair_trace(reverse_justice(doc)).found
        assert found == violated, f"case {i}"


def test_explicit_safe_reachable_agrees_on_verdict():
    from aigsynt.transforms import justice_to_safety
    for seed in range(10):
        doc = random_game_doc(seed + 800, n_latches=3, n_u=1, n_c=1,
                              n_gates=8)
        kdoc = justice_to_safety(doc, 2)
        full = solve_explicit(kdoc, mode="full")
        safe = solve_explicit(kdoc, mode="safe_reachable")
        assert full.realizable == safe.realizable, seed
        assert len(safe.states) <= len(full.states)
