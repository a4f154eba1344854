"""
End-to-end acceptance suite.

Tests for:
1. The running example on clique:3 (verdict, witness, final configuration)
2. Phase inference on P and P'
3. Unfolding soundness against brute force on clique:3
4. The naive-unfolding counterexample P_bar
5. Minsky end-to-end (exhaustive part needs BPCOVER_SLOW_TESTS=1)
6. Lifting covering executions onto tree unfoldings

The Cover[Lines] oracle comparison, the print-successor oracle and the
VASS round trip live in test_line_cover.py and test_star_cover.py.

Run: python tests/test_acceptance.py
"""

import sys
import time

from harness import check, model_path, run_suite

from infra.budget import configuration_budget
from infra.settings import get_settings
from line_cover import cover_lines
from minsky_gen import (
    FINAL_STATE,
    build_halting_witness,
    find_halting_run,
    line_length_for,
    load_minsky,
    protocol_from_minsky,
)
from protocol_model import (
    NotPhaseBounded,
    copies_of,
    infer_phase_partition,
    k_unfold,
    load_protocol,
    naive_k_unfold,
    phase_bound,
)
from semantics import alternation_bound, brute_force_cover, check_witness, replay
from star_cover import cover_1pb
from topology import ROOT, lift_execution, make_clique, make_line, unfold_to_tree
from utils.random_models import protocol_corpus, scaled

P = load_protocol(model_path("p.bp"))
P_PRIME = load_protocol(model_path("p_prime.bp"))
P_BAR = load_protocol(model_path("p_bar.bp"))


def lifts_to_tree(p, verdict, targets) -> bool:
    """Lift a COVERABLE verdict onto its tree unfolding; True when the root ends in a target."""
    execution = verdict.witness
    tree, labels = unfold_to_tree(execution.topology, verdict.vertex, len(execution))
    final = replay(p, lift_execution(p, execution, tree, labels))
    return final.state_of(ROOT) in targets


def test_running_example():
    started = time.perf_counter()
    verdict = brute_force_cover(P, "q5", make_clique(3))
    elapsed = time.perf_counter() - started
    check("COVERABLE", verdict.is_coverable)
    check("three steps", len(verdict.witness) == 3)
    check("final (q5, qin, q3)", replay(P, verdict.witness).labels == ("q5", "qin", "q3"))
    check("under a second", elapsed < 1.0, f"{elapsed:.3f}s")


def test_phase_inference():
    started = time.perf_counter()
    try:
        infer_phase_partition(P)
        rejected = False
    except NotPhaseBounded:
        rejected = True
    check("P: NOT_PHASE_BOUNDED", rejected)

    partition = infer_phase_partition(P_PRIME)
    expected = {"qin": "Q0", "q4": "Q1b", "q1": "Q1r", "q2": "Q1r", "q3": "Q2b", "q5": "Q2r"}
    got = {q: name for name, states in partition.table(P_PRIME.states) for q in states}
    check("P': k=2", partition.k == 2)
    check("P': state-by-state partition", got == expected, str(got))
    elapsed = time.perf_counter() - started
    check("under a second", elapsed < 1.0, f"{elapsed:.3f}s")


def test_unfolding_soundness():
    count = 50
    clique = make_clique(3)
    counterexamples = []
    checked = 0
    for p in protocol_corpus(seed=3, count=count, n_states=5):
        target = p.states[-1]
        verdict = brute_force_cover(p, target, clique, depth_bound=8)
        if verdict.is_unknown:
            continue
        k = alternation_bound(verdict.witness) if verdict.is_coverable else 2
        copies = copies_of(target, k)
        unfolded = brute_force_cover(k_unfold(p, k), copies, clique, depth_bound=8)
        if unfolded.is_unknown:
            continue
        checked += 1
        if verdict.is_coverable != unfolded.is_coverable:
            counterexamples.append(p.name)
    check(f"{checked}/{count} protocols compared", checked > 0)
    check("no counterexample", not counterexamples, ", ".join(counterexamples))


def test_naive_unfolding_counterexample():
    check("P_bar is not phase-bounded", phase_bound(P_BAR) is None)

    one = k_unfold(P_BAR, 1)
    verdict = cover_1pb(one, copies_of("q3", 1))
    check("cover_1pb on the 1-unfolding: q3 not covered", not verdict.is_coverable and not verdict.is_unknown,
          verdict.reason)

    two = k_unfold(P_BAR, 2)
    for copy in copies_of("q3", 2):
        verdict = cover_lines(two, copy)
        check(f"cover_lines on the 2-unfolding: {copy} not covered",
              not verdict.is_coverable and not verdict.is_unknown, verdict.reason)

    naive = naive_k_unfold(P_BAR, 2)
    verdict = brute_force_cover(naive, "q3^r,2", make_line(2))
    check("naive 2-unfolding covers q3^r,2 on line:2", verdict.is_coverable)
    check("in four steps", len(verdict.witness) == 4, str(len(verdict.witness)))
    final = replay(naive, verdict.witness)
    check("final {q3^r,2, q6^b,2}", set(final.labels) == {"q3^r,2", "q6^b,2"}, str(final.labels))


def test_minsky_end_to_end():
    m = load_minsky(model_path("m1.minsky"))
    p = protocol_from_minsky(m)
    k = phase_bound(p)
    check("phase check k <= 6", k is not None and k <= 6, str(k))

    run = find_halting_run(m)
    witness = build_halting_witness(m, run, p)
    check("halting witness covers qf", replay(p, witness).covers(frozenset({FINAL_STATE})) is not None)

    if not get_settings().slow_tests:
        check("exhaustive search skipped (set BPCOVER_SLOW_TESTS=1)", True)
        return
    line = make_line(line_length_for(m, run))
    verdict = brute_force_cover(p, FINAL_STATE, line, budget=configuration_budget(10 ** 7))
    check(f"brute force covers qf on {line.name}", verdict.is_coverable, verdict.reason)


def test_tree_lifting():
    verdict = brute_force_cover(P, "q5", make_clique(3))
    check("running example lifts to its tree", lifts_to_tree(P, verdict, {"q5"}))

    count = scaled(15, 100)
    lifted = failed = 0
    for k in (1, 2):
        for p in protocol_corpus(seed=200 + k, count=count, k=k, n_states=5, n_messages=3):
            for q in p.states:
                verdict = cover_lines(p, q)
                if not verdict.is_coverable:
                    continue
                lifted += 1
                if not check_witness(p, verdict, q) or not lifts_to_tree(p, verdict, {q}):
                    failed += 1
    check(f"{lifted} Cover[Lines] witnesses lift", failed == 0, f"{failed} failures")


def run_all_tests():
    return run_suite("ACCEPTANCE TEST SUITE", [
        ("Running example", test_running_example),
        ("Phase inference", test_phase_inference),
        ("Unfolding soundness", test_unfolding_soundness),
        ("Naive unfolding counterexample", test_naive_unfolding_counterexample),
        ("Minsky end-to-end", test_minsky_end_to_end),
        ("Tree lifting", test_tree_lifting),
    ])


if __name__ == "__main__":
    success = run_all_tests()
    sys.exit(0 if success else 1)
