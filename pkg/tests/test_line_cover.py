"""
Cover[Lines] test suite.

Tests for:
1. The pair fixpoint S and its increasing chain
2. The head set H and its phase restriction
3. cover_lines on the running examples
4. cover_lines against exhaustive search over short lines

Run: python tests/test_line_cover.py
"""

import sys
from collections import deque

from harness import check, model_path, run_suite, settings_env

from infra.budget import configuration_budget
from line_cover import GAMMA5, compute_H, compute_S, cover_lines, gamma5_start
from protocol_model import (
    ZERO,
    NotPhaseBoundedWithin,
    infer_phase_partition,
    load_protocol,
    parse_protocol,
    recv_label,
)
from semantics import VerdictKind, brute_force_cover, check_witness, initial_configuration, successor_labels
from topology import make_line
from utils.random_models import protocol_corpus, scaled

P = load_protocol(model_path("p.bp"))
P_PRIME = load_protocol(model_path("p_prime.bp"))

# qin has three internal successors; goal sits two steps away, dead is unreachable
FAN = parse_protocol("""protocol fan
states qin c1 c2 h goal dead
init qin
trans qin tau c1
trans qin tau c2
trans qin tau h
trans h tau goal
""")


def states_seen_on(p, t, limit: int = 200_000):
    """Every state some vertex reaches on t, or None past `limit` configurations."""
    start = initial_configuration(p, t).labels
    seen = {start}
    queue = deque([start])
    states = set(start)
    while queue:
        labels = queue.popleft()
        for _, nxt in successor_labels(p, t, labels):
            if nxt not in seen:
                seen.add(nxt)
                if len(seen) > limit:
                    return None
                states.update(nxt)
                queue.append(nxt)
    return states


def test_pair_fixpoint():
    S = compute_S(P_PRIME)
    check("(qin, qin) in S", ("qin", "qin") in S)
    check("(qin, q4) from an unheard broadcast", ("qin", "q4") in S)
    check("(q1, q4) from a matched broadcast", ("q1", "q4") in S)
    chain = S.rounds
    check("chain starts at {(qin, qin)}", chain[0] == frozenset({("qin", "qin")}))
    check("chain is increasing", all(a < b for a, b in zip(chain, chain[1:])))
    check("chain ends at S", chain[-1] == S.pairs)
    check("at most |Q|^2 rounds", len(chain) - 1 <= len(P_PRIME.states) ** 2)


def test_head_set():
    partition = infer_phase_partition(P_PRIME)
    H = compute_H(compute_S(P_PRIME), partition, list(P_PRIME.states))
    check("H starts with qin", H[0] == "qin", str(H))
    check("H inside Q0 u Q1r", all(partition.label(q) in (ZERO, recv_label(1)) for q in H), str(H))
    start = gamma5_start(P_PRIME, "q1", "q2")
    check("C_{q1,q2} layout", start.labels == ("q1", "qin", "qin", "qin", "q2"))
    check("five-vertex line", len(GAMMA5) == 5)


def test_running_examples():
    verdict = cover_lines(P_PRIME, "q5")
    check("q5 coverable for P'", verdict.is_coverable)
    check("witness replays to q5", check_witness(P_PRIME, verdict, "q5"))
    check("found from (qin, qin)", verdict.detail("pair") == "qin,qin", str(verdict.detail("pair")))

    verdict = cover_lines(P_PRIME, "qin")
    check("init trivially covered", verdict.is_coverable and len(verdict.witness) == 0)

    try:
        cover_lines(P, "q5")
        raised = None
    except NotPhaseBoundedWithin as e:
        raised = e
    check("P is rejected", raised is not None and raised.found is None)


def test_undecided_pairs():
    verdict = cover_lines(FAN, "goal")
    check("default budget covers from the first pair", verdict.detail("pair") == "qin,qin",
          str(verdict.detail("pair")))
    check("dead is not coverable", cover_lines(FAN, "dead").kind is VerdictKind.NOT_COVERABLE)

    with settings_env(BPCOVER_MAX_CONFIGURATIONS="5"):
        verdict = cover_lines(FAN, "goal")
        check("later pair still covers after undecided ones", verdict.is_coverable, str(verdict.reason))
        check("covered by (qin, goal)", verdict.detail("pair") == "qin,goal", str(verdict.detail("pair")))

        verdict = cover_lines(FAN, "dead")
        check("UNKNOWN only when every pair is undecided", verdict.is_unknown, str(verdict.kind))
        check("reason counts the pairs", verdict.reason.startswith("25 pairs undecided"), verdict.reason)


def test_against_short_lines():
    count = scaled(25, 200)
    lines = [make_line(n) for n in range(1, 7)]
    missed = 0
    unconfirmed = 0
    bad_witness = 0
    for k in (1, 2):
        for p in protocol_corpus(seed=100 + k, count=count, k=k, n_states=5, n_messages=3):
            covered = set()
            for t in lines:
                covered |= states_seen_on(p, t) or set()
            for q in p.states:
                verdict = cover_lines(p, q)
                if verdict.is_coverable and not check_witness(p, verdict, q):
                    bad_witness += 1
                if q in covered and not verdict.is_coverable:
                    missed += 1
                if verdict.is_coverable and q not in covered:
                    answers = [brute_force_cover(p, q, make_line(n), budget=configuration_budget(500_000))
                               for n in range(7, 11)]
                    if not any(a.is_coverable or a.is_unknown for a in answers):
                        unconfirmed += 1
    check(f"no state covered on lines <= 6 is missed ({2 * count} protocols)", missed == 0, f"{missed} misses")
    check("every COVERABLE confirmed on a line <= 10", unconfirmed == 0, f"{unconfirmed} unconfirmed")
    check("every witness replays", bad_witness == 0, f"{bad_witness} bad witnesses")


def run_all_tests():
    return run_suite("COVER[LINES] TEST SUITE", [
        ("Pair fixpoint", test_pair_fixpoint),
        ("Head set", test_head_set),
        ("Running examples", test_running_examples),
        ("Undecided pairs", test_undecided_pairs),
        ("Against short lines", test_against_short_lines),
    ])


if __name__ == "__main__":
    success = run_all_tests()
    sys.exit(0 if success else 1)
