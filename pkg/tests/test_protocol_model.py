"""
Protocol model test suite.

Tests for:
1. DSL parsing, printing and error positions
2. Phase-partition inference on the running examples
3. Clause-by-clause partition checking
4. k-unfolding shape and phase-boundedness

Run: python tests/test_protocol_model.py
"""

import sys

from harness import check, model_path, run_suite, settings_env

from protocol_model import (
    ZERO,
    DuplicateDeclarationError,
    MissingInitError,
    NotPhaseBounded,
    NotPhaseBoundedWithin,
    PhasePartition,
    PhaseSearchInconclusive,
    ProtocolSyntaxError,
    Transition,
    UnknownReferenceError,
    bcast_label,
    broadcast,
    check_partition,
    clause_of,
    copies_of,
    infer_phase_partition,
    k_unfold,
    load_protocol,
    naive_k_unfold,
    original_state,
    parse_protocol,
    phase_bound,
    print_protocol,
    receive,
    receive_set,
    recv_label,
    require_phase_bound,
    unlabelled_groups,
)
from utils.random_models import protocol_corpus, scaled

P = load_protocol(model_path("p.bp"))
P_PRIME = load_protocol(model_path("p_prime.bp"))
P_BAR = load_protocol(model_path("p_bar.bp"))

# u1 and u2 are unreachable from qin; only u1=u2=Q1r, x=Q2b fits, which needs k=2
DETACHED = """protocol detached
messages a b
states qin u1 u2 x
init qin
trans u1 !!a x
trans u2 ?a u2
trans u2 !!b x
"""
FILLERS = " ".join(f"f{i}" for i in range(1, 9))
DETACHED_WITH_FILLERS = DETACHED.replace("states qin u1 u2 x", f"states qin u1 u2 x {FILLERS}")


def expect_error(fn, error_type):
    try:
        fn()
    except error_type as e:
        return e
    return None


def test_parse_running_example():
    check("P has 6 states", len(P.states) == 6)
    check("P has 8 transitions", len(P.transitions) == 8)
    check("init is qin", P.init == "qin")
    check("R(qin) = {b}", receive_set(P, "qin") == frozenset({"b"}))
    check("R(q4) = {c}", P.receive_set("q4") == frozenset({"c"}))
    check("receptions of b at qin", P.receptions("qin", "b") == (Transition("qin", receive("b"), "q1"),))
    again = parse_protocol(print_protocol(P_PRIME))
    check("printed P' parses back to P'", again == P_PRIME)

    lone = parse_protocol("protocol lone\nstates qin\ninit qin\n")
    check("single state, no transitions", lone.transitions == () and lone.messages == ())
    check("degenerate protocol is 0-phase-bounded", phase_bound(lone) == 0)


def test_parse_errors():
    base = "protocol X\nmessages a\nstates s t\ninit s\n"

    e = expect_error(lambda: parse_protocol("protocol X\nstates s\n"), MissingInitError)
    check("missing init", e is not None)

    e = expect_error(lambda: parse_protocol(base + "trans s !!a u\n"), UnknownReferenceError)
    check("unknown state reported with line 5", e is not None and e.line == 5, str(e))

    e = expect_error(lambda: parse_protocol(base + "trans s !!z t\n"), UnknownReferenceError)
    check("unknown message", e is not None)

    e = expect_error(lambda: parse_protocol(base + "trans s !!a t\ntrans s !!a t\n"), DuplicateDeclarationError)
    check("duplicate transition", e is not None and e.line == 6)

    e = expect_error(lambda: parse_protocol(base + "trans s send t\n"), ProtocolSyntaxError)
    check("bad action token at column 9", e is not None and e.column == 9, str(e))

    e = expect_error(lambda: parse_protocol("protocol X\nstates s s\ninit s\n"), DuplicateDeclarationError)
    check("duplicate state", e is not None)

    e = expect_error(lambda: parse_protocol(base + "frobnicate s\n"), ProtocolSyntaxError)
    check("unknown keyword", e is not None)


def test_p_prime_partition():
    partition = infer_phase_partition(P_PRIME)
    check("P' is 2-phase-bounded", partition.k == 2, f"k={partition.k}")
    expected = {
        "qin": ZERO,
        "q1": recv_label(1),
        "q2": recv_label(1),
        "q4": bcast_label(1),
        "q3": bcast_label(2),
        "q5": recv_label(2),
    }
    for q, label in expected.items():
        check(f"{q} in {label}", partition.label(q) == label, str(partition.label(q)))
    table = partition.table(P_PRIME.states)
    check("partition table", table == [
        ("Q0", ["qin"]), ("Q1b", ["q4"]), ("Q1r", ["q1", "q2"]), ("Q2b", ["q3"]), ("Q2r", ["q5"]),
    ], str(table))
    ok, reason = check_partition(P_PRIME, partition)
    check("inferred partition passes the checker", ok, reason)


def test_p_not_phase_bounded():
    e = expect_error(lambda: infer_phase_partition(P), NotPhaseBounded)
    check("P is not phase-bounded", e is not None)
    check("phase_bound(P) is None", phase_bound(P) is None)
    e = expect_error(lambda: require_phase_bound(P_PRIME, 1), NotPhaseBoundedWithin)
    check("P' fails a bound of 1", e is not None and e.found == 2)


def test_clauses():
    partition = infer_phase_partition(P_PRIME)
    cases = [
        (Transition("qin", broadcast("a"), "q4"), 5),
        (Transition("qin", receive("b"), "q1"), 4),
        (Transition("q1", receive("a"), "q2"), 3),
        (Transition("q2", broadcast("c"), "q3"), 5),
        (Transition("q4", receive("c"), "q5"), 4),
        (Transition("q3", receive("a"), "q5"), 6),
    ]
    for t, clause in cases:
        found = clause_of(t, partition)
        check(f"{t} uses clause {clause}", found == clause, f"got {found}")

    broken = PhasePartition(2, dict(partition.labels, q3=recv_label(2)))
    ok, reason = check_partition(P_PRIME, broken)
    check("checker rejects q3 in Q2r", not ok and "q2|!!c|q3" in reason, reason)


def test_k_unfold_shape():
    p2 = k_unfold(P_PRIME, 2)
    check("|Q| * (2k+1) states", len(p2.states) == 30, str(len(p2.states)))
    check("init is qin^0", p2.init == "qin^0")
    check("copies of q3", copies_of("q3", 2) == ["q3^0", "q3^b,1", "q3^r,1", "q3^b,2", "q3^r,2"])
    check("original_state strips the copy suffix", original_state("q3^r,2") == "q3")
    check("last-phase reception kept", Transition("q3^b,2", receive("a"), "q5^r,2") in p2.transitions)
    naive = naive_k_unfold(P_PRIME, 2)
    check("naive unfolding drops it", Transition("q3^b,2", receive("a"), "q5^r,2") not in naive.transitions)
    k = phase_bound(p2)
    check("P'_2 is 2-phase-bounded", k is not None and k <= 2, f"k={k}")


def test_unfolding_of_non_phase_bounded():
    for k in (1, 2, 3):
        pk = k_unfold(P, k)
        bound = phase_bound(pk)
        check(f"P_{k} is {k}-phase-bounded", bound is not None and bound <= k, f"k={bound}")
    pbar = k_unfold(P_BAR, 2)
    check("P-bar_2 is 2-phase-bounded", (phase_bound(pbar) or 99) <= 2)


def test_unreachable_states():
    p = parse_protocol(DETACHED)
    partition = infer_phase_partition(p)
    check("detached chain needs k=2", partition.k == 2, f"k={partition.k}")
    expected = {"qin": ZERO, "u1": recv_label(1), "u2": recv_label(1), "x": bcast_label(2)}
    for q, label in expected.items():
        check(f"{q} in {label}", partition.label(q) == label, str(partition.label(q)))
    ok, reason = check_partition(p, partition)
    check("backtracked partition passes the checker", ok, reason)

    filled = parse_protocol(DETACHED_WITH_FILLERS)
    groups = unlabelled_groups(filled, ["qin"])
    check("one connected group plus eight singletons", groups[0] == ["u1", "u2", "x"] and len(groups) == 9,
          str(groups))
    partition = infer_phase_partition(filled)
    check("isolated states do not multiply the search", partition.k == 2, f"k={partition.k}")
    check("u1 and x keep their classes",
          partition.label("u1") == recv_label(1) and partition.label("x") == bcast_label(2))
    check("isolated states take Q2r", all(partition.label(f"f{i}") == recv_label(2) for i in range(1, 9)))


def test_phase_search_budget():
    p = parse_protocol(DETACHED_WITH_FILLERS)
    with settings_env(BPCOVER_PHASE_SEARCH_BUDGET="1"):
        e = expect_error(lambda: infer_phase_partition(p), PhaseSearchInconclusive)
        check("budget of one attempt is inconclusive at k=1", e is not None and e.k == 1 and e.limit == 1, str(e))
        check("phase_bound passes it on", expect_error(lambda: phase_bound(p), PhaseSearchInconclusive) is not None)
        check("require_phase_bound passes it on",
              expect_error(lambda: require_phase_bound(p, 2), PhaseSearchInconclusive) is not None)
        check("reachable-only protocols need no attempts", phase_bound(P_PRIME) == 2)
    check("default budget decides it again", phase_bound(p) == 2)


def test_random_phase_bounded_corpus():
    count = scaled(40, 200)
    failures = 0
    for k in (1, 2, 3):
        for p in protocol_corpus(seed=k, count=count, k=k):
            partition = infer_phase_partition(p)
            ok, _ = check_partition(p, partition)
            if partition.k > k or not ok:
                failures += 1
    check(f"{3 * count} generated protocols infer k within their bound", failures == 0, f"{failures} failures")


def run_all_tests():
    return run_suite("PROTOCOL MODEL TEST SUITE", [
        ("Parse running example", test_parse_running_example),
        ("Parse errors", test_parse_errors),
        ("P' partition", test_p_prime_partition),
        ("P not phase-bounded", test_p_not_phase_bounded),
        ("Partition clauses", test_clauses),
        ("k-unfolding shape", test_k_unfold_shape),
        ("Unfolding of P", test_unfolding_of_non_phase_bounded),
        ("Unreachable states", test_unreachable_states),
        ("Phase-search budget", test_phase_search_budget),
        ("Random phase-bounded corpus", test_random_phase_bounded_corpus),
    ])


if __name__ == "__main__":
    success = run_all_tests()
    sys.exit(0 if success else 1)
