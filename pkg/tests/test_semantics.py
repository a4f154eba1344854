"""
Semantics test suite.

Tests for:
1. The step relation (mandatory receptions, receiver choices)
2. Replay validation and ReplayError positions
3. The brute-force oracle on the running example
4. Trace text format and verdict lines

Run: python tests/test_semantics.py
"""

import sys

from harness import check, model_path, run_suite

from infra.budget import configuration_budget
from protocol_model import Protocol, Transition, broadcast, load_protocol, receive
from semantics import (
    Configuration,
    Execution,
    ReplayError,
    Step,
    TraceFormatError,
    alternation_bound,
    brute_force_cover,
    brute_force_cover_family,
    check_witness,
    format_trace,
    format_verdict,
    initial_configuration,
    parse_trace,
    replay,
    successors,
)
from topology import make_clique, make_line, make_star, topology_family

P = load_protocol(model_path("p.bp"))
P_PRIME = load_protocol(model_path("p_prime.bp"))


def expect_replay_error(p, e):
    try:
        replay(p, e)
    except ReplayError as err:
        return err
    return None


def test_step_relation():
    clique = make_clique(3)
    start = initial_configuration(P, clique)
    succ = successors(P, start)
    check("six initial moves on clique:3", len(succ) == 6, str(len(succ)))
    step, after = succ[1]
    check("second move is v1 !!b", str(step.transition) == "qin|!!b|q4" and step.vertex == "v1")
    check("both neighbours must receive b", after.labels == ("q4", "q1", "q1"))

    # two receptions of the same message give two successors
    p = Protocol("choice", ("s", "t", "u", "w"), ("m",), "s", (
        Transition("s", broadcast("m"), "w"),
        Transition("s", receive("m"), "t"),
        Transition("s", receive("m"), "u"),
    ))
    succ = successors(p, initial_configuration(p, make_line(2)))
    labels = sorted(c.labels for _, c in succ)
    check("receiver choices enumerated", labels == [("t", "w"), ("u", "w"), ("w", "t"), ("w", "u")], str(labels))


def test_replay_errors():
    clique = make_clique(3)
    start = initial_configuration(P, clique)

    wrong_state = Execution(start, (Step("v1", Transition("q1", broadcast("a"), "qin")),))
    err = expect_replay_error(P, wrong_state)
    check("acting from the wrong state", err is not None and err.index == 0, str(err))

    missing = Execution(start, (Step("v1", Transition("qin", broadcast("b"), "q4")),))
    err = expect_replay_error(P, missing)
    check("omitted mandatory receiver", err is not None and "must receive" in str(err), str(err))

    b = Transition("qin", broadcast("b"), "q4")
    rb = Transition("qin", receive("b"), "q1")
    good = Step("v1", b, (("v2", rb), ("v3", rb)))
    bad_second = Step("v1", Transition("qin", broadcast("a"), "q4"))
    err = expect_replay_error(P, Execution(start, (good, bad_second)))
    check("error index points at the second step", err is not None and err.index == 1, str(err))

    unknown = Step("v1", Transition("qin", broadcast("z"), "q4"))
    err = expect_replay_error(P, Execution(start, (unknown,)))
    check("transition outside the protocol", err is not None)


def test_running_example_oracle():
    verdict = brute_force_cover(P, "q5", make_clique(3))
    check("q5 coverable on clique:3", verdict.is_coverable)
    check("shortest witness has 3 steps", len(verdict.witness) == 3, str(len(verdict.witness)))
    final = replay(P, verdict.witness)
    check("final configuration (q5, qin, q3)", final.labels == ("q5", "qin", "q3"), str(final.labels))
    check("witness validates", check_witness(P, verdict, "q5"))
    check("alternation bound of the witness", alternation_bound(verdict.witness) == 2)

    verdict = brute_force_cover(P, "q5", make_line(2))
    check("q5 not coverable on line:2", not verdict.is_coverable and not verdict.is_unknown, verdict.reason)

    verdict = brute_force_cover(P, "q5", make_clique(3), budget=configuration_budget(3))
    check("tiny budget gives UNKNOWN", verdict.is_unknown, verdict.reason)

    verdict = brute_force_cover(P, "q5", make_clique(3), depth_bound=2)
    check("depth bound 2 gives UNKNOWN", verdict.is_unknown, verdict.reason)


def test_symmetry_and_families():
    star = make_star(3)
    plain = brute_force_cover(P_PRIME, "q5", star)
    reduced = brute_force_cover(P_PRIME, "q5", star, symmetry=True)
    check("symmetry keeps the verdict", plain.kind == reduced.kind)
    check("symmetry keeps the witness length", len(plain.witness or ()) == len(reduced.witness or ()))
    check("reduced witness replays", reduced.witness is None or check_witness(P_PRIME, reduced, "q5"))

    verdict = brute_force_cover_family(P, "q5", topology_family("lines:4"))
    check("a line covers q5 for P", verdict.is_coverable, verdict.reason)
    check("first covering line reported", verdict.detail("topology") is not None)


def test_trace_format():
    verdict = brute_force_cover(P, "q5", make_clique(3))
    text = format_trace(verdict.witness, P)
    check("uniform start has no init line", not text.startswith("init"))
    again = parse_trace(text, P, make_clique(3))
    check("trace parses back to the witness", again == verdict.witness)

    start = Configuration(make_line(2), ("q1", "qin"))
    e = Execution(start, ())
    text = format_trace(e, P)
    check("non-uniform start writes init", text.startswith("init v1=q1 v2=qin"))
    check("init line parses", parse_trace(text, P, make_line(2)).initial == start)

    try:
        parse_trace("step v=v9 t=qin|!!a|q4 recv=\n", P, make_line(2))
        raised = False
    except TraceFormatError:
        raised = True
    check("unknown vertex rejected", raised)

    lines = format_verdict(verdict)
    check("verdict line", lines[0] == "COVERABLE vertex=v1 len=3", lines[0])


def run_all_tests():
    return run_suite("SEMANTICS TEST SUITE", [
        ("Step relation", test_step_relation),
        ("Replay errors", test_replay_errors),
        ("Running example oracle", test_running_example_oracle),
        ("Symmetry and families", test_symmetry_and_families),
        ("Trace format", test_trace_format),
    ])


if __name__ == "__main__":
    success = run_all_tests()
    sys.exit(0 if success else 1)
