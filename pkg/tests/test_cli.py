"""
CLI test suite.

Tests for:
1. check / unfold output and exit codes
2. Decision subcommands and their verdict lines
3. Witness traces written by one subcommand and replayed by another
4. Generators (gen-vass, gen-minsky, gen-random)
5. Settings overrides from the environment

Run: python tests/test_cli.py
"""

import contextlib
import io
import logging
import os
import sys
import tempfile

from harness import check, model_path, run_suite, settings_env

from cli import EXIT_DECIDED, EXIT_ERROR, EXIT_UNKNOWN, main
from infra.settings import Settings, get_settings
from protocol_model import parse_protocol

P = model_path("p.bp")
P_PRIME = model_path("p_prime.bp")
DETACHED = """protocol detached
messages a b
states qin u1 u2 x f1 f2 f3 f4 f5 f6 f7 f8
init qin
trans u1 !!a x
trans u2 ?a u2
trans u2 !!b x
"""


def run_cli(*argv):
    """(exit code, stdout lines)"""
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue().splitlines()


def test_check_and_unfold():
    code, lines = run_cli("check", P_PRIME)
    check("check exits 0", code == EXIT_DECIDED)
    check("P' is 2-phase-bounded", lines[0] == "PHASE_BOUNDED k=2", lines[0])
    check("partition table", lines[1:] == ["Q0: qin", "Q1b: q4", "Q1r: q1 q2", "Q2b: q3", "Q2r: q5"], str(lines))

    code, lines = run_cli("check", P)
    check("P is decided as not phase-bounded", code == EXIT_DECIDED and lines == ["NOT_PHASE_BOUNDED"])

    with tempfile.TemporaryDirectory() as tmp:
        broken = os.path.join(tmp, "broken.bp")
        with open(broken, "w", encoding="utf-8") as f:
            f.write("protocol broken\nmessages a\nstates s\n")
        code, _ = run_cli("check", broken)
        check("malformed protocol exits 1", code == EXIT_ERROR)
    check("missing file exits 1", run_cli("check", "does/not/exist.bp")[0] == EXIT_ERROR)

    with tempfile.TemporaryDirectory() as tmp:
        detached = os.path.join(tmp, "detached.bp")
        with open(detached, "w", encoding="utf-8") as f:
            f.write(DETACHED)
        code, lines = run_cli("check", detached)
        check("unreachable states are labelled", code == EXIT_DECIDED and lines[0] == "PHASE_BOUNDED k=2", str(lines))
        check("Q1r holds u1 u2", "Q1r: u1 u2" in lines, str(lines))
        with settings_env(BPCOVER_PHASE_SEARCH_BUDGET="1"):
            code, lines = run_cli("check", detached)
            check("exhausted phase search exits 2", code == EXIT_UNKNOWN and lines[0] == "UNKNOWN", str(lines))
            check("reason line", len(lines) == 2 and lines[1].startswith("reason=phase search"), str(lines))
            code, lines = run_cli("cover-lines", detached, "--target", "x")
            check("cover-lines reports it as UNKNOWN", code == EXIT_UNKNOWN and lines[0] == "UNKNOWN", str(lines))

    code, lines = run_cli("unfold", P_PRIME, "--k", "2")
    unfolded = parse_protocol("\n".join(lines) + "\n")
    check("unfolded protocol parses", code == EXIT_DECIDED)
    check("2-unfolding of P' has 30 states", len(unfolded.states) == 30, str(len(unfolded.states)))
    check("--k 0 is an error", run_cli("unfold", P_PRIME, "--k", "0")[0] == EXIT_ERROR)


def test_decisions():
    code, lines = run_cli("cover-lines", P_PRIME, "--target", "q5")
    check("cover-lines P' q5", code == EXIT_DECIDED and lines[0].startswith("COVERABLE"), str(lines))

    code, _ = run_cli("cover-lines", P, "--target", "q5")
    check("cover-lines on P is a precondition error", code == EXIT_ERROR)

    code, lines = run_cli("cover-1pb", model_path("star_example.bp"), "--target", "q4")
    check("cover-1pb star example q4", code == EXIT_DECIDED and lines[0].startswith("COVERABLE"), str(lines))

    code, lines = run_cli("brute", P, "--target", "q5", "--topology", "line:2")
    check("brute line:2 not coverable", code == EXIT_DECIDED and lines[0].startswith("NOT_COVERABLE"), str(lines))

    code, lines = run_cli("brute", P, "--target", "q5", "--topology", "clique:3", "--max-configurations", "3")
    check("budget exhaustion exits 2", code == EXIT_UNKNOWN and lines[0].startswith("UNKNOWN"), str(lines))

    code, lines = run_cli("brute", P, "--target", "q5", "--family", "lines:4")
    check("brute over a family", code == EXIT_DECIDED and lines[0].startswith("COVERABLE"), str(lines))

    code, _ = run_cli("brute", P, "--target", "q5", "--topology", "line:2", "--family", "lines:3")
    check("--topology and --family together exit 1", code == EXIT_ERROR)


def test_witness_round_trip():
    code, lines = run_cli("--witness", "brute", P, "--target", "q5", "--topology", "clique:3")
    check("verdict line", lines[0] == "COVERABLE vertex=v1 len=3", lines[0])
    check("topology line", "topology=clique:3" in lines, str(lines))

    with tempfile.TemporaryDirectory() as tmp:
        trace = os.path.join(tmp, "witness.txt")
        with open(trace, "w", encoding="utf-8") as f:
            f.write("\n".join(lines) + "\n")

        code, replayed = run_cli("replay", P, "--trace", trace, "--target", "q5")
        check("replay exits 0", code == EXIT_DECIDED, str(replayed))
        check("replay length", replayed[0] == "REPLAY_OK len=3", replayed[0])
        check("final configuration", replayed[1] == "final v1=q5 v2=qin v3=q3", replayed[1])
        check("target covered at v1", replayed[2] == "COVERED vertex=v1", replayed[2])

        code, lifted = run_cli("unfold-tree", P, "--topology", "clique:3", "--witness", trace)
        check("unfold-tree exits 0", code == EXIT_DECIDED)
        check("tree topology line", lifted[0].startswith("topology=tree:"), lifted[0])
        check("root keeps the covered state", lifted[1] == "root=v1 state=q5", lifted[1])

        bare = os.path.join(tmp, "bare.txt")
        with open(bare, "w", encoding="utf-8") as f:
            f.write("\n".join(line for line in lines if line.startswith("step")) + "\n")
        code, lifted_bare = run_cli("unfold-tree", P, "--topology", "clique:3", "--witness", bare)
        check("without a verdict line the last actor is the root", code == EXIT_DECIDED
              and lifted_bare[1] == "root=v3 state=q3", str(lifted_bare[:2]))

        tree_trace = os.path.join(tmp, "tree.txt")
        with open(tree_trace, "w", encoding="utf-8") as f:
            f.write("\n".join(lifted) + "\n")
        code, replayed = run_cli("replay", P, "--trace", tree_trace, "--target", "q5")
        check("lifted trace replays on the tree", code == EXIT_DECIDED and replayed[-1] == "COVERED vertex=ε",
              str(replayed))

        code, _ = run_cli("replay", P, "--trace", trace, "--topology", "line:2")
        check("trace on the wrong topology exits 1", code == EXIT_ERROR)


def test_generators():
    code, lines = run_cli("gen-vass", model_path("vass_yes.vass"))
    encoded = parse_protocol("\n".join(lines) + "\n")
    check("gen-vass output parses", code == EXIT_DECIDED and len(encoded.states) == 9, str(encoded.states))

    with tempfile.TemporaryDirectory() as tmp:
        protocol = os.path.join(tmp, "m1.bp")
        trace = os.path.join(tmp, "m1.trace")
        code, _ = run_cli("gen-minsky", model_path("m1.minsky"), "-o", protocol, "--trace", trace)
        check("gen-minsky writes both files", code == EXIT_DECIDED and os.path.exists(protocol) and os.path.exists(trace))
        code, replayed = run_cli("replay", protocol, "--trace", trace, "--target", "qf")
        check("halting trace covers qf at the tail", replayed[-1] == "COVERED vertex=v6", str(replayed[-1:]))

        out_dir = os.path.join(tmp, "corpus")
        code, lines = run_cli("--seed", "3", "gen-random", "--count", "2", "--k", "1", "-o", out_dir)
        check("gen-random writes files", sorted(os.listdir(out_dir)) == ["protocol0.bp", "protocol1.bp"])
        check("gen-random summary", lines[-1] == f"wrote 2 models to {out_dir}", lines[-1])

    _, first = run_cli("--seed", "5", "gen-random", "--kind", "vass")
    _, again = run_cli("--seed", "5", "gen-random", "--kind", "vass")
    check("seeded output is reproducible", first == again and first[0].startswith("vass"), str(first[:1]))


def test_bundled_models():
    code, lines = run_cli("models")
    names = [line.split()[0] for line in lines]
    check("models lists the catalog", code == EXIT_DECIDED and {"P", "P_prime", "M1", "vass_yes"} <= set(names),
          str(names))
    check("P_prime entry", "P_prime kind=protocol file=p_prime.bp targets=q5" in lines, str(lines))

    code, lines = run_cli("models", "--kind", "vass")
    check("kind filter", [line.split()[0] for line in lines] == ["vass_yes", "vass_no"], str(lines))

    code, lines = run_cli("check", "P_prime")
    check("catalog name instead of a path", code == EXIT_DECIDED and lines[0] == "PHASE_BOUNDED k=2", str(lines))
    check("unknown name is a missing file", run_cli("check", "no_such_model")[0] == EXIT_ERROR)


def test_settings_overrides():
    records = []
    handler = logging.Handler()
    handler.emit = records.append
    settings_logger = logging.getLogger("bpcover.settings")
    settings_logger.addHandler(handler)
    stdout = io.StringIO()
    try:
        with settings_env(BPCOVER_VASS_BUDGET="lots", BPCOVER_MAX_CONFIGURATIONS="1_000"):
            with contextlib.redirect_stdout(stdout):
                settings = get_settings()
    finally:
        settings_logger.removeHandler(handler)
    check("bad value falls back to the default", settings.vass_budget == Settings().vass_budget)
    check("underscored integer accepted", settings.max_configurations == 1000)
    check("warning goes through the logger", any("BPCOVER_VASS_BUDGET" in r.getMessage() for r in records),
          str([r.getMessage() for r in records]))
    check("nothing written to stdout", stdout.getvalue() == "", stdout.getvalue())


def run_all_tests():
    return run_suite("CLI TEST SUITE", [
        ("check and unfold", test_check_and_unfold),
        ("Decisions", test_decisions),
        ("Witness round trip", test_witness_round_trip),
        ("Generators", test_generators),
        ("Bundled models", test_bundled_models),
        ("Settings overrides", test_settings_overrides),
    ])


if __name__ == "__main__":
    success = run_all_tests()
    sys.exit(0 if success else 1)
