"""
bpcover command line.

Every subcommand prints machine-readable lines on stdout and maps its
outcome to an exit code:
    0  decided (COVERABLE / NOT_COVERABLE / PHASE_BOUNDED / file written)
    2  UNKNOWN (a budget or depth bound stopped the search)
    1  error (bad input, unmet precondition); the message goes to stderr

`-` stands for stdin when reading and stdout when writing.

Usage:
    python src/cli.py check config/models/p_prime.bp
    python src/cli.py cover-lines config/models/p_prime.bp --target q5
    python src/cli.py --witness brute config/models/p.bp --target q5 --topology clique:3
    python src/cli.py replay config/models/p.bp --trace witness.txt
    python src/cli.py models --kind protocol
    python src/cli.py check P_prime            # bundled model by catalog name
"""

import argparse
import os
import sys
import time
from typing import Callable, Dict, List, Optional, TextIO

from infra.budget import configuration_budget
from infra.logging_setup import configure_logging, get_logger
from line_cover import cover_lines
from minsky_gen import (
    MinskyFormatError,
    MinskyStepError,
    NotHaltingError,
    build_halting_witness,
    find_halting_run,
    line_length_for,
    parse_minsky,
    protocol_from_minsky,
)
from protocol_model import (
    NotPhaseBounded,
    NotPhaseBoundedWithin,
    PhaseSearchInconclusive,
    Protocol,
    ProtocolError,
    infer_phase_partition,
    k_unfold,
    naive_k_unfold,
    parse_protocol,
    print_protocol,
)
from semantics import (
    CoverVerdict,
    ReplayError,
    TraceFormatError,
    brute_force_cover,
    brute_force_cover_family,
    format_trace,
    format_verdict,
    parse_trace,
    replay,
)
from star_cover import NotBConfiguration, cover_1pb, protocol_from_vass
from topology import (
    ROOT,
    TopologyError,
    lift_execution,
    parse_topology,
    topology_family,
    unfold_to_tree,
)
from utils.model_library import get_model_library
from utils.random_models import protocol_corpus, vass_corpus
from vass import VassFormatError, parse_vass, print_vass

logger = get_logger("cli")

EXIT_DECIDED = 0
EXIT_ERROR = 1
EXIT_UNKNOWN = 2

# Errors reported as "message on stderr + exit 1"
USER_ERRORS = (
    ProtocolError,
    TopologyError,
    VassFormatError,
    MinskyFormatError,
    MinskyStepError,
    NotHaltingError,
    NotPhaseBoundedWithin,
    NotBConfiguration,
    ReplayError,
    TraceFormatError,
    OSError,
)


class CliError(Exception):
    """Invalid combination of arguments."""


# =============================================================================
# I/O HELPERS
# =============================================================================

def read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, "r", encoding="utf-8") as f:
        return f.read()


def write_text(path: Optional[str], text: str, out: TextIO):
    if path is None or path == "-":
        out.write(text)
        return
    with open(path, "w", encoding="utf-8") as f:
        f.write(text)
    logger.info("wrote %s", path)


def load_protocol_arg(path: str) -> Protocol:
    """A protocol file, `-`, or the catalog name of a bundled protocol (e.g. `P_prime`)."""
    if path != "-" and not os.path.exists(path):
        library = get_model_library()
        if path in library.names("protocol"):
            return library.protocol(path)
    return parse_protocol(read_text(path))


def emit_verdict(verdict: CoverVerdict, args, out: TextIO, topology: Optional[str] = None,
                 protocol: Optional[Protocol] = None) -> int:
    """Print the verdict block (and the witness with --witness); return the exit code."""
    for line in format_verdict(verdict):
        print(line, file=out)
    if verdict.is_unknown and verdict.reason:
        logger.info("unknown: %s", verdict.reason)
    if verdict.is_coverable and args.witness:
        if verdict.detail("topology") is None:
            print(f"topology={topology or verdict.witness.topology.name}", file=out)
        out.write(format_trace(verdict.witness, protocol))
    return EXIT_UNKNOWN if verdict.is_unknown else EXIT_DECIDED


# =============================================================================
# SUBCOMMANDS
# =============================================================================

def cmd_check(args, out: TextIO) -> int:
    p = load_protocol_arg(args.file)
    try:
        partition = infer_phase_partition(p)
    except NotPhaseBounded as e:
        logger.info("%s", e)
        print("NOT_PHASE_BOUNDED", file=out)
        return EXIT_DECIDED
    except PhaseSearchInconclusive as e:
        print("UNKNOWN", file=out)
        print(f"reason={e}", file=out)
        return EXIT_UNKNOWN
    print(f"PHASE_BOUNDED k={partition.k}", file=out)
    for name, states in partition.table(p.states):
        print(f"{name}: {' '.join(states)}".rstrip(), file=out)
    return EXIT_DECIDED


def cmd_unfold(args, out: TextIO) -> int:
    if args.k < 1:
        raise CliError("--k must be at least 1")
    p = load_protocol_arg(args.file)
    unfolded = naive_k_unfold(p, args.k) if args.naive else k_unfold(p, args.k)
    write_text(args.output, print_protocol(unfolded), out)
    return EXIT_DECIDED


def cmd_cover_lines(args, out: TextIO) -> int:
    p = load_protocol_arg(args.file)
    return emit_verdict(cover_lines(p, args.target), args, out, protocol=p)


def cmd_cover_1pb(args, out: TextIO) -> int:
    p = load_protocol_arg(args.file)
    return emit_verdict(cover_1pb(p, args.target), args, out, protocol=p)


def cmd_brute(args, out: TextIO) -> int:
    if (args.topology is None) == (args.family is None):
        raise CliError("brute needs exactly one of --topology or --family")
    p = load_protocol_arg(args.file)
    if args.topology is not None:
        t = parse_topology(args.topology)
        verdict = brute_force_cover(p, args.target, t, depth_bound=args.max_depth,
                                    budget=configuration_budget(args.max_configurations),
                                    symmetry=args.symmetry and t.is_star)
        return emit_verdict(verdict, args, out, topology=args.topology, protocol=p)
    family = topology_family(args.family)
    verdict = brute_force_cover_family(p, args.target, family, depth_bound=args.max_depth,
                                       max_configurations=args.max_configurations,
                                       symmetry=args.symmetry)
    return emit_verdict(verdict, args, out, protocol=p)


def cmd_gen_minsky(args, out: TextIO) -> int:
    m = parse_minsky(read_text(args.machine))
    p = protocol_from_minsky(m)
    write_text(args.output, print_protocol(p), out)
    if args.trace:
        run = find_halting_run(m, max_steps=args.max_steps, max_counter=args.max_counter)
        if run is None:
            raise NotHaltingError(f"no halting run of {m.name} within {args.max_steps} steps")
        witness = build_halting_witness(m, run, p)
        text = f"topology=line:{line_length_for(m, run)}\n" + format_trace(witness, p)
        write_text(args.trace, text, out)
    return EXIT_DECIDED


def cmd_gen_vass(args, out: TextIO) -> int:
    v = parse_vass(read_text(args.vass))
    p = protocol_from_vass(v, s_in=args.s_in)
    write_text(args.output, print_protocol(p), out)
    return EXIT_DECIDED


def _trace_topology(text: str) -> Optional[str]:
    for raw in text.splitlines():
        line = raw.strip()
        if line.startswith("topology="):
            return line.partition("=")[2]
    return None


def _trace_vertex(text: str) -> Optional[str]:
    """The vertex of a `COVERABLE vertex=<v> ...` verdict line, if the trace carries one."""
    for raw in text.splitlines():
        fields = raw.split()
        if len(fields) >= 2 and fields[0] == "COVERABLE" and fields[1].startswith("vertex="):
            return fields[1].partition("=")[2]
    return None


def cmd_unfold_tree(args, out: TextIO) -> int:
    p = load_protocol_arg(args.file)
    g = parse_topology(args.topology)
    text = read_text(args.witness_trace)
    execution = parse_trace(text, p, g)
    vertex = args.vertex or _trace_vertex(text)
    if vertex is None:
        if not execution.steps:
            raise CliError("empty trace; pass --vertex")
        vertex = execution.steps[-1].vertex
    depth = args.depth if args.depth is not None else len(execution)
    tree, labels = unfold_to_tree(g, vertex, depth)
    lifted = lift_execution(p, execution, tree, labels)
    final = replay(p, lifted)
    lifted_text = f"topology={tree.name}\nroot={labels[ROOT]} state={final.state_of(ROOT)}\n" + format_trace(lifted, p)
    write_text(args.output, lifted_text, out)
    return EXIT_DECIDED


def cmd_replay(args, out: TextIO) -> int:
    p = load_protocol_arg(args.file)
    text = read_text(args.trace)
    literal = args.topology or _trace_topology(text)
    if literal is None:
        raise CliError("no --topology given and the trace has no topology= line")
    t = parse_topology(literal)
    execution = parse_trace(text, p, t)
    final = replay(p, execution)
    print(f"REPLAY_OK len={len(execution)}", file=out)
    print("final " + " ".join(f"{v}={q}" for v, q in final.as_dict().items()), file=out)
    if args.target:
        hit = final.covers({args.target})
        print(f"COVERED vertex={hit}" if hit is not None else "NOT_COVERED", file=out)
    return EXIT_DECIDED


def cmd_gen_random(args, out: TextIO) -> int:
    if args.kind == "protocol":
        models = [print_protocol(p) for p in protocol_corpus(args.seed, args.count, k=args.k,
                                                             n_states=args.states)]
        suffix = ".bp"
    else:
        models = [print_vass(v) for v in vass_corpus(args.seed, args.count, n_states=args.states)]
        suffix = ".vass"
    if args.output in (None, "-"):
        out.write("\n".join(models))
        return EXIT_DECIDED
    os.makedirs(args.output, exist_ok=True)
    for i, text in enumerate(models):
        write_text(os.path.join(args.output, f"{args.kind}{i}{suffix}"), text, out)
    print(f"wrote {len(models)} models to {args.output}", file=out)
    return EXIT_DECIDED


def cmd_models(args, out: TextIO) -> int:
    library = get_model_library()
    for name in library.names(args.kind):
        entry = library.entry(name)
        targets = ",".join(library.targets(name))
        print(f"{name} kind={entry['kind']} file={entry['file']} targets={targets}", file=out)
    return EXIT_DECIDED


# =============================================================================
# PARSER
# =============================================================================

COMMANDS: Dict[str, Callable] = {
    "check": cmd_check,
    "unfold": cmd_unfold,
    "cover-lines": cmd_cover_lines,
    "cover-1pb": cmd_cover_1pb,
    "brute": cmd_brute,
    "gen-minsky": cmd_gen_minsky,
    "gen-vass": cmd_gen_vass,
    "unfold-tree": cmd_unfold_tree,
    "replay": cmd_replay,
    "gen-random": cmd_gen_random,
    "models": cmd_models,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bpcover", description="Coverability for broadcast protocols")
    parser.add_argument("--witness", action="store_true", help="print a replayable witness trace")
    parser.add_argument("--timing", action="store_true", help="print elapsed time")
    parser.add_argument("--seed", type=int, default=0, help="seed for random corpora")
    parser.add_argument("--log-level", default=None, help="override the configured log level")
    sub = parser.add_subparsers(dest="command", required=True)

    cmd = sub.add_parser("check", help="infer the phase partition")
    cmd.add_argument("file")

    cmd = sub.add_parser("unfold", help="k-unfolding of a protocol")
    cmd.add_argument("file")
    cmd.add_argument("--k", type=int, required=True)
    cmd.add_argument("--naive", action="store_true", help="drop the last-phase reception rule")
    cmd.add_argument("-o", "--output", default="-")

    for name in ("cover-lines", "cover-1pb"):
        cmd = sub.add_parser(name, help=f"decide coverability ({name})")
        cmd.add_argument("file")
        cmd.add_argument("--target", required=True)

    cmd = sub.add_parser("brute", help="exhaustive search on one topology or a family")
    cmd.add_argument("file")
    cmd.add_argument("--target", required=True)
    cmd.add_argument("--topology")
    cmd.add_argument("--family")
    cmd.add_argument("--max-depth", type=int, default=None)
    cmd.add_argument("--max-configurations", type=int, default=None)
    cmd.add_argument("--symmetry", action="store_true", help="leaf symmetry reduction on stars")

    cmd = sub.add_parser("gen-minsky", help="protocol simulating a two-counter machine")
    cmd.add_argument("machine")
    cmd.add_argument("-o", "--output", default="-")
    cmd.add_argument("--trace", help="also write a halting witness trace here")
    cmd.add_argument("--max-steps", type=int, default=50)
    cmd.add_argument("--max-counter", type=int, default=10)

    cmd = sub.add_parser("gen-vass", help="1-phase-bounded protocol encoding a VASS")
    cmd.add_argument("vass")
    cmd.add_argument("--s-in", default=None)
    cmd.add_argument("-o", "--output", default="-")

    cmd = sub.add_parser("unfold-tree", help="lift a graph witness onto its tree unfolding")
    cmd.add_argument("file")
    cmd.add_argument("--topology", required=True)
    cmd.add_argument("--witness", dest="witness_trace", required=True, help="trace file of the graph run")
    cmd.add_argument("--vertex", default=None, help="covering vertex (default: last acting vertex)")
    cmd.add_argument("--depth", type=int, default=None)
    cmd.add_argument("-o", "--output", default="-")

    cmd = sub.add_parser("replay", help="validate a trace")
    cmd.add_argument("file")
    cmd.add_argument("--trace", required=True)
    cmd.add_argument("--topology", default=None)
    cmd.add_argument("--target", default=None)

    cmd = sub.add_parser("gen-random", help="seeded random protocols or VASS")
    cmd.add_argument("--kind", choices=("protocol", "vass"), default="protocol")
    cmd.add_argument("--count", type=int, default=1)
    cmd.add_argument("--k", type=int, default=None, help="make protocols k-phase-bounded")
    cmd.add_argument("--states", type=int, default=5)
    cmd.add_argument("-o", "--output", default="-")

    cmd = sub.add_parser("models", help="list the bundled example models")
    cmd.add_argument("--kind", choices=("protocol", "vass", "minsky"), default=None)
    return parser


def main(argv: Optional[List[str]] = None, out: Optional[TextIO] = None) -> int:
    """Run one subcommand; returns the exit code."""
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level)

    started = time.perf_counter()
    try:
        code = COMMANDS[args.command](args, out)
    except (CliError, *USER_ERRORS) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR
    if args.timing:
        print(f"time={time.perf_counter() - started:.3f}s", file=out)
    return code


if __name__ == "__main__":
    sys.exit(main())
