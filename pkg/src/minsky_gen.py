"""
Two-counter Minsky machines and their reduction to 6-phase-bounded protocols.

The generated protocol first organises a line v0 .. v_{m+1}: v0 runs the
machine, v1 .. vm hold counter units (vertex j lives in sub-protocol
j mod 3 so it can tell its left neighbour from its right one), and
v_{m+1} is the tail that checks every operation and finally covers `qf`.
Each machine step is a left-to-right sweep: v0 broadcasts the operation,
each middle vertex relays it (or executes it, after which it relays the
overlined variant) and confirms with the `d_` message once its right
neighbour has relayed.

Message names:
    n0 n1 n2     line set-up messages
    start        end of set-up
    done         end of simulation
    <op>_<i>     operation op in sub-protocol i (op in test_x, inc_x, dec_x,
                 ov_inc_x, ov_dec_x for x in x1, x2)
    d_<op>_<i>   confirmation of <op>_<i>

Machine file format:
    minsky M1
    init l0
    final lf
    trans l0 inc x1 l1
    trans l1 dec x1 l2
    trans l2 test0 x1 lf
"""

import re
from collections import deque
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

from infra.logging_setup import get_logger
from protocol_model import (
    ZERO,
    PhaseLabel,
    Protocol,
    Transition,
    bcast_label,
    broadcast,
    receive,
    recv_label,
)
from semantics import Configuration, Execution, Step, WitnessConstructionError, replay
from topology import make_line

logger = get_logger("minsky_gen")

NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_^',-]*\Z")

COUNTERS = ("x1", "x2")
SYNC = ("n0", "n1", "n2")
START = "start"
DONE = "done"
FINAL_STATE = "qf"
PHASES = 6


class MinskyFormatError(ValueError):
    """Malformed machine file or inconsistent machine."""


class MinskyStepError(Exception):
    """A run step is not enabled."""

    def __init__(self, index: int, reason: str):
        self.index = index
        self.reason = reason
        super().__init__(f"illegal machine step at index {index}: {reason}")


class NotHaltingError(Exception):
    """The run does not end in (l_f, 0, 0)."""


# =============================================================================
# MACHINES
# =============================================================================

class MinskyOp(Enum):
    INC = "inc"
    DEC = "dec"
    TEST = "test0"


@dataclass(frozen=True)
class MinskyTransition:
    src: str
    op: MinskyOp
    counter: str
    dst: str

    def __str__(self) -> str:
        return f"{self.src} {self.op.value} {self.counter} {self.dst}"


@dataclass(frozen=True)
class MinskyMachine:
    name: str
    locations: Tuple[str, ...]
    transitions: Tuple[MinskyTransition, ...]
    init: str
    final: str

    def __post_init__(self):
        object.__setattr__(self, "locations", tuple(self.locations))
        object.__setattr__(self, "transitions", tuple(self.transitions))
        known = set(self.locations)
        if len(known) != len(self.locations):
            raise MinskyFormatError("duplicate location")
        for loc in (self.init, self.final):
            if loc not in known:
                raise MinskyFormatError(f"unknown location {loc}")
        for t in self.transitions:
            if t.src not in known or t.dst not in known:
                raise MinskyFormatError(f"transition {t} uses an unknown location")
            if t.counter not in COUNTERS:
                raise MinskyFormatError(f"transition {t} uses counter {t.counter}, expected x1 or x2")

    @cached_property
    def outgoing(self) -> Dict[str, Tuple[MinskyTransition, ...]]:
        table: Dict[str, List[MinskyTransition]] = {loc: [] for loc in self.locations}
        for t in self.transitions:
            table[t.src].append(t)
        return {loc: tuple(ts) for loc, ts in table.items()}


@dataclass(frozen=True)
class MinskyConfig:
    loc: str
    x1: int = 0
    x2: int = 0

    def value(self, counter: str) -> int:
        return getattr(self, counter)

    def total(self) -> int:
        return self.x1 + self.x2


MinskyRun = Tuple[MinskyTransition, ...]


def minsky_step(c: MinskyConfig, t: MinskyTransition) -> Optional[MinskyConfig]:
    """Successor of c under t, or None when t is disabled."""
    if c.loc != t.src:
        return None
    values = {"x1": c.x1, "x2": c.x2}
    if t.op is MinskyOp.INC:
        values[t.counter] += 1
    elif t.op is MinskyOp.DEC:
        if values[t.counter] == 0:
            return None
        values[t.counter] -= 1
    elif values[t.counter] != 0:
        return None
    return MinskyConfig(t.dst, **values)


def _check_step(c: MinskyConfig, t: MinskyTransition, index: int) -> MinskyConfig:
    nxt = minsky_step(c, t)
    if nxt is not None:
        return nxt
    if c.loc != t.src:
        raise MinskyStepError(index, f"machine is in {c.loc}, not {t.src}")
    if t.op is MinskyOp.DEC:
        raise MinskyStepError(index, f"{t.counter} is 0, cannot decrement")
    raise MinskyStepError(index, f"{t.counter} is {c.value(t.counter)}, zero test fails")


def run_configurations(m: MinskyMachine, run: Sequence[MinskyTransition]) -> List[MinskyConfig]:
    """(l_in,0,0) followed by the configuration after each step."""
    c = MinskyConfig(m.init)
    configs = [c]
    for i, t in enumerate(run):
        if t not in m.transitions:
            raise MinskyStepError(i, f"{t} is not a transition of {m.name}")
        c = _check_step(c, t, i)
        configs.append(c)
    return configs


def simulate_minsky(m: MinskyMachine, run: Sequence[MinskyTransition]) -> MinskyConfig:
    """
    Final configuration of a run from (l_in, 0, 0).

    Raises:
        MinskyStepError: index and reason of the first illegal step
    """
    return run_configurations(m, run)[-1]


def is_halting(m: MinskyMachine, run: Sequence[MinskyTransition]) -> bool:
    return simulate_minsky(m, run) == MinskyConfig(m.final)


def find_halting_run(m: MinskyMachine, max_steps: int = 50, max_counter: int = 10) -> Optional[MinskyRun]:
    """
    Shortest halting run with at most max_steps steps and counters bounded
    by max_counter, or None when there is none within those bounds.
    """
    start = MinskyConfig(m.init)
    goal = MinskyConfig(m.final)
    parents: Dict[MinskyConfig, Tuple[Optional[MinskyConfig], Optional[MinskyTransition]]] = {start: (None, None)}
    queue = deque([(start, 0)])
    while queue:
        c, depth = queue.popleft()
        if c == goal:
            run: List[MinskyTransition] = []
            while parents[c][0] is not None:
                prev, t = parents[c]
                run.append(t)
                c = prev
            return tuple(reversed(run))
        if depth >= max_steps:
            continue
        for t in m.outgoing[c.loc]:
            nxt = minsky_step(c, t)
            if nxt is None or nxt in parents or max(nxt.x1, nxt.x2) > max_counter:
                continue
            parents[nxt] = (c, t)
            queue.append((nxt, depth + 1))
    return None


# =============================================================================
# FILE FORMAT
# =============================================================================

def parse_minsky(text: str) -> MinskyMachine:
    """Parse the machine format; locations are collected in order of appearance."""
    name = init = final = None
    locations: List[str] = []
    transitions: List[MinskyTransition] = []

    def see(loc: str, lineno: int):
        if not NAME.match(loc):
            raise MinskyFormatError(f"line {lineno}: bad location {loc!r}")
        if loc not in locations:
            locations.append(loc)

    for lineno, raw in enumerate(text.splitlines(), start=1):
        toks = raw.split("#", 1)[0].split()
        if not toks:
            continue
        key, args = toks[0], toks[1:]
        if key == "minsky" and len(args) == 1:
            name = args[0]
        elif key == "init" and len(args) == 1:
            init = args[0]
            see(init, lineno)
        elif key == "final" and len(args) == 1:
            final = args[0]
            see(final, lineno)
        elif key == "locations":
            for loc in args:
                see(loc, lineno)
        elif key == "trans" and len(args) == 4:
            src, op, counter, dst = args
            try:
                kind = MinskyOp(op)
            except ValueError:
                raise MinskyFormatError(f"line {lineno}: expected inc, dec or test0, got {op!r}") from None
            if counter not in COUNTERS:
                raise MinskyFormatError(f"line {lineno}: unknown counter {counter!r}")
            see(src, lineno)
            see(dst, lineno)
            transitions.append(MinskyTransition(src, kind, counter, dst))
        else:
            raise MinskyFormatError(f"line {lineno}: unexpected line {raw.strip()!r}")
    if name is None:
        raise MinskyFormatError("missing `minsky <name>` header")
    if init is None or final is None:
        raise MinskyFormatError("machine needs both `init` and `final`")
    return MinskyMachine(name, tuple(locations), tuple(transitions), init, final)


def print_minsky(m: MinskyMachine) -> str:
    lines = [f"minsky {m.name}", " ".join(["locations", *m.locations]), f"init {m.init}", f"final {m.final}"]
    lines.extend(f"trans {t}" for t in m.transitions)
    return "\n".join(lines) + "\n"


def load_minsky(path) -> MinskyMachine:
    with open(path, "r", encoding="utf-8") as f:
        return parse_minsky(f.read())


# =============================================================================
# ALPHABET
# =============================================================================

def operations() -> Tuple[str, ...]:
    """OP: test, inc, dec and the overlined inc/dec, per counter."""
    ops: List[str] = []
    for x in COUNTERS:
        ops.extend([f"test_{x}", f"inc_{x}", f"dec_{x}", f"ov_inc_{x}", f"ov_dec_{x}"])
    return tuple(ops)


OPERATIONS = operations()


def op_msg(op: str, i: int) -> str:
    return f"{op}_{i % 3}"


def ok_msg(op: str, i: int) -> str:
    return f"d_{op}_{i % 3}"


def op_set(i: int) -> Set[str]:
    return {op_msg(op, i) for op in OPERATIONS}


def ok_set(i: int) -> Set[str]:
    return {ok_msg(op, i) for op in OPERATIONS}


def alphabet() -> Tuple[str, ...]:
    msgs = list(SYNC) + [START, DONE]
    for i in range(3):
        msgs.extend(op_msg(op, i) for op in OPERATIONS)
    for i in range(3):
        msgs.extend(ok_msg(op, i) for op in OPERATIONS)
    return tuple(msgs)


ALPHABET = alphabet()
assert len(ALPHABET) == 65


# =============================================================================
# STATE NAMES
# =============================================================================

def loc_state(loc: str) -> str:
    return f"loc_{loc}"


def holder_state(counter: Optional[str], s: int) -> str:
    """z_s for an empty vertex, cnt_<x>_s for a vertex holding one unit of x."""
    return f"z_{s}" if counter is None else f"cnt_{counter}_{s}"


def relay_state(op: str, s: int, counter: Optional[str] = None) -> str:
    return f"r_{op}_{s}" if counter is None else f"r_{op}_{s}_{counter}"


def frown_state(label: PhaseLabel) -> str:
    """Sink for the given class: frown_<i>_<b|r>."""
    return f"frown_{label.phase}_{label.polarity}"


def _frown_label(label: PhaseLabel) -> PhaseLabel:
    if label.is_zero:
        return recv_label(1)
    if label.polarity == "b":
        return recv_label(min(label.phase + 1, PHASES))
    return label


class _ProtocolBuilder:
    """Collects states with their intended phase label, transitions, and sink receptions."""

    def __init__(self):
        self.labels: Dict[str, PhaseLabel] = {}
        self.transitions: List[Transition] = []
        self.sinks: List[Transition] = []

    def state(self, name: str, label: PhaseLabel) -> str:
        have = self.labels.setdefault(name, label)
        if have != label:
            raise AssertionError(f"{name} labelled both {have} and {label}")
        return name

    def add(self, src: str, action, dst: str):
        self.transitions.append(Transition(src, action, dst))

    def frown(self, src: str, ignored: Iterable[str] = ()):
        """Send src to its sink on every message it neither handles nor ignores (`start` aside)."""
        handled = {t.action.message for t in self.transitions if t.src == src and t.action.is_receive}
        skip = handled | set(ignored) | {START}
        sink = self.state(frown_state(_frown_label(self.labels[src])), _frown_label(self.labels[src]))
        self.sinks.extend(Transition(src, receive(m), sink) for m in ALPHABET if m not in skip)

    def build(self, name: str, init: str) -> Protocol:
        transitions = list(dict.fromkeys(self.transitions + self.sinks))
        return Protocol(name, tuple(self.labels), ALPHABET, init, tuple(transitions))


def _machine_op(t: MinskyTransition) -> str:
    return f"{'test' if t.op is MinskyOp.TEST else t.op.value}_{t.counter}"


def protocol_from_minsky(m: MinskyMachine) -> Protocol:
    """
    Protocol whose state `qf` is coverable iff the machine halts.

    The result is 6-phase-bounded. Wrong receptions lead to a sink
    `frown_<i>_<b|r>` of the class they land in; only receiving classes
    are ever needed, so every sink in the output ends in `_r`.
    """
    b = _ProtocolBuilder()
    qin = b.state("qin", ZERO)

    # line set-up: head, middle vertices per sub-protocol, tail
    h1 = b.state("h1", bcast_label(1))
    h2 = b.state("h2", recv_label(2))
    b.add(qin, broadcast("n0"), h1)
    b.add(h1, receive("n1"), h2)
    b.add(h2, broadcast(START), b.state(loc_state(m.init), bcast_label(3)))
    for s in range(3):
        i1 = b.state(f"init1_{s}", recv_label(1))
        i2 = b.state(f"init2_{s}", bcast_label(2))
        i3 = b.state(f"init3_{s}", recv_label(3))
        b.add(qin, receive(SYNC[(s - 1) % 3]), i1)
        b.add(i1, broadcast(SYNC[s]), i2)
        b.add(i2, receive(SYNC[(s + 1) % 3]), i3)
        b.add(i3, broadcast(START), b.state(holder_state(None, s), bcast_label(4)))
    t1 = b.state("tail1", recv_label(1))
    t2 = b.state("tail2", bcast_label(2))
    tail = b.state("tail", recv_label(3))
    b.add(qin, receive("n1"), t1)
    b.add(t1, broadcast("n2"), t2)
    b.add(t2, receive(START), tail)

    # machine vertex
    for loc in m.locations:
        b.state(loc_state(loc), bcast_label(3))
    halt = b.state("qf_M", bcast_label(3))
    qts = []
    for j, t in enumerate(m.transitions):
        op = _machine_op(t)
        qt = b.state(f"qt_{j}", bcast_label(3))
        b.add(loc_state(t.src), broadcast(op_msg(op, 0)), qt)
        b.add(qt, broadcast(ok_msg(op, 0)), loc_state(t.dst))
        ignored = {op_msg(op, 1)}
        if t.op is not MinskyOp.TEST:
            ignored.add(op_msg(f"ov_{op}", 1))
        qts.append((qt, ignored))
    b.add(loc_state(m.final), broadcast(DONE), halt)

    # counter vertices
    for s in range(3):
        z = holder_state(None, s)
        for x in COUNTERS:
            cnt = b.state(holder_state(x, s), bcast_label(4))
            qinc = b.state(f"qinc_{x}_{s}", bcast_label(4))
            qdec = b.state(f"qdec_{x}_{s}", bcast_label(4))
            b.add(z, broadcast(op_msg(f"inc_{x}", s)), qinc)
            b.add(qinc, broadcast(ok_msg(f"ov_inc_{x}", s)), cnt)
            b.add(cnt, broadcast(op_msg(f"dec_{x}", s)), qdec)
            b.add(qdec, broadcast(ok_msg(f"ov_dec_{x}", s)), z)
        for op in OPERATIONS:
            r = b.state(relay_state(op, s), bcast_label(4))
            b.add(z, broadcast(op_msg(op, s)), r)
            b.add(r, broadcast(ok_msg(op, s)), z)
            for x in COUNTERS:
                if op == f"test_{x}":
                    continue
                rx = b.state(relay_state(op, s, x), bcast_label(4))
                b.add(holder_state(x, s), broadcast(op_msg(op, s)), rx)
                b.add(rx, broadcast(ok_msg(op, s)), holder_state(x, s))
        dn = b.state(f"dn_{s}", recv_label(5))
        dd = b.state(f"dd_{s}", bcast_label(6))
        b.add(z, receive(DONE), dn)
        b.add(dn, broadcast(DONE), dd)

    # tail checks
    qf = b.state(FINAL_STATE, recv_label(3))
    b.add(tail, receive(DONE), qf)
    checked = []
    for x in COUNTERS:
        for op in (f"ov_inc_{x}", f"ov_dec_{x}", f"test_{x}"):
            t_op = b.state(f"tail_{op}", recv_label(3))
            b.add(tail, receive(op_msg(op, 1)), t_op)
            b.add(t_op, receive(ok_msg(op, 1)), tail)
            checked.append(t_op)

    # wrong receptions
    for s in range(3):
        b.frown(f"init1_{s}")
        b.frown(f"init2_{s}")
        b.frown(f"init3_{s}")
    for name in (h1, h2, t1, t2, tail, *checked):
        b.frown(name)
    for loc in m.locations:
        b.frown(loc_state(loc), ok_set(1))
    for qt, ignored in qts:
        b.frown(qt, ignored)
    for s in range(3):
        left, right = (s - 1) % 3, (s + 1) % 3
        base = op_set(left) | ok_set(right)
        b.frown(holder_state(None, s), base)
        for x in COUNTERS:
            b.frown(holder_state(x, s), base - {op_msg(f"test_{x}", left)})
            b.frown(f"qinc_{x}_{s}", {ok_msg(f"inc_{x}", left), op_msg(f"ov_inc_{x}", right)})
            b.frown(f"qdec_{x}_{s}", {ok_msg(f"dec_{x}", left), op_msg(f"ov_dec_{x}", right)})
        for op in OPERATIONS:
            ignored = {ok_msg(op, left), op_msg(op, right)}
            b.frown(relay_state(op, s), ignored)
            for x in COUNTERS:
                if op != f"test_{x}":
                    b.frown(relay_state(op, s, x), ignored)
        b.frown(f"dn_{s}")

    p = b.build(f"{m.name}_reduction", qin)
    logger.info("generated %s: %d states, %d transitions", p.name, len(p.states), len(p.transitions))
    return p


def is_sink(state: str) -> bool:
    return state.startswith("frown_")


# =============================================================================
# HALTING WITNESS
# =============================================================================

def simulation_width(m: MinskyMachine, run: Sequence[MinskyTransition]) -> int:
    """Number of counter vertices: first value > max counter sum with value mod 3 == 1."""
    width = max(c.total() for c in run_configurations(m, run)) + 1
    while width % 3 != 1:
        width += 1
    return width


def line_length_for(m: MinskyMachine, run: Sequence[MinskyTransition]) -> int:
    """Vertices of the line the halting witness runs on (machine, counters, tail)."""
    return simulation_width(m, run) + 2


class _LineWitness:
    """Fires broadcasts on a line while tracking labels; receivers never go to a sink."""

    def __init__(self, p: Protocol, n: int):
        self.p = p
        self.topology = make_line(n)
        self.vertices = self.topology.vertices
        self.labels = [p.init] * n
        self.steps: List[Step] = []

    def fire(self, j: int, src: str, message: str, dst: str, prefer: Optional[Dict[int, str]] = None):
        if self.labels[j] != src:
            raise WitnessConstructionError(f"{self.vertices[j]} is in {self.labels[j]}, expected {src}")
        prefer = prefer or {}
        receivers = []
        for u in (j - 1, j + 1):
            if not 0 <= u < len(self.labels):
                continue
            options = [r for r in self.p.receptions(self.labels[u], message) if not is_sink(r.dst)]
            if u in prefer:
                options = [r for r in options if r.dst == prefer[u]]
            if self.p.receptions(self.labels[u], message) and not options:
                raise WitnessConstructionError(
                    f"{self.vertices[u]} in {self.labels[u]} would fail on {message} from {self.vertices[j]}"
                )
            if options:
                receivers.append((u, options[0]))
        self.steps.append(Step(
            self.vertices[j],
            Transition(src, broadcast(message), dst),
            tuple((self.vertices[u], r) for u, r in receivers),
        ))
        self.labels[j] = dst
        for u, r in receivers:
            self.labels[u] = r.dst

    def execution(self) -> Execution:
        initial = Configuration(self.topology, (self.p.init,) * len(self.labels))
        return Execution(initial, tuple(self.steps))


def build_halting_witness(
    m: MinskyMachine,
    run: Sequence[MinskyTransition],
    p: Optional[Protocol] = None,
) -> Execution:
    """
    Execution of protocol_from_minsky(m) on line:(width+2) whose tail vertex
    ends in `qf`, simulating the halting run step by step.

    Raises:
        MinskyStepError: the run is not executable
        NotHaltingError: the run does not end in (l_f, 0, 0)
    """
    if not is_halting(m, run):
        raise NotHaltingError(f"run of {m.name} ends in {simulate_minsky(m, run)}, not ({m.final}, 0, 0)")
    p = p or protocol_from_minsky(m)
    width = simulation_width(m, run)
    w = _LineWitness(p, width + 2)

    # set-up: sync messages left to right, then start left to right
    w.fire(0, "qin", "n0", "h1")
    for j in range(1, width + 1):
        s = j % 3
        nxt = "tail1" if j == width else f"init1_{(j + 1) % 3}"
        w.fire(j, f"init1_{s}", SYNC[s], f"init2_{s}", prefer={j + 1: nxt})
    w.fire(width + 1, "tail1", "n2", "tail2")
    w.fire(0, "h2", START, loc_state(m.init))
    for j in range(1, width + 1):
        w.fire(j, f"init3_{j % 3}", START, holder_state(None, j % 3))

    holding: List[Optional[str]] = [None] * (width + 1)
    for t in run:
        _simulate_step(w, m, t, holding, width)

    w.fire(0, loc_state(m.final), DONE, "qf_M")
    for j in range(1, width + 1):
        w.fire(j, f"dn_{j % 3}", DONE, f"dd_{j % 3}")

    e = w.execution()
    final = replay(p, e)
    if final.labels[-1] != FINAL_STATE:
        raise WitnessConstructionError(f"tail ends in {final.labels[-1]}")
    logger.debug("halting witness for %s: line:%d, %d steps", m.name, width + 2, len(e))
    return e


def _simulate_step(w: _LineWitness, m: MinskyMachine, t: MinskyTransition, holding: List[Optional[str]], width: int):
    op = _machine_op(t)
    x = t.counter
    if t.op is MinskyOp.INC:
        f = next((j for j in range(1, width) if holding[j] is None), None)
    elif t.op is MinskyOp.DEC:
        f = next((j for j in range(1, width + 1) if holding[j] == x), None)
    else:
        f = width + 1
    if f is None:
        raise WitnessConstructionError(f"no vertex can execute {t}")

    qt = f"qt_{m.transitions.index(t)}"
    plan = []  # (src, first message, middle state, second message, dst) per counter vertex
    for j in range(1, width + 1):
        s = j % 3
        here = holder_state(holding[j], s)
        if j != f:
            relayed = op if j < f else f"ov_{op}"
            mid = relay_state(relayed, s, holding[j])
            plan.append((here, op_msg(relayed, s), mid, ok_msg(relayed, s), here))
        elif t.op is MinskyOp.INC:
            plan.append((here, op_msg(op, s), f"qinc_{x}_{s}", ok_msg(f"ov_{op}", s), holder_state(x, s)))
        else:
            plan.append((here, op_msg(op, s), f"qdec_{x}_{s}", ok_msg(f"ov_{op}", s), holder_state(None, s)))

    w.fire(0, loc_state(t.src), op_msg(op, 0), qt)
    for j in range(1, width + 1):
        src, first, mid, _, _ = plan[j - 1]
        w.fire(j, src, first, mid)
        if j == 1:
            w.fire(0, qt, ok_msg(op, 0), loc_state(t.dst))
        else:
            _, _, prev_mid, second, prev_dst = plan[j - 2]
            w.fire(j - 1, prev_mid, second, prev_dst)
    _, _, mid, second, dst = plan[-1]
    w.fire(width, mid, second, dst)

    if f <= width:
        holding[f] = x if t.op is MinskyOp.INC else None
