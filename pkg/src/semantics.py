"""
Operational semantics of broadcast networks and the exhaustive oracle.

A configuration labels every vertex of a topology with a protocol state.
A step is either an internal move of one vertex or a broadcast: the sender
moves and every neighbour able to receive the message moves along one of
its receptions (all combinations are successors). On top of this module
sits every witness check of the toolkit: `replay` validates executions and
`brute_force_cover` is the BFS oracle the decision procedures are tested
against.

Trace format (one line per step, optional leading init line):
    init v1=qin v2=q1 ...
    step v=<vertex> t=<src>|<action>|<dst> recv=<u1>:<src>|?m|<dst>,...
Verdict lines:
    COVERABLE vertex=<v> len=<n> | NOT_COVERABLE | UNKNOWN
"""

import itertools
from collections import deque
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Dict, FrozenSet, Iterable, Iterator, List, Optional, Tuple, Union

from infra.budget import BudgetExceededError, ExplorationBudget, configuration_budget
from infra.logging_setup import get_logger
from infra.settings import get_settings
from protocol_model import Protocol, Transition, ProtocolError
from topology import ROOT, Topology, TopologyError

logger = get_logger("semantics")

Labels = Tuple[str, ...]


class ReplayError(Exception):
    """An execution step is not a legal successor."""

    def __init__(self, index: int, reason: str):
        self.index = index
        self.reason = reason
        super().__init__(f"illegal step at index {index}: {reason}")


class TraceFormatError(ValueError):
    """Malformed witness trace."""


class WitnessConstructionError(AssertionError):
    """A generated witness does not replay the way its construction says (a bug)."""


class SuccessorCapExceeded(BudgetExceededError):
    """Receiver-choice product of one step is larger than the cap."""

    def __init__(self, limit: int, used: int):
        super().__init__("successor-cap", limit, used)


# =============================================================================
# DATA MODEL
# =============================================================================

@dataclass(frozen=True)
class Configuration:
    """Labelling of a topology, aligned with the topology's vertex order."""
    topology: Topology
    labels: Labels

    def __post_init__(self):
        if len(self.labels) != len(self.topology.vertices):
            raise ValueError("labelling must cover every vertex")

    def state_of(self, vertex: str) -> str:
        return self.labels[self.topology.index[vertex]]

    def as_dict(self) -> Dict[str, str]:
        return dict(zip(self.topology.vertices, self.labels))

    def covers(self, targets: FrozenSet[str]) -> Optional[str]:
        """First vertex (canonical order) whose state is a target."""
        for v, q in zip(self.topology.vertices, self.labels):
            if q in targets:
                return v
        return None


def initial_configuration(p: Protocol, t: Topology) -> Configuration:
    return Configuration(t, (p.init,) * len(t.vertices))


@dataclass(frozen=True)
class Step:
    """
    One move: the acting vertex, its transition, and for broadcasts the
    reception chosen by each receiving neighbour (canonical vertex order).
    """
    vertex: str
    transition: Transition
    receivers: Tuple[Tuple[str, Transition], ...] = ()


@dataclass(frozen=True)
class Execution:
    initial: Configuration
    steps: Tuple[Step, ...] = ()

    def __len__(self) -> int:
        return len(self.steps)

    @property
    def topology(self) -> Topology:
        return self.initial.topology


class VerdictKind(Enum):
    COVERABLE = "COVERABLE"
    NOT_COVERABLE = "NOT_COVERABLE"
    UNKNOWN = "UNKNOWN"


@dataclass(frozen=True)
class CoverVerdict:
    """
    Answer of a coverability procedure.

    Attributes:
        kind: COVERABLE / NOT_COVERABLE / UNKNOWN
        witness: Replayable execution ending with `vertex` at a target
        vertex: Covering vertex
        reason: Budget or precondition detail for UNKNOWN answers
        details: Extra `key=value` fields printed after the verdict line
    """
    kind: VerdictKind
    witness: Optional[Execution] = None
    vertex: Optional[str] = None
    reason: str = ""
    details: Tuple[Tuple[str, str], ...] = ()

    @property
    def is_coverable(self) -> bool:
        return self.kind is VerdictKind.COVERABLE

    @property
    def is_unknown(self) -> bool:
        return self.kind is VerdictKind.UNKNOWN

    def detail(self, key: str) -> Optional[str]:
        return dict(self.details).get(key)


def coverable(witness: Execution, vertex: str, **details: str) -> CoverVerdict:
    return CoverVerdict(VerdictKind.COVERABLE, witness, vertex, details=tuple(details.items()))


def not_coverable(reason: str = "") -> CoverVerdict:
    return CoverVerdict(VerdictKind.NOT_COVERABLE, reason=reason)


def unknown(reason: str) -> CoverVerdict:
    return CoverVerdict(VerdictKind.UNKNOWN, reason=reason)


def target_set(target: Union[str, Iterable[str]]) -> FrozenSet[str]:
    if isinstance(target, str):
        return frozenset((target,))
    return frozenset(target)


# =============================================================================
# STEP RELATION
# =============================================================================

def successor_labels(
    p: Protocol,
    t: Topology,
    labels: Labels,
    cap: Optional[int] = None,
) -> Iterator[Tuple[Step, Labels]]:
    """
    All one-step successors of a labelling, in deterministic order
    (vertex order, then transition declaration order, then receiver choices).

    Raises:
        SuccessorCapExceeded: a broadcast has more receiver combinations than cap
    """
    cap = get_settings().successor_cap if cap is None else cap
    vertices = t.vertices
    neighbors = t.neighbor_indices
    for i, q in enumerate(labels):
        for tr in p.outgoing[q]:
            if tr.action.is_receive:
                continue
            if tr.action.is_internal:
                nxt = list(labels)
                nxt[i] = tr.dst
                yield Step(vertices[i], tr), tuple(nxt)
                continue
            m = tr.action.message
            receiving = []
            options = []
            for j in neighbors[i]:
                recs = p.receptions(labels[j], m)
                if recs:
                    receiving.append(j)
                    options.append(recs)
            count = 1
            for o in options:
                count *= len(o)
            if count > cap:
                raise SuccessorCapExceeded(cap, count)
            for combo in itertools.product(*options):
                nxt = list(labels)
                nxt[i] = tr.dst
                for j, rec in zip(receiving, combo):
                    nxt[j] = rec.dst
                receivers = tuple((vertices[j], rec) for j, rec in zip(receiving, combo))
                yield Step(vertices[i], tr, receivers), tuple(nxt)


def successors(p: Protocol, c: Configuration, cap: Optional[int] = None) -> List[Tuple[Step, Configuration]]:
    """Exactly the one-step successors of c, in deterministic order."""
    return [
        (step, Configuration(c.topology, labels))
        for step, labels in successor_labels(p, c.topology, c.labels, cap)
    ]


def apply_step(p: Protocol, c: Configuration, step: Step, index: int = 0) -> Configuration:
    """
    Apply one step after checking it against the step relation.

    Raises:
        ReplayError: with the given index when the step is illegal
    """
    t = c.topology
    if step.vertex not in t.index:
        raise ReplayError(index, f"unknown vertex {step.vertex}")
    tr = step.transition
    if tr not in p.outgoing.get(tr.src, ()):
        raise ReplayError(index, f"transition {tr} is not in the protocol")
    if tr.action.is_receive:
        raise ReplayError(index, f"vertex {step.vertex} cannot act with a reception")
    if c.state_of(step.vertex) != tr.src:
        raise ReplayError(index, f"vertex {step.vertex} is in {c.state_of(step.vertex)}, not {tr.src}")
    nxt = list(c.labels)
    nxt[t.index[step.vertex]] = tr.dst

    if tr.action.is_internal:
        if step.receivers:
            raise ReplayError(index, "internal step with receivers")
        return Configuration(t, tuple(nxt))

    m = tr.action.message
    chosen = dict(step.receivers)
    if len(chosen) != len(step.receivers):
        raise ReplayError(index, "receiver listed twice")
    for u in t.neighbors(step.vertex):
        state = c.state_of(u)
        if m in p.receive_set(state):
            rec = chosen.pop(u, None)
            if rec is None:
                raise ReplayError(index, f"neighbour {u} in {state} must receive {m}")
            if rec.src != state or rec.action.message != m or not rec.action.is_receive:
                raise ReplayError(index, f"receiver {u} cannot take {rec}")
            if rec not in p.receptions(state, m):
                raise ReplayError(index, f"reception {rec} is not in the protocol")
            nxt[t.index[u]] = rec.dst
    if chosen:
        extra = ", ".join(sorted(chosen))
        raise ReplayError(index, f"vertices {extra} cannot receive {m} from {step.vertex}")
    return Configuration(t, tuple(nxt))


def replay_configurations(p: Protocol, e: Execution) -> List[Configuration]:
    """C_0 .. C_n of a valid execution."""
    c = e.initial
    for q in c.labels:
        if q not in p.state_index:
            raise ReplayError(0, f"initial state {q} is not a protocol state")
    configs = [c]
    for i, step in enumerate(e.steps):
        c = apply_step(p, c, step, i)
        configs.append(c)
    return configs


def replay(p: Protocol, e: Execution) -> Configuration:
    """
    Final configuration of e.

    Raises:
        ReplayError: index and reason of the first illegal step
    """
    return replay_configurations(p, e)[-1]


def check_witness(p: Protocol, verdict: CoverVerdict, target: Union[str, Iterable[str]]) -> bool:
    """A COVERABLE verdict replays and its vertex ends at a target."""
    if not verdict.is_coverable or verdict.witness is None:
        return False
    final = replay(p, verdict.witness)
    return final.state_of(verdict.vertex) in target_set(target)


# =============================================================================
# EXHAUSTIVE ORACLE
# =============================================================================

def star_symmetry_key(t: Topology) -> Callable[[Labels], Labels]:
    """Canonical key for star labellings: root followed by sorted leaves."""
    if not t.is_star:
        raise TopologyError(f"symmetry reduction needs a star, got {t.name}")
    root = t.index[ROOT]

    def key(labels: Labels) -> Labels:
        leaves = sorted(q for i, q in enumerate(labels) if i != root)
        return (labels[root],) + tuple(leaves)
    return key


def brute_force_cover(
    p: Protocol,
    target: Union[str, Iterable[str]],
    t: Topology,
    depth_bound: Optional[int] = None,
    budget: Optional[ExplorationBudget] = None,
    symmetry: bool = False,
    initial: Optional[Configuration] = None,
) -> CoverVerdict:
    """
    BFS over the configurations of t from the initial configuration.

    Args:
        p: Protocol
        target: Target state or collection of states (any of them counts)
        t: Topology
        depth_bound: Maximum witness length explored
        budget: Configuration budget (defaults to the configured limit)
        symmetry: Identify star configurations up to leaf permutation
        initial: Start configuration (default: every vertex at init)

    Returns:
        COVERABLE with a minimal-length witness, NOT_COVERABLE when the
        reachable space is exhausted, UNKNOWN when truncated
    """
    targets = target_set(target)
    unknown_states = [q for q in targets if q not in p.state_index]
    if unknown_states:
        raise ProtocolError(f"unknown target state {unknown_states[0]}")
    budget = budget or configuration_budget()
    start = initial or initial_configuration(p, t)
    key = star_symmetry_key(t) if symmetry else (lambda labels: labels)

    hit = start.covers(targets)
    if hit is not None:
        return coverable(Execution(start), hit)

    parents: Dict[Labels, Tuple[Optional[Labels], Optional[Step], Labels]] = {
        key(start.labels): (None, None, start.labels)
    }
    queue = deque([(start.labels, 0)])
    truncated = False
    try:
        budget.charge()
        while queue:
            labels, depth = queue.popleft()
            for step, nxt in successor_labels(p, t, labels):
                k = key(nxt)
                if k in parents:
                    continue
                if depth_bound is not None and depth >= depth_bound:
                    truncated = True
                    break
                budget.charge()
                parents[k] = (key(labels), step, nxt)
                reached = Configuration(t, nxt)
                hit = reached.covers(targets)
                if hit is not None:
                    witness = _rebuild(parents, k, start)
                    logger.info("covered on %s after %d configurations", t.name, len(parents))
                    return coverable(witness, hit)
                queue.append((nxt, depth + 1))
    except BudgetExceededError as e:
        logger.info("brute force on %s stopped: %s", t.name, e)
        return unknown(str(e))

    if truncated:
        return unknown(f"depth bound {depth_bound} reached on {t.name}")
    return not_coverable(f"{len(parents)} configurations explored on {t.name}")


def _rebuild(parents, key, start: Configuration) -> Execution:
    steps: List[Step] = []
    while True:
        parent, step, _ = parents[key]
        if parent is None:
            break
        steps.append(step)
        key = parent
    steps.reverse()
    return Execution(start, tuple(steps))


def brute_force_cover_family(
    p: Protocol,
    target: Union[str, Iterable[str]],
    family: Iterable[Topology],
    depth_bound: Optional[int] = None,
    max_configurations: Optional[int] = None,
    symmetry: bool = False,
) -> CoverVerdict:
    """
    Try every topology of a family in order; one-sided.

    Returns:
        COVERABLE on the first topology that covers, otherwise UNKNOWN
    """
    tried = 0
    for t in family:
        tried += 1
        verdict = brute_force_cover(
            p, target, t, depth_bound=depth_bound,
            budget=configuration_budget(max_configurations),
            symmetry=symmetry and t.is_star,
        )
        if verdict.is_coverable:
            return coverable(verdict.witness, verdict.vertex, topology=t.name)
    return unknown(f"no cover found on {tried} topologies")


def alternation_bound(e: Execution) -> int:
    """
    Largest number of broadcast/reception blocks performed by one vertex
    (internal moves ignored); at least 1. The k-unfolding with this k
    simulates the execution.
    """
    history: Dict[str, List[str]] = {}
    for step in e.steps:
        if step.transition.action.is_broadcast:
            history.setdefault(step.vertex, []).append("b")
            for u, _ in step.receivers:
                history.setdefault(u, []).append("r")
    best = 1
    for moves in history.values():
        blocks = sum(1 for i, x in enumerate(moves) if i == 0 or moves[i - 1] != x)
        best = max(best, blocks)
    return best


# =============================================================================
# TRACE FORMAT
# =============================================================================

def format_step(step: Step) -> str:
    recv = ",".join(f"{u}:{t}" for u, t in step.receivers)
    return f"step v={step.vertex} t={step.transition} recv={recv}"


def format_trace(e: Execution, p: Optional[Protocol] = None) -> str:
    """Trace text; the init line is written unless every vertex starts at init."""
    lines = []
    if p is None or any(q != p.init for q in e.initial.labels):
        pairs = " ".join(f"{v}={q}" for v, q in e.initial.as_dict().items())
        lines.append(f"init {pairs}")
    lines.extend(format_step(s) for s in e.steps)
    return "\n".join(lines) + ("\n" if lines else "")


def parse_trace(text: str, p: Protocol, t: Topology) -> Execution:
    """
    Parse trace text against a protocol and topology.

    Raises:
        TraceFormatError: malformed line or unknown vertex
    """
    initial = initial_configuration(p, t)
    steps: List[Step] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, _, rest = line.partition(" ")
        try:
            if head == "init":
                if steps:
                    raise TraceFormatError("init line must come first")
                labels = dict(initial.as_dict())
                for pair in rest.split():
                    v, _, q = pair.partition("=")
                    if v not in t.index:
                        raise TraceFormatError(f"unknown vertex {v}")
                    labels[v] = q
                initial = Configuration(t, tuple(labels[v] for v in t.vertices))
            elif head == "step":
                steps.append(_parse_step(rest, t))
            elif head in ("COVERABLE", "NOT_COVERABLE", "UNKNOWN") or "=" in head:
                continue
            else:
                raise TraceFormatError(f"unexpected line start {head!r}")
        except (TraceFormatError, ProtocolError) as e:
            raise TraceFormatError(f"line {lineno}: {e}") from None
    return Execution(initial, tuple(steps))


def _parse_step(rest: str, t: Topology) -> Step:
    fields = dict(part.partition("=")[::2] for part in rest.split())
    if "v" not in fields or "t" not in fields:
        raise TraceFormatError("step needs v= and t=")
    vertex = fields["v"]
    if vertex not in t.index:
        raise TraceFormatError(f"unknown vertex {vertex}")
    transition = Transition.parse(fields["t"])
    receivers = []
    for u, tr in _split_receivers(fields.get("recv", "")):
        if u not in t.index:
            raise TraceFormatError(f"unknown receiver {u}")
        receivers.append((u, Transition.parse(tr)))
    return Step(vertex, transition, tuple(receivers))


def _split_receivers(recv: str) -> List[Tuple[str, str]]:
    """
    Split `u1:t1,u2:t2`. State names may contain commas but vertex ids and
    transitions never contain ':', so each vertex id is the text after the
    last comma preceding a ':'.
    """
    if not recv:
        return []
    chunks = recv.split(":")
    if len(chunks) < 2:
        raise TraceFormatError(f"bad receiver list {recv!r}")
    pairs = []
    vertex = chunks[0]
    for chunk in chunks[1:-1]:
        transition, sep, nxt = chunk.rpartition(",")
        if not sep:
            raise TraceFormatError(f"bad receiver list {recv!r}")
        pairs.append((vertex, transition))
        vertex = nxt
    pairs.append((vertex, chunks[-1]))
    return pairs


def format_verdict(verdict: CoverVerdict) -> List[str]:
    """Verdict line plus `key=value` detail lines."""
    if verdict.is_coverable:
        lines = [f"COVERABLE vertex={verdict.vertex} len={len(verdict.witness)}"]
    else:
        lines = [verdict.kind.value]
    lines.extend(f"{k}={v}" for k, v in verdict.details)
    return lines
