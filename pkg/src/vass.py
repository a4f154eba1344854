"""
Vector addition systems with states (VASS).

A VASS has control states, counters, and transitions that increment,
decrement (only when positive) or leave the counters unchanged. Control-state
reachability ("can the goal state be reached with any valuation?") is
decided by backward coverability over minimal bases of upward-closed sets.
Two forward procedures serve as second opinions in tests: a bounded
explicit search with a counter cap, and a Karp-Miller tree.

File format:
    vass <name>
    counters x y
    states s0 s1 s2
    init s0
    final s2            # optional
    trans s0 x++ s1
    trans s1 skip s2
    trans s2 x-- s0
"""

import math
import re
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from infra.budget import (
    BudgetExceededError,
    ExplorationBudget,
    karp_miller_budget,
    vass_budget,
)
from infra.logging_setup import get_logger

logger = get_logger("vass")

NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_^',-]*\Z")


class VassFormatError(ValueError):
    """Malformed VASS file or inconsistent model."""


class VassPathError(Exception):
    """A transition path cannot be replayed."""

    def __init__(self, index: int, reason: str):
        self.index = index
        self.reason = reason
        super().__init__(f"illegal VASS step at index {index}: {reason}")


class OpKind(Enum):
    INC = "++"
    DEC = "--"
    SKIP = "skip"


@dataclass(frozen=True)
class VassOp:
    kind: OpKind
    counter: Optional[str] = None

    def __str__(self) -> str:
        if self.kind is OpKind.SKIP:
            return "skip"
        return f"{self.counter}{self.kind.value}"

    @classmethod
    def parse(cls, token: str) -> "VassOp":
        if token == "skip":
            return cls(OpKind.SKIP)
        for kind in (OpKind.INC, OpKind.DEC):
            if token.endswith(kind.value) and NAME.match(token[:-2]):
                return cls(kind, token[:-2])
        raise VassFormatError(f"expected x++, x-- or skip, got {token!r}")


SKIP = VassOp(OpKind.SKIP)


def inc(counter: str) -> VassOp:
    return VassOp(OpKind.INC, counter)


def dec(counter: str) -> VassOp:
    return VassOp(OpKind.DEC, counter)


@dataclass(frozen=True)
class VassTransition:
    src: str
    op: VassOp
    dst: str

    def __str__(self) -> str:
        return f"{self.src} {self.op} {self.dst}"


@dataclass(frozen=True)
class Vass:
    """
    (S, X, T) with declaration-ordered tuples; init/final are optional
    defaults used by the file format and the CLI.
    """
    name: str
    counters: Tuple[str, ...]
    states: Tuple[str, ...]
    transitions: Tuple[VassTransition, ...]
    init: Optional[str] = None
    final: Optional[str] = None

    def __post_init__(self):
        for attr in ("counters", "states", "transitions"):
            object.__setattr__(self, attr, tuple(getattr(self, attr)))
        if len(set(self.states)) != len(self.states):
            raise VassFormatError("duplicate control state")
        if len(set(self.counters)) != len(self.counters):
            raise VassFormatError("duplicate counter")
        known = set(self.states)
        for s in (self.init, self.final):
            if s is not None and s not in known:
                raise VassFormatError(f"unknown state {s}")
        for t in self.transitions:
            if t.src not in known or t.dst not in known:
                raise VassFormatError(f"transition {t} uses an unknown state")
            if t.op.counter is not None and t.op.counter not in self.counters:
                raise VassFormatError(f"transition {t} uses an unknown counter")
        if len(set(self.transitions)) != len(self.transitions):
            raise VassFormatError("duplicate transition")

    @cached_property
    def counter_index(self) -> Dict[str, int]:
        return {x: i for i, x in enumerate(self.counters)}

    @cached_property
    def incoming(self) -> Dict[str, Tuple[VassTransition, ...]]:
        table: Dict[str, List[VassTransition]] = {s: [] for s in self.states}
        for t in self.transitions:
            table[t.dst].append(t)
        return {s: tuple(ts) for s, ts in table.items()}

    @cached_property
    def outgoing(self) -> Dict[str, Tuple[VassTransition, ...]]:
        table: Dict[str, List[VassTransition]] = {s: [] for s in self.states}
        for t in self.transitions:
            table[t.src].append(t)
        return {s: tuple(ts) for s, ts in table.items()}


@dataclass(frozen=True)
class VassConfig:
    """Control state and a valuation aligned with Vass.counters."""
    state: str
    valuation: Tuple[int, ...]

    def value(self, v: Vass, counter: str) -> int:
        return self.valuation[v.counter_index[counter]]


def zero_config(v: Vass, state: Optional[str] = None) -> VassConfig:
    return VassConfig(state or v.init, (0,) * len(v.counters))


def config_from(v: Vass, state: str, values: Dict[str, int]) -> VassConfig:
    return VassConfig(state, tuple(values.get(x, 0) for x in v.counters))


class Answer(Enum):
    YES = "YES"
    NO = "NO"
    UNKNOWN = "UNKNOWN"


@dataclass(frozen=True)
class ReachResult:
    answer: Answer
    path: Tuple[VassTransition, ...] = ()
    reason: str = ""


# =============================================================================
# FILE FORMAT
# =============================================================================

def parse_vass(text: str) -> Vass:
    """Parse the VASS file format; raises VassFormatError with the line number."""
    name = None
    counters: List[str] = []
    states: List[str] = []
    init = final = None
    transitions: List[VassTransition] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        toks = raw.split("#", 1)[0].split()
        if not toks:
            continue
        key, args = toks[0], toks[1:]
        try:
            if key == "vass" and len(args) == 1:
                name = args[0]
            elif key == "counters":
                counters.extend(args)
            elif key == "states":
                states.extend(args)
            elif key == "init" and len(args) == 1:
                init = args[0]
            elif key == "final" and len(args) == 1:
                final = args[0]
            elif key == "trans" and len(args) == 3:
                transitions.append(VassTransition(args[0], VassOp.parse(args[1]), args[2]))
            else:
                raise VassFormatError(f"unexpected line {raw.strip()!r}")
            for ident in args:
                if key != "trans" and not NAME.match(ident):
                    raise VassFormatError(f"bad identifier {ident!r}")
        except VassFormatError as e:
            raise VassFormatError(f"line {lineno}: {e}") from None
    if name is None:
        raise VassFormatError("missing `vass <name>` header")
    return Vass(name, tuple(counters), tuple(states), tuple(transitions), init, final)


def print_vass(v: Vass) -> str:
    lines = [f"vass {v.name}", " ".join(["counters", *v.counters]), " ".join(["states", *v.states])]
    if v.init is not None:
        lines.append(f"init {v.init}")
    if v.final is not None:
        lines.append(f"final {v.final}")
    lines.extend(f"trans {t}" for t in v.transitions)
    return "\n".join(lines) + "\n"


def load_vass(path) -> Vass:
    with open(path, "r", encoding="utf-8") as f:
        return parse_vass(f.read())


# =============================================================================
# STEP RELATION
# =============================================================================

def vass_step(v: Vass, c: VassConfig, t: VassTransition) -> Optional[VassConfig]:
    """Successor of c under t, or None when t is disabled."""
    if c.state != t.src:
        return None
    if t.op.kind is OpKind.SKIP:
        return VassConfig(t.dst, c.valuation)
    i = v.counter_index[t.op.counter]
    values = list(c.valuation)
    if t.op.kind is OpKind.INC:
        values[i] += 1
    else:
        if values[i] == 0:
            return None
        values[i] -= 1
    return VassConfig(t.dst, tuple(values))


def replay_vass_path(v: Vass, init: VassConfig, path: Sequence[VassTransition]) -> VassConfig:
    """Final configuration of a path; raises VassPathError on a disabled step."""
    c = init
    for i, t in enumerate(path):
        nxt = vass_step(v, c, t)
        if nxt is None:
            raise VassPathError(i, f"{t} is disabled in ({c.state}, {c.valuation})")
        c = nxt
    return c


# =============================================================================
# BACKWARD COVERABILITY
# =============================================================================

@dataclass(eq=False)
class BasisElement:
    """
    Minimal element (state, vector) of the backward set. Taking `via` from
    any configuration above it leads above `nxt`; goal elements have no via.
    """
    state: str
    vector: Tuple[int, ...]
    via: Optional[VassTransition] = None
    nxt: Optional["BasisElement"] = None

    def path(self) -> Tuple[VassTransition, ...]:
        steps = []
        e = self
        while e.via is not None:
            steps.append(e.via)
            e = e.nxt
        return tuple(steps)


def _leq(a: Sequence[int], b: Sequence[int]) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _pre(v: Vass, t: VassTransition, vector: Tuple[int, ...]) -> Tuple[int, ...]:
    if t.op.kind is OpKind.SKIP:
        return vector
    i = v.counter_index[t.op.counter]
    values = list(vector)
    if t.op.kind is OpKind.INC:
        values[i] = max(0, values[i] - 1)
    else:
        values[i] += 1
    return tuple(values)


@dataclass
class BackwardBasis:
    """Minimal bases per control state of the configurations that can reach a goal state."""
    vass: Vass
    elements: Dict[str, List[BasisElement]] = field(default_factory=dict)
    complete: bool = True

    def find(self, state: str, valuation: Sequence[int]) -> Optional[BasisElement]:
        for e in self.elements.get(state, ()):
            if _leq(e.vector, valuation):
                return e
        return None

    def covers(self, state: str, valuation: Sequence[int]) -> bool:
        return self.find(state, valuation) is not None

    def size(self) -> int:
        return sum(len(es) for es in self.elements.values())


def backward_basis(
    v: Vass,
    goals: Iterable[str],
    budget: Optional[ExplorationBudget] = None,
    stop_at: Optional[VassConfig] = None,
) -> BackwardBasis:
    """
    Saturate the minimal basis of Pre*(goals x N^X).

    Args:
        v: VASS
        goals: Goal control states
        budget: Basis element budget (raises BudgetExceededError)
        stop_at: Stop as soon as this configuration is covered

    Returns:
        BackwardBasis (complete=False when stopped early)
    """
    budget = budget or vass_budget()
    basis = BackwardBasis(v, {s: [] for s in v.states})
    zero = (0,) * len(v.counters)
    queue: deque = deque()
    for g in goals:
        e = BasisElement(g, zero)
        basis.elements[g].append(e)
        queue.append(e)
        if stop_at is not None and stop_at.state == g:
            basis.complete = False
            return basis

    while queue:
        e = queue.popleft()
        if e not in basis.elements[e.state]:
            continue
        for t in v.incoming[e.state]:
            vec = _pre(v, t, e.vector)
            bucket = basis.elements[t.src]
            if any(_leq(b.vector, vec) for b in bucket):
                continue
            budget.charge()
            new = BasisElement(t.src, vec, t, e)
            bucket[:] = [b for b in bucket if not _leq(vec, b.vector)]
            bucket.append(new)
            queue.append(new)
            if stop_at is not None and stop_at.state == t.src and _leq(vec, stop_at.valuation):
                basis.complete = False
                return basis
    logger.debug("backward basis for %s: %d elements", v.name, basis.size())
    return basis


def vass_control_reach(
    v: Vass,
    init: VassConfig,
    goal: str,
    budget: Optional[ExplorationBudget] = None,
) -> ReachResult:
    """
    Decide whether some configuration with control state `goal` is reachable.

    Returns:
        YES with a replayable path, NO, or UNKNOWN when the budget trips
    """
    if goal not in v.states or init.state not in v.states:
        raise VassFormatError("unknown init or goal state")
    try:
        basis = backward_basis(v, [goal], budget, stop_at=init)
    except BudgetExceededError as e:
        return ReachResult(Answer.UNKNOWN, reason=str(e))
    hit = basis.find(init.state, init.valuation)
    if hit is None:
        return ReachResult(Answer.NO)
    path = hit.path()
    final = replay_vass_path(v, init, path)
    if final.state != goal:
        raise AssertionError(f"backward witness ends in {final.state}, not {goal}")
    return ReachResult(Answer.YES, path)


# =============================================================================
# FORWARD SECOND OPINIONS
# =============================================================================

def bounded_forward_reach(v: Vass, init: VassConfig, goal: str, cap: int = 5) -> Answer:
    """
    Explicit BFS with counters capped at `cap`.

    Returns:
        YES if the goal is reached, NO if the space was exhausted without
        ever needing a counter above the cap, UNKNOWN otherwise
    """
    seen = {init}
    queue = deque([init])
    clipped = False
    while queue:
        c = queue.popleft()
        if c.state == goal:
            return Answer.YES
        for t in v.outgoing[c.state]:
            nxt = vass_step(v, c, t)
            if nxt is None:
                continue
            if any(x > cap for x in nxt.valuation):
                clipped = True
                continue
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return Answer.UNKNOWN if clipped else Answer.NO


@dataclass
class _KMNode:
    state: str
    vector: Tuple[float, ...]
    parent: Optional["_KMNode"]


def karp_miller_cover(
    v: Vass,
    init: VassConfig,
    goal: str,
    budget: Optional[ExplorationBudget] = None,
) -> Answer:
    """
    Karp-Miller tree with omega (math.inf) acceleration against ancestors.

    Returns:
        YES / NO, or UNKNOWN when the node budget trips
    """
    budget = budget or karp_miller_budget()
    root = _KMNode(init.state, tuple(float(x) for x in init.valuation), None)
    seen = {(root.state, root.vector)}
    queue = deque([root])
    try:
        while queue:
            node = queue.popleft()
            budget.charge()
            if node.state == goal:
                return Answer.YES
            for t in v.outgoing[node.state]:
                vec = list(node.vector)
                if t.op.kind is not OpKind.SKIP:
                    i = v.counter_index[t.op.counter]
                    if t.op.kind is OpKind.INC:
                        vec[i] += 1
                    elif vec[i] == 0:
                        continue
                    else:
                        vec[i] -= 1
                anc = node
                while anc is not None:
                    if anc.state == t.dst and _leq(anc.vector, vec) and anc.vector != tuple(vec):
                        vec = [math.inf if a < b else b for a, b in zip(anc.vector, vec)]
                    anc = anc.parent
                key = (t.dst, tuple(vec))
                if key in seen:
                    continue
                seen.add(key)
                queue.append(_KMNode(t.dst, tuple(vec), node))
    except BudgetExceededError:
        return Answer.UNKNOWN
    return Answer.NO
