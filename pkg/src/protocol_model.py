"""
Broadcast protocol model for bpcover.

A protocol is a finite automaton whose transitions broadcast a message to
all neighbours (!!m), receive a message (?m) or act internally (tau). This
module owns:
- the immutable data model (Action, Transition, Protocol)
- the line-oriented protocol DSL (parse_protocol / print_protocol)
- phase-partition inference and the clause-by-clause partition checker
- the k-unfolding transformation (and its naive variant without the
  last-phase reception rule, kept for counterexample reproduction)

DSL:
    protocol <name>
    messages <m1> <m2> ...
    states <s1> <s2> ...
    init <s>
    trans <src> !!<m> <dst>
    trans <src> ?<m>  <dst>
    trans <src> tau   <dst>

Usage:
    from protocol_model import parse_protocol, infer_phase_partition, k_unfold

    p = parse_protocol(open("config/models/p_prime.bp").read())
    partition = infer_phase_partition(p)      # PhasePartition(k=2, ...)
    p2 = k_unfold(p, 2)                       # 2-phase-bounded under-approximation
"""

import re
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import networkx as nx

from infra.budget import BudgetExceededError, ExplorationBudget, phase_search_budget
from infra.logging_setup import get_logger

logger = get_logger("protocol_model")

IDENTIFIER = re.compile(r"[A-Za-z_][A-Za-z0-9_^',-]*\Z")


# =============================================================================
# ERRORS
# =============================================================================

class ProtocolError(ValueError):
    """Base class for invalid protocol sources or models."""

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        self.line = line
        self.column = column
        self.reason = message
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "")
            message = f"{where}: {message}"
        super().__init__(message)


class ProtocolSyntaxError(ProtocolError):
    """Malformed DSL line."""


class UnknownReferenceError(ProtocolError):
    """Reference to an undeclared state or message."""


class DuplicateDeclarationError(ProtocolError):
    """State, message, header or transition declared twice."""


class MissingInitError(ProtocolError):
    """No `init` line."""


class NotPhaseBounded(Exception):
    """No k <= |Q|+1 admits a consistent phase labelling."""

    def __init__(self, protocol_name: str, reason: str = ""):
        self.protocol_name = protocol_name
        self.reason = reason
        super().__init__(f"protocol {protocol_name} is not phase-bounded" + (f": {reason}" if reason else ""))


class NotPhaseBoundedWithin(Exception):
    """The protocol is not k-phase-bounded for the bound a procedure needs."""

    def __init__(self, bound: int, found: Optional[int]):
        self.bound = bound
        self.found = found
        detail = "not phase-bounded" if found is None else f"inferred k={found}"
        super().__init__(f"procedure requires a {bound}-phase-bounded protocol ({detail})")


NotPhaseBoundedWithin2 = NotPhaseBoundedWithin


class PhaseSearchInconclusive(Exception):
    """The phase-search budget ran out before a k was accepted or all were refuted."""

    def __init__(self, protocol_name: str, k: int, limit: int):
        self.protocol_name = protocol_name
        self.k = k
        self.limit = limit
        super().__init__(f"phase search for {protocol_name} gave up at k={k} (budget {limit})")


# =============================================================================
# DATA MODEL
# =============================================================================

class ActionKind(Enum):
    BROADCAST = "!!"
    RECEIVE = "?"
    INTERNAL = "tau"


@dataclass(frozen=True)
class Action:
    """!!m, ?m or tau."""
    kind: ActionKind
    message: Optional[str] = None

    def __post_init__(self):
        if (self.kind is ActionKind.INTERNAL) != (self.message is None):
            raise ProtocolError(f"action {self.kind.value} has inconsistent message {self.message!r}")

    @property
    def is_broadcast(self) -> bool:
        return self.kind is ActionKind.BROADCAST

    @property
    def is_receive(self) -> bool:
        return self.kind is ActionKind.RECEIVE

    @property
    def is_internal(self) -> bool:
        return self.kind is ActionKind.INTERNAL

    def __str__(self) -> str:
        if self.kind is ActionKind.INTERNAL:
            return "tau"
        return f"{self.kind.value}{self.message}"

    @classmethod
    def parse(cls, token: str) -> "Action":
        """Parse `!!m`, `?m` or `tau`; raises ProtocolSyntaxError."""
        if token == "tau":
            return cls(ActionKind.INTERNAL)
        for kind in (ActionKind.BROADCAST, ActionKind.RECEIVE):
            if token.startswith(kind.value):
                message = token[len(kind.value):]
                if not IDENTIFIER.match(message):
                    raise ProtocolSyntaxError(f"bad message name in action {token!r}")
                return cls(kind, message)
        raise ProtocolSyntaxError(f"expected !!<m>, ?<m> or tau, got {token!r}")


def broadcast(message: str) -> Action:
    return Action(ActionKind.BROADCAST, message)


def receive(message: str) -> Action:
    return Action(ActionKind.RECEIVE, message)


TAU = Action(ActionKind.INTERNAL)


@dataclass(frozen=True)
class Transition:
    src: str
    action: Action
    dst: str

    def __str__(self) -> str:
        return f"{self.src}|{self.action}|{self.dst}"

    @classmethod
    def parse(cls, text: str) -> "Transition":
        """Parse the trace form `src|action|dst`."""
        parts = text.split("|")
        if len(parts) != 3:
            raise ProtocolSyntaxError(f"expected src|action|dst, got {text!r}")
        return cls(parts[0], Action.parse(parts[1]), parts[2])


@dataclass(frozen=True)
class Protocol:
    """
    P = (Q, Sigma, q_in, Delta) with declaration-ordered tuples.

    Construction validates every invariant (endpoints and messages declared,
    init declared, no duplicate transitions) and raises ProtocolError
    subclasses otherwise.
    """
    name: str
    states: Tuple[str, ...]
    messages: Tuple[str, ...]
    init: str
    transitions: Tuple[Transition, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "messages", tuple(self.messages))
        object.__setattr__(self, "transitions", tuple(self.transitions))
        _validate(self)

    @cached_property
    def state_index(self) -> Dict[str, int]:
        return {q: i for i, q in enumerate(self.states)}

    @cached_property
    def message_index(self) -> Dict[str, int]:
        return {m: i for i, m in enumerate(self.messages)}

    @cached_property
    def outgoing(self) -> Dict[str, Tuple[Transition, ...]]:
        table: Dict[str, List[Transition]] = {q: [] for q in self.states}
        for t in self.transitions:
            table[t.src].append(t)
        return {q: tuple(ts) for q, ts in table.items()}

    @cached_property
    def _receptions(self) -> Dict[Tuple[str, str], Tuple[Transition, ...]]:
        table: Dict[Tuple[str, str], List[Transition]] = {}
        for t in self.transitions:
            if t.action.is_receive:
                table.setdefault((t.src, t.action.message), []).append(t)
        return {key: tuple(ts) for key, ts in table.items()}

    @cached_property
    def _receive_sets(self) -> Dict[str, FrozenSet[str]]:
        sets: Dict[str, set] = {q: set() for q in self.states}
        for (q, m) in self._receptions:
            sets[q].add(m)
        return {q: frozenset(ms) for q, ms in sets.items()}

    def receptions(self, state: str, message: str) -> Tuple[Transition, ...]:
        """Reception transitions (state, ?message, .) in declaration order."""
        return self._receptions.get((state, message), ())

    def receive_set(self, state: str) -> FrozenSet[str]:
        """R(q): messages with an outgoing reception at q."""
        return self._receive_sets[state]

    def broadcasts(self) -> Tuple[Transition, ...]:
        return tuple(t for t in self.transitions if t.action.is_broadcast)

    def transition_index(self, transition: Transition) -> int:
        return self.transitions.index(transition)

    def with_transitions(self, transitions: Iterable[Transition], name: Optional[str] = None) -> "Protocol":
        return Protocol(name or self.name, self.states, self.messages, self.init, tuple(transitions))

    def with_states(self, extra: Iterable[str]) -> "Protocol":
        return Protocol(self.name, self.states + tuple(extra), self.messages, self.init, self.transitions)


def receive_set(p: Protocol, state: str) -> FrozenSet[str]:
    """R(q) = { m | exists q'. (q, ?m, q') in Delta }."""
    return p.receive_set(state)


def _validate(p: Protocol):
    if not IDENTIFIER.match(p.name):
        raise ProtocolError(f"bad protocol name {p.name!r}")
    seen = set()
    for q in p.states:
        if not IDENTIFIER.match(q):
            raise ProtocolError(f"bad state name {q!r}")
        if q in seen:
            raise DuplicateDeclarationError(f"duplicate state {q}")
        seen.add(q)
    msgs = set()
    for m in p.messages:
        if not IDENTIFIER.match(m):
            raise ProtocolError(f"bad message name {m!r}")
        if m in msgs:
            raise DuplicateDeclarationError(f"duplicate message {m}")
        msgs.add(m)
    if p.init not in seen:
        raise UnknownReferenceError(f"unknown state {p.init} (init)")
    trans = set()
    for t in p.transitions:
        for q in (t.src, t.dst):
            if q not in seen:
                raise UnknownReferenceError(f"unknown state {q} in transition {t}")
        if t.action.message is not None and t.action.message not in msgs:
            raise UnknownReferenceError(f"unknown message {t.action.message} in transition {t}")
        if t in trans:
            raise DuplicateDeclarationError(f"duplicate transition {t}")
        trans.add(t)


# =============================================================================
# DSL
# =============================================================================

def _strip_comment(line: str) -> str:
    cut = line.find("#")
    return line if cut < 0 else line[:cut]


def _tokens(line: str) -> List[Tuple[str, int]]:
    """Whitespace tokens with their 1-based columns."""
    return [(m.group(0), m.start() + 1) for m in re.finditer(r"\S+", line)]


def parse_protocol(text: str) -> Protocol:
    """
    Parse protocol DSL source.

    Declarations (protocol/messages/states/init) may appear in any order;
    transitions are resolved after all declarations are read.

    Raises:
        ProtocolSyntaxError, UnknownReferenceError, DuplicateDeclarationError,
        MissingInitError (all carry line/column when known)
    """
    name: Optional[str] = None
    states: List[str] = []
    messages: List[str] = []
    init: Optional[Tuple[str, int, int]] = None
    pending: List[Tuple[str, str, str, int, List[int]]] = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        toks = _tokens(_strip_comment(raw))
        if not toks:
            continue
        keyword, kcol = toks[0]
        args = toks[1:]

        if keyword == "protocol":
            if len(args) != 1:
                raise ProtocolSyntaxError("expected `protocol <name>`", lineno, kcol)
            if name is not None:
                raise DuplicateDeclarationError("duplicate protocol header", lineno, kcol)
            name = _identifier(args[0], lineno)
        elif keyword in ("states", "messages"):
            target = states if keyword == "states" else messages
            for tok, col in args:
                ident = _identifier((tok, col), lineno)
                if ident in target:
                    kind = "state" if keyword == "states" else "message"
                    raise DuplicateDeclarationError(f"duplicate {kind} {ident}", lineno, col)
                target.append(ident)
        elif keyword == "init":
            if len(args) != 1:
                raise ProtocolSyntaxError("expected `init <state>`", lineno, kcol)
            if init is not None:
                raise DuplicateDeclarationError("duplicate init declaration", lineno, kcol)
            init = (_identifier(args[0], lineno), lineno, args[0][1])
        elif keyword == "trans":
            if len(args) != 3:
                raise ProtocolSyntaxError("expected `trans <src> <action> <dst>`", lineno, kcol)
            (src, scol), (act, acol), (dst, dcol) = args
            _identifier((src, scol), lineno)
            _identifier((dst, dcol), lineno)
            pending.append((src, act, dst, lineno, [scol, acol, dcol]))
        else:
            raise ProtocolSyntaxError(f"unknown keyword {keyword!r}", lineno, kcol)

    if name is None:
        raise ProtocolSyntaxError("missing `protocol <name>` header", 1, 1)
    if init is None:
        raise MissingInitError("missing `init <state>` declaration")
    if not states:
        raise ProtocolSyntaxError("no states declared", 1, 1)

    declared_states = set(states)
    declared_messages = set(messages)
    if init[0] not in declared_states:
        raise UnknownReferenceError(f"unknown state {init[0]}", init[1], init[2])

    transitions: List[Transition] = []
    seen = set()
    for src, act, dst, lineno, cols in pending:
        try:
            action = Action.parse(act)
        except ProtocolSyntaxError as e:
            raise ProtocolSyntaxError(e.reason, lineno, cols[1]) from None
        if src not in declared_states:
            raise UnknownReferenceError(f"unknown state {src}", lineno, cols[0])
        if dst not in declared_states:
            raise UnknownReferenceError(f"unknown state {dst}", lineno, cols[2])
        if action.message is not None and action.message not in declared_messages:
            raise UnknownReferenceError(f"unknown message {action.message}", lineno, cols[1])
        t = Transition(src, action, dst)
        if t in seen:
            raise DuplicateDeclarationError(f"duplicate transition {t}", lineno, cols[0])
        seen.add(t)
        transitions.append(t)

    return Protocol(name, tuple(states), tuple(messages), init[0], tuple(transitions))


def _identifier(token: Tuple[str, int], lineno: int) -> str:
    text, col = token
    if not IDENTIFIER.match(text):
        raise ProtocolSyntaxError(f"bad identifier {text!r}", lineno, col)
    return text


def print_protocol(p: Protocol) -> str:
    """Deterministic DSL rendering; parse_protocol(print_protocol(p)) == p."""
    lines = [
        f"protocol {p.name}",
        " ".join(["messages", *p.messages]),
        " ".join(["states", *p.states]),
        f"init {p.init}",
    ]
    lines.extend(f"trans {t.src} {t.action} {t.dst}" for t in p.transitions)
    return "\n".join(lines) + "\n"


def load_protocol(path) -> Protocol:
    with open(path, "r", encoding="utf-8") as f:
        return parse_protocol(f.read())


# =============================================================================
# PHASE PARTITIONS
# =============================================================================

@dataclass(frozen=True, order=True)
class PhaseLabel:
    """Zero is PhaseLabel(0, '0'); otherwise (i, 'b') or (i, 'r') with i >= 1."""
    phase: int
    polarity: str

    def __post_init__(self):
        if self.phase == 0 and self.polarity != "0":
            raise ValueError("phase 0 has no polarity")
        if self.phase > 0 and self.polarity not in ("b", "r"):
            raise ValueError(f"bad polarity {self.polarity!r}")

    @property
    def is_zero(self) -> bool:
        return self.phase == 0

    def __str__(self) -> str:
        return "Q0" if self.phase == 0 else f"Q{self.phase}{self.polarity}"


ZERO = PhaseLabel(0, "0")


def bcast_label(i: int) -> PhaseLabel:
    return PhaseLabel(i, "b")


def recv_label(i: int) -> PhaseLabel:
    return PhaseLabel(i, "r")


def partition_classes(k: int) -> List[PhaseLabel]:
    """Q0, Q1b, Q1r, ..., Qkb, Qkr in table order."""
    classes = [ZERO]
    for i in range(1, k + 1):
        classes.extend([bcast_label(i), recv_label(i)])
    return classes


@dataclass(frozen=True)
class PhasePartition:
    k: int
    labels: Dict[str, PhaseLabel] = field(hash=False)

    def label(self, state: str) -> PhaseLabel:
        return self.labels[state]

    def states_in(self, label: PhaseLabel, order: Optional[Sequence[str]] = None) -> List[str]:
        states = order if order is not None else list(self.labels)
        return [q for q in states if self.labels[q] == label]

    def b_states(self, order: Sequence[str]) -> List[str]:
        """Q^b = Q0 u Q1b, in the given order."""
        return [q for q in order if self.labels[q] in (ZERO, bcast_label(1))]

    def table(self, order: Sequence[str]) -> List[Tuple[str, List[str]]]:
        return [(str(c), self.states_in(c, order)) for c in partition_classes(self.k)]


def _next_label(label: PhaseLabel, action: Action, k: int) -> Optional[PhaseLabel]:
    """Forced label of the destination, or None when the step leaves phase k."""
    if action.is_internal:
        return label
    if action.is_broadcast:
        if label.is_zero:
            return bcast_label(1) if k >= 1 else None
        if label.polarity == "b":
            return label
        return bcast_label(label.phase + 1) if label.phase < k else None
    if label.is_zero:
        return recv_label(1) if k >= 1 else None
    if label.polarity == "r":
        return label
    return recv_label(label.phase + 1) if label.phase < k else recv_label(k)


def _propagate(p: Protocol, labels: Dict[str, PhaseLabel], frontier: List[str], k: int) -> Optional[str]:
    """Push labels forward in place; returns a conflict description or None."""
    queue = list(frontier)
    while queue:
        q = queue.pop()
        for t in p.outgoing[q]:
            forced = _next_label(labels[q], t.action, k)
            if forced is None:
                return f"{t} leaves phase bound {k}"
            have = labels.get(t.dst)
            if have is None:
                labels[t.dst] = forced
                queue.append(t.dst)
            elif have != forced:
                return f"{t.dst} needs both {have} and {forced}"
    return None


def _seed_order(k: int) -> List[PhaseLabel]:
    if k == 0:
        return [ZERO]
    seeds = [recv_label(k), ZERO]
    for i in range(1, k + 1):
        seeds.extend([bcast_label(i), recv_label(i)])
    return list(dict.fromkeys(seeds))


def unlabelled_groups(p: Protocol, labelled: Iterable[str]) -> List[List[str]]:
    """
    States outside `labelled`, grouped by connectivity through transitions
    between them; groups and members in declaration order.
    """
    done = set(labelled)
    g = nx.Graph()
    g.add_nodes_from(q for q in p.states if q not in done)
    g.add_edges_from((t.src, t.dst) for t in p.transitions if t.src not in done and t.dst not in done)
    order = p.state_index
    groups = [sorted(c, key=order.__getitem__) for c in nx.connected_components(g)]
    return sorted(groups, key=lambda c: order[c[0]])


def _place_group(p: Protocol, labels: Dict[str, PhaseLabel], group: List[str], k: int,
                 budget) -> Optional[Dict[str, PhaseLabel]]:
    """Backtrack over seed labels for the states of one group."""
    rest = [q for q in group if q not in labels]
    if not rest:
        return labels
    q = rest[0]
    for seed in _seed_order(k):
        budget.charge()
        trial = dict(labels)
        trial[q] = seed
        if _propagate(p, trial, [q], k) is None:
            done = _place_group(p, trial, group, k, budget)
            if done is not None:
                return done
    return None


def _label_candidate(p: Protocol, k: int, budget) -> Optional[Dict[str, PhaseLabel]]:
    labels: Dict[str, PhaseLabel] = {p.init: ZERO}
    if _propagate(p, labels, [p.init], k) is not None:
        return None
    # propagation from one group never reaches another, so groups are solved one at a time
    for group in unlabelled_groups(p, labels):
        placed = _place_group(p, labels, group, k, budget)
        if placed is None:
            return None
        labels = placed
    return labels


def infer_phase_partition(p: Protocol, budget: Optional[ExplorationBudget] = None) -> PhasePartition:
    """
    Smallest k (0..|Q|+1) whose forward label propagation is consistent.

    Labels of states reachable from init are forced. Unreachable states get
    a seed label, Qkr first, with backtracking over the remaining classes;
    unconnected groups of unreachable states are labelled independently.

    Raises:
        NotPhaseBounded: when no candidate k succeeds
        PhaseSearchInconclusive: the phase-search budget ran out first
    """
    budget = budget or phase_search_budget()
    for k in range(0, len(p.states) + 2):
        try:
            labels = _label_candidate(p, k, budget)
        except BudgetExceededError as e:
            logger.warning("phase search budget exhausted at k=%d for %s", k, p.name)
            raise PhaseSearchInconclusive(p.name, k, e.limit) from None
        if labels is not None:
            logger.debug("protocol %s is %d-phase-bounded", p.name, k)
            return PhasePartition(k, {q: labels[q] for q in p.states})
    raise NotPhaseBounded(p.name)


def phase_bound(p: Protocol) -> Optional[int]:
    """
    Inferred k, or None when not phase-bounded.

    Raises:
        PhaseSearchInconclusive: the phase-search budget ran out first
    """
    try:
        return infer_phase_partition(p).k
    except NotPhaseBounded:
        return None


def require_phase_bound(p: Protocol, bound: int) -> PhasePartition:
    """
    Inferred partition, raising NotPhaseBoundedWithin when k > bound.

    PhaseSearchInconclusive propagates unchanged.
    """
    try:
        partition = infer_phase_partition(p)
    except NotPhaseBounded:
        raise NotPhaseBoundedWithin(bound, None) from None
    if partition.k > bound:
        raise NotPhaseBoundedWithin(bound, partition.k)
    return partition


def clause_of(t: Transition, partition: PhasePartition) -> Optional[int]:
    """Number (1-6) of the phase-boundedness clause satisfied by t, or None."""
    k = partition.k
    a, b = partition.label(t.src), partition.label(t.dst)
    if t.action.is_internal:
        return 1 if a == b else None
    if t.action.is_broadcast:
        if a == b and not a.is_zero and a.polarity == "b":
            return 2
        a_recv = a.is_zero or a.polarity == "r"
        if a_recv and a.phase < k and b == bcast_label(a.phase + 1):
            return 5
        return None
    if a == b and not a.is_zero and a.polarity == "r":
        return 3
    a_bcast = a.is_zero or a.polarity == "b"
    if a_bcast and a.phase < k and b == recv_label(a.phase + 1):
        return 4
    if a == bcast_label(k) and b == recv_label(k) and k >= 1:
        return 6
    return None


def check_partition(p: Protocol, partition: PhasePartition) -> Tuple[bool, str]:
    """
    Validate a partition against every transition.

    Returns:
        (True, "ok") or (False, reason naming the first offending transition)
    """
    if partition.label(p.init) != ZERO:
        return False, f"init {p.init} is labelled {partition.label(p.init)}"
    for q in p.states:
        label = partition.labels.get(q)
        if label is None:
            return False, f"state {q} has no label"
        if label.phase > partition.k:
            return False, f"state {q} labelled {label} beyond k={partition.k}"
    for t in p.transitions:
        if clause_of(t, partition) is None:
            return False, f"transition {t} satisfies no clause"
    return True, "ok"


# =============================================================================
# K-UNFOLDING
# =============================================================================

def unfolded_name(state: str, polarity: str, j: int) -> str:
    """q^0 for level 0, otherwise q^b,j or q^r,j."""
    if j == 0:
        return f"{state}^0"
    return f"{state}^{polarity},{j}"


def copies_of(state: str, k: int) -> List[str]:
    """All copies of a state in the k-unfolding."""
    names = [unfolded_name(state, "0", 0)]
    for j in range(1, k + 1):
        names.extend([unfolded_name(state, "b", j), unfolded_name(state, "r", j)])
    return names


def _unfold(p: Protocol, k: int, last_phase_receptions: bool) -> Protocol:
    if k < 1:
        raise ValueError("k must be positive")
    states = [unfolded_name(q, "0", 0) for q in p.states]
    for j in range(1, k + 1):
        states.extend(unfolded_name(q, "b", j) for q in p.states)
        states.extend(unfolded_name(q, "r", j) for q in p.states)

    def at(q: str, polarity: str, j: int) -> str:
        return unfolded_name(q, polarity, j)

    delta: List[Transition] = []
    for t in p.transitions:
        if t.action.is_internal:
            delta.append(Transition(at(t.src, "0", 0), t.action, at(t.dst, "0", 0)))
    for j in range(1, k + 1):
        for t in p.transitions:
            if not t.action.is_broadcast:
                delta.append(Transition(at(t.src, "r", j), t.action, at(t.dst, "r", j)))
        for t in p.transitions:
            if not t.action.is_receive:
                delta.append(Transition(at(t.src, "b", j), t.action, at(t.dst, "b", j)))
    for j in range(0, k):
        for t in p.transitions:
            if t.action.is_broadcast:
                delta.append(Transition(at(t.src, "r", j), t.action, at(t.dst, "b", j + 1)))
    for j in range(0, k):
        for t in p.transitions:
            if t.action.is_receive:
                delta.append(Transition(at(t.src, "b", j), t.action, at(t.dst, "r", j + 1)))
    if last_phase_receptions:
        for t in p.transitions:
            if t.action.is_receive:
                delta.append(Transition(at(t.src, "b", k), t.action, at(t.dst, "r", k)))

    suffix = f"_{k}" if last_phase_receptions else f"_naive{k}"
    return Protocol(f"{p.name}{suffix}", tuple(states), p.messages, at(p.init, "0", 0), tuple(delta))


def k_unfold(p: Protocol, k: int) -> Protocol:
    """
    k-unfolding P_k: |Q|(2k+1) states, init q_in^0, Delta_k per its six
    rule families (including (q^b,k, ?m, p^r,k)).
    """
    return _unfold(p, k, last_phase_receptions=True)


def naive_k_unfold(p: Protocol, k: int) -> Protocol:
    """k-unfolding without the last-phase reception rule; not an under-approximation."""
    return _unfold(p, k, last_phase_receptions=False)


def original_state(unfolded: str) -> str:
    """Strip the ^0 / ^b,j / ^r,j suffix of an unfolded state name."""
    base, sep, _ = unfolded.rpartition("^")
    return base if sep else unfolded
