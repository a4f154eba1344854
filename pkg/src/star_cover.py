"""
Cover for 1-phase-bounded protocols through stars, broadcast-prints and VASS.

For a 1-phase-bounded protocol it is enough to look at stars and to watch
the root. While the root is still in Q^b = Q0 u Q1b, a star configuration
is summarised by its broadcast-print (root state, set of leaf states in
Q^b). Prints evolve by a small successor relation; once the root stops
broadcasting, the rest of the run is a VASS whose control state is the
root and whose counters count leaves per Q^b state.

Pipeline of cover_1pb:
1. explore the print graph from (qin, {}) and (qin, {qin})
2. compute one backward coverability basis of the leaf/root VASS
3. the first print (by state order) whose root admits a basis element
   supported inside its leaf set answers COVERABLE
4. rebuild a concrete star execution (print phase, then VASS phase) and
   validate it by replay

The module also holds the reverse direction: protocol_from_vass encodes
VASS control-state reachability into a 1-phase-bounded protocol.
"""

from collections import deque
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple, Union

from infra.budget import (
    BudgetExceededError,
    ExplorationBudget,
    configuration_budget,
    print_budget,
    vass_budget,
)
from infra.logging_setup import get_logger
from protocol_model import (
    TAU,
    PhasePartition,
    PhaseSearchInconclusive,
    Protocol,
    ProtocolError,
    Transition,
    broadcast,
    receive,
    require_phase_bound,
)
from semantics import (
    Configuration,
    CoverVerdict,
    Execution,
    Step,
    WitnessConstructionError,
    coverable,
    not_coverable,
    replay,
    successors,
    target_set,
    unknown,
)
from topology import ROOT, NotAStarError, make_star
from vass import (
    SKIP,
    Answer,
    OpKind,
    Vass,
    VassConfig,
    VassTransition,
    backward_basis,
    dec,
    inc,
    vass_control_reach,
)

logger = get_logger("star_cover")


class NotBConfiguration(Exception):
    """The root of the star is no longer in Q^b."""


# =============================================================================
# BROADCAST-PRINTS
# =============================================================================

@dataclass(frozen=True)
class BroadcastPrint:
    root: str
    leaves: FrozenSet[str] = frozenset()

    def format(self, order: Sequence[str]) -> str:
        leaves = ",".join(q for q in order if q in self.leaves)
        return f"({self.root},{{{leaves}}})"


def print_key(pr: BroadcastPrint, p: Protocol) -> Tuple[int, Tuple[int, ...]]:
    """Deterministic order: root index, then sorted leaf indices."""
    idx = p.state_index
    return idx[pr.root], tuple(sorted(idx[q] for q in pr.leaves))


def b_states(p: Protocol, partition: PhasePartition) -> FrozenSet[str]:
    return frozenset(partition.b_states(p.states))


def bprint(c: Configuration, p: Protocol, partition: PhasePartition) -> BroadcastPrint:
    """
    (L(root), {L(v) in Q^b | v leaf}) of a star configuration.

    Raises:
        NotAStarError: c is not on a star
        NotBConfiguration: the root is outside Q^b
    """
    t = c.topology
    if not t.is_star:
        raise NotAStarError(f"{t.name} is not a star")
    qb = b_states(p, partition)
    root = c.state_of(ROOT)
    if root not in qb:
        raise NotBConfiguration(f"root state {root} is not in Q^b")
    leaves = frozenset(c.state_of(v) for v in t.vertices if v != ROOT and c.state_of(v) in qb)
    return BroadcastPrint(root, leaves)


def is_b_configuration(c: Configuration, p: Protocol, partition: PhasePartition) -> bool:
    return c.topology.is_star and c.state_of(ROOT) in b_states(p, partition)


# Print moves: (kind, transition, keep) with kind in root_tau / root_bcast / leaf_tau / leaf_bcast
Move = Tuple[str, Transition, bool]


def _print_moves(pr: BroadcastPrint, p: Protocol) -> List[Tuple[Move, BroadcastPrint]]:
    moves: List[Tuple[Move, BroadcastPrint]] = []
    for t in p.outgoing[pr.root]:
        if t.action.is_internal:
            moves.append((("root_tau", t, True), BroadcastPrint(t.dst, pr.leaves)))
        elif t.action.is_broadcast:
            m = t.action.message
            kept = frozenset(q for q in pr.leaves if m not in p.receive_set(q))
            moves.append((("root_bcast", t, True), BroadcastPrint(t.dst, kept)))
    root_hears = p.receive_set(pr.root)
    for q1 in sorted(pr.leaves, key=p.state_index.__getitem__):
        for t in p.outgoing[q1]:
            if t.action.is_internal:
                kind = "leaf_tau"
            elif t.action.is_broadcast and t.action.message not in root_hears:
                kind = "leaf_bcast"
            else:
                continue
            moves.append(((kind, t, True), BroadcastPrint(pr.root, pr.leaves | {t.dst})))
            moves.append(((kind, t, False), BroadcastPrint(pr.root, (pr.leaves - {q1}) | {t.dst})))
    return moves


def print_successors(pr: BroadcastPrint, p: Protocol, partition: PhasePartition) -> FrozenSet[BroadcastPrint]:
    """
    Prints reachable in one step:
    - root tau keeps the leaf set
    - root !!m removes every leaf state that receives m
    - leaf tau, and leaf !!m not heard by the root, add the target state
      both keeping and dropping the source state
    """
    return frozenset(nxt for _, nxt in _print_moves(pr, p))


def initial_prints(p: Protocol) -> List[BroadcastPrint]:
    return [BroadcastPrint(p.init, frozenset()), BroadcastPrint(p.init, frozenset({p.init}))]


@dataclass
class PrintGraph:
    """BFS tree of the print closure, with the move that discovered each print."""
    parents: Dict[BroadcastPrint, Tuple[Optional[BroadcastPrint], Optional[Move]]] = field(default_factory=dict)

    @property
    def prints(self) -> FrozenSet[BroadcastPrint]:
        return frozenset(self.parents)

    def path_to(self, pr: BroadcastPrint) -> Tuple[BroadcastPrint, List[Tuple[Move, BroadcastPrint]]]:
        """(initial print, [(move, print after move), ...])."""
        chain: List[Tuple[Move, BroadcastPrint]] = []
        while True:
            parent, move = self.parents[pr]
            if parent is None:
                break
            chain.append((move, pr))
            pr = parent
        chain.reverse()
        return pr, chain


def explore_prints(p: Protocol, partition: PhasePartition, budget: Optional[ExplorationBudget] = None) -> PrintGraph:
    """
    BFS closure of print_successors from the two initial prints.

    Raises:
        BudgetExceededError: more prints than the budget allows
    """
    budget = budget or print_budget()
    graph = PrintGraph()
    queue: deque = deque()
    for pr in initial_prints(p):
        budget.charge()
        graph.parents[pr] = (None, None)
        queue.append(pr)
    while queue:
        pr = queue.popleft()
        for move, nxt in _print_moves(pr, p):
            if nxt in graph.parents:
                continue
            budget.charge()
            graph.parents[nxt] = (pr, move)
            queue.append(nxt)
    logger.debug("print closure of %s: %d prints", p.name, len(graph.parents))
    return graph


def reachable_prints(p: Protocol, partition: PhasePartition, budget: Optional[ExplorationBudget] = None) -> FrozenSet[BroadcastPrint]:
    """All prints reachable from (qin, {}) and (qin, {qin})."""
    return explore_prints(p, partition, budget).prints


def star_with_print(p: Protocol, pr: BroadcastPrint, counts: Dict[str, int]) -> Configuration:
    """Star whose leaves carry counts[q] copies of each q in the print's leaf set."""
    labels = [pr.root]
    for q in sorted(pr.leaves, key=p.state_index.__getitem__):
        labels.extend([q] * counts.get(q, 1))
    t = make_star(len(labels) - 1)
    return Configuration(t, tuple(labels))


def print_oracle_successors(
    pr: BroadcastPrint,
    p: Protocol,
    partition: PhasePartition,
    max_copies: int = 3,
) -> FrozenSet[BroadcastPrint]:
    """
    Brute-force print successors: prints of every b-configuration one step
    away from a star carrying 1..max_copies leaves per state of the print.
    """
    states = sorted(pr.leaves, key=p.state_index.__getitem__)
    found: Set[BroadcastPrint] = set()
    for combo in _count_vectors(len(states), max_copies):
        c = star_with_print(p, pr, dict(zip(states, combo)))
        for _, nxt in successors(p, c):
            if is_b_configuration(nxt, p, partition):
                found.add(bprint(nxt, p, partition))
    return frozenset(found)


def _count_vectors(n: int, max_copies: int) -> Iterable[Tuple[int, ...]]:
    if n == 0:
        yield ()
        return
    for head in range(1, max_copies + 1):
        for tail in _count_vectors(n - 1, max_copies):
            yield (head,) + tail


def root_run_covers(
    p: Protocol,
    target: Union[str, Iterable[str]],
    pr: BroadcastPrint,
    max_copies: int = 3,
    budget: Optional[ExplorationBudget] = None,
) -> bool:
    """
    Brute force of the root-run relation: from some star with 1..max_copies
    leaves per print state, can the root reach a target when the root never
    broadcasts (leaves act freely, the root only moves internally)?

    Raises:
        BudgetExceededError: the searched stars exceed the configuration budget
    """
    targets = target_set(target)
    budget = budget or configuration_budget()
    states = sorted(pr.leaves, key=p.state_index.__getitem__)
    for combo in _count_vectors(len(states), max_copies):
        start = star_with_print(p, pr, dict(zip(states, combo)))
        seen = {start.labels}
        queue = deque([start])
        while queue:
            c = queue.popleft()
            if c.state_of(ROOT) in targets:
                return True
            for step, nxt in successors(p, c):
                if step.vertex == ROOT and not step.transition.action.is_internal:
                    continue
                if nxt.labels not in seen:
                    budget.charge()
                    seen.add(nxt.labels)
                    queue.append(nxt)
    return False



# =============================================================================
# PRINT -> VASS
# =============================================================================

def _fresh(name: str, taken: Set[str]) -> str:
    while name in taken:
        name += "'"
    taken.add(name)
    return name


@dataclass(frozen=True)
class VassReduction:
    """
    VASS of a print together with the bookkeeping needed to map its paths
    back to star executions.

    Attributes:
        vass: The VASS (S = Q u Q x Delta u {s_in}, X = Q^b)
        init: (s_in, nu) with nu(q) = 1 for q in the print's leaf set
        goal: Goal control state (the target protocol state)
        s_in: Name of the pumping state
        intermediates: (q, delta) state name -> (q, delta)
    """
    vass: Vass
    init: VassConfig
    goal: Tuple[str, ...]
    s_in: str
    intermediates: Dict[str, Tuple[str, Transition]]


def intermediate_name(q: str, index: int) -> str:
    return f"{q}__t{index}"


def _core_transitions(p: Protocol, qb: FrozenSet[str]) -> List[VassTransition]:
    """Root internal moves and leaf moves seen from the root (rules without s_in)."""
    T: List[VassTransition] = []
    for t in p.transitions:
        if t.action.is_internal:
            T.append(VassTransition(t.src, SKIP, t.dst))
    for idx, t in enumerate(p.transitions):
        if t.src not in qb or t.dst not in qb:
            continue
        if t.action.is_internal:
            for q in p.states:
                mid = intermediate_name(q, idx)
                T.append(VassTransition(q, dec(t.src), mid))
                T.append(VassTransition(mid, inc(t.dst), q))
        elif t.action.is_broadcast:
            m = t.action.message
            for q in p.states:
                recs = p.receptions(q, m)
                if recs:
                    for r in recs:
                        mid = intermediate_name(r.dst, idx)
                        T.append(VassTransition(q, dec(t.src), mid))
                        T.append(VassTransition(mid, inc(t.dst), r.dst))
                else:
                    mid = intermediate_name(q, idx)
                    T.append(VassTransition(q, dec(t.src), mid))
                    T.append(VassTransition(mid, inc(t.dst), q))
    return list(dict.fromkeys(T))


def _intermediates(p: Protocol) -> Dict[str, Tuple[str, Transition]]:
    return {
        intermediate_name(q, idx): (q, t)
        for idx, t in enumerate(p.transitions)
        for q in p.states
    }


def core_vass(p: Protocol, partition: PhasePartition) -> Vass:
    """The VASS without its pumping state: S = Q u Q x Delta, X = Q^b."""
    qb = b_states(p, partition)
    counters = tuple(q for q in p.states if q in qb)
    states = tuple(p.states) + tuple(_intermediates(p))
    return Vass(f"{p.name}_core", counters, states, tuple(_core_transitions(p, qb)))


def vass_from_print(
    p: Protocol,
    target: Union[str, Iterable[str]],
    pr: BroadcastPrint,
    partition: Optional[PhasePartition] = None,
) -> VassReduction:
    """
    VASS whose control state tracks the root and whose counters count the
    leaves in each Q^b state, started from the print.
    """
    partition = partition or require_phase_bound(p, 1)
    qb = b_states(p, partition)
    counters = tuple(q for q in p.states if q in qb)
    intermediates = _intermediates(p)
    taken = set(p.states) | set(intermediates)
    s_in = _fresh("s_in", taken)

    T: List[VassTransition] = [VassTransition(s_in, inc(q), s_in) for q in counters if q in pr.leaves]
    T.append(VassTransition(s_in, SKIP, pr.root))
    T.extend(_core_transitions(p, qb))

    states = tuple(p.states) + tuple(intermediates) + (s_in,)
    goals = tuple(q for q in p.states if q in target_set(target))
    v = Vass(f"{p.name}_print", counters, states, tuple(dict.fromkeys(T)), init=s_in,
             final=goals[0] if len(goals) == 1 else None)
    init = VassConfig(s_in, tuple(1 if q in pr.leaves else 0 for q in counters))
    return VassReduction(v, init, goals, s_in, intermediates)


# =============================================================================
# COVER FOR 1-PHASE-BOUNDED PROTOCOLS
# =============================================================================

def cover_1pb(p: Protocol, target: Union[str, Iterable[str]]) -> CoverVerdict:
    """
    Decide Cover (over all topologies) for a protocol with inferred k <= 1.

    Returns:
        COVERABLE with a star witness covering at the root (`print=` detail),
        NOT_COVERABLE, or UNKNOWN when phase inference or another budget trips

    Raises:
        NotPhaseBoundedWithin: the protocol is not 1-phase-bounded
    """
    targets = target_set(target)
    for q in targets:
        if q not in p.state_index:
            raise ProtocolError(f"unknown target state {q}")
    try:
        partition = require_phase_bound(p, 1)
    except PhaseSearchInconclusive as e:
        return unknown(str(e))
    try:
        graph = explore_prints(p, partition)
        core = core_vass(p, partition)
        basis = backward_basis(core, [q for q in p.states if q in targets], vass_budget())
    except BudgetExceededError as e:
        return unknown(str(e))

    counters = core.counters
    chosen: Optional[BroadcastPrint] = None
    for pr in sorted(graph.prints, key=lambda x: print_key(x, p)):
        for e in basis.elements.get(pr.root, ()):
            support = {x for x, n in zip(counters, e.vector) if n > 0}
            if support <= pr.leaves:
                chosen = pr
                break
        if chosen is not None:
            break
    if chosen is None:
        return not_coverable(f"{len(graph.prints)} prints, none reaches {sorted(targets)}")

    reduction = vass_from_print(p, targets, chosen, partition)
    goal_hits = []
    for goal in reduction.goal:
        result = vass_control_reach(reduction.vass, reduction.init, goal)
        if result.answer is Answer.UNKNOWN:
            return unknown(result.reason)
        if result.answer is Answer.YES:
            goal_hits.append(result.path)
            break
    if not goal_hits:
        raise WitnessConstructionError(f"basis says {chosen} covers but the print VASS disagrees")

    witness = build_star_witness(p, graph, chosen, reduction, goal_hits[0])
    final = replay(p, witness)
    if final.state_of(ROOT) not in targets:
        raise WitnessConstructionError(f"star witness ends with root in {final.state_of(ROOT)}")
    return coverable(witness, ROOT, print=chosen.format(p.states))


def build_star_witness(
    p: Protocol,
    graph: PrintGraph,
    pr: BroadcastPrint,
    reduction: VassReduction,
    path: Sequence[VassTransition],
) -> Execution:
    """
    Concrete star execution: realise the print path with enough leaf copies,
    then play the VASS path (pumps fix the copy counts, the rest are root
    internal moves and leaf moves).
    """
    start, chain = graph.path_to(pr)

    final_need = {q: 1 for q in pr.leaves}
    body: List[VassTransition] = []
    for t in path:
        if t.src == reduction.s_in and t.op.kind is OpKind.INC:
            final_need[t.op.counter] += 1
        elif t.src != reduction.s_in:
            body.append(t)

    # need[i] = leaf copies required per state before move i
    need: List[Dict[str, int]] = [dict() for _ in range(len(chain) + 1)]
    need[len(chain)] = final_need
    moved: List[int] = [0] * len(chain)
    for i in range(len(chain) - 1, -1, -1):
        (kind, t, keep), after = chain[i]
        before = start if i == 0 else chain[i - 1][1]
        nxt = need[i + 1]
        cur = {q: nxt.get(q, 0) for q in before.leaves}
        if kind in ("leaf_tau", "leaf_bcast"):
            q1, q2 = t.src, t.dst
            if keep:
                moved[i] = nxt.get(q2, 0)
                cur[q1] = nxt.get(q1, 0) + moved[i]
            else:
                cur[q1] = max(1, nxt.get(q2, 0))
            if q2 in before.leaves and q2 != q1:
                cur[q2] = max(1, nxt.get(q2, 0) if keep else 1)
        for q in before.leaves:
            cur[q] = max(1, cur.get(q, 0))
        need[i] = cur

    n_leaves = need[0].get(p.init, 0) if start.leaves else 0
    star = make_star(n_leaves)
    labels = [p.init] * (n_leaves + 1)
    index = star.index
    steps: List[Step] = []

    def leaves_in(state: str) -> List[str]:
        return [v for v in star.vertices[1:] if labels[index[v]] == state]

    def fire(vertex: str, t: Transition, receivers: Tuple[Tuple[str, Transition], ...] = ()):
        steps.append(Step(vertex, t, receivers))
        labels[index[vertex]] = t.dst
        for u, r in receivers:
            labels[index[u]] = r.dst

    for i, ((kind, t, keep), _) in enumerate(chain):
        if kind == "root_tau":
            fire(ROOT, t)
        elif kind == "root_bcast":
            m = t.action.message
            receivers = tuple(
                (v, p.receptions(labels[index[v]], m)[0])
                for v in star.vertices[1:]
                if m in p.receive_set(labels[index[v]])
            )
            fire(ROOT, t, receivers)
        else:
            pool = leaves_in(t.src)
            movers = pool[:moved[i]] if keep else pool
            if keep and len(movers) >= len(pool):
                raise WitnessConstructionError(f"move {i} would empty {t.src}")
            for v in movers:
                fire(v, t)

    mid_info = reduction.intermediates
    k = 0
    while k < len(body):
        t = body[k]
        if t.op.kind is OpKind.SKIP and t.src == reduction.s_in:
            k += 1
            continue
        if t.op.kind is OpKind.SKIP:
            tau = next(x for x in p.outgoing[t.src] if x.action.is_internal and x.dst == t.dst)
            fire(ROOT, tau)
            k += 1
            continue
        root_after, delta = mid_info[t.dst]
        pool = leaves_in(delta.src)
        if not pool:
            raise WitnessConstructionError(f"no leaf in {delta.src} for {t}")
        receivers: Tuple[Tuple[str, Transition], ...] = ()
        if delta.action.is_broadcast and delta.action.message in p.receive_set(labels[index[ROOT]]):
            rec = next(r for r in p.receptions(labels[index[ROOT]], delta.action.message) if r.dst == root_after)
            receivers = ((ROOT, rec),)
        fire(pool[0], delta, receivers)
        k += 2

    initial = Configuration(star, tuple([p.init] * (n_leaves + 1)))
    return Execution(initial, tuple(steps))


# =============================================================================
# VASS -> PROTOCOL
# =============================================================================

@dataclass(frozen=True)
class VassEncoding:
    """
    Protocol encoding a VASS, and the protocol copies of each control state.

    The protocol is 1-phase-bounded: counter leaves only broadcast
    (qin -> x_1 -> x_0 -> x_1 ...), the root only receives or moves
    internally. Control states reachable both by skips from s_in and after
    a counter operation get a Q0 copy `s^0`.
    """
    protocol: Protocol
    copies: Dict[str, Tuple[str, ...]]


def counter_message(kind: OpKind, counter: str) -> str:
    return f"{'inc' if kind is OpKind.INC else 'dec'}_{counter}"


def _skip_closure(v: Vass, start: str) -> Set[str]:
    seen = {start}
    queue = deque([start])
    while queue:
        s = queue.popleft()
        for t in v.outgoing[s]:
            if t.op.kind is OpKind.SKIP and t.dst not in seen:
                seen.add(t.dst)
                queue.append(t.dst)
    return seen


def _after_counter_op(v: Vass, zero: Set[str]) -> Set[str]:
    seen: Set[str] = set()
    queue = deque()
    for s in zero:
        for t in v.outgoing[s]:
            if t.op.kind is not OpKind.SKIP and t.dst not in seen:
                seen.add(t.dst)
                queue.append(t.dst)
    while queue:
        s = queue.popleft()
        for t in v.outgoing[s]:
            if t.dst not in seen:
                seen.add(t.dst)
                queue.append(t.dst)
    return seen


def vass_encoding(v: Vass, s_in: Optional[str] = None) -> VassEncoding:
    """Build the 1-phase-bounded protocol encoding VASS control-state reachability from (s_in, 0)."""
    s_in = s_in or v.init
    if s_in not in v.states:
        raise ProtocolError(f"unknown VASS initial state {s_in}")
    taken = set(v.states)
    qin = _fresh("qin", taken)
    err = _fresh("err", taken)
    counter_states = {x: (_fresh(f"{x}_0", taken), _fresh(f"{x}_1", taken)) for x in v.counters}

    zero = _skip_closure(v, s_in)
    later = _after_counter_op(v, zero)
    split = [s for s in v.states if s in zero and s in later]
    level0 = {s: (_fresh(f"{s}^0", taken) if s in later else s) for s in v.states if s in zero}

    messages = []
    for x in v.counters:
        messages.extend([counter_message(OpKind.INC, x), counter_message(OpKind.DEC, x)])

    delta: List[Transition] = [Transition(qin, TAU, level0[s_in])]
    delta.extend(Transition(qin, receive(m), err) for m in messages)
    for x in v.counters:
        x0, x1 = counter_states[x]
        delta.append(Transition(qin, broadcast(counter_message(OpKind.INC, x)), x1))
        delta.append(Transition(x0, broadcast(counter_message(OpKind.INC, x)), x1))
        delta.append(Transition(x1, broadcast(counter_message(OpKind.DEC, x)), x0))

    def root_moves(name: str, s: str, skip_target) -> List[Transition]:
        moves = []
        handled = set()
        for t in v.outgoing[s]:
            if t.op.kind is OpKind.SKIP:
                moves.append(Transition(name, TAU, skip_target(t.dst)))
            else:
                m = counter_message(t.op.kind, t.op.counter)
                handled.add(m)
                moves.append(Transition(name, receive(m), t.dst))
        moves.extend(Transition(name, receive(m), err) for m in messages if m not in handled)
        return moves

    for s in v.states:
        plain_is_zero = s in zero and s not in later
        if plain_is_zero:
            delta.extend(root_moves(s, s, lambda d: level0.get(d, d)))
        else:
            delta.extend(root_moves(s, s, lambda d: d))
    for s in split:
        delta.extend(root_moves(level0[s], s, lambda d: level0.get(d, d)))

    states = [qin, err, *v.states]
    for x in v.counters:
        states.extend(counter_states[x])
    states.extend(level0[s] for s in split)

    copies = {s: ((s, level0[s]) if s in split else (s,)) for s in v.states}
    protocol = Protocol(f"{v.name}_net", tuple(states), tuple(messages), qin, tuple(dict.fromkeys(delta)))
    logger.debug("encoded VASS %s: %d states, %d split", v.name, len(states), len(split))
    return VassEncoding(protocol, copies)


def protocol_from_vass(v: Vass, s_in: Optional[str] = None, s_f: Optional[str] = None) -> Protocol:
    """
    1-phase-bounded protocol whose root covers (a copy of) s_f iff the VASS
    reaches s_f from (s_in, 0). s_f only needs to be a VASS state.
    """
    s_f = s_f or v.final
    if s_f is not None and s_f not in v.states:
        raise ProtocolError(f"unknown VASS goal state {s_f}")
    return vass_encoding(v, s_in).protocol


def state_copies(encoding: VassEncoding, s: str) -> Tuple[str, ...]:
    """Protocol states standing for VASS control state s."""
    return encoding.copies[s]
