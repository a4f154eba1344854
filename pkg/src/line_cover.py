"""
Polynomial Cover[Lines] for 1- and 2-phase-bounded protocols.

The procedure summarises what the two ends of a long line can bring to the
middle:
1. compute S, the least set of state pairs closed under the pair rules
   (internal move on either side, matched broadcast/reception, unheard
   broadcast of the right side, restart from (qin, q));
2. H = first components of S;
3. for every (q1, q2) in H x H, explore the five-vertex line started from
   q1 - qin - qin - qin - q2 and answer yes as soon as a vertex reaches the
   target.

Usage:
    from line_cover import cover_lines
    verdict = cover_lines(protocol, "q5")
    verdict.detail("pair")     # "q1,q4"
"""

from dataclasses import dataclass
from typing import FrozenSet, List, Optional, Set, Tuple

from infra.budget import configuration_budget
from infra.logging_setup import get_logger
from protocol_model import (
    ZERO,
    PhasePartition,
    PhaseSearchInconclusive,
    Protocol,
    ProtocolError,
    recv_label,
    require_phase_bound,
)
from semantics import (
    Configuration,
    CoverVerdict,
    brute_force_cover,
    coverable,
    not_coverable,
    target_set,
    unknown,
)
from topology import make_line

logger = get_logger("line_cover")

Pair = Tuple[str, str]

GAMMA5 = make_line(5)


class FrontierInvariantError(AssertionError):
    """H contains a state outside Q0 u Q1r (an algorithm bug)."""


@dataclass(frozen=True)
class PairSet:
    """
    Fixpoint S with the increasing chain S_0, S_1, ... that produced it.

    Attributes:
        pairs: The fixpoint S
        rounds: S_0 ... S_N (S_N == pairs)
    """
    pairs: FrozenSet[Pair]
    rounds: Tuple[FrozenSet[Pair], ...]

    def __contains__(self, pair: Pair) -> bool:
        return pair in self.pairs

    def __len__(self) -> int:
        return len(self.pairs)


def _derive(p: Protocol, current: FrozenSet[Pair]) -> Set[Pair]:
    new: Set[Pair] = set()
    for (p1, p2) in current:
        for t in p.outgoing[p1]:
            if t.action.is_internal:
                new.add((t.dst, p2))
        for t in p.outgoing[p2]:
            if t.action.is_internal:
                new.add((p1, t.dst))
            elif t.action.is_broadcast:
                m = t.action.message
                for r in p.receptions(p1, m):
                    new.add((r.dst, t.dst))
                if m not in p.receive_set(p1):
                    new.add((p1, t.dst))
        new.add((p.init, p1))
    return new


def compute_S(p: Protocol) -> PairSet:
    """
    Least fixpoint of the pair rules from S_0 = {(qin, qin)}.

    Terminates within |Q|^2 rounds since every round adds at least one pair.
    """
    current = frozenset({(p.init, p.init)})
    rounds = [current]
    limit = len(p.states) ** 2 + 1
    while True:
        nxt = frozenset(current | _derive(p, current))
        if nxt == current:
            break
        current = nxt
        rounds.append(current)
        if len(rounds) > limit:
            raise AssertionError("pair fixpoint exceeded |Q|^2 rounds")
    logger.debug("S fixpoint for %s: %d pairs in %d rounds", p.name, len(current), len(rounds) - 1)
    return PairSet(current, tuple(rounds))


def compute_H(S: PairSet, partition: PhasePartition, order: Optional[List[str]] = None) -> List[str]:
    """
    First components of S (in the given declaration order when provided).

    Raises:
        FrontierInvariantError: a state outside Q0 u Q1r appears
    """
    heads = {q for q, _ in S.pairs}
    allowed = (ZERO, recv_label(1))
    bad = sorted(q for q in heads if partition.label(q) not in allowed)
    if bad:
        raise FrontierInvariantError(f"H contains {bad} outside Q0 u Q1r")
    if order is None:
        return sorted(heads)
    return [q for q in order if q in heads]


def gamma5_start(p: Protocol, q1: str, q2: str) -> Configuration:
    """C_{q1,q2}: q1 - qin - qin - qin - q2 on the five-vertex line."""
    return Configuration(GAMMA5, (q1, p.init, p.init, p.init, q2))


def cover_lines(p: Protocol, target: str) -> CoverVerdict:
    """
    Decide Cover[Lines] for a protocol with inferred k <= 2.

    Every pair of H x H is tried; a pair whose search runs out of budget
    does not stop the others.

    Returns:
        COVERABLE with the five-vertex witness fragment and `pair=q1,q2`,
        NOT_COVERABLE, or UNKNOWN when phase inference or some pair's
        search ran out of budget and no pair covered

    Raises:
        NotPhaseBoundedWithin: the protocol is not 2-phase-bounded
    """
    if target not in p.state_index:
        raise ProtocolError(f"unknown target state {target}")
    try:
        partition = require_phase_bound(p, 2)
    except PhaseSearchInconclusive as e:
        return unknown(str(e))
    S = compute_S(p)
    H = compute_H(S, partition, list(p.states))
    logger.info("cover_lines %s: |S|=%d |H|=%d", p.name, len(S), len(H))

    targets = target_set(target)
    undecided: List[str] = []
    for q1 in H:
        for q2 in H:
            verdict = brute_force_cover(p, targets, GAMMA5, initial=gamma5_start(p, q1, q2),
                                        budget=configuration_budget())
            if verdict.is_coverable:
                return coverable(verdict.witness, verdict.vertex, pair=f"{q1},{q2}")
            if verdict.is_unknown:
                logger.info("pair (%s,%s) undecided: %s", q1, q2, verdict.reason)
                undecided.append(f"({q1},{q2})")
    if undecided:
        return unknown(f"{len(undecided)} pairs undecided: {' '.join(undecided)}")
    return not_coverable(f"no pair of H x H covers {target}")
