"""
Seeded random models for the cross-check corpora.

Every generator takes a `random.Random` instance so that a corpus is fully
determined by its seed. Phase-bounded protocols are built constructively:
states get a random phase label first, then only transitions allowed by
that labelling are drawn, so the result is k-phase-bounded by construction.

Usage:
    from utils.random_models import protocol_corpus
    for p in protocol_corpus(seed=0, count=50, k=2):
        ...
"""

import random
from typing import Iterator, List, Optional, Sequence

from infra.settings import get_settings
from protocol_model import (
    TAU,
    ZERO,
    PhaseLabel,
    PhasePartition,
    Protocol,
    Transition,
    broadcast,
    clause_of,
    partition_classes,
    receive,
)
from vass import SKIP, Vass, VassTransition, dec, inc

MESSAGES = ("a", "b", "c", "d")


def scaled(default: int, full: int) -> int:
    """Corpus size: `full` when slow tests are enabled, `default` otherwise."""
    return full if get_settings().slow_tests else default


def state_names(n: int) -> List[str]:
    return ["qin"] + [f"q{i}" for i in range(1, n)]


def _random_action(rng: random.Random, messages: Sequence[str]):
    roll = rng.random()
    if roll < 0.2:
        return TAU
    m = rng.choice(messages)
    return broadcast(m) if roll < 0.6 else receive(m)


def random_protocol(
    rng: random.Random,
    n_states: int = 5,
    n_messages: int = 3,
    n_transitions: int = 8,
    name: str = "random",
) -> Protocol:
    """Unconstrained protocol; may or may not be phase-bounded."""
    states = state_names(n_states)
    messages = MESSAGES[:n_messages]
    transitions = {
        Transition(rng.choice(states), _random_action(rng, messages), rng.choice(states))
        for _ in range(n_transitions)
    }
    return Protocol(name, tuple(states), messages, "qin", tuple(sorted(transitions, key=str)))


def random_phase_bounded(
    rng: random.Random,
    k: int,
    n_states: int = 5,
    n_messages: int = 3,
    n_transitions: int = 8,
    name: str = "random_pb",
) -> Protocol:
    """
    Protocol that is k-phase-bounded (inferred k may be smaller).

    Args:
        rng: Random source
        k: Phase bound (>= 1)
        n_states: Number of states including qin
        n_messages: Alphabet size (<= 4)
        n_transitions: Number of drawing attempts; invalid draws are dropped
    """
    states = state_names(n_states)
    messages = MESSAGES[:n_messages]
    classes: List[PhaseLabel] = partition_classes(k)
    labels = {"qin": ZERO}
    for q in states[1:]:
        labels[q] = rng.choice(classes[1:])
    partition = PhasePartition(k, labels)

    transitions = set()
    for _ in range(n_transitions * 4):
        if len(transitions) >= n_transitions:
            break
        src = rng.choice(states)
        action = _random_action(rng, messages)
        targets = [q for q in states if clause_of(Transition(src, action, q), partition) is not None]
        if targets:
            transitions.add(Transition(src, action, rng.choice(targets)))
    return Protocol(name, tuple(states), messages, "qin", tuple(sorted(transitions, key=str)))


def protocol_corpus(
    seed: int,
    count: int,
    k: Optional[int] = None,
    n_states: int = 5,
    n_messages: int = 3,
    n_transitions: int = 8,
) -> Iterator[Protocol]:
    """`count` protocols from one seed; phase-bounded by k when k is given."""
    rng = random.Random(seed)
    for i in range(count):
        if k is None:
            yield random_protocol(rng, n_states, n_messages, n_transitions, name=f"rand{i}")
        else:
            yield random_phase_bounded(rng, k, n_states, n_messages, n_transitions, name=f"rand{k}pb{i}")


def random_vass(
    rng: random.Random,
    n_states: int = 6,
    counters: Sequence[str] = ("x", "y"),
    n_transitions: int = 10,
    name: str = "random_vass",
) -> Vass:
    """VASS with init s0 and final s<n-1>."""
    states = [f"s{i}" for i in range(n_states)]
    transitions = set()
    for _ in range(n_transitions):
        roll = rng.random()
        if roll < 0.25:
            op = SKIP
        elif roll < 0.65:
            op = inc(rng.choice(counters))
        else:
            op = dec(rng.choice(counters))
        transitions.add(VassTransition(rng.choice(states), op, rng.choice(states)))
    return Vass(name, tuple(counters), tuple(states), tuple(sorted(transitions, key=str)),
                init=states[0], final=states[-1])


def vass_corpus(seed: int, count: int, n_states: int = 6, n_transitions: int = 10) -> Iterator[Vass]:
    rng = random.Random(seed)
    for i in range(count):
        yield random_vass(rng, n_states, n_transitions=n_transitions, name=f"vass{i}")
