"""Ontic states, k-regular successor rules and multiway-tree traversal.

Labels are plain Python ints (arbitrary precision). A rule maps a label to an
ordered list of ``k = 2**r`` successor labels; the position in that list is
the branch index an observer's choice refers to.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Iterator, Optional, Sequence


class RuleError(ValueError):
    """A rule produced something its declaration does not allow."""


class RuleDomainError(RuleError):
    """A table rule was queried outside its finite domain."""

    def __init__(self, state: int):
        super().__init__(f"rule domain exceeded: no successors for state {state}")
        self.state = state


@dataclass(frozen=True)
class RuleSystem:
    name: str
    r: int
    successor_map: Callable[[int], Sequence[int]] = field(compare=False)

    def __post_init__(self):
        if self.r < 0:
            raise RuleError(f"arity exponent must be >= 0, got {self.r}")

    @property
    def k(self) -> int:
        return 1 << self.r

    @property
    def is_thooft(self) -> bool:
        return self.r == 0


@dataclass(frozen=True)
class ObserverExperience:
    start: int
    choices: tuple[int, ...]
    states: tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.choices)


@dataclass(frozen=True)
class MultiwayLevel:
    depth: int
    members: tuple[int, ...]


def successors(rule: RuleSystem, state: int) -> list[int]:
    if state < 0:
        raise ValueError(f"labels are natural numbers, got {state}")
    out = list(rule.successor_map(state))
    if len(out) != rule.k:
        raise RuleError(
            f"malformed rule {rule.name!r}: state {state} has {len(out)} "
            f"successors, expected {rule.k}"
        )
    return out


def evolve_path(rule: RuleSystem, start: int, choices: Sequence[int]) -> ObserverExperience:
    """Follow ``choices`` from ``start``; each choice selects a branch index."""
    for pos, c in enumerate(choices):
        if not 0 <= c < rule.k:
            raise ValueError(f"branch index {c} at position {pos} is outside [0, {rule.k})")
    states = [start]
    x = start
    for c in choices:
        x = successors(rule, x)[c]
        states.append(x)
    return ObserverExperience(start, tuple(choices), tuple(states))


def random_choices(rule: RuleSystem, depth: int, rng: random.Random) -> list[int]:
    return [rng.randrange(rule.k) for _ in range(depth)]


def random_path(rule: RuleSystem, start: int, depth: int, seed: int) -> ObserverExperience:
    return evolve_path(rule, start, random_choices(rule, depth, random.Random(seed)))


def bfs_enumerate(rule: RuleSystem, root: int, count: int) -> Iterator[tuple[int, int]]:
    """Yield ``(n, label)`` for the first ``count`` nodes of the multiway tree.

    The root is index 1; children of a node are emitted in branch order, and
    parents are expanded in their own emission order (heap order).
    """
    if count < 0:
        raise ValueError("count must be >= 0")
    if count == 0:
        return
    queue = deque([root])
    n = 0
    while True:
        x = queue.popleft()
        n += 1
        yield n, x
        if n >= count:
            return
        # a node is only expanded once everything queued before it is emitted,
        # so the queue never holds more than one level
        if len(queue) + n < count:
            queue.extend(successors(rule, x))


def bfs_index(choices: Sequence[int], k: int) -> int:
    """1-based heap index of the node reached from the root by ``choices``."""
    n = 1
    for c in choices:
        n = k * (n - 1) + 2 + c
    return n


def level(rule: RuleSystem, root: int, depth: int) -> MultiwayLevel:
    members = [root]
    for _ in range(depth):
        members = [y for x in members for y in successors(rule, x)]
    return MultiwayLevel(depth, tuple(members))


@dataclass(frozen=True)
class Cycle:
    period: int
    preperiod: int


def detect_cycle(rule: RuleSystem, start: int, max_steps: int) -> Optional[Cycle]:
    """Brent's algorithm on a 1-regular rule.

    A cycle is reported iff some state repeats among the first
    ``max_steps + 1`` states of the orbit. ``None`` means none was seen
    within budget; it is not a proof of aperiodicity.
    """
    if rule.k != 1:
        raise ValueError(f"cycle detection needs a 1-regular rule, {rule.name!r} has k={rule.k}")

    def f(x: int) -> int:
        return successors(rule, x)[0]

    # Brent needs at most ~3(mu + lambda) evaluations to find lambda
    cap = 3 * max_steps + 3
    evals = 0
    power = lam = 1
    tortoise, hare = start, f(start)
    evals += 1
    while tortoise != hare:
        if evals > cap:
            return None
        if power == lam:
            tortoise = hare
            power *= 2
            lam = 0
        hare = f(hare)
        evals += 1
        lam += 1
    if lam > max_steps:
        return None

    tortoise = hare = start
    for _ in range(lam):
        hare = f(hare)
    mu = 0
    while tortoise != hare:
        if mu + lam >= max_steps:
            return None
        tortoise = f(tortoise)
        hare = f(hare)
        mu += 1
    return Cycle(lam, mu)


def check_regularity(rule: RuleSystem, states) -> Optional[int]:
    """Return the first state whose successors are not pairwise distinct, else None."""
    for x in states:
        succ = successors(rule, x)
        if len(set(succ)) != len(succ):
            return x
    return None
