"""Client-server reading of a multiway model.

The server walks the multiway tree breadth-first and streams every state
with its 1-based index. The client keeps the state with index ``n`` only if
``n`` is the Chaitin element for its own digit-length in base ``2**r``; the
kept states form a single history whose clock advances once per digit of
the server's iteration count.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import IO, Iterable, Iterator, Optional

from . import protocol
from .analysis import fit_linear, fit_log
from .chaitin import chaitin_element
from .complexity import complexity, digit_count, format_budget, representation
from .machines import DescriptionMachine
from .model import RuleSystem, bfs_enumerate
from .protocol import Frame, FrameType, ProtocolError


def serve(rule: RuleSystem, root: int, count: int) -> Iterator[Frame]:
    yield protocol.hello(rule.r, rule.name)
    for n, label in bfs_enumerate(rule, root, count):
        yield protocol.state(n, label)
    yield protocol.end()


@dataclass(frozen=True)
class Accepted:
    n: int
    l: int
    label: int


@dataclass
class ClientHistory:
    machine: str
    budget: Optional[int]
    r: int = 0
    rule: str = ""
    accepted: list[Accepted] = field(default_factory=list)
    received: int = 0
    status: str = "complete"  # or "truncated"

    def labels(self) -> list[int]:
        return [a.label for a in self.accepted]

    def write_csv(self, fp: IO[str], machine: Optional[DescriptionMachine] = None) -> None:
        w = csv.writer(fp, lineterminator="\n")
        w.writerow(["m", "n", "l", "label", "label_bits", "c_bits", "machine", "budget", "status"])
        for m, a in enumerate(self.accepted, start=1):
            s = representation(a.label, max(self.r, 1))
            c = "" if machine is None else complexity(machine, s, self.budget).bits
            w.writerow([m, a.n, a.l, a.label, len(s), "" if c is None else c,
                        self.machine, format_budget(self.budget), self.status])


def client_filter(frames: Iterable[Frame], machine: DescriptionMachine,
                  budget: Optional[int] = None) -> ClientHistory:
    """Consume a frame stream and keep the states at Chaitin-progression indices.

    The progression is computed locally, one digit-length at a time, as
    indices reach it. A stream without END yields a ``truncated`` history.
    """
    history = ClientHistory(machine.name, budget)
    elements: dict[int, Optional[int]] = {}
    base = None
    ended = False
    ordinal = 0
    for ordinal, frame in enumerate(frames, start=1):
        if ended:
            raise ProtocolError("frame after END", ordinal)
        if frame.type == FrameType.ERROR:
            raise ProtocolError("server error: " + frame.payload.decode("utf-8", "replace"), ordinal)
        if ordinal == 1:
            if frame.type != FrameType.HELLO:
                raise ProtocolError("stream must start with HELLO", ordinal)
            version, r, name = protocol.parse_hello(frame, ordinal)
            if version != protocol.VERSION:
                raise ProtocolError(f"unsupported protocol version {version}", ordinal)
            if r < 1:
                raise ProtocolError(f"client-server filtering needs r >= 1, server sent r={r}", ordinal)
            history.r, history.rule, base = r, name, 1 << r
            continue
        if frame.type == FrameType.HELLO:
            raise ProtocolError("duplicate HELLO", ordinal)
        if frame.type == FrameType.END:
            if frame.payload:
                raise ProtocolError("END carries a payload", ordinal)
            ended = True
            continue
        n, label = protocol.parse_state(frame, ordinal)
        if n != history.received + 1:
            raise ProtocolError(f"index gap: expected {history.received + 1}, got {n}", ordinal)
        history.received = n
        l = digit_count(n, base)
        if l not in elements:
            elements[l] = chaitin_element(machine, history.r, l, budget)
        if elements[l] == n:
            history.accepted.append(Accepted(n, l, label))
    if ordinal == 0:
        history.status = "truncated"
    elif not ended:
        history.status = "truncated"
    return history


def derived_rule_check(rule: RuleSystem, root: int, count: int) -> bool:
    """True iff the n-th BFS label is ``root + n - 1``, i.e. the server walks x -> x+1."""
    return all(label == root + n - 1 for n, label in bfs_enumerate(rule, root, count))


def perceived_time(n: int, base: int = 2) -> int:
    """Digit count of the iteration number: the clock of an observer who sees only its width."""
    if n < 1:
        raise ValueError("perceived time is defined for n >= 1")
    return digit_count(n, base)


@dataclass
class EquivalenceReport:
    accepted: int
    received: int
    complexities: list[Optional[int]]
    complexity_slope: Optional[float] = None
    complexity_intercept: Optional[float] = None
    complexity_goodness: Optional[float] = None
    clock_slope: Optional[float] = None
    clock_intercept: Optional[float] = None
    clock_goodness: Optional[float] = None
    incompressible: bool = False
    insufficient_data: bool = False


def equivalence_report(history: ClientHistory, machine: DescriptionMachine,
                       budget: Optional[int] = None) -> EquivalenceReport:
    """Growth of the client history against the typical multiway observer.

    Fits the complexity of the m-th accepted label against m (expected
    linear, slope ``r``) and the number of accepted states against the
    server index (expected to follow the digit count of the index).
    """
    if not history.accepted:
        raise ValueError("equivalence report needs a nonempty history")
    r = history.r
    comps = [complexity(machine, representation(a.label, r), budget).bits for a in history.accepted]
    rep = EquivalenceReport(len(history.accepted), history.received, comps)
    rep.incompressible = all(c is not None and c >= r * a.l for c, a in zip(comps, history.accepted))
    series = [(m, c) for m, c in enumerate(comps, start=1) if c is not None]
    if len(series) < 3 or history.received < 3:
        rep.insufficient_data = True
        return rep
    rep.complexity_slope, rep.complexity_intercept, rep.complexity_goodness = fit_linear(series)
    clock = []
    count = 0
    it = iter(history.accepted)
    nxt = next(it, None)
    for n in range(1, history.received + 1):
        if nxt is not None and nxt.n == n:
            count += 1
            nxt = next(it, None)
        clock.append((n, count))
    rep.clock_slope, rep.clock_intercept, rep.clock_goodness = fit_log(clock)
    return rep
