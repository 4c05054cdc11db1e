"""Description machines: decoders from program bitstrings to output bitstrings.

Bitstrings are ``str`` objects over ``"0"``/``"1"``. A machine may be total or
only budgeted. ``run`` returns a status together with any output and the
steps it consumed.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional


class Status(enum.Enum):
    HALTED = "halted"
    INVALID = "invalid"
    EXHAUSTED = "budget-exhausted"


@dataclass(frozen=True)
class RunResult:
    status: Status
    output: Optional[str] = None
    steps: int = 0

    @property
    def halted(self) -> bool:
        return self.status is Status.HALTED


INVALID = RunResult(Status.INVALID)


class DescriptionMachine:
    """Base class. Subclasses implement :meth:`run`.

    ``run`` must be deterministic and budget-monotone: a program that halts
    with output ``s`` at budget ``T`` halts with ``s`` at every ``T' >= T``.
    ``budget=None`` means unbounded.
    """

    name = "machine"
    total = False

    def run(self, program: str, budget: Optional[int] = None) -> RunResult:
        raise NotImplementedError

    def __repr__(self):
        return f"<{type(self).__name__} {self.name}>"


class RM1(DescriptionMachine):
    """Literal-or-run-length reference machine.

    The first bit is the opcode.

    * ``0`` (LIT): the rest of the program is the output.
    * ``1`` (RLE): a unary block length ``l >= 1`` (``l`` ones then a zero),
      ``l`` block bits, then the remaining bits read as a binary number
      ``c``; the output is the block repeated ``c + 2`` times.

    Empty or truncated fields make the program invalid. One step is charged
    per output bit, so every program producing ``s`` costs ``len(s)`` steps.
    """

    name = "rm1"
    total = True

    def run(self, program: str, budget: Optional[int] = None) -> RunResult:
        if not program:
            return INVALID
        if program[0] == "0":
            out = program[1:]
            if budget is not None and len(out) > budget:
                return RunResult(Status.EXHAUSTED, steps=budget)
            return RunResult(Status.HALTED, out, len(out))
        zero = program.find("0", 1)
        if zero < 0:
            return INVALID
        block_len = zero - 1
        block_end = zero + 1 + block_len
        if block_len == 0 or block_end >= len(program):
            return INVALID
        block = program[zero + 1 : block_end]
        repeats = int(program[block_end:], 2) + 2
        size = block_len * repeats
        if budget is not None and size > budget:
            return RunResult(Status.EXHAUSTED, steps=budget)
        return RunResult(Status.HALTED, block * repeats, size)

    def witnesses(self, s: str):
        """Yield every minimal-length program for each way RM-1 can emit ``s``."""
        yield "0" + s
        n = len(s)
        for block_len in range(1, n // 2 + 1):
            if n % block_len:
                continue
            block = s[:block_len]
            repeats = n // block_len
            if block * repeats == s:
                yield "1" * (block_len + 1) + "0" + block + format(repeats - 2, "b")

    def invert(self, s: str, budget: Optional[int] = None) -> tuple[Optional[int], bool]:
        """Shortest program length for ``s`` and whether it is exact."""
        if budget is not None and budget < len(s):
            return None, False
        return min(len(p) for p in self.witnesses(s)), True


MACHINES: dict[str, DescriptionMachine] = {"rm1": RM1()}


def get_machine(name: str) -> DescriptionMachine:
    try:
        return MACHINES[name]
    except KeyError:
        raise ValueError(f"unknown machine {name!r}; known: {', '.join(MACHINES)}") from None
