"""Descriptive complexity relative to a description machine.

Two routes are provided and kept independent:

* inversion, for machines that can list the shortest programs for a string
  (``RM1.invert``), and
* exhaustive enumeration of programs in length order, which works for any
  machine and is the reference the inversion route is tested against.
"""

from __future__ import annotations

import csv
import itertools
from dataclasses import dataclass, field
from typing import IO, Iterable, Iterator, Optional

from .machines import DescriptionMachine, RunResult, Status
from .model import ObserverExperience


@dataclass(frozen=True)
class ComplexityValue:
    bits: Optional[int]  # None: no program found within budget / search bound
    exact: bool


def run_machine(machine: DescriptionMachine, program: str, budget: Optional[int] = None) -> RunResult:
    return machine.run(program, budget)


def programs(length: int) -> Iterator[str]:
    if length == 0:
        yield ""
        return
    for bits in itertools.product("01", repeat=length):
        yield "".join(bits)


def enumerate_complexity(
    machine: DescriptionMachine,
    s: str,
    budget: Optional[int] = None,
    max_len: Optional[int] = None,
) -> ComplexityValue:
    """Shortest program producing ``s``, by trying every program in length order.

    The value is exact when no shorter program ran out of budget.
    """
    if max_len is None:
        max_len = len(s) + 1
    cut_below = False
    for length in range(max_len + 1):
        cut_here = False
        for p in programs(length):
            res = machine.run(p, budget)
            if res.status is Status.HALTED and res.output == s:
                return ComplexityValue(length, not cut_below)
            if res.status is Status.EXHAUSTED:
                cut_here = True
        cut_below = cut_below or cut_here
    return ComplexityValue(None, False)


def complexity(
    machine: DescriptionMachine,
    s: str,
    budget: Optional[int] = None,
    max_len: Optional[int] = None,
) -> ComplexityValue:
    invert = getattr(machine, "invert", None)
    if invert is not None:
        bits, exact = invert(s, budget)
        return ComplexityValue(bits, exact)
    return enumerate_complexity(machine, s, budget, max_len)


def digits(x: int, base: int) -> list[int]:
    """Most-significant-first digits of ``x``; ``0`` has the single digit 0."""
    if x < 0:
        raise ValueError("labels are natural numbers")
    if base < 2:
        raise ValueError(f"base must be >= 2, got {base}")
    if x == 0:
        return [0]
    out = []
    while x:
        x, d = divmod(x, base)
        out.append(d)
    return out[::-1]


def digit_count(x: int, base: int) -> int:
    return len(digits(x, base))


def representation(x: int, r: int) -> str:
    """Base-``2**r`` digits of ``x``, no leading zero digit, ``r`` bits per digit."""
    if r < 1:
        raise ValueError(f"representation needs r >= 1, got {r}")
    if x < 0:
        raise ValueError("labels are natural numbers")
    b = format(x, "b")
    return b.zfill(-(-len(b) // r) * r)


def is_compressible(machine: DescriptionMachine, x: int, r: int, budget: Optional[int] = None) -> bool:
    """True iff some program strictly shorter than ``representation(x, r)`` produces it."""
    if x < 1:
        raise ValueError("compressibility is defined for labels >= 1")
    s = representation(x, r)
    if getattr(machine, "invert", None) is not None:
        bits = complexity(machine, s, budget).bits
    else:
        bits = enumerate_complexity(machine, s, budget, max_len=len(s) - 1).bits
    return bits is not None and bits < len(s)


@dataclass(frozen=True)
class ProfileRow:
    n: int  # 1-based position of the state in the experience
    label: int
    label_bits: int
    value: ComplexityValue


def complexity_profile(
    machine: DescriptionMachine,
    experience: ObserverExperience,
    r: int,
    budget: Optional[int] = None,
) -> list[ProfileRow]:
    """Complexity of each state's representation along an experience.

    ``r = 0`` rules have no base-1 rendering; their labels are rendered in
    binary.
    """
    rr = max(r, 1)
    rows = []
    for i, x in enumerate(experience.states, start=1):
        s = representation(x, rr)
        rows.append(ProfileRow(i, x, len(s), complexity(machine, s, budget)))
    return rows


@dataclass
class ComplexityTable:
    machine: str
    budget: Optional[int]
    method: str  # "inversion" | "enumeration"
    values: dict[str, ComplexityValue] = field(default_factory=dict)

    def __getitem__(self, s: str) -> ComplexityValue:
        return self.values[s]

    def write_csv(self, fp: IO[str]) -> None:
        w = csv.writer(fp, lineterminator="\n")
        w.writerow(["string", "bits", "len", "exact", "machine", "budget"])
        for s in sorted(self.values, key=lambda t: (len(t), t)):
            v = self.values[s]
            w.writerow([s, "" if v.bits is None else v.bits, len(s), int(v.exact),
                        self.machine, format_budget(self.budget)])


def format_budget(budget: Optional[int]) -> str:
    return "unbounded" if budget is None else str(budget)


def all_strings(max_len: int) -> Iterator[str]:
    for n in range(max_len + 1):
        yield from programs(n)


def inversion_table(machine: DescriptionMachine, strings: Iterable[str], budget: Optional[int] = None) -> ComplexityTable:
    table = ComplexityTable(machine.name, budget, "inversion")
    for s in strings:
        table.values[s] = complexity(machine, s, budget)
    return table


def enumeration_table(machine: DescriptionMachine, max_string_len: int, max_program_len: int,
                      budget: Optional[int] = None) -> ComplexityTable:
    """Run every program of length <= ``max_program_len`` once.

    Values are exact for strings with a witness within the program bound and
    no budget cut below it; strings with no witness found get ``bits=None``.
    """
    best: dict[str, int] = {}
    first_cut: Optional[int] = None
    for length in range(max_program_len + 1):
        for p in programs(length):
            res = machine.run(p, budget)
            if res.status is Status.EXHAUSTED and first_cut is None:
                first_cut = length
            elif res.halted and len(res.output) <= max_string_len and res.output not in best:
                best[res.output] = length
    table = ComplexityTable(machine.name, budget, "enumeration")
    for s in all_strings(max_string_len):
        bits = best.get(s)
        exact = bits is not None and (first_cut is None or first_cut >= bits)
        table.values[s] = ComplexityValue(bits, exact)
    return table
