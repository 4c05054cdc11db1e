"""Budgeted Chaitin geometric progression.

For each digit-length ``l`` in base ``2**r`` the element is the smallest
number with exactly ``l`` digits whose representation no strictly shorter
program produces. Unrestricted, that predicate is undecidable; here it is
always relative to one machine and one step budget. For a total machine
with an unbounded budget the result is exact relative to that machine.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from typing import IO, Optional

from .complexity import format_budget, is_compressible, representation
from .machines import DescriptionMachine, get_machine

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ChaitinProgression:
    machine: str
    r: int
    budget: Optional[int]
    entries: dict[int, Optional[int]] = field(default_factory=dict)

    def elements(self) -> list[int]:
        return [e for _, e in sorted(self.entries.items()) if e is not None]

    def write_csv(self, fp: IO[str]) -> None:
        w = csv.writer(fp, lineterminator="\n")
        w.writerow(["l", "element", "repr_bits", "machine", "budget", "status"])
        for l, e in sorted(self.entries.items()):
            if e is None:
                w.writerow([l, "", "", self.machine, format_budget(self.budget), "none"])
            else:
                w.writerow([l, e, representation(e, self.r), self.machine,
                            format_budget(self.budget), "found"])


def length_range(r: int, l: int) -> range:
    """Numbers with exactly ``l`` base-``2**r`` digits."""
    return range(1 if l == 1 else 1 << (r * (l - 1)), 1 << (r * l))


def chaitin_element(machine: DescriptionMachine, r: int, l: int, budget: Optional[int] = None,
                    start: Optional[int] = None) -> Optional[int]:
    if r < 1 or l < 1:
        raise ValueError(f"need r >= 1 and l >= 1, got r={r}, l={l}")
    pool = length_range(r, l)
    lo = pool.start if start is None else max(start, pool.start)
    for x in range(lo, pool.stop):
        if not is_compressible(machine, x, r, budget):
            return x
    log.warning("every %d-digit number in base %d is compressible on %s at budget %s",
                l, 1 << r, machine.name, format_budget(budget))
    return None


def chaitin_progression(machine: DescriptionMachine, r: int, max_l: int,
                        budget: Optional[int] = None) -> ChaitinProgression:
    if max_l < 1:
        raise ValueError(f"max length must be >= 1, got {max_l}")
    entries = {l: chaitin_element(machine, r, l, budget) for l in range(1, max_l + 1)}
    return ChaitinProgression(machine.name, r, budget, entries)


def _budget_le(a: Optional[int], b: Optional[int]) -> bool:
    return b is None or (a is not None and a <= b)


def refine(progression: ChaitinProgression, new_budget: Optional[int],
           machine: Optional[DescriptionMachine] = None) -> ChaitinProgression:
    """Recompute ``progression`` at a budget at least as large.

    Everything below an old element was already compressible and stays so at
    a larger budget, so each scan resumes from the old element; lengths that
    had no element keep none.
    """
    if not _budget_le(progression.budget, new_budget):
        raise ValueError(
            f"refine cannot lower the budget ({format_budget(progression.budget)} -> "
            f"{format_budget(new_budget)})"
        )
    machine = machine or get_machine(progression.machine)
    if machine.name != progression.machine:
        raise ValueError(f"progression was built on {progression.machine!r}, not {machine.name!r}")
    entries = {}
    for l, old in progression.entries.items():
        entries[l] = None if old is None else chaitin_element(
            machine, progression.r, l, new_budget, start=old)
    return ChaitinProgression(machine.name, progression.r, new_budget, entries)
