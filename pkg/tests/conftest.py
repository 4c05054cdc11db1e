import pytest

from ontic.machines import RM1, INVALID, DescriptionMachine, RunResult, Status
from ontic.rules import load_rule


class EnumerationOnly(RM1):
    """RM-1 without its inverter: every query goes through program enumeration."""

    name = "rm1"
    invert = None


class Overlay(DescriptionMachine):
    """RM-1 plus extra programs (invalid on RM-1) with a fixed output and step cost."""

    total = False

    def __init__(self, extra, name="overlay"):
        self.base = RM1()
        self.extra = extra
        self.name = name
        for p in extra:
            assert self.base.run(p).status is Status.INVALID, p

    def run(self, program, budget=None):
        if program in self.extra:
            out, cost = self.extra[program]
            if budget is not None and cost > budget:
                return RunResult(Status.EXHAUSTED, steps=budget)
            return RunResult(Status.HALTED, out, cost)
        return self.base.run(program, budget)


class PrefixOne(DescriptionMachine):
    """Program p outputs "1" + p: every binary numeral has a one-bit-shorter program."""

    name = "prefix-one"
    total = True

    def run(self, program, budget=None):
        return RunResult(Status.HALTED, "1" + program, len(program) + 1)


class Never(DescriptionMachine):
    name = "never"

    def run(self, program, budget=None):
        return INVALID


@pytest.fixture(scope="session")
def rm1():
    return RM1()


@pytest.fixture(scope="session")
def rm1_enum():
    return EnumerationOnly()


@pytest.fixture(scope="session")
def be():
    return load_rule("binary_expansion")


@pytest.fixture(scope="session")
def cs():
    return load_rule("successor")


@pytest.fixture(scope="session")
def deg():
    return load_rule("footnote")


@pytest.fixture(scope="session")
def triple():
    return load_rule("triple")


ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=lambda k: int(k[2:])):
        ok, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {key}  {detail}")
