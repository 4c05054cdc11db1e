"""Ontic-state dynamics under multiway and single-successor rules, measured
with machine-relative descriptive complexity.

The budgeted Chaitin progression drives a client-server stream filter.
"""

from .chaitin import ChaitinProgression, chaitin_element, chaitin_progression, refine
from .complexity import (
    ComplexityValue,
    complexity,
    complexity_profile,
    enumerate_complexity,
    is_compressible,
    representation,
)
from .machines import RM1, DescriptionMachine, RunResult, Status, get_machine
from .model import (
    ObserverExperience,
    RuleDomainError,
    RuleError,
    RuleSystem,
    bfs_enumerate,
    check_regularity,
    detect_cycle,
    evolve_path,
    random_path,
    successors,
)
from .rules import RuleSpec, RuleSyntaxError, compile_rule, format_rule, load_rule, parse_rule

__version__ = "0.1.0"
