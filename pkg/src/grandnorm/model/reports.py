"""
Report records returned by the controllers and serialized by the CLI.

All records are dataclass_json dataclasses so `.to_dict()` yields plain JSON-ready
structures with a stable key order.
"""

from dataclasses import dataclass, field
from enum import Enum

from dataclasses_json import dataclass_json


class Verdict(str, Enum):
    VANISHES = "VANISHES"
    PERSISTS = "PERSISTS"
    INCONCLUSIVE = "INCONCLUSIVE"


@dataclass_json
@dataclass
class SpaceReport:
    label: str
    n: int
    total_measure: float
    diameter: float
    depth: float
    quasi_triangle: float | None
    doubling: float


@dataclass_json
@dataclass
class RegularityReport:
    p_minus: float
    p_plus: float
    log_holder: float
    diening_ball: float
    diening_pair: float
    shift_log_holder: float | None = None


@dataclass_json
@dataclass
class ShiftProfile:
    """Per-shift table of a sup (grand, script-L) or inf (H upper bound) over a grid."""

    theta: float
    p_minus: float
    shifts: list[float]
    factors: list[float]
    norms: list[float]
    products: list[float]
    value: float
    optimal_shift: float | None


@dataclass_json
@dataclass
class ChainReport:
    shift: float
    shifted_norm: float
    grand_norm: float
    morrey_norm: float
    c1: float
    c2: float
    left_ratio: float | None  # c1 * grand / shifted, >= 1 when the left embedding holds
    right_ratio: float | None  # c2 * morrey / grand, >= 1 when the right embedding holds
    left_holds: bool
    right_holds: bool


@dataclass_json
@dataclass
class LevelDiagnostic:
    label: str
    n: int
    depth: float
    grand_norm: float
    thresholds: list[float]
    tail_profile: list[float]
    tail_estimate: float
    shifts: list[float]
    small_c_profile: list[float]
    small_c_slope: float | None
    small_c_estimate: float
    log_holder: float | None = None
    doubling: float | None = None


@dataclass_json
@dataclass
class ClosureReport:
    tail_verdict: Verdict
    small_c_verdict: Verdict
    agree: bool
    tail_level: float
    small_c_level: float
    expected_slope: float
    c_lo: float
    resolved: bool
    tail_trend: float | None = None  # d ln(tail) / d ln(depth), two finest levels
    small_c_trend: float | None = None
    levels: list[LevelDiagnostic] = field(default_factory=list)


@dataclass_json
@dataclass
class SandwichReport:
    upper: float
    lower: float
    holder_constant: float
    holds: bool


@dataclass_json
@dataclass
class SplitReport:
    level: int
    kappa_low: float
    kappa_high: float
    strategy: str
    constant: float
    low_norm: float
    high_norm: float
    low_bound: float
    high_bound: float
    block_norm: float  # ||b||_{(p-kappa)'}
    norm_ratio: float  # larger part norm over block_norm


@dataclass_json
@dataclass
class PairingReport:
    pairing: float
    bound: float
    slack: float
    holder_constant: float
    script_l_norm: float
    cost: float
    holds: bool


@dataclass_json
@dataclass
class FatouReport:
    upper_profile: list[float]
    lower_profile: list[float]
    holder_constant: float
    monotone: bool
    dominated: bool

    @property
    def holds(self) -> bool:
        return self.monotone and self.dominated


@dataclass_json
@dataclass
class SuiteResult:
    name: str
    statement: str
    instances: int
    violations: int
    worst: float
    details: dict = field(default_factory=dict)
    anchor: str = ""

    @property
    def passed(self) -> bool:
        return self.violations == 0
