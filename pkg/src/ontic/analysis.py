"""Growth-law classification of complexity-versus-time series.

A series is a sequence of ``(n, value)`` pairs with integer ``n``. A bounded
series is recognised first; otherwise a fit linear in ``n`` competes with one
linear in the binary digit count of ``n`` (logarithmic).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import IO, Optional, Sequence

import numpy as np

from .complexity import complexity_profile
from .model import random_path

Series = Sequence[tuple[int, float]]

# typicality defaults
SLOPE_TOLERANCE = 0.10
DEVIATION_BITS = 2.0
DENSITY_THRESHOLD = 0.10
TAIL_FRACTION = 0.5


def binary_digits(n: int) -> int:
    """ceil(log2(n + 1)): the number of binary digits of n."""
    return int(n).bit_length()


def _least_squares(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float]:
    if len(x) < 3:
        raise ValueError(f"need at least 3 points, got {len(x)}")
    if np.ptp(x) == 0:
        raise ValueError("degenerate abscissa: all regressor values are equal")
    A = np.column_stack([x, np.ones_like(x)])
    (slope, intercept), *_ = np.linalg.lstsq(A, y, rcond=None)
    return float(slope), float(intercept), _r_squared(y, slope * x + intercept)


def _r_squared(y: np.ndarray, pred: np.ndarray) -> float:
    ss_res = float(np.sum((y - pred) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    if ss_tot == 0:
        return 1.0 if ss_res < 1e-12 else 0.0
    return min(1.0, max(0.0, 1.0 - ss_res / ss_tot))


def _arrays(series: Series) -> tuple[np.ndarray, np.ndarray]:
    ns = np.array([n for n, _ in series], dtype=float)
    vs = np.array([v for _, v in series], dtype=float)
    return ns, vs


def fit_linear(series: Series) -> tuple[float, float, float]:
    """Ordinary least squares of value on n: ``(slope, intercept, r_squared)``."""
    ns, vs = _arrays(series)
    return _least_squares(ns, vs)


def fit_log(series: Series) -> tuple[float, float, float]:
    """Least squares of value on the binary digit count of n."""
    if any(n < 1 for n, _ in series):
        raise ValueError("logarithmic fit needs n >= 1")
    _, vs = _arrays(series)
    xs = np.array([binary_digits(n) for n, _ in series], dtype=float)
    return _least_squares(xs, vs)


@dataclass(frozen=True)
class GrowthFit:
    model: str  # "linear" | "logarithmic" | "bounded"
    slope: float
    intercept: float
    goodness: float
    exception_density: float = 0.0

    def predict(self, n: int) -> float:
        if self.model == "linear":
            return self.slope * n + self.intercept
        if self.model == "logarithmic":
            return self.slope * binary_digits(n) + self.intercept
        return self.intercept


def exception_density(series: Series, fit: GrowthFit, tolerance: float,
                      n: Optional[int] = None) -> float:
    """Fraction of indices ``m <= n`` whose value is off the fit by more than ``tolerance``."""
    if n is None:
        n = max(m for m, _ in series)
    if n < 1:
        return 0.0
    bad = sum(1 for m, v in series if m <= n and abs(v - fit.predict(m)) > tolerance)
    return min(1.0, bad / n)


def is_bounded(series: Series) -> bool:
    """No growth between the first quarter and the last half, and the
    last-half maximum is attained at least twice there."""
    vs = [v for _, v in series]
    head = vs[: max(1, len(vs) // 4)]
    tail = vs[len(vs) // 2 :]
    top = max(tail)
    return top <= max(head) and tail.count(top) >= 2


def classify_growth(series: Series, tolerance: float = DEVIATION_BITS) -> GrowthFit:
    if len(series) < 16:
        raise ValueError(f"classification needs at least 16 points, got {len(series)}")
    if is_bounded(series):
        _, vs = _arrays(series)
        mean = float(vs.mean())
        fit = GrowthFit("bounded", 0.0, mean, _r_squared(vs, np.full_like(vs, mean)))
    else:
        lin = fit_linear(series)
        log = fit_log(series)
        fit = GrowthFit("linear", *lin) if lin[2] >= log[2] else GrowthFit("logarithmic", *log)
    density = exception_density(series, fit, tolerance)
    return GrowthFit(fit.model, fit.slope, fit.intercept, fit.goodness, density)


def typicality_test(
    series: Series,
    r: int,
    slope_tolerance: float = SLOPE_TOLERANCE,
    deviation: float = DEVIATION_BITS,
    density_threshold: float = DENSITY_THRESHOLD,
    tail_fraction: float = TAIL_FRACTION,
) -> tuple[bool, GrowthFit]:
    """Does the tail of a complexity profile grow as a constant plus ``r`` bits per step?

    The tail (last ``tail_fraction`` of the points) stands in for "all n
    large enough". For ``r = 0`` the nominal law is a constant, so the
    profile must be bounded.
    """
    if len(series) < 32:
        raise ValueError(f"typicality needs at least 32 points, got {len(series)}")
    if r == 0:
        fit = classify_growth(series, deviation)
        return fit.model == "bounded" and fit.exception_density <= density_threshold, fit
    tail = list(series[len(series) - max(3, math.ceil(len(series) * tail_fraction)) :])
    slope, intercept, goodness = fit_linear(tail)
    fit = GrowthFit("linear", slope, intercept, goodness)
    bad = sum(1 for m, v in tail if abs(v - fit.predict(m)) > deviation)
    fit = GrowthFit("linear", slope, intercept, goodness, bad / len(tail))
    ok = abs(slope - r) <= slope_tolerance * r and fit.exception_density <= density_threshold
    return ok, fit


def write_fits_csv(fp: IO[str], rows: Sequence[tuple[int, GrowthFit, bool]]) -> None:
    w = csv.writer(fp, lineterminator="\n")
    w.writerow(["seed", "model", "slope", "intercept", "goodness", "exception_density", "typical"])
    for seed, fit, typical in rows:
        w.writerow([seed, fit.model, f"{fit.slope:.6f}", f"{fit.intercept:.6f}",
                    f"{fit.goodness:.6f}", f"{fit.exception_density:.6f}", int(typical)])


def profile_series(rows) -> list[tuple[int, int]]:
    """``(n, bits)`` pairs from complexity-profile rows, skipping unknown values."""
    return [(row.n, row.value.bits) for row in rows if row.value.bits is not None]


@dataclass
class ProbeResult:
    verdict: str  # "evidence-typical-found" | "no-typical-found"
    typical_seeds: list[int]
    linear_seeds: list[int]
    slopes: dict[int, float]
    off_nominal: bool


def degeneracy_probe(rule, r: int, seeds: Sequence[int], depth: int, machine,
                     budget: Optional[int] = None, root: int = 1) -> ProbeResult:
    """Sample random experiences looking for one with linear complexity growth.

    A seed is evidence when its profile classifies linear with few
    exceptions. ``off_nominal`` is set when evidence exists but no seed
    matches the nominal ``r`` bits per step. Finding nothing is evidence of
    degeneracy, not a proof.
    """
    if r < 1 or rule.k != 1 << r:
        raise ValueError(f"probe needs a 2**r-regular rule with r >= 1, got k={rule.k}, r={r}")
    typical, linear, slopes = [], [], {}
    for seed in seeds:
        path = random_path(rule, root, depth, seed)
        series = profile_series(complexity_profile(machine, path, r, budget))
        ok, tail_fit = typicality_test(series, r)
        fit = classify_growth(series)
        slopes[seed] = tail_fit.slope
        if ok:
            typical.append(seed)
        if (fit.model == "linear" and fit.slope > 0
                and tail_fit.exception_density <= DENSITY_THRESHOLD):
            linear.append(seed)
    found = bool(typical or linear)
    return ProbeResult(
        "evidence-typical-found" if found else "no-typical-found",
        typical, linear, slopes, off_nominal=found and not typical,
    )
