"""Return intervals between threshold exceedances and their scaled
distributions.

An exceedance is a point with v > q (strictly). Intervals tau are the
position differences between successive exceedances, measured in sample
positions of the volatility series (missing minutes have already been
collapsed upstream, so a position step is one observed minute). Scaled
intervals x = tau / <tau> are binned logarithmically for the PDF and
accumulated exactly for the empirical CDF.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import InsufficientEventsError, UnreachableTargetError
from .volatility import NormVolSeries


@dataclass(frozen=True, eq=False)
class IntervalSample:
    """Integer intervals between successive exceedances of one threshold."""

    q: float
    tau: np.ndarray
    source_length: int

    def __post_init__(self):
        if len(self.tau) < 1:
            raise ValueError("an interval sample needs at least one interval")
        if self.tau.dtype.kind not in "iu" or np.any(self.tau < 1):
            raise ValueError("intervals must be integers >= 1")

    def __len__(self) -> int:
        return len(self.tau)

    @property
    def mean_interval(self) -> float:
        return float(self.tau.mean())

    def scaled(self) -> np.ndarray:
        """Intervals divided by their mean."""
        return self.tau / self.mean_interval


def _series_values(v) -> tuple[np.ndarray, np.ndarray | None]:
    if isinstance(v, NormVolSeries):
        return v.values, v.day
    return np.asarray(v, dtype=np.float64), None


def extract_intervals(v, q: float, cross_day: bool = True) -> IntervalSample:
    """Intervals between successive exceedances v > q.

    ``v`` is a ``NormVolSeries`` or a plain array. With ``cross_day=False``
    intervals whose endpoints fall on different days are discarded (plain
    arrays carry no day labels and are treated as a single day).
    """
    values, day = _series_values(v)
    pos = np.flatnonzero(values > q)
    if len(pos) < 2:
        raise InsufficientEventsError(len(pos), q)
    tau = np.diff(pos)
    if not cross_day and day is not None:
        same = day[pos[1:]] == day[pos[:-1]]
        tau = tau[same]
        if len(tau) == 0:
            raise InsufficientEventsError(
                len(pos), q, detail="all intervals span a day boundary"
            )
    return IntervalSample(q=float(q), tau=tau.astype(np.int64), source_length=len(values))


@dataclass(frozen=True, eq=False)
class PdfTable:
    """Log-binned density of scaled intervals; empty bins are omitted.

    ``lo``/``hi`` are the kept bin edges, ``center`` the geometric bin
    centers. For tables built from data, sum(density * (hi - lo)) is 1 up to
    rounding.
    """

    lo: np.ndarray
    hi: np.ndarray
    center: np.ndarray
    density: np.ndarray
    count: np.ndarray
    n_total: int
    degenerate: bool = False

    def __post_init__(self):
        k = len(self.density)
        if not (len(self.lo) == len(self.hi) == len(self.center) == len(self.count) == k):
            raise ValueError("pdf table columns must have equal length")
        if k == 0:
            raise ValueError("pdf table must have at least one bin")
        if np.any(self.hi <= self.lo) or np.any(self.density < 0):
            raise ValueError("pdf table needs hi > lo and non-negative density")

    @property
    def n_bins(self) -> int:
        return len(self.density)


def scaled_pdf(sample: IntervalSample, bins_per_decade: int = 20) -> PdfTable:
    """Histogram of x = tau / <tau> on logarithmically spaced bins.

    Bin edges run from min(x) to max(x) with ``bins_per_decade`` bins per
    decade (the count is rounded up, so edges land exactly on the extremes).
    Empty bins are dropped. A sample with a single distinct value gets one
    synthetic bin spanning 1/bins_per_decade of a decade, flagged degenerate.
    """
    if bins_per_decade < 1:
        raise ValueError("bins_per_decade must be >= 1")
    x = sample.scaled()
    n = len(x)
    xmin = float(x.min())
    xmax = float(x.max())
    if xmin == xmax:
        half = 10.0 ** (0.5 / bins_per_decade)
        lo, hi = xmin / half, xmax * half
        return PdfTable(
            lo=np.array([lo]),
            hi=np.array([hi]),
            center=np.array([xmin]),
            density=np.array([1.0 / (hi - lo)]),
            count=np.array([n]),
            n_total=n,
            degenerate=True,
        )
    decades = math.log10(xmax / xmin)
    n_bins = max(1, math.ceil(decades * bins_per_decade))
    edges = 10.0 ** np.linspace(math.log10(xmin), math.log10(xmax), n_bins + 1)
    edges[0] = xmin
    edges[-1] = xmax
    count, _ = np.histogram(x, bins=edges)
    keep = count > 0
    lo = edges[:-1][keep]
    hi = edges[1:][keep]
    density = count[keep] / (n * (hi - lo))
    return PdfTable(
        lo=lo,
        hi=hi,
        center=np.sqrt(lo * hi),
        density=density,
        count=count[keep],
        n_total=n,
    )


@dataclass(frozen=True, eq=False)
class CdfTable:
    """Right-continuous empirical CDF on the unique sorted sample points."""

    x: np.ndarray
    F: np.ndarray
    count: np.ndarray
    n: int

    @classmethod
    def from_values(cls, values: np.ndarray) -> "CdfTable":
        values = np.asarray(values, dtype=np.float64)
        if len(values) == 0:
            raise ValueError("empty sample")
        x, count = np.unique(values, return_counts=True)
        return cls(x=x, F=np.cumsum(count) / len(values), count=count, n=len(values))

    def eval(self, t) -> np.ndarray:
        """F(t) with right-continuous steps: points at t are included."""
        idx = np.searchsorted(self.x, t, side="right")
        return np.where(idx > 0, self.F[np.maximum(idx - 1, 0)], 0.0)


def empirical_cdf(sample) -> CdfTable:
    """Empirical CDF of the scaled intervals, or of a plain value array."""
    if isinstance(sample, IntervalSample):
        return CdfTable.from_values(sample.scaled())
    return CdfTable.from_values(np.asarray(sample, dtype=np.float64))


class ThresholdResult(NamedTuple):
    q: float
    mean_interval: float


def threshold_for_mean(
    v, target: float, tol: float = 0.5, cross_day: bool = True
) -> ThresholdResult:
    """Find q whose mean interval is within ``tol`` of ``target`` by bisection.

    Returns the threshold and the achieved mean. If even the largest usable
    threshold cannot reach the target, raises ``UnreachableTargetError``.
    When the bracket collapses before the tolerance is met, the best
    threshold seen is returned.
    """
    if target < 1.0:
        raise ValueError("target mean interval must be >= 1")
    values, _ = _series_values(v)

    def mean_at(q: float) -> float | None:
        try:
            return extract_intervals(v, q, cross_day=cross_day).mean_interval
        except InsufficientEventsError:
            return None

    distinct = np.unique(values)
    if len(distinct) < 2:
        raise UnreachableTargetError("series is constant; no usable threshold")
    q_top = float(np.nextafter(distinct[-2], -np.inf))
    top_mean = mean_at(q_top)
    if top_mean is None:
        raise UnreachableTargetError("no threshold yields two exceedances")
    if top_mean < target - tol:
        raise UnreachableTargetError(
            f"largest reachable mean interval is {top_mean:.3g}, below target {target:g}"
        )

    best = ThresholdResult(q_top, top_mean)
    if abs(top_mean - target) <= tol:
        return best
    lo, hi = 0.0, q_top
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        m = mean_at(mid)
        if m is None:
            hi = mid
            continue
        if abs(m - target) < abs(best.mean_interval - target):
            best = ThresholdResult(mid, m)
        if abs(m - target) <= tol:
            return ThresholdResult(mid, m)
        if m < target:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-12 * max(1.0, hi):
            break
    return best
