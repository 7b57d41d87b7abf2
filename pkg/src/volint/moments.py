"""Moment diagnostics for interval scaling.

The root-moment of a scaled interval sample is

    mu_m = (<(tau / <tau>)**m>)**(1/m),

so mu_1 is 1 by construction. Under pure scaling mu_m is flat in <tau>; the
exponent alpha(m) is the log-log slope of mu_m against <tau> across a
threshold sweep, fitted inside a medium region of <tau> (default 10 to 100)
where neither discreteness nor tail noise dominates. The extended
self-similarity (ESS) variant regresses log<tau**m> on log<tau**n> and is
linked to alpha by (alpha + 1) / n = xi(m, n) / m.

All power means are accumulated in the log domain when direct evaluation
would overflow.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import logsumexp

from .errors import InsufficientEventsError, InsufficientPointsError, MomentOverflowError
from .intervals import IntervalSample, extract_intervals, threshold_for_mean
from .semodel import SEModel, analytic_moment, fit_mle

_LOG_MAX = 700.0


def _tau_values(sample) -> np.ndarray:
    if isinstance(sample, IntervalSample):
        return sample.tau.astype(np.float64)
    tau = np.asarray(sample, dtype=np.float64)
    if len(tau) == 0:
        raise ValueError("empty interval sample")
    if not np.all(np.isfinite(tau)) or np.any(tau <= 0):
        raise ValueError("intervals must be finite and positive")
    return tau


def _log_mean_pow(tau: np.ndarray, m: float) -> float:
    """log(<tau**m>), accumulated in the log domain."""
    return float(logsumexp(m * np.log(tau)) - np.log(len(tau)))


def _root_mean_pow(tau: np.ndarray, m: float) -> float:
    """<tau**m>**(1/m), falling back to log-domain accumulation on overflow."""
    with np.errstate(over="ignore"):
        s = float(np.mean(tau**m))
    if np.isfinite(s) and s > 0.0:
        return float(s ** (1.0 / m))
    log_root = _log_mean_pow(tau, m) / m
    if log_root > _LOG_MAX:
        raise MomentOverflowError(m, m * _LOG_MAX / log_root)
    return float(np.exp(log_root))


def empirical_moment(sample, m: float) -> float:
    """Root-moment mu_m of the scaled intervals.

    ``sample`` is an ``IntervalSample`` or a raw array of intervals; values
    are scaled by their own mean either way, so mu_1 is 1.
    """
    if m <= 0:
        raise ValueError("moment order must be positive")
    tau = _tau_values(sample)
    return _root_mean_pow(tau / tau.mean(), m)


def ess_mu(sample, m: float, n: float) -> float:
    """Moment ratio mu_(m,n) = <tau**m>**(1/m) / <tau**n>**(1/n) on raw intervals.

    For n = 1 this equals ``empirical_moment(sample, m)`` up to rounding.
    """
    if m <= 0 or n <= 0:
        raise ValueError("moment orders must be positive")
    tau = _tau_values(sample)
    return _root_mean_pow(tau, m) / _root_mean_pow(tau, n)


def _ols_slope(lx: np.ndarray, ly: np.ndarray) -> tuple[float, float]:
    """Least-squares slope of ly on lx with its standard error."""
    dx = lx - lx.mean()
    dy = ly - ly.mean()
    sxx = float(np.dot(dx, dx))
    if sxx == 0.0:
        raise InsufficientPointsError("regression abscissa is constant")
    slope = float(np.dot(dx, dy)) / sxx
    dof = len(lx) - 2
    if dof > 0:
        resid = dy - slope * dx
        stderr = float(np.sqrt(np.dot(resid, resid) / dof / sxx))
    else:
        stderr = float("nan")
    return slope, stderr


@dataclass(frozen=True, eq=False)
class MomentCurve:
    """mu_m against <tau> along a threshold sweep, <tau> strictly increasing."""

    m: float
    q: np.ndarray
    mean_tau: np.ndarray
    mu: np.ndarray
    n_intervals: np.ndarray
    dropped: tuple[tuple[float, str], ...]

    @property
    def n_points(self) -> int:
        return len(self.q)


def moment_curve(v, m: float, q_grid: Sequence[float], cross_day: bool = True) -> MomentCurve:
    """Sweep thresholds and record (q, <tau>, mu_m).

    Grid points with fewer than two exceedances are dropped and noted, as
    are points whose <tau> does not strictly exceed the previous kept one
    (ties happen when neighboring thresholds select identical exceedance
    sets). Raises ``InsufficientPointsError`` if nothing survives.
    """
    if m <= 0:
        raise ValueError("moment order must be positive")
    qs, means, mus, counts = [], [], [], []
    dropped: list[tuple[float, str]] = []
    for q in sorted(float(q) for q in q_grid):
        try:
            s = extract_intervals(v, q, cross_day=cross_day)
        except InsufficientEventsError as e:
            dropped.append((q, str(e)))
            continue
        mean = s.mean_interval
        if means and mean <= means[-1]:
            dropped.append((q, "mean interval did not increase"))
            continue
        qs.append(q)
        means.append(mean)
        mus.append(empirical_moment(s, m))
        counts.append(len(s))
    if not qs:
        raise InsufficientPointsError("no grid threshold produced two exceedances")
    return MomentCurve(
        m=m,
        q=np.array(qs),
        mean_tau=np.array(means),
        mu=np.array(mus),
        n_intervals=np.array(counts),
        dropped=tuple(dropped),
    )


@dataclass(frozen=True)
class AlphaFit:
    """Log-log slope of mu_m against <tau> inside the fit region."""

    alpha: float
    stderr: float
    n_points: int
    region: tuple[float, float]


def fit_alpha(curve: MomentCurve, region: tuple[float, float] = (10.0, 100.0)) -> AlphaFit:
    """Fit alpha(m) as the slope of log mu_m versus log <tau> in the region.

    Only points with region[0] < <tau> < region[1] enter; fewer than three
    such points raises ``InsufficientPointsError``.
    """
    lo, hi = region
    mask = (curve.mean_tau > lo) & (curve.mean_tau < hi)
    if int(mask.sum()) < 3:
        raise InsufficientPointsError(
            f"{int(mask.sum())} curve points inside ({lo:g}, {hi:g}); need at least 3"
        )
    slope, stderr = _ols_slope(np.log(curve.mean_tau[mask]), np.log(curve.mu[mask]))
    return AlphaFit(alpha=slope, stderr=stderr, n_points=int(mask.sum()), region=(lo, hi))


@dataclass(frozen=True)
class EssReport:
    """ESS regression xi(m, n) with the alpha implied through n = 1."""

    m: float
    n: float
    xi: float
    stderr: float
    alpha: float
    identity_gap: float
    n_points: int
    region: tuple[float, float]


def ess_xi(
    v,
    m: float,
    n: float,
    q_grid: Sequence[float],
    region: tuple[float, float] = (10.0, 100.0),
    cross_day: bool = True,
) -> EssReport:
    """Regress log<tau**m> on log<tau**n> across thresholds in the region.

    Also reports alpha = xi(m, 1) / m - 1 and the identity check
    (alpha + 1) / n - xi(m, n) / m, which is 0 by construction when n = 1.
    """
    if m <= 0 or n <= 0:
        raise ValueError("moment orders must be positive")
    lo, hi = region
    means: list[float] = []
    log_m, log_n, log_1 = [], [], []
    for q in sorted(float(q) for q in q_grid):
        try:
            s = extract_intervals(v, q, cross_day=cross_day)
        except InsufficientEventsError:
            continue
        mean = s.mean_interval
        if not (lo < mean < hi) or (means and mean <= means[-1]):
            continue
        tau = s.tau.astype(np.float64)
        means.append(mean)
        log_m.append(_log_mean_pow(tau, m))
        log_n.append(_log_mean_pow(tau, n))
        log_1.append(_log_mean_pow(tau, 1.0))
    if len(means) < 3:
        raise InsufficientPointsError(
            f"{len(means)} usable thresholds inside ({lo:g}, {hi:g}); need at least 3"
        )
    xi, stderr = _ols_slope(np.array(log_n), np.array(log_m))
    if n == 1.0:
        xi_m1 = xi
    else:
        xi_m1, _ = _ols_slope(np.array(log_1), np.array(log_m))
    alpha = xi_m1 / m - 1.0
    return EssReport(
        m=m,
        n=n,
        xi=xi,
        stderr=stderr,
        alpha=alpha,
        identity_gap=(alpha + 1.0) / n - xi / m,
        n_points=len(means),
        region=(lo, hi),
    )


@dataclass(frozen=True, eq=False)
class OrderCurve:
    """mu_m against order m at one target mean interval, with model values."""

    target_mean: float
    q: float
    achieved_mean: float
    m: np.ndarray
    mu: np.ndarray
    mu_model: np.ndarray
    model: SEModel


def moment_vs_order(
    v,
    mean_targets: Sequence[float] = (10.0, 30.0, 100.0),
    m_grid: Sequence[float] | None = None,
    tol: float = 0.5,
    cross_day: bool = True,
) -> list[OrderCurve]:
    """Empirical and fitted-model root-moments across orders m.

    For each target <tau>, finds the matching threshold, extracts intervals,
    evaluates mu_m over ``m_grid`` (default 0.25 to 3 in steps of 0.25), and
    fits the model by maximum likelihood for the analytic curve. Every curve
    passes through (1, 1) up to rounding. ``UnreachableTargetError``
    propagates from the threshold search, ``ValueError`` from a fit on fewer
    than 50 intervals.
    """
    grid = np.arange(0.25, 3.0 + 1e-9, 0.25) if m_grid is None else np.asarray(m_grid, float)
    if np.any(grid <= 0):
        raise ValueError("moment orders must be positive")
    out = []
    for target in mean_targets:
        q, achieved = threshold_for_mean(v, target, tol=tol, cross_day=cross_day)
        s = extract_intervals(v, q, cross_day=cross_day)
        model = fit_mle(s.scaled())
        mu = np.array([empirical_moment(s, mm) for mm in grid])
        mu_model = np.array([analytic_moment(model, mm) for mm in grid])
        out.append(
            OrderCurve(
                target_mean=float(target),
                q=q,
                achieved_mean=achieved,
                m=grid.copy(),
                mu=mu,
                mu_model=mu_model,
                model=model,
            )
        )
    return out
