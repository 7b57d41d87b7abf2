"""Kolmogorov-Smirnov machinery: the two-sample scaling test across
thresholds, the one-sample distance to a fitted model, and a parametric
bootstrap p-value.

The two-sample statistic is the sup of |F_i - F_j| over pooled sample
points restricted to the overlap of the two supports, with both CDFs
evaluated as full right-continuous step functions. Acceptance at the 95%
level uses CV = 1.36 / sqrt(m * n / (m + n)); by default m and n count the
points inside the overlap.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import FitFailureError, NoOverlapError
from .intervals import CdfTable, IntervalSample, empirical_cdf
from .semodel import FitReport, SEModel, fit_mle, se_cdf, se_sample

_BATCH_CELLS = 8_000_000


def critical_value(m: int, n: int) -> float:
    """95% two-sample KS critical value, 1.36 / sqrt(m * n / (m + n))."""
    if m < 1 or n < 1:
        raise ValueError("both sample counts must be >= 1")
    return float(1.36 / np.sqrt(m * n / (m + n)))


@dataclass(frozen=True)
class KsResult:
    """Two-sample KS outcome over the support overlap."""

    statistic: float
    critical: float
    m: int
    n: int
    overlap: tuple[float, float]

    @property
    def accept(self) -> bool:
        return self.statistic < self.critical

    @property
    def decision(self) -> str:
        return "accept" if self.accept else "reject"


def two_sample_ks(fi: CdfTable, fj: CdfTable, overlap_counts: bool = True) -> KsResult:
    """KS distance between two empirical CDFs on their support overlap.

    The sup runs over the pooled sample points inside
    [max(min_i, min_j), min(max_i, max_j)]; the CDFs themselves are the
    full-sample step functions. With ``overlap_counts`` (default) the
    effective sizes m, n for the critical value count only points inside
    the overlap; otherwise the whole-sample sizes are used. The statistic
    is symmetric in the two samples and depends on ranks only.

    Raises
    ------
    NoOverlapError
        The supports are disjoint, or (with ``overlap_counts``) one sample
        has no points inside the overlap.
    """
    lo = max(float(fi.x[0]), float(fj.x[0]))
    hi = min(float(fi.x[-1]), float(fj.x[-1]))
    if lo > hi:
        raise NoOverlapError(f"supports [{fi.x[0]:g}, {fi.x[-1]:g}] and [{fj.x[0]:g}, {fj.x[-1]:g}] do not overlap")
    pooled = np.union1d(fi.x, fj.x)
    pooled = pooled[(pooled >= lo) & (pooled <= hi)]
    stat = float(np.max(np.abs(fi.eval(pooled) - fj.eval(pooled))))
    if overlap_counts:
        m = int(fi.count[(fi.x >= lo) & (fi.x <= hi)].sum())
        n = int(fj.count[(fj.x >= lo) & (fj.x <= hi)].sum())
        if m < 1 or n < 1:
            raise NoOverlapError(f"support overlap [{lo:g}, {hi:g}] contains no points of one sample")
    else:
        m, n = fi.n, fj.n
    return KsResult(statistic=stat, critical=critical_value(m, n), m=m, n=n, overlap=(lo, hi))


@dataclass(frozen=True)
class KsPair:
    q_i: float
    q_j: float
    result: KsResult


@dataclass(frozen=True)
class KsMatrix:
    """All threshold pairs, ordered by (q_i, q_j) with q_i < q_j."""

    pairs: tuple[KsPair, ...]

    @property
    def verdict(self) -> str:
        """"scaling" when every pair accepts, else "multiscaling"."""
        return "scaling" if all(p.result.accept for p in self.pairs) else "multiscaling"

    def to_rows(self) -> list[dict]:
        return [
            {
                "q_i": p.q_i,
                "q_j": p.q_j,
                "ks": p.result.statistic,
                "cv": p.result.critical,
                "m": p.result.m,
                "n": p.result.n,
                "decision": p.result.decision,
            }
            for p in self.pairs
        ]


def ks_matrix(samples: Sequence[IntervalSample], overlap_counts: bool = True) -> KsMatrix:
    """Pairwise scaled-interval KS tests across thresholds."""
    if len(samples) < 2:
        raise ValueError("need interval samples for at least two thresholds")
    ordered = sorted(samples, key=lambda s: s.q)
    qs = [s.q for s in ordered]
    if len(set(qs)) != len(qs):
        raise ValueError("thresholds must be distinct")
    tables = [empirical_cdf(s) for s in ordered]
    pairs = []
    for i in range(len(ordered)):
        for j in range(i + 1, len(ordered)):
            try:
                res = two_sample_ks(tables[i], tables[j], overlap_counts=overlap_counts)
            except NoOverlapError as e:
                raise NoOverlapError(f"pair (q={qs[i]:g}, q={qs[j]:g}): {e}") from e
            pairs.append(KsPair(q_i=qs[i], q_j=qs[j], result=res))
    return KsMatrix(pairs=tuple(pairs))


def _scaled(sample) -> np.ndarray:
    if isinstance(sample, IntervalSample):
        return sample.scaled()
    return np.asarray(sample, dtype=np.float64)


def one_sample_ks(sample, model: SEModel) -> float:
    """sup_x |F_n(x) - F(x)| against the model CDF, checked at both step sides."""
    x = np.sort(_scaled(sample))
    n = len(x)
    if n == 0:
        raise ValueError("empty sample")
    f = se_cdf(model, x)
    i = np.arange(1, n + 1)
    return float(np.max(np.maximum(np.abs(i / n - f), np.abs((i - 1) / n - f))))


def _batch_ks(draws: np.ndarray, model: SEModel) -> np.ndarray:
    """Row-wise one-sample KS of many same-size samples against one model."""
    draws = np.sort(draws, axis=1)
    f = se_cdf(model, draws)
    n = draws.shape[1]
    i = np.arange(1, n + 1)
    hi = np.max(np.abs(i / n - f), axis=1)
    lo = np.max(np.abs((i - 1) / n - f), axis=1)
    return np.maximum(hi, lo)


def bootstrap_pvalue(
    sample,
    model: SEModel,
    n_boot: int = 1000,
    seed=None,
    refit: bool = False,
    mode: str = "mle",
) -> FitReport:
    """Parametric-bootstrap goodness of fit.

    Draws ``n_boot`` synthetic samples of the observed size from the model,
    computes each replicate's one-sample KS distance, and reports
    p = #(KS_sim > KS_obs) / #completed. With ``refit=False`` (default) each
    replicate is compared against the given model; with ``refit=True`` every
    replicate is refitted first and compared against its own fit, and
    replicates whose refit fails are dropped and counted.

    Replicate RNGs are spawned from ``numpy.random.SeedSequence(seed)``, so
    a fixed seed reproduces the p-value and replicates are independent of
    evaluation order.
    """
    if n_boot < 1:
        raise ValueError("n_boot must be >= 1")
    x = _scaled(sample)
    n = len(x)
    ks_obs = one_sample_ks(x, model)
    children = np.random.SeedSequence(seed).spawn(n_boot)

    n_failed = 0
    if refit:
        sims = np.empty(n_boot)
        ok = np.zeros(n_boot, dtype=bool)
        for k, child in enumerate(children):
            draw = se_sample(model, n, np.random.default_rng(child))
            try:
                refitted = fit_mle(draw)
            except (FitFailureError, ValueError):
                n_failed += 1
                continue
            sims[k] = one_sample_ks(draw, refitted)
            ok[k] = True
        ks_sim = sims[ok]
    else:
        rows_per_batch = max(1, _BATCH_CELLS // max(n, 1))
        parts = []
        for start in range(0, n_boot, rows_per_batch):
            stop = min(start + rows_per_batch, n_boot)
            block = np.empty((stop - start, n))
            for k in range(start, stop):
                block[k - start] = se_sample(model, n, np.random.default_rng(children[k]))
            parts.append(_batch_ks(block, model))
        ks_sim = np.concatenate(parts)

    completed = n_boot - n_failed
    if completed == 0:
        raise FitFailureError("every bootstrap replicate failed to refit")
    p = float(np.count_nonzero(ks_sim > ks_obs) / completed)
    return FitReport(
        model=model,
        mode=mode,
        n=n,
        ks=ks_obs,
        p=p,
        n_boot=n_boot,
        seed=seed if isinstance(seed, int) else None,
        q=sample.q if isinstance(sample, IntervalSample) else None,
        n_failed_refits=n_failed,
    )
