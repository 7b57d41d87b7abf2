"""Stretched-exponential model for scaled return intervals.

The density is

    f(x) = c * exp(-a * x**gamma),  x >= 0,

and f integrates to 1 exactly when c = gamma * a**(1/gamma) / Gamma(1/gamma).
With the substitution u = a * x**gamma the CDF is the regularized lower
incomplete gamma function P(1/gamma, a * x**gamma), draws are obtained from
gamma variates as X = (G / a)**(1/gamma) with G ~ Gamma(1/gamma, 1), and the
root-moments

    mu_m = a**(-1/gamma) * (Gamma((m+1)/gamma) / Gamma(1/gamma))**(1/m)

follow from the same substitution. gamma = 1 recovers the pure exponential.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np
from scipy import optimize
from scipy.special import gammainc, gammaln
from scipy.special import gamma as gamma_function

from .errors import FitFailureError
from .intervals import PdfTable

GAMMA_BOUNDS = (0.05, 2.0)
_MLE_STARTS = (0.3, 0.6, 1.0)


def normalization_c(a: float, gamma: float) -> float:
    """Normalizing constant c = gamma * a**(1/gamma) / Gamma(1/gamma).

    Parameters
    ----------
    a, gamma : float
        Scale and stretching exponent, a > 0 and 0 < gamma <= 2.

    Returns
    -------
    float
        The c making f(x) = c * exp(-a * x**gamma) integrate to 1 on
        [0, inf).
    """
    if a <= 0:
        raise ValueError("a must be positive")
    if not 0 < gamma <= GAMMA_BOUNDS[1]:
        raise ValueError(f"gamma must be in (0, {GAMMA_BOUNDS[1]}]")
    return float(gamma * a ** (1.0 / gamma) / gamma_function(1.0 / gamma))


@dataclass(frozen=True)
class SEModel:
    """Stretched-exponential parameter set (c, a, gamma).

    ``constrained=True`` means c equals the normalizing constant, so the
    model is a probability density. Least-squares fits leave c free and are
    marked ``constrained=False``; their CDF, sampler, and moments still use
    only (a, gamma), i.e. the normalized member of the family.
    """

    c: float
    a: float
    gamma: float
    constrained: bool = True

    def __post_init__(self):
        if not (np.isfinite(self.c) and np.isfinite(self.a) and np.isfinite(self.gamma)):
            raise ValueError("model parameters must be finite")
        if self.c <= 0 or self.a <= 0:
            raise ValueError("c and a must be positive")
        if not 0 < self.gamma <= GAMMA_BOUNDS[1]:
            raise ValueError(f"gamma must be in (0, {GAMMA_BOUNDS[1]}]")
        if self.constrained:
            c0 = normalization_c(self.a, self.gamma)
            if abs(self.c - c0) > 1e-9 * c0:
                raise ValueError("constrained model has c != normalization_c(a, gamma)")

    @classmethod
    def normalized(cls, a: float, gamma: float) -> "SEModel":
        """The unit-mass member of the family with the given (a, gamma)."""
        return cls(c=normalization_c(a, gamma), a=a, gamma=gamma, constrained=True)

    def pdf(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        return self.c * np.exp(-self.a * x**self.gamma)

    def cdf(self, x) -> np.ndarray:
        return se_cdf(self, x)

    def sample(self, n: int, seed=None) -> np.ndarray:
        return se_sample(self, n, seed)

    def moment(self, m: float) -> float:
        return analytic_moment(self, m)


def se_cdf(model: SEModel, x) -> np.ndarray:
    """CDF of the normalized family member, P(1/gamma, a * x**gamma).

    Only (a, gamma) enter; a free c is ignored. Negative x maps to 0.
    """
    x = np.maximum(np.asarray(x, dtype=np.float64), 0.0)
    return gammainc(1.0 / model.gamma, model.a * x**model.gamma)


def se_sample(model: SEModel, n: int, seed=None) -> np.ndarray:
    """Draw n values exactly, via X = (G / a)**(1/gamma), G ~ Gamma(1/gamma, 1).

    ``seed`` is an int, a ``numpy.random.Generator``, or anything
    ``numpy.random.default_rng`` accepts; a given seed reproduces the draw.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    g = rng.gamma(1.0 / model.gamma, 1.0, size=n)
    return (g / model.a) ** (1.0 / model.gamma)


def analytic_moment(model: SEModel, m: float) -> float:
    """Root-moment mu_m = a**(-1/gamma) * (Gamma((m+1)/gamma)/Gamma(1/gamma))**(1/m).

    Parameters
    ----------
    model : SEModel
    m : float
        Moment order, m > 0.

    Returns
    -------
    float
        (E[X**m])**(1/m) of the normalized family member.
    """
    if m <= 0:
        raise ValueError("moment order must be positive")
    g = model.gamma
    log_ratio = gammaln((m + 1.0) / g) - gammaln(1.0 / g)
    return model.a ** (-1.0 / g) * float(np.exp(log_ratio / m))


def _nll(params: np.ndarray, x: np.ndarray) -> float:
    a, g = params
    if a <= 0 or g <= 0:
        return np.inf
    n = len(x)
    ll = n * (np.log(g) + np.log(a) / g - gammaln(1.0 / g)) - a * float(np.sum(x**g))
    return -ll


def fit_mle(sample: np.ndarray) -> SEModel:
    """Maximum-likelihood fit of (a, gamma) with c constrained.

    Maximizes sum(log(c * exp(-a * x**gamma))) by bounded 2-parameter
    optimization (gamma in [0.05, 2], a > 0), multi-started from
    gamma in {0.3, 0.6, 1.0} with the profile-optimal a at each start.

    Parameters
    ----------
    sample : array_like
        Scaled intervals; at least 50 strictly positive values.

    Returns
    -------
    SEModel
        Constrained model at the best optimum found.

    Raises
    ------
    ValueError
        Fewer than 50 values, or any value <= 0.
    FitFailureError
        No start converged; carries the best iterate in ``best``.
    """
    x = np.asarray(sample, dtype=np.float64)
    if len(x) < 50:
        raise ValueError("MLE fit needs at least 50 values")
    if not np.all(np.isfinite(x)) or np.any(x <= 0):
        raise ValueError("MLE fit needs strictly positive finite values")

    best: optimize.OptimizeResult | None = None
    for g0 in _MLE_STARTS:
        a0 = len(x) / (g0 * float(np.sum(x**g0)))
        res = optimize.minimize(
            _nll,
            x0=np.array([a0, g0]),
            args=(x,),
            method="L-BFGS-B",
            bounds=[(1e-10, None), GAMMA_BOUNDS],
        )
        if best is None or res.fun < best.fun:
            best = res
    if best is None or not np.isfinite(best.fun):
        raise FitFailureError(
            "likelihood optimization failed from every start",
            best=None if best is None else tuple(best.x),
        )
    a, g = float(best.x[0]), float(best.x[1])
    return SEModel.normalized(a=a, gamma=g)


def fit_lsq(pdf: PdfTable) -> SEModel:
    """Least-squares fit of (c, a, gamma) to a log-binned density.

    Minimizes sum over non-empty bins of
    (log(density) - (log(c) - a * center**gamma))**2 with c free, so the
    result is marked ``constrained=False``. The start point comes from a
    gamma grid scan, where the model is linear in (log c, a).

    Raises
    ------
    ValueError
        Fewer than 5 non-empty bins.
    FitFailureError
        Flat density (a -> 0) or gamma stuck at the lower bound.
    """
    if pdf.n_bins < 5:
        raise ValueError("least-squares fit needs at least 5 non-empty bins")
    xc = pdf.center
    y = np.log(pdf.density)

    def residuals(p: np.ndarray) -> np.ndarray:
        log_c, a, g = p
        return y - (log_c - a * xc**g)

    best0: tuple[float, np.ndarray] | None = None
    ones = np.ones_like(xc)
    for g in np.linspace(GAMMA_BOUNDS[0], GAMMA_BOUNDS[1], 40):
        design = np.column_stack([ones, -(xc**g)])
        coef, *_ = np.linalg.lstsq(design, y, rcond=None)
        if coef[1] < 0:
            continue
        sse = float(np.sum((y - design @ coef) ** 2))
        if best0 is None or sse < best0[0]:
            best0 = (sse, np.array([coef[0], coef[1], g]))
    if best0 is None:
        raise FitFailureError("no decaying start point found; density may be increasing")

    res = optimize.least_squares(
        residuals,
        x0=best0[1],
        bounds=([-np.inf, 0.0, GAMMA_BOUNDS[0]], [np.inf, np.inf, GAMMA_BOUNDS[1]]),
    )
    log_c, a, g = res.x
    decay = a * (float(xc[-1]) ** g - float(xc[0]) ** g)
    if a <= 1e-12 or decay <= 1e-6:
        raise FitFailureError("flat density: a collapsed to 0", best=tuple(res.x))
    if g <= GAMMA_BOUNDS[0] + 1e-9:
        raise FitFailureError("gamma stuck at the lower bound", best=tuple(res.x))
    return SEModel(c=float(np.exp(log_c)), a=float(a), gamma=float(g), constrained=False)


@dataclass(frozen=True)
class FitReport:
    """Fit summary: parameters plus goodness of fit.

    ``p`` is the bootstrap p-value (None when no bootstrap was run),
    ``ks`` the one-sample KS distance of the data to the model, and
    ``n_failed_refits`` counts bootstrap replicates dropped because their
    refit failed (only possible with refit=True).
    """

    model: SEModel
    mode: str
    n: int
    ks: float
    p: float | None = None
    n_boot: int = 0
    seed: int | None = None
    q: float | None = None
    n_failed_refits: int = 0

    def to_dict(self) -> dict[str, Any]:
        return {
            "q": self.q,
            "mode": self.mode,
            "c": self.model.c,
            "a": self.model.a,
            "gamma": self.model.gamma,
            "constrained": self.model.constrained,
            "n": self.n,
            "ks": self.ks,
            "p": self.p,
            "n_boot": self.n_boot,
            "seed": self.seed,
            "n_failed_refits": self.n_failed_refits,
        }
