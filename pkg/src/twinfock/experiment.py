"""Experimental fringe models, synthetic coincidence counts, and least-squares fits."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import least_squares

from .errors import DomainError, FitError


def _check_unit(name, value):
    if not (math.isfinite(value) and 0.0 <= value <= 1.0):
        raise DomainError(f"{name} must lie in [0, 1], got {value!r}")


def p2_derivatives(v, phi):
    """Two-photon fringe ``(1 + V cos 2phi)/(1 + V)`` and its first two derivatives.

    No range check on ``v``; the fitter evaluates it outside [0, 1].
    """
    phi = np.asarray(phi, dtype=np.float64)
    s = 1.0 + v
    return (
        (1.0 + v * np.cos(2 * phi)) / s,
        -2.0 * v * np.sin(2 * phi) / s,
        -4.0 * v * np.cos(2 * phi) / s,
    )


def p4_derivatives(r, phi):
    """Four-photon fringe for pair-overlap ratio ``r`` = E/A, with two derivatives."""
    phi = np.asarray(phi, dtype=np.float64)
    a = (1.0 + 2.0 * r) / (16.0 + 16.0 * r)
    c4, c2 = np.cos(4 * phi), np.cos(2 * phi)
    s4, s2 = np.sin(4 * phi), np.sin(2 * phi)
    return (
        a * (3 * c4 + 4 * c2) + (9.0 + 2.0 * r) / (16.0 + 16.0 * r),
        a * (-12 * s4 - 8 * s2),
        a * (-48 * c4 - 16 * c2),
    )


def _scalar(x):
    return float(x) if np.ndim(x) == 0 else x


def p2_model(v: float, phi):
    _check_unit("V", v)
    return _scalar(p2_derivatives(v, phi)[0])


def p2_derivative(v: float, phi):
    _check_unit("V", v)
    return _scalar(p2_derivatives(v, phi)[1])


def p4_model(r: float, phi):
    _check_unit("E/A", r)
    return _scalar(p4_derivatives(r, phi)[0])


def p4_derivative(r: float, phi):
    _check_unit("E/A", r)
    return _scalar(p4_derivatives(r, phi)[1])


@dataclass(frozen=True)
class CountRecord:
    phi: float
    counts: int
    exposure: float = 1.0

    def __post_init__(self):
        if self.counts < 0:
            raise DomainError(f"counts must be non-negative, got {self.counts}")
        if not self.exposure > 0:
            raise DomainError(f"exposure must be positive, got {self.exposure}")

    @property
    def rate(self) -> float:
        return self.counts / self.exposure


@dataclass(frozen=True)
class FitResult:
    parameter_name: str
    estimate: float
    std_error: float
    reduced_chi_square: float
    n_points: int
    out_of_range: bool = False


def synthesize_counts(
    model,
    peak_rate: float,
    phi_grid: Sequence[float],
    exposure: float,
    seed,
) -> list[CountRecord]:
    """Poisson coincidence counts with mean ``peak_rate * exposure * P(phi)``.

    ``seed`` is an int or a ``numpy.random.Generator``; a generator is
    advanced in place, an int always gives the same sequence.
    """
    phis = np.asarray(phi_grid, dtype=np.float64).ravel()
    if phis.size == 0:
        raise DomainError("phase grid is empty")
    if not peak_rate > 0:
        raise DomainError(f"peak_rate must be positive, got {peak_rate}")
    if not exposure > 0:
        raise DomainError(f"exposure must be positive, got {exposure}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    mean = peak_rate * exposure * np.clip(model.probability(phis), 0.0, 1.0)
    counts = rng.poisson(mean)
    return [CountRecord(float(f), int(c), float(exposure)) for f, c in zip(phis, counts)]


_SHAPES = {
    "p2": ("V", p2_derivatives),
    "p4": ("E_over_A", p4_derivatives),
}


def fit_model(
    records: Sequence[CountRecord],
    kind: str,
    weighting: str = "model",
    max_reweights: int = 20,
) -> tuple[FitResult, FitResult]:
    """Weighted least-squares fit of rate and shape parameter to count data.

    Minimizes ``sum (c_i - rate * t_i * P(phi_i; theta))**2 * w_i``. The
    first pass uses ``w_i = 1/max(c_i, 1)``. With ``weighting="model"`` the
    weights are then replaced by ``1/max(mu_i, 1)``, ``mu_i`` the fitted mean,
    and the fit repeated until the parameters settle; this removes the bias
    count-based weights pick up near fringe minima. ``weighting="counts"``
    stops after the first pass.

    Standard errors come from the Gauss-Newton curvature at the optimum.
    Returns ``(shape_fit, rate_fit)``.
    """
    if kind not in _SHAPES:
        raise DomainError(f"unknown model kind {kind!r}; expected one of {sorted(_SHAPES)}")
    if weighting not in ("model", "counts"):
        raise DomainError(f"weighting must be 'model' or 'counts', got {weighting!r}")
    name, shape = _SHAPES[kind]
    if len(records) < 5:
        raise FitError(f"need at least 5 records, got {len(records)}")
    phi = np.array([r.phi for r in records], dtype=np.float64)
    counts = np.array([r.counts for r in records], dtype=np.float64)
    exposure = np.array([r.exposure for r in records], dtype=np.float64)
    if np.ptp(phi) == 0:
        raise FitError("all records share one phase setting")
    if not np.any(counts > 0):
        raise FitError("all counts are zero")

    def mean(x):
        return x[0] * exposure * shape(x[1], phi)[0]

    def jacobian(x, weight):
        rate, theta = x
        h = 1e-7
        p = shape(theta, phi)[0]
        dp = (shape(theta + h, phi)[0] - shape(theta - h, phi)[0]) / (2 * h)
        return -np.column_stack([exposure * p, rate * exposure * dp]) * weight[:, None]

    def solve(weight, starts):
        best = None
        for x0 in starts:
            sol = least_squares(
                lambda x: (counts - mean(x)) * weight,
                x0,
                jac=lambda x: jacobian(x, weight),
                method="lm",
                xtol=1e-15,
                ftol=1e-15,
                gtol=1e-15,
            )
            if best is None or sol.cost < best.cost:
                best = sol
        return best

    weight = 1.0 / np.sqrt(np.maximum(counts, 1.0))
    rate0 = float(np.max(counts / exposure))
    sol = solve(weight, [(rate0, t) for t in (0.2, 0.6, 0.95)])
    if weighting == "model":
        for _ in range(max_reweights):
            weight = 1.0 / np.sqrt(np.maximum(mean(sol.x), 1.0))
            prev = sol.x
            sol = solve(weight, [prev])
            if np.allclose(sol.x, prev, rtol=1e-10, atol=1e-12):
                break

    rate, theta = sol.x
    jac = jacobian(sol.x, weight)
    try:
        cov = np.linalg.inv(jac.T @ jac)
    except np.linalg.LinAlgError as exc:
        raise FitError("fit curvature is singular") from exc
    n = len(records)
    chi2 = float(2.0 * sol.cost / max(n - 2, 1))
    se = np.sqrt(np.clip(np.diag(cov), 0.0, None))
    return (
        FitResult(name, float(theta), float(se[1]), chi2, n, not 0.0 <= theta <= 1.0),
        FitResult("rate", float(rate), float(se[0]), chi2, n, bool(rate < 0)),
    )


def visibility(records: Sequence[CountRecord]) -> float:
    """Fringe contrast ``(C_max - C_min)/(C_max + C_min)`` from exposure-normalized rates."""
    if len(records) < 2:
        raise DomainError("need at least two records")
    rates = np.array([r.rate for r in records], dtype=np.float64)
    hi, lo = float(rates.max()), float(rates.min())
    if hi == lo:
        return 0.0
    return (hi - lo) / (hi + lo)
