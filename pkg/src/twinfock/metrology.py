"""Phase-uncertainty analysis by error propagation.

``delta_phi = sqrt(P (1 - P)) / |dP/dphi|`` for a two-outcome projective
measurement, with the 0/0 points at the fringe extrema replaced by their
limit ``1 / (2 sqrt(c))``, ``c = |P''| / 2``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DomainError
from .experiment import p2_derivatives, p4_derivatives
from .projection import projection_amplitude

# |P'| below this fraction of sqrt(P(1-P)) counts as a true divergence
_DIVERGENCE_RATIO = 1e-11
# P within this distance of 0 or 1 is treated as a fringe extremum
_EXTREMUM_TOL = 1e-10

INF = math.inf


class DetectionModel:
    """Probability of the detection event as a function of phase.

    Subclasses supply ``derivatives(phi) -> (P, P', P'')`` vectorized over
    ``phi`` and ``n_total``, the photon number the SQL/HL references use.
    """

    kind: str = ""
    n_total: int = 1

    def derivatives(self, phi):
        raise NotImplementedError

    def probability(self, phi):
        p = self.derivatives(phi)[0]
        return float(p) if np.ndim(p) == 0 else p

    def derivative(self, phi):
        dp = self.derivatives(phi)[1]
        return float(dp) if np.ndim(dp) == 0 else dp


@dataclass(frozen=True)
class TwinFockModel(DetectionModel):
    """Projection measurement on the 2N-photon twin-Fock state."""

    n: int
    kind = "twin-fock"

    def __post_init__(self):
        if isinstance(self.n, bool) or not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise DomainError(f"N must be a positive integer, got {self.n!r}")

    @property
    def n_total(self):
        return 2 * self.n

    def derivatives(self, phi):
        a, da, d2a = projection_amplitude(self.n, phi)
        return np.clip(a * a, 0.0, 1.0), 2 * a * da, 2 * (da * da + a * d2a)


@dataclass(frozen=True)
class MESModel(DetectionModel):
    """Maximally entangled N-photon state, ``P = (1 + cos N phi) / 2``."""

    n: int
    kind = "mes"

    def __post_init__(self):
        if isinstance(self.n, bool) or not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise DomainError(f"N must be a positive integer, got {self.n!r}")

    @property
    def n_total(self):
        return self.n

    def derivatives(self, phi):
        x = self.n * np.asarray(phi, dtype=np.float64)
        return (1 + np.cos(x)) / 2, -self.n * np.sin(x) / 2, -self.n**2 * np.cos(x) / 2


@dataclass(frozen=True)
class TwoPhotonModel(DetectionModel):
    visibility: float
    kind = "p2"
    n_total = 2

    def __post_init__(self):
        if not 0.0 <= self.visibility <= 1.0:
            raise DomainError(f"visibility must lie in [0, 1], got {self.visibility}")

    def derivatives(self, phi):
        return p2_derivatives(self.visibility, phi)


@dataclass(frozen=True)
class FourPhotonModel(DetectionModel):
    """Four photons from two down-converted pairs with overlap ratio E/A."""

    ratio: float
    kind = "p4"
    n_total = 4

    def __post_init__(self):
        if not 0.0 <= self.ratio <= 1.0:
            raise DomainError(f"E/A must lie in [0, 1], got {self.ratio}")

    def derivatives(self, phi):
        return p4_derivatives(self.ratio, phi)


@dataclass(frozen=True)
class MetrologyPoint:
    phi: float
    p: float
    dp_dphi: float
    delta_phi: float


@dataclass(frozen=True)
class LimitPair:
    n_total: int
    sql: float
    hl: float


def _uncertainty(p, dp, d2p, scale=1.0):
    p = np.asarray(p, dtype=np.float64)
    dp = np.asarray(dp, dtype=np.float64)
    d2p = np.asarray(d2p, dtype=np.float64)
    # detected signal scale*P has variance scale**2 * P(1-P)
    sigma = np.sqrt(np.clip(scale * scale * p * (1.0 - p), 0.0, None))
    slope = np.abs(scale * dp)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = sigma / slope
        c = 0.5 * np.abs(d2p)
        limit = np.where(c > 0, 1.0 / (2.0 * np.sqrt(c)), INF)
    extremum = np.minimum(p, 1.0 - p) <= _EXTREMUM_TOL
    divergent = ~extremum & (slope <= _DIVERGENCE_RATIO * sigma)
    out = np.where(extremum, limit, np.where(divergent, INF, out))
    return out


def phase_uncertainty(model: DetectionModel, phi: float, success_scale: float = 1.0) -> MetrologyPoint:
    """Error-propagation phase uncertainty of ``model`` at ``phi``.

    ``success_scale`` is the loss factor multiplying the detected rate; it
    cancels exactly. Divergences are reported as ``INF``.
    """
    if not math.isfinite(phi):
        raise DomainError(f"phase must be finite, got {phi!r}")
    if not 0.0 < success_scale <= 1.0:
        raise DomainError(f"success_scale must lie in (0, 1], got {success_scale}")
    p, dp, d2p = model.derivatives(phi)
    return MetrologyPoint(
        phi=float(phi),
        p=float(p),
        dp_dphi=float(dp),
        delta_phi=float(_uncertainty(p, dp, d2p, success_scale)),
    )


def uncertainty_curve(model: DetectionModel, phis, success_scale: float = 1.0):
    """Vectorized ``phase_uncertainty``; returns arrays ``(p, dp_dphi, delta_phi)``."""
    phis = np.asarray(phis, dtype=np.float64)
    if not np.all(np.isfinite(phis)):
        raise DomainError("phases must be finite")
    p, dp, d2p = model.derivatives(phis)
    return np.asarray(p), np.asarray(dp), _uncertainty(p, dp, d2p, success_scale)


def twin_fock_uncertainty_at_zero(n: int) -> float:
    """Exact ``phi -> 0`` limit for the twin-Fock scheme, ``1/sqrt(2N(N+1))``.

    The curvature of the fringe at zero equals the up-mode photon-number
    variance ``(N**2 + N)/2``.
    """
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 1:
        raise DomainError(f"N must be a positive integer, got {n!r}")
    return 1.0 / math.sqrt(2.0 * n * (n + 1.0))


def limits(n_total: int) -> LimitPair:
    """Standard quantum limit and Heisenberg limit for ``n_total`` photons."""
    if isinstance(n_total, bool) or not isinstance(n_total, (int, np.integer)) or n_total < 1:
        raise DomainError(f"photon number must be a positive integer, got {n_total!r}")
    return LimitPair(n_total=int(n_total), sql=1.0 / math.sqrt(n_total), hl=1.0 / n_total)


@dataclass(frozen=True)
class ScanRow:
    n: int
    n_total: int
    delta_phi: float
    sql: float
    hl: float


def scan_photon_number(n_max: int) -> list[ScanRow]:
    """Uncertainty at zero phase against photon number, with the reference limits."""
    if isinstance(n_max, bool) or not isinstance(n_max, (int, np.integer)) or n_max < 1:
        raise DomainError(f"n_max must be a positive integer, got {n_max!r}")
    rows = []
    for n in range(1, int(n_max) + 1):
        lim = limits(2 * n)
        rows.append(ScanRow(n, 2 * n, twin_fock_uncertainty_at_zero(n), lim.sql, lim.hl))
    return rows


def beating_region(
    model: DetectionModel,
    n_total: Optional[int] = None,
    tol: float = 1e-6,
    grid_points: int = 4001,
) -> Optional[float]:
    """Half-width of the phase window around zero in which the model beats the SQL.

    Returns the smallest ``phi > 0`` where ``delta_phi`` reaches ``1/sqrt(n_total)``,
    or ``None`` when ``delta_phi`` stays below it on ``[0, pi/2]`` or already
    exceeds it at zero. The first crossing is bracketed on a grid and then
    bisected to ``tol``.
    """
    n_total = model.n_total if n_total is None else n_total
    sql = limits(n_total).sql

    def above(phi):
        return phase_uncertainty(model, phi).delta_phi >= sql

    if above(0.0):
        return None
    grid = np.linspace(0.0, math.pi / 2, grid_points)
    _, _, dphi = uncertainty_curve(model, grid)
    hits = np.flatnonzero(dphi >= sql)
    if hits.size == 0:
        return None
    hi = float(grid[hits[0]])
    lo = float(grid[hits[0] - 1])
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if above(mid):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)
