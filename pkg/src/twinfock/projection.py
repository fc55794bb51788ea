"""Projection of the phase-shifted twin-Fock state onto the unshifted one.

The probability is available in closed form and, independently, by
simulating the second beam splitter followed by an (N, N) coincidence.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import DomainError
from .fock import (
    ModeLabel,
    apply_50_50_bs,
    apply_phase_shift,
    central_binomial_weights,
    twin_fock_after_bs,
)

MAX_CONSTRUCTIVE_PHOTONS = 2000


@dataclass(frozen=True)
class ProjectionOutcome:
    """Projection probability together with the loss-induced success scale.

    The detected rate is ``success_scale * probability``; the two are kept
    apart so that the normalized fringe never depends on losses.
    """

    probability: float
    success_scale: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.probability <= 1.0:
            raise DomainError(f"probability must lie in [0, 1], got {self.probability}")
        if not 0.0 < self.success_scale <= 1.0:
            raise DomainError(f"success_scale must lie in (0, 1], got {self.success_scale}")

    @property
    def scaled_probability(self) -> float:
        return self.probability * self.success_scale


def _check_photons(n, limit=None):
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 1:
        raise DomainError(f"photon number must be a positive integer, got {n!r}")
    if limit is not None and n > limit:
        raise DomainError(f"photon number {n} exceeds the limit {limit}")


def projection_amplitude(n: int, phi):
    """Real overlap ``sum_k w_k cos((2k - n) phi)``; its square is the probability.

    Vectorized over ``phi``. Returns the amplitude and its first two
    derivatives in ``phi``.
    """
    _check_photons(n)
    w = central_binomial_weights(int(n))
    m = 2.0 * np.arange(n + 1) - n
    phi = np.asarray(phi, dtype=np.float64)
    arg = np.multiply.outer(phi, m)
    cos, sin = np.cos(arg), np.sin(arg)
    a = cos @ w
    da = -(sin @ (w * m))
    d2a = -(cos @ (w * m * m))
    return a, da, d2a


def projection_closed_form(n: int, phi):
    """``P(phi) = (sum_k w_k cos[(2k - n) phi])**2`` with ``w_k = C(2k,k)C(2n-2k,n-k)/4**n``."""
    phi_arr = np.asarray(phi, dtype=np.float64)
    if not np.all(np.isfinite(phi_arr)):
        raise DomainError("phase must be finite")
    a, _, _ = projection_amplitude(n, phi_arr)
    p = np.clip(a * a, 0.0, 1.0)
    return float(p) if p.ndim == 0 else p


def projection_constructive(n: int, phi: float) -> float:
    """Coincidence probability of N photons in each output of the second splitter.

    Builds the twin-Fock state, shifts the up mode by ``phi``, recombines on
    a 50:50 splitter and reads the ``|n, n>`` amplitude.
    """
    _check_photons(n, MAX_CONSTRUCTIVE_PHOTONS)
    state = twin_fock_after_bs(n)
    shifted = apply_phase_shift(state, phi, ModeLabel.U)
    out = apply_50_50_bs(shifted)
    return float(min(abs(out.amplitudes[n]) ** 2, 1.0))


def apply_loss(outcome: ProjectionOutcome, eta: float) -> ProjectionOutcome:
    """Scale the success rate by ``eta**2``; the probability is untouched."""
    if not (math.isfinite(eta) and 0.0 < eta <= 1.0):
        raise DomainError(f"eta must lie in (0, 1], got {eta!r}")
    return replace(outcome, success_scale=outcome.success_scale * eta * eta)
