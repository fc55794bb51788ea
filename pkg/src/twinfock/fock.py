"""Two-mode Fock states at fixed total photon number.

A state with ``n`` photons is stored as ``n + 1`` complex amplitudes in
ascending order of the up-mode occupation: entry ``j`` multiplies
``|j>_u |n - j>_d``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import DomainError

MAX_TWIN_PHOTONS = 10**6
NORM_TOL = 1e-10


class ModeLabel(enum.Enum):
    U = "u"
    D = "d"


@dataclass(frozen=True)
class PhotonMoments:
    mean: float
    second_moment: float
    variance: float


@dataclass(frozen=True, eq=False)
class TwoModeState:
    """Normalized pure state of two bosonic modes holding ``total_photons``."""

    total_photons: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if self.total_photons < 0:
            raise DomainError(f"total_photons must be >= 0, got {self.total_photons}")
        amps = np.array(self.amplitudes, dtype=np.complex128)
        if amps.shape != (self.total_photons + 1,):
            raise DomainError(
                f"expected {self.total_photons + 1} amplitudes, got shape {amps.shape}"
            )
        norm = float(np.sum(np.abs(amps) ** 2))
        if abs(norm - 1.0) > NORM_TOL:
            raise DomainError(f"state is not normalized (norm {norm!r})")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def basis(cls, n_up: int, n_down: int) -> "TwoModeState":
        """The number state ``|n_up>_u |n_down>_d``."""
        if n_up < 0 or n_down < 0:
            raise DomainError("occupations must be non-negative")
        amps = np.zeros(n_up + n_down + 1, dtype=np.complex128)
        amps[n_up] = 1.0
        return cls(n_up + n_down, amps)

    def norm(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2))

    def __len__(self):
        return self.total_photons + 1


def central_binomial_weights(n: int) -> np.ndarray:
    """``C(2k,k) C(2n-2k,n-k) / 4**n`` for ``k = 0..n``.

    Each factor ``C(2k,k)/4**k`` is built by its ratio recurrence, so no
    intermediate value exceeds 1 and nothing overflows for large ``n``.
    """
    k = np.arange(n, dtype=np.float64)
    c = np.empty(n + 1)
    c[0] = 1.0
    c[1:] = np.cumprod((2.0 * k + 1.0) / (2.0 * k + 2.0))
    return c * c[::-1]


def twin_fock_after_bs(n: int) -> TwoModeState:
    """The twin-Fock state ``|n,n>`` after a 50:50 beam splitter.

    Only even up-mode occupations ``2k`` are populated, with real amplitude
    ``(-1)**(n-k) * sqrt(C(2k,k) C(2n-2k,n-k) / 4**n)``.
    """
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)):
        raise DomainError(f"photon number must be an integer, got {n!r}")
    if n < 1 or n > MAX_TWIN_PHOTONS:
        raise DomainError(f"photon number must lie in [1, {MAX_TWIN_PHOTONS}], got {n}")
    n = int(n)
    w = central_binomial_weights(n)
    signs = np.where((n - np.arange(n + 1)) % 2 == 0, 1.0, -1.0)
    amps = np.zeros(2 * n + 1, dtype=np.complex128)
    amps[0::2] = signs * np.sqrt(w)
    return TwoModeState(2 * n, amps)


def _mode_occupation(state: TwoModeState, mode: ModeLabel) -> np.ndarray:
    j = np.arange(state.total_photons + 1, dtype=np.float64)
    if mode is ModeLabel.U:
        return j
    if mode is ModeLabel.D:
        return state.total_photons - j
    raise DomainError(f"unknown mode {mode!r}")


def apply_phase_shift(state: TwoModeState, phi: float, mode: ModeLabel = ModeLabel.U) -> TwoModeState:
    """Apply ``exp(i phi a^dag a)`` on one mode."""
    if not math.isfinite(phi):
        raise DomainError(f"phase must be finite, got {phi!r}")
    occ = _mode_occupation(state, mode)
    return TwoModeState(state.total_photons, state.amplitudes * np.exp(1j * occ * phi))


@lru_cache(maxsize=32)
def _rotation_spectrum(n: int) -> tuple[np.ndarray, np.ndarray]:
    # a_u^dag a_d - a_d^dag a_u is i times a real symmetric tridiagonal
    # matrix after the similarity diag(i**j); its spectrum is -n, -n+2, ..., n.
    j = np.arange(n, dtype=np.float64)
    off = np.sqrt((j + 1.0) * (n - j))
    evals, evecs = eigh_tridiagonal(np.zeros(n + 1), off)
    evals = np.round(evals)
    evals.setflags(write=False)
    evecs.setflags(write=False)
    return evals, evecs


def apply_50_50_bs(state: TwoModeState) -> TwoModeState:
    """Balanced beam splitter ``a_u -> (a_u + a_d)/sqrt2``, ``a_d -> (a_u - a_d)/sqrt2``.

    The transformation is its own inverse. It is applied as a sign flip of
    the down mode followed by a mode rotation by -pi/4, the rotation being
    diagonalized in the fixed-photon-number subspace.
    """
    n = state.total_photons
    j = np.arange(n + 1)
    amps = state.amplitudes * np.where((n - j) % 2 == 0, 1.0, -1.0)
    if n == 0:
        return TwoModeState(0, amps)
    evals, evecs = _rotation_spectrum(n)
    ipow = 1j ** (j % 4)
    # exp(theta G) = D Q exp(-i theta L) Q^T D^-1 with D = diag(i**j), theta = -pi/4
    v = amps / ipow
    v = evecs.T @ v
    v = v * np.exp(1j * (math.pi / 4) * evals)
    v = evecs @ v
    out = v * ipow
    # exact real arithmetic is expected when the input is real
    if np.all(state.amplitudes.imag == 0):
        out = out.real.astype(np.complex128)
    return TwoModeState(n, out)


def inner_product(a: TwoModeState, b: TwoModeState) -> complex:
    """``<a|b>``."""
    if a.total_photons != b.total_photons:
        raise DomainError(
            f"states hold different photon numbers ({a.total_photons} vs {b.total_photons})"
        )
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def photon_number_moments(state: TwoModeState, mode: ModeLabel = ModeLabel.U) -> PhotonMoments:
    occ = _mode_occupation(state, mode)
    prob = np.abs(state.amplitudes) ** 2
    mean = float(np.dot(prob, occ))
    second = float(np.dot(prob, occ * occ))
    # the difference form loses digits for large occupations
    variance = float(np.dot(prob, (occ - mean) ** 2))
    return PhotonMoments(mean=mean, second_moment=second, variance=max(variance, 0.0))
