"""Fock-space primitives for two detected modes.

Combinatorics, harmonic-oscillator wavefunctions in the X = (a + a†)/√2
convention, and the beam-splitter-plus-phase transform that mixes the
signal Fock state with the auxiliary one.
"""

from __future__ import annotations

import math
import logging
from dataclasses import dataclass
from typing import Dict, Tuple

import numpy as np
from numpy.typing import ArrayLike
from scipy.special import comb, gammaln

from app.config import AMPLITUDE_FLUSH, N_MAX

logger = logging.getLogger(__name__)

EXACT_BINOMIAL_LIMIT = 60
TWO_PI = 2.0 * math.pi


def log_factorial(n: int) -> float:
    """Return ln(n!)."""
    if n < 0:
        raise ValueError(f"log_factorial needs n >= 0, got {n}")
    return float(gammaln(n + 1))


def binomial(u: int, v: int) -> float:
    """Binomial coefficient u! / ((u - v)! v!), exact up to u = 60."""
    if not 0 <= v <= u:
        raise ValueError(f"binomial({u}, {v}) needs 0 <= v <= u")
    if u <= EXACT_BINOMIAL_LIMIT:
        return float(comb(u, v, exact=True))
    return math.exp(log_factorial(u) - log_factorial(u - v) - log_factorial(v))


def hermite_at_zero(n: int) -> float:
    """Physicists' Hermite polynomial H_n evaluated at the origin."""
    if n < 0:
        raise ValueError(f"hermite_at_zero needs n >= 0, got {n}")
    if n % 2:
        return 0.0
    half = n // 2
    return float((-1) ** half * (math.factorial(n) // math.factorial(half)))


def fock_wavefunctions(n_max: int, x: ArrayLike, theta: float = 0.0) -> np.ndarray:
    """Table of ⟨x_θ|n⟩ for n = 0..n_max.

    Uses the recurrence on the normalised functions
    φ_{n+1} = x √(2/(n+1)) φ_n − √(n/(n+1)) φ_{n−1}, so no raw Hermite
    polynomial is ever formed.

    Returns:
        Complex array of shape (n_max + 1, *shape(x)).
    """
    if n_max < 0:
        raise ValueError(f"n_max must be >= 0, got {n_max}")
    x = np.asarray(x, dtype=float)
    phi = np.zeros((n_max + 1,) + x.shape)
    phi[0] = math.pi ** -0.25 * np.exp(-0.5 * x ** 2)
    if n_max >= 1:
        phi[1] = math.sqrt(2.0) * x * phi[0]
    for n in range(1, n_max):
        phi[n + 1] = math.sqrt(2.0 / (n + 1)) * x * phi[n] - math.sqrt(n / (n + 1)) * phi[n - 1]
    phi[np.abs(phi) < AMPLITUDE_FLUSH] = 0.0

    phases = np.exp(-1j * theta * np.arange(n_max + 1))
    return phi * phases.reshape((-1,) + (1,) * x.ndim)


@dataclass(frozen=True)
class QuadratureValue:
    """A homodyne outcome x measured with local-oscillator phase theta."""

    x: float
    theta: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.x):
            raise ValueError(f"Quadrature value must be finite, got {self.x}")
        object.__setattr__(self, "theta", math.fmod(self.theta, TWO_PI) % TWO_PI)


def quadrature_overlap(n: int, q: QuadratureValue) -> complex:
    """⟨x_θ|n⟩ = H_n(x) e^{−x²/2 − inθ} / √(√π 2ⁿ n!)."""
    if not 0 <= n <= N_MAX:
        raise ValueError(f"Photon number {n} outside [0, {N_MAX}]")
    return complex(fock_wavefunctions(n, q.x, q.theta)[n])


@dataclass(frozen=True)
class BeamSplitterParams:
    """Beam splitter of reflectivity cos²(omega) followed by a phase lambda_ on mode b."""

    omega: float = math.pi / 4
    lambda_: float = math.pi / 2

    def __post_init__(self):
        if not -1e-12 <= self.omega <= math.pi / 2 + 1e-12:
            raise ValueError(f"omega must lie in [0, pi/2], got {self.omega}")
        object.__setattr__(self, "lambda_", math.fmod(self.lambda_, TWO_PI) % TWO_PI)

    @property
    def cos(self) -> float:
        return math.cos(self.omega)

    @property
    def sin(self) -> float:
        return math.sin(self.omega)


@dataclass(frozen=True)
class TwoModeState:
    """Pure state of the two detected modes with a fixed total photon number.

    Keys of ``amplitudes`` are (j, k): j photons in mode b, k in mode c.
    """

    amplitudes: Dict[Tuple[int, int], complex]
    total: int

    def __post_init__(self):
        for (j, k), value in self.amplitudes.items():
            if j < 0 or k < 0 or j + k != self.total:
                raise ValueError(f"Key {(j, k)} does not carry {self.total} photons")
            if not np.isfinite(value):
                raise ValueError(f"Amplitude at {(j, k)} is not finite")

    def amplitude(self, j: int, k: int) -> complex:
        return self.amplitudes.get((j, k), 0j)

    def norm(self) -> float:
        """Squared norm Σ|amplitude|²."""
        return float(sum(abs(a) ** 2 for a in self.amplitudes.values()))

    def normalized(self) -> "TwoModeState":
        norm = self.norm()
        if norm <= 0.0:
            raise ValueError("Cannot normalise the zero state")
        scale = 1.0 / math.sqrt(norm)
        return TwoModeState({key: a * scale for key, a in self.amplitudes.items()}, self.total)

    def as_vector(self) -> np.ndarray:
        """Amplitudes indexed by j (k = total - j is implied)."""
        vector = np.zeros(self.total + 1, dtype=complex)
        for (j, _), a in self.amplitudes.items():
            vector[j] = a
        return vector

    def project_onto(self, table_x: np.ndarray, table_y: np.ndarray) -> np.ndarray:
        """Overlap with quadrature eigenstates given precomputed wavefunction tables.

        ``table_x[j]`` must hold ⟨x_θ|j⟩ for the mode-b detector and
        ``table_y[k]`` ⟨y_φ|k⟩ for the mode-c detector.
        """
        shape = np.broadcast_shapes(table_x.shape[1:], table_y.shape[1:])
        overlap = np.zeros(shape, dtype=complex)
        for (j, k), a in self.amplitudes.items():
            overlap = overlap + a * table_x[j] * table_y[k]
        return overlap

    def project(self, x: ArrayLike, y: ArrayLike, theta: float = 0.0, phi: float = 0.0) -> np.ndarray:
        """⟨x_θ, y_φ|state⟩ evaluated over (broadcast) arrays of outcomes."""
        return self.project_onto(
            fock_wavefunctions(self.total, x, theta),
            fock_wavefunctions(self.total, y, phi),
        )


def beamsplitter_output(n: int, p: int, bs: BeamSplitterParams, n_max: int = N_MAX) -> TwoModeState:
    """Two-mode state after mixing |n⟩_b|p⟩_c on the beam splitter.

    Coefficient of |j⟩_b|k⟩_c collects every (m, q) with m + q = j:
    C(n,m) C(p,q) e^{iπ(p−q) + i(m+q)λ} c^{m+p−q} s^{n−m+q} √(j! k!) / √(n! p!).
    """
    if n < 0 or p < 0:
        raise ValueError(f"Photon numbers must be non-negative, got n={n}, p={p}")
    if n + p > n_max:
        raise ValueError(f"n + p = {n + p} exceeds the truncation N_max = {n_max}")

    c, s = bs.cos, bs.sin
    total = n + p
    sums: Dict[int, complex] = {}
    for m in range(n + 1):
        for q in range(p + 1):
            j = m + q
            term = (
                binomial(n, m) * binomial(p, q)
                * (-1) ** (p - q) * np.exp(1j * j * bs.lambda_)
                * c ** (m + p - q) * s ** (n - m + q)
            )
            sums[j] = sums.get(j, 0j) + term

    log_norm = 0.5 * (log_factorial(n) + log_factorial(p))
    amplitudes = {}
    for j, value in sums.items():
        k = total - j
        amplitude = complex(value * math.exp(0.5 * (log_factorial(j) + log_factorial(k)) - log_norm))
        if abs(amplitude) >= AMPLITUDE_FLUSH:
            amplitudes[(j, k)] = amplitude
    return TwoModeState(amplitudes, total)


__all__ = [
    "BeamSplitterParams",
    "QuadratureValue",
    "TwoModeState",
    "beamsplitter_output",
    "binomial",
    "fock_wavefunctions",
    "hermite_at_zero",
    "log_factorial",
    "quadrature_overlap",
]
