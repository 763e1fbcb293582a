"""Conditional amplitudes and homodyne densities of the photon-added detector.

The signal component |n⟩ and the auxiliary |p⟩ meet on the beam splitter;
both outputs are homodyned. Outcome x (phase θ) is read on the output
carrying the b† occupation j = m + q, outcome y (phase φ) on the other one.
"""

from __future__ import annotations

import math
import logging
from dataclasses import dataclass
from typing import Dict, Iterable, Tuple

import numpy as np
from numpy.typing import ArrayLike
from pydantic import BaseModel, ConfigDict, Field
from scipy.special import eval_hermite

from app.config import N_MAX, DETECTOR_DEFAULTS
from core.fock import binomial, hermite_at_zero, log_factorial

logger = logging.getLogger(__name__)

# i**k for k mod 4, kept exact so that integer-valued sums stay integer-valued
_I_POWERS = (1.0 + 0j, 1j, -1.0 + 0j, -1j)


class PadConfig(BaseModel):
    """Every tunable parameter of the detector."""

    model_config = ConfigDict(frozen=True, populate_by_name=True, allow_inf_nan=False)

    p: int = Field(DETECTOR_DEFAULTS['p'], ge=0, description="Photon number of the auxiliary Fock state (mode c)")
    omega: float = Field(DETECTOR_DEFAULTS['omega'], ge=0.0, le=math.pi / 2, description="Beam-splitter angle; reflectivity cos²(omega)")
    lambda_: float = Field(DETECTOR_DEFAULTS['lambda'], alias="lambda", description="Phase shift applied to mode b")
    theta: float = Field(DETECTOR_DEFAULTS['theta'], description="Local-oscillator phase of the detector reading x")
    phi: float = Field(DETECTOR_DEFAULTS['phi'], description="Local-oscillator phase of the detector reading y")
    delta: float = Field(DETECTOR_DEFAULTS['delta'], ge=0.0, description="Acceptance radius around the origin of the (x, y) plane")
    eta: float = Field(DETECTOR_DEFAULTS['eta'], gt=0.0, le=1.0, description="Homodyne efficiency shared by both detectors")

    @property
    def effective_lambda(self) -> float:
        """λ − θ + φ, the only combination of the three phases the amplitudes depend on."""
        return self.lambda_ - self.theta + self.phi

    def with_delta(self, delta: float) -> "PadConfig":
        if delta < 0:
            raise ValueError(f"Acceptance radius must be >= 0, got {delta}")
        return self.model_copy(update={"delta": float(delta)})


class TestEnsemble(BaseModel):
    """The benchmark input N_0 Σ_n |a_n⟩|n⟩ over a window around the target p.

    The label states a_n are orthonormal flags; only their indices matter.
    """

    __test__ = False  # not a pytest class
    model_config = ConfigDict(frozen=True)

    p: int = Field(..., ge=0, description="Target photon number")
    w: int = Field(DETECTOR_DEFAULTS['w'], ge=0, description="Half-width of the window of number states")

    @property
    def labels(self) -> Tuple[int, ...]:
        return tuple(range(max(0, self.p - self.w), self.p + self.w + 1))

    @property
    def weight(self) -> float:
        """N_0², the probability carried by each component."""
        return 1.0 / len(self.labels)

    @property
    def p_ideal(self) -> float:
        """Success probability of an ideal photon counter on this input."""
        return self.weight


@dataclass(frozen=True)
class JointDensityPoint:
    """Pair of homodyne outcomes; x and y may be numpy arrays of equal shape."""

    x: ArrayLike
    y: ArrayLike

    @classmethod
    def from_polar(cls, r: ArrayLike, angle: ArrayLike) -> "JointDensityPoint":
        r = np.asarray(r, dtype=float)
        if np.any(r < 0):
            raise ValueError("Polar radius must be >= 0")
        angle = np.asarray(angle, dtype=float)
        return cls(_scalar_or_array(r * np.cos(angle)), _scalar_or_array(r * np.sin(angle)))

    @classmethod
    def origin(cls) -> "JointDensityPoint":
        return cls(0.0, 0.0)

    @property
    def r(self):
        return _scalar_or_array(np.hypot(self.x, self.y))

    @property
    def angle(self):
        return _scalar_or_array(np.arctan2(self.y, self.x))


@dataclass(frozen=True)
class ConditionalResult:
    """Post-selected weights and the figures of merit derived from them."""

    weights: Dict[int, float]
    p_delta: float
    fidelity: float
    rate: float
    p_ideal: float
    delta: float


def _scalar_or_array(value):
    value = np.asarray(value)
    return value.item() if value.ndim == 0 else value


def _check_budget(n: int, p: int) -> None:
    if n < 0 or p < 0:
        raise ValueError(f"Photon numbers must be non-negative, got n={n}, p={p}")
    if n + p > N_MAX:
        raise ValueError(f"n + p = {n + p} exceeds the truncation N_max = {N_MAX}")


def _hermite_table(order: int, values: np.ndarray) -> np.ndarray:
    return np.stack([eval_hermite(j, values) for j in range(order + 1)])


def _outcomes(pt: JointDensityPoint) -> Tuple[np.ndarray, np.ndarray]:
    x, y = np.broadcast_arrays(np.asarray(pt.x, dtype=float), np.asarray(pt.y, dtype=float))
    return x, y


def conditional_amplitude(n: int, cfg: PadConfig, pt: JointDensityPoint):
    """Coefficient of |a_n, x, y⟩ in the conditional state of component n.

    Full double sum over (m, q) with raw Hermite polynomials and the
    prefactor e^{−i(n+p)φ − (x²+y²)/2} / √(n! p! π 2^{n+p}); the phases
    enter through λ − θ + φ.
    """
    if cfg.eta != 1.0:
        raise ValueError("conditional_amplitude is the lossless path; use lossy_joint_density for eta < 1")
    p = cfg.p
    _check_budget(n, p)
    x, y = _outcomes(pt)
    total = n + p
    hx = _hermite_table(total, x)
    hy = _hermite_table(total, y)
    c, s = math.cos(cfg.omega), math.sin(cfg.omega)
    lam = cfg.effective_lambda

    acc = np.zeros(x.shape, dtype=complex)
    for m in range(n + 1):
        for q in range(p + 1):
            j = m + q
            coeff = (
                binomial(n, m) * binomial(p, q)
                * (-1) ** (p - q) * np.exp(1j * j * lam)
                * c ** (m + p - q) * s ** (n - m + q)
            )
            acc = acc + coeff * hx[j] * hy[total - j]

    log_scale = -0.5 * (log_factorial(n) + log_factorial(p) + math.log(math.pi) + total * math.log(2.0))
    prefactor = np.exp(-1j * total * cfg.phi - 0.5 * (x ** 2 + y ** 2) + log_scale)
    return _scalar_or_array(prefactor * acc)


def g_function(n: int, p: int, pt: JointDensityPoint):
    """g(n, p) = Σ_{m,q} C(n,m) C(p,q) i^{m−q} H_{m+q}(x) H_{n+p−(m+q)}(y).

    The amplitude polynomial of the 50:50, λ = π/2 regime.
    """
    _check_budget(n, p)
    x, y = _outcomes(pt)
    total = n + p
    hx = _hermite_table(total, x)
    hy = _hermite_table(total, y)
    acc = np.zeros(x.shape, dtype=complex)
    for m in range(n + 1):
        for q in range(p + 1):
            j = m + q
            acc = acc + binomial(n, m) * binomial(p, q) * _I_POWERS[(m - q) % 4] * hx[j] * hy[total - j]
    return _scalar_or_array(acc)


def g_function_reordered(n: int, p: int, pt: JointDensityPoint):
    """g′(n, p): the same double sum with both summation orders reversed."""
    _check_budget(n, p)
    x, y = _outcomes(pt)
    total = n + p
    hx = _hermite_table(total, x)
    hy = _hermite_table(total, y)
    acc = np.zeros(x.shape, dtype=complex)
    for m in range(n + 1):
        for q in range(p + 1):
            j = m + q
            acc = acc + (
                binomial(n, m) * binomial(p, q)
                * _I_POWERS[((n - m) - (p - q)) % 4]
                * hx[total - j] * hy[j]
            )
    return _scalar_or_array(acc)


def g_symmetrized_at_origin(n: int, p: int) -> complex:
    """g(n, p) at x = y = 0 written as ½ Σ (...) (1 + e^{iπk}), n = p + 2k."""
    _check_budget(n, p)
    if (n + p) % 2:
        return 0j
    k = (n - p) // 2
    parity = 1.0 + (-1.0) ** k
    total = 0j
    for m in range(n + 1):
        for q in range(p + 1):
            j = m + q
            total += (
                binomial(n, m) * binomial(p, q)
                * hermite_at_zero(j) * hermite_at_zero(n + p - j)
                * _I_POWERS[(m - q) % 4] * parity
            )
    return 0.5 * total


def origin_vanishing_check(p: int, n_range: Iterable[int]) -> Dict[int, float]:
    """|g(n, p)| at the origin for every n in n_range."""
    origin = JointDensityPoint.origin()
    return {n: abs(g_function(n, p, origin)) for n in n_range}


def joint_density(n: int, cfg: PadConfig, pt: JointDensityPoint):
    """|conditional_amplitude|²: unnormalised outcome density of component n."""
    return _scalar_or_array(np.abs(conditional_amplitude(n, cfg, pt)) ** 2)


def ensemble_density(ens: TestEnsemble, cfg: PadConfig, pt: JointDensityPoint):
    """P(x, y) of the whole test ensemble; components add incoherently."""
    return _scalar_or_array(
        ens.weight * sum(np.asarray(joint_density(n, cfg, pt)) for n in ens.labels)
    )


@dataclass(frozen=True)
class LosslessDensity:
    """Component density n ↦ joint_density(n, ·) for one detector configuration."""

    config: PadConfig

    @classmethod
    def for_config(cls, cfg: PadConfig) -> "LosslessDensity":
        # the density does not depend on the acceptance radius
        return cls(cfg.model_copy(update={"delta": 0.0}))

    def __call__(self, n: int, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return np.asarray(joint_density(n, self.config, JointDensityPoint(x, y)))


__all__ = [
    "ConditionalResult",
    "JointDensityPoint",
    "LosslessDensity",
    "PadConfig",
    "TestEnsemble",
    "conditional_amplitude",
    "ensemble_density",
    "g_function",
    "g_function_reordered",
    "g_symmetrized_at_origin",
    "joint_density",
    "origin_vanishing_check",
]
