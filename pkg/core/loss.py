"""Detector inefficiency: loss before the homodyne detectors and the ideal-counter baseline.

Loss of transmissivity η sits between the beam splitter and each homodyne
detector. Each photon survives independently with probability η, so a
two-mode pure state splits into a finite set of pure branches labelled by
the number of photons lost from each mode.
"""

from __future__ import annotations

import math
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Optional, Tuple

import numpy as np
from scipy.optimize import bisect
from scipy.stats import binom

from app.config import AMPLITUDE_FLUSH, ROOT_CONFIG
from core.acceptance import conditional_result
from core.conditioning import ConditionalResult, JointDensityPoint, PadConfig, TestEnsemble
from core.errors import OutOfRangeError
from core.fock import BeamSplitterParams, TwoModeState, beamsplitter_output, binomial, fock_wavefunctions

logger = logging.getLogger(__name__)


def _check_efficiency(eta: float) -> None:
    if not 0.0 < eta <= 1.0:
        raise ValueError(f"Efficiency must lie in (0, 1], got {eta}")


@dataclass(frozen=True)
class LossChannel:
    """Bosonic loss of transmissivity eta on one mode."""

    eta: float

    def __post_init__(self):
        _check_efficiency(self.eta)

    def branch_weights(self, n: int) -> np.ndarray:
        """Probability of losing ℓ = 0..n photons from |n⟩: C(n,ℓ) η^{n−ℓ} (1−η)^ℓ."""
        return binom.pmf(np.arange(n + 1), n, 1.0 - self.eta)

    def kraus_amplitude(self, m: int, lost: int) -> float:
        """Matrix element ⟨m−lost| E_lost |m⟩ of the loss Kraus operator."""
        if lost > m:
            return 0.0
        return math.sqrt(binom.pmf(lost, m, 1.0 - self.eta))


@dataclass(frozen=True)
class IdealCounterPovm:
    """Ideal but inefficient photon counter reporting p clicks."""

    p: int
    eta: float

    def __post_init__(self):
        if self.p < 0:
            raise ValueError(f"Click count must be >= 0, got {self.p}")
        _check_efficiency(self.eta)

    def weight(self, m: int) -> float:
        """⟨m|Π_p|m⟩ = C(m, p) η^p (1−η)^{m−p}, zero for m < p."""
        return float(binom.pmf(self.p, m, self.eta))

    def diagonal(self, m_max: int) -> np.ndarray:
        return binom.pmf(self.p, np.arange(m_max + 1), self.eta)

    def matrix(self, m_max: int) -> np.ndarray:
        return np.diag(self.diagonal(m_max))


def povm_completeness(eta: float, m_max: int) -> np.ndarray:
    """Σ_p ⟨m|Π_p|m⟩ for m = 0..m_max (ones for a valid POVM)."""
    return sum(IdealCounterPovm(p, eta).diagonal(m_max) for p in range(m_max + 1))


def apply_loss(
    state: TwoModeState, eta: float, eta_c: Optional[float] = None
) -> List[Tuple[float, TwoModeState]]:
    """Split a two-mode state into normalised pure branches after independent loss.

    Args:
        state: state of modes (b, c).
        eta: transmissivity in front of the mode-b detector (and mode c unless ``eta_c`` is given).
        eta_c: separate transmissivity for mode c.

    Returns:
        (probability, branch state) pairs; zero-probability branches are dropped.
    """
    loss_b = LossChannel(eta)
    loss_c = LossChannel(eta if eta_c is None else eta_c)
    if loss_b.eta == 1.0 and loss_c.eta == 1.0:
        return [(1.0, state)]

    branches = []
    for lost_b in range(state.total + 1):
        for lost_c in range(state.total + 1 - lost_b):
            amplitudes = {}
            for (j, k), a in state.amplitudes.items():
                if j < lost_b or k < lost_c:
                    continue
                amplitudes[(j - lost_b, k - lost_c)] = (
                    a * loss_b.kraus_amplitude(j, lost_b) * loss_c.kraus_amplitude(k, lost_c)
                )
            weight = float(sum(abs(a) ** 2 for a in amplitudes.values()))
            if weight <= AMPLITUDE_FLUSH:
                continue
            scale = 1.0 / math.sqrt(weight)
            branch = TwoModeState(
                {key: a * scale for key, a in amplitudes.items()},
                state.total - lost_b - lost_c,
            )
            branches.append((weight, branch))
    return branches


@lru_cache(maxsize=1024)
def _loss_branches(n: int, p: int, omega: float, lambda_: float, eta: float) -> Tuple[Tuple[float, TwoModeState], ...]:
    state = beamsplitter_output(n, p, BeamSplitterParams(omega=omega, lambda_=lambda_))
    return tuple(apply_loss(state, eta))


def lossy_joint_density(n: int, cfg: PadConfig, pt: JointDensityPoint):
    """Outcome density of component n with loss η in front of both detectors."""
    branches = _loss_branches(n, cfg.p, cfg.omega, cfg.lambda_, cfg.eta)
    x, y = np.broadcast_arrays(np.asarray(pt.x, dtype=float), np.asarray(pt.y, dtype=float))
    total = n + cfg.p
    table_x = fock_wavefunctions(total, x, cfg.theta)
    table_y = fock_wavefunctions(total, y, cfg.phi)
    density = np.zeros(x.shape)
    for weight, branch in branches:
        density = density + weight * np.abs(branch.project_onto(table_x, table_y)) ** 2
    return density.item() if density.ndim == 0 else density


@dataclass(frozen=True)
class LossyDensity:
    """Component density n ↦ lossy_joint_density(n, ·) for one detector configuration."""

    config: PadConfig

    @classmethod
    def for_config(cls, cfg: PadConfig) -> "LossyDensity":
        return cls(cfg.model_copy(update={"delta": 0.0}))

    def __call__(self, n: int, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return np.asarray(lossy_joint_density(n, self.config, JointDensityPoint(x, y)))


def lossy_conditional_result(ens: TestEnsemble, cfg: PadConfig) -> ConditionalResult:
    """conditional_result with the lossy component density."""
    return conditional_result(ens, cfg, density=LossyDensity.for_config(cfg))


def pad_fidelity_lossy(ens: TestEnsemble, cfg: PadConfig) -> float:
    """Fidelity F(Δ, η) of the detector with inefficient homodyne detection."""
    if cfg.delta <= 0.0:
        raise ValueError(f"pad_fidelity_lossy needs delta > 0, got {cfg.delta}")
    return lossy_conditional_result(ens, cfg).fidelity


def _ideal_fidelity_series(p: int, n_max: int, eta: float) -> float:
    return 1.0 / sum(binomial(n, p) * (1.0 - eta) ** (n - p) for n in range(p, n_max + 1))


def ideal_fidelity(p: int, n_max: int, eta: float) -> float:
    """Closed-form fidelity of an ideal counter with efficiency eta picking a_p out of n ≤ n_max."""
    if not 0 <= p <= n_max:
        raise ValueError(f"ideal_fidelity needs 0 <= p <= n_max, got p={p}, n_max={n_max}")
    _check_efficiency(eta)
    return _ideal_fidelity_series(p, n_max, eta)


def ideal_fidelity_floor(p: int, n_max: int) -> float:
    """The η → 0⁺ limit of ideal_fidelity, 1 / C(n_max + 1, p + 1)."""
    if not 0 <= p <= n_max:
        raise ValueError(f"ideal_fidelity_floor needs 0 <= p <= n_max, got p={p}, n_max={n_max}")
    return 1.0 / binomial(n_max + 1, p + 1)


def ideal_counter_fidelity(ens: TestEnsemble, eta: float) -> float:
    """⟨a_p| Tr_b{Π_p ρ_in} |a_p⟩ / Tr{Π_p ρ_in} from the explicit test-state density matrix."""
    labels = ens.labels
    n_labels, dim_b = len(labels), max(labels) + 1
    psi = math.sqrt(ens.weight) * sum(
        np.kron(np.eye(n_labels)[i], np.eye(dim_b)[n]) for i, n in enumerate(labels)
    )
    rho = np.outer(psi, psi.conj())
    povm = np.kron(np.eye(n_labels), IdealCounterPovm(ens.p, eta).matrix(dim_b - 1))
    clicked = povm @ rho
    probability = np.trace(clicked).real
    reduced = np.einsum("ibjb->ij", clicked.reshape(n_labels, dim_b, n_labels, dim_b))
    target = labels.index(ens.p)
    return float(abs(reduced[target, target]) / probability)


def equivalent_efficiency(ens: TestEnsemble, cfg: PadConfig) -> float:
    """Efficiency an ideal counter needs to match the lossy detector's fidelity.

    Raises:
        OutOfRangeError: if the detector's fidelity is below the ideal counter's η → 0 floor.
    """
    target = pad_fidelity_lossy(ens, cfg)
    n_max = max(ens.labels)
    floor = ideal_fidelity_floor(ens.p, n_max)
    if target < floor:
        raise OutOfRangeError(
            f"Fidelity {target:.6f} is below the ideal counter's floor {floor:.6f}"
        )
    if target >= 1.0:
        return 1.0
    root, info = bisect(
        lambda eta: _ideal_fidelity_series(ens.p, n_max, eta) - target,
        0.0, 1.0, xtol=ROOT_CONFIG['eta_xtol'], full_output=True,
    )
    logger.debug(f"Equivalent efficiency {root:.12f} after {info.iterations} bisections")
    return float(root)


__all__ = [
    "IdealCounterPovm",
    "LossChannel",
    "LossyDensity",
    "apply_loss",
    "equivalent_efficiency",
    "ideal_counter_fidelity",
    "ideal_fidelity",
    "ideal_fidelity_floor",
    "lossy_conditional_result",
    "lossy_joint_density",
    "pad_fidelity_lossy",
    "povm_completeness",
]
