"""Post-selection on a disk of radius Δ: acceptance probability, fidelity, rate.

Component densities are integrated over the disk either along a single
ray (when an angular check confirms rotational symmetry) or by a 2-D
tensor-product rule over the disk's bounding square.
"""

from __future__ import annotations

import math
import logging
from functools import lru_cache
from typing import Dict, List, Optional, Protocol, Sequence, Tuple

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.optimize import bisect

from app.config import DEGENERATE_PROBABILITY, N_MAX, QUADRATURE_CONFIG, ROOT_CONFIG
from core.conditioning import ConditionalResult, LosslessDensity, PadConfig, TestEnsemble
from core.errors import DegenerateAcceptanceError, SymmetryViolationError, UnreachableRateError

logger = logging.getLogger(__name__)


class ComponentDensity(Protocol):
    """Outcome density of the single component |a_n⟩|n⟩, vectorised over (x, y)."""

    def __call__(self, n: int, x: np.ndarray, y: np.ndarray) -> np.ndarray: ...


@lru_cache(maxsize=None)
def _legendre(order: int) -> Tuple[np.ndarray, np.ndarray]:
    return leggauss(order)


def gauss_legendre_mesh(a: float, b: float, order: int) -> Tuple[np.ndarray, np.ndarray]:
    """Gauss–Legendre nodes and weights mapped from [-1, 1] to [a, b]."""
    nodes, weights = _legendre(order)
    return 0.5 * (nodes + 1.0) * (b - a) + a, 0.5 * (b - a) * weights


def check_rotational_symmetry(
    labels: Sequence[int],
    density: ComponentDensity,
    radii: Sequence[float] = QUADRATURE_CONFIG['symmetry_radii'],
    angles: int = QUADRATURE_CONFIG['symmetry_angles'],
    rtol: float = QUADRATURE_CONFIG['symmetry_rtol'],
) -> float:
    """Largest angular spread of Σ_n density over circles of the given radii.

    Spreads are relative to the largest density on any sampled circle, so a
    circle lying on a node of the density is not mistaken for asymmetry.

    Raises:
        SymmetryViolationError: if the spread exceeds ``rtol``.
    """
    grid = 2.0 * math.pi * np.arange(angles) / angles
    rings = [
        sum(density(n, radius * np.cos(grid), radius * np.sin(grid)) for n in labels)
        for radius in radii
    ]
    scale = max(float(np.max(ring)) for ring in rings)
    if scale <= DEGENERATE_PROBABILITY:
        return 0.0
    worst = max(float(np.max(ring) - np.min(ring)) / scale for ring in rings)
    if worst > rtol:
        raise SymmetryViolationError(worst, rtol)
    return worst


@lru_cache(maxsize=256)
def _is_rotationally_symmetric(labels: Tuple[int, ...], density: ComponentDensity) -> bool:
    try:
        spread = check_rotational_symmetry(labels, density)
    except SymmetryViolationError as exc:
        logger.warning(f"{exc}; falling back to 2-D disk quadrature")
        return False
    logger.debug(f"Rotational symmetry confirmed (spread {spread:.2e})")
    return True


def radial_component_weights(
    labels: Sequence[int], density: ComponentDensity, delta: float, order: int
) -> np.ndarray:
    """2π ∫_0^Δ density(n, r, 0) r dr for each label, at a fixed Gauss–Legendre order."""
    if delta <= 0.0:
        return np.zeros(len(labels))
    r, weights = gauss_legendre_mesh(0.0, delta, order)
    ray = np.zeros_like(r)
    return np.array([2.0 * math.pi * np.sum(weights * r * density(n, r, ray)) for n in labels])


def converged_radial_weights(
    labels: Sequence[int],
    density: ComponentDensity,
    delta: float,
    order: int = QUADRATURE_CONFIG['radial_order'],
    rtol: float = QUADRATURE_CONFIG['radial_rtol'],
    max_order: int = QUADRATURE_CONFIG['max_radial_order'],
) -> np.ndarray:
    """Radial weights with the order doubled until the total changes by less than rtol."""
    previous = radial_component_weights(labels, density, delta, order)
    while True:
        order *= 2
        current = radial_component_weights(labels, density, delta, order)
        change = abs(current.sum() - previous.sum())
        if change <= rtol * abs(current.sum()):
            logger.debug(f"Radial quadrature converged at order {order}")
            return current
        if order >= max_order:
            relative = change / max(abs(current.sum()), DEGENERATE_PROBABILITY)
            logger.warning(f"Radial quadrature not converged at order {order} (relative change {relative:.2e})")
            return current
        previous = current


def disk_component_weights(
    labels: Sequence[int],
    density: ComponentDensity,
    delta: float,
    order: int = QUADRATURE_CONFIG['fallback_order'],
) -> np.ndarray:
    """Tensor-product Gauss–Legendre over [-Δ, Δ]² with the indicator r ≤ Δ, refined once."""
    if delta <= 0.0:
        return np.zeros(len(labels))

    def integrate(rule_order: int) -> np.ndarray:
        nodes, weights = gauss_legendre_mesh(-delta, delta, rule_order)
        x, y = np.meshgrid(nodes, nodes, indexing="ij")
        mask = np.outer(weights, weights) * (x ** 2 + y ** 2 <= delta ** 2)
        return np.array([np.sum(mask * density(n, x, y)) for n in labels])

    coarse = integrate(order)
    refined = integrate(2 * order)
    change = abs(refined.sum() - coarse.sum())
    logger.info(f"2-D disk quadrature: refinement {order} -> {2 * order} changed the total by {change:.2e}")
    return refined


def _resolve_density(cfg: PadConfig, density: Optional[ComponentDensity]) -> ComponentDensity:
    if density is not None:
        return density
    if cfg.eta != 1.0:
        raise ValueError("eta < 1 needs a lossy density; use core.loss.lossy_conditional_result")
    return LosslessDensity.for_config(cfg)


def _check_target(ens: TestEnsemble, cfg: PadConfig) -> None:
    if ens.p != cfg.p:
        raise ValueError(f"Ensemble target p={ens.p} differs from the auxiliary photon number p={cfg.p}")
    if max(ens.labels) + cfg.p > N_MAX:
        raise ValueError(f"Window up to n={max(ens.labels)} with p={cfg.p} exceeds N_max = {N_MAX}")


def component_weights(
    ens: TestEnsemble, cfg: PadConfig, density: Optional[ComponentDensity] = None
) -> Dict[int, float]:
    """N_0² × probability that component n lands inside the acceptance disk."""
    _check_target(ens, cfg)
    density = _resolve_density(cfg, density)
    labels = ens.labels
    if cfg.delta == 0.0:
        raw = np.zeros(len(labels))
    elif _is_rotationally_symmetric(labels, density):
        raw = converged_radial_weights(labels, density, cfg.delta)
    else:
        raw = disk_component_weights(labels, density, cfg.delta)
    return {n: ens.weight * float(value) for n, value in zip(labels, raw)}


def p_delta(ens: TestEnsemble, cfg: PadConfig, density: Optional[ComponentDensity] = None) -> float:
    """Probability that the outcome (x, y) falls within radius Δ of the origin."""
    return float(sum(component_weights(ens, cfg, density).values()))


def origin_fidelity(ens: TestEnsemble, cfg: PadConfig, density: Optional[ComponentDensity] = None) -> float:
    """The Δ → 0 limit: density of the target component over the total density at the origin."""
    _check_target(ens, cfg)
    density = _resolve_density(cfg, density)
    origin = np.zeros(1)
    values = {n: float(density(n, origin, origin)[0]) for n in ens.labels}
    total = sum(values.values())
    if total < DEGENERATE_PROBABILITY:
        raise DegenerateAcceptanceError("No component has any density at the origin")
    return values[ens.p] / total


def conditional_result(
    ens: TestEnsemble, cfg: PadConfig, density: Optional[ComponentDensity] = None
) -> ConditionalResult:
    """Post-selected weights, P_Δ, fidelity against a_p and rate R = P_Δ / P_ideal."""
    if cfg.delta == 0.0:
        fidelity = origin_fidelity(ens, cfg, density)
        return ConditionalResult(
            weights={n: 0.0 for n in ens.labels},
            p_delta=0.0,
            fidelity=fidelity,
            rate=0.0,
            p_ideal=ens.p_ideal,
            delta=0.0,
        )

    weights = component_weights(ens, cfg, density)
    accepted = float(sum(weights.values()))
    if accepted < DEGENERATE_PROBABILITY:
        raise DegenerateAcceptanceError(
            f"Acceptance probability {accepted:.3e} underflows at delta={cfg.delta}"
        )
    return ConditionalResult(
        weights=weights,
        p_delta=accepted,
        fidelity=weights[ens.p] / accepted,
        rate=accepted / ens.p_ideal,
        p_ideal=ens.p_ideal,
        delta=cfg.delta,
    )


def rate_constrained_fidelity(
    ens: TestEnsemble,
    cfg: PadConfig,
    target_rate: float,
    density: Optional[ComponentDensity] = None,
) -> Tuple[float, float]:
    """Acceptance radius achieving P_Δ = R · P_ideal, and the fidelity there.

    Raises:
        UnreachableRateError: if even Δ = 15 does not reach the requested rate.
    """
    if target_rate <= 0.0:
        raise ValueError(f"Target rate must be positive, got {target_rate}")
    goal = target_rate * ens.p_ideal
    delta_max = ROOT_CONFIG['delta_max']

    def excess(delta: float) -> float:
        return p_delta(ens, cfg.with_delta(delta), density) - goal

    ceiling = excess(delta_max)
    if ceiling <= 0.0:
        raise UnreachableRateError(
            f"Rate {target_rate} is out of reach; the largest achievable rate is "
            f"{(ceiling + goal) / ens.p_ideal:.6f}"
        )
    delta, info = bisect(excess, 0.0, delta_max, xtol=ROOT_CONFIG['delta_xtol'], full_output=True)
    logger.debug(f"Rate {target_rate:.4g} reached at delta={delta:.10f} after {info.iterations} bisections")
    result = conditional_result(ens, cfg.with_delta(delta), density)
    return float(delta), result.fidelity


def window_convergence(p: int, cfg: PadConfig, w_max: int) -> List[float]:
    """|F(w+1) − F(w)| for w = 0 .. w_max−1 at the configured Δ."""
    if w_max < 1:
        raise ValueError(f"w_max must be >= 1, got {w_max}")
    if p + w_max > N_MAX - p:
        raise ValueError(f"p + w_max = {p + w_max} exceeds N_max - p = {N_MAX - p}")
    cfg = cfg.model_copy(update={"p": p})
    fidelities = [conditional_result(TestEnsemble(p=p, w=w), cfg).fidelity for w in range(w_max + 1)]
    return [abs(after - before) for before, after in zip(fidelities, fidelities[1:])]


def box_probability(
    ens: TestEnsemble,
    cfg: PadConfig,
    half_width: float = QUADRATURE_CONFIG['box_half_width'],
    order: int = QUADRATURE_CONFIG['box_order'],
    density: Optional[ComponentDensity] = None,
) -> float:
    """N_0² Σ_n ∫∫ density over the square [−L, L]²."""
    _check_target(ens, cfg)
    density = _resolve_density(cfg, density)
    nodes, weights = gauss_legendre_mesh(-half_width, half_width, order)
    x, y = np.meshgrid(nodes, nodes, indexing="ij")
    area = np.outer(weights, weights)
    return ens.weight * float(sum(np.sum(area * density(n, x, y)) for n in ens.labels))


__all__ = [
    "ComponentDensity",
    "box_probability",
    "check_rotational_symmetry",
    "component_weights",
    "conditional_result",
    "converged_radial_weights",
    "disk_component_weights",
    "gauss_legendre_mesh",
    "origin_fidelity",
    "p_delta",
    "radial_component_weights",
    "rate_constrained_fidelity",
    "window_convergence",
]
