"""Producers of the data behind each figure, plus the single-point query."""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from functools import partial
from typing import Callable, Dict, List, Sequence, Tuple, TypeVar, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, Field
from tqdm.auto import tqdm

from app.config import N_MAX
from backend.figures.config import TABLE_COLUMNS
from backend.figures.figure_spec import FigureSpec
from core.acceptance import check_rotational_symmetry, conditional_result, rate_constrained_fidelity, window_convergence
from core.conditioning import LosslessDensity
from core.errors import SymmetryViolationError
from core.fock import fock_wavefunctions
from core.loss import LossyDensity, equivalent_efficiency, ideal_fidelity, lossy_conditional_result, pad_fidelity_lossy

logger = logging.getLogger(__name__)

Cell = TypeVar("Cell")


def _evaluate(fn: Callable[[Cell], object], cells: Sequence[Cell], jobs: int, desc: str) -> List:
    """Evaluate grid cells, optionally across processes; results keep the order of ``cells``."""
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(tqdm(pool.map(fn, cells), total=len(cells), desc=desc, disable=None))
    return [fn(cell) for cell in tqdm(cells, desc=desc, disable=None)]


def _table(figure: str, rows: List[Dict]) -> pd.DataFrame:
    return pd.DataFrame(rows, columns=TABLE_COLUMNS[figure])


def run_pxn(spec: FigureSpec) -> pd.DataFrame:
    """|⟨x|n⟩|² on the x grid for each requested n."""
    n_top = max(spec.n_values)
    if n_top > N_MAX:
        raise ValueError(f"Photon number {n_top} exceeds the truncation N_max = {N_MAX}")
    xs = spec.axis('x')
    wavefunctions = fock_wavefunctions(n_top, xs)
    frames = [
        pd.DataFrame({'n': n, 'x': xs, 'density': np.abs(wavefunctions[n]) ** 2})
        for n in spec.n_values
    ]
    return pd.concat(frames, ignore_index=True)[TABLE_COLUMNS['pxn']]


def run_density(spec: FigureSpec) -> pd.DataFrame:
    """Per-component joint density along the x axis (y = 0)."""
    cfg = spec.pad_config()
    density = LosslessDensity.for_config(cfg) if cfg.eta == 1.0 else LossyDensity.for_config(cfg)
    try:
        check_rotational_symmetry(spec.n_values, density)
    except SymmetryViolationError as exc:
        logger.warning(f"{exc}; the x-axis slice does not represent the full density")

    xs = spec.axis('x')
    axis = np.zeros_like(xs)
    frames = [
        pd.DataFrame({'n': n, 'x': xs, 'density': density(n, xs, axis)})
        for n in spec.n_values
    ]
    return pd.concat(frames, ignore_index=True)[TABLE_COLUMNS['density']]


def _window_cell(spec: FigureSpec, p: int) -> List[float]:
    return window_convergence(p, spec.pad_config(p=p), spec.w_max)


def run_window_convergence(spec: FigureSpec) -> pd.DataFrame:
    """|F(w+1) − F(w)| for each target photon number."""
    changes = _evaluate(partial(_window_cell, spec), spec.p_values, spec.jobs, "window-convergence")
    rows = [
        {'p': p, 'w': w, 'fidelity_change': change}
        for p, per_p in zip(spec.p_values, changes)
        for w, change in enumerate(per_p)
    ]
    return _table('window-convergence', rows)


def _rates_cell(spec: FigureSpec, cell: Tuple[float, int]) -> Tuple[float, float]:
    rate, p = cell
    return rate_constrained_fidelity(spec.ensemble(p), spec.pad_config(p=p), rate)


def run_rates(spec: FigureSpec) -> pd.DataFrame:
    """Acceptance radius and fidelity at fixed probability rates, for p = 0..p_max."""
    cells = [(rate, p) for rate in spec.rates for p in range(spec.p_max + 1)]
    solved = _evaluate(partial(_rates_cell, spec), cells, spec.jobs, "rates")
    rows = [
        {'rate': rate, 'p': p, 'delta': delta, 'fidelity': fidelity}
        for (rate, p), (delta, fidelity) in zip(cells, solved)
    ]
    return _table('rates', rows)


def _equivalence_cell(spec: FigureSpec, cell: Tuple[float, float]) -> float:
    delta, eta = cell
    return equivalent_efficiency(spec.ensemble(), spec.pad_config(delta=delta, eta=eta))


def run_equiv_efficiency(spec: FigureSpec) -> pd.DataFrame:
    """Equivalent ideal-counter efficiency over the (Δ, η) grid."""
    cells = [(float(delta), float(eta)) for delta in spec.axis('delta') for eta in spec.axis('eta')]
    solved = _evaluate(partial(_equivalence_cell, spec), cells, spec.jobs, "equiv-efficiency")
    rows = [
        {'delta': delta, 'eta': eta, 'eta_ideal': eta_ideal}
        for (delta, eta), eta_ideal in zip(cells, solved)
    ]
    return _table('equiv-efficiency', rows)


def _comparison_cell(spec: FigureSpec, cell: Tuple[int, float]) -> Tuple[float, float]:
    p, eta = cell
    ensemble = spec.ensemble(p)
    pad = pad_fidelity_lossy(ensemble, spec.pad_config(p=p, eta=eta))
    return pad, ideal_fidelity(p, max(ensemble.labels), eta)


def run_detector_comparison(spec: FigureSpec) -> pd.DataFrame:
    """Lossy detector fidelity next to the ideal-but-inefficient counter on the same input."""
    cells = [(p, float(eta)) for p in spec.p_values for eta in spec.axis('eta')]
    solved = _evaluate(partial(_comparison_cell, spec), cells, spec.jobs, "detector-comparison")
    rows = [
        {'p': p, 'eta': eta, 'pad_fidelity': pad, 'ideal_fidelity': ideal}
        for (p, eta), (pad, ideal) in zip(cells, solved)
    ]
    return _table('detector-comparison', rows)


class QueryResult(BaseModel):
    """Numbers returned by one conditional-result evaluation."""

    weights: Dict[int, float] = Field(..., description="N_0²-weighted accepted probability per component")
    p_delta: float = Field(..., description="Total acceptance probability")
    fidelity: float = Field(..., description="Weight of the target component after post-selection")
    rate: float = Field(..., description="P_delta over the ideal counter's success probability")
    p_ideal: float = Field(..., description="Ideal counter's success probability")


class PointQueryRecord(BaseModel):
    """Standardised single-evaluation record."""

    success: bool = Field(..., description="Whether the evaluation succeeded")
    message: str = Field(..., description="Human-readable summary")
    config: Dict[str, Union[int, float]] = Field(..., description="Every parameter the evaluation used")
    result: QueryResult


def run_point_query(spec: FigureSpec) -> PointQueryRecord:
    """One conditional_result (η = 1) or lossy_conditional_result (η < 1) with explicit parameters."""
    ensemble, cfg = spec.ensemble(), spec.pad_config()
    result = conditional_result(ensemble, cfg) if cfg.eta == 1.0 else lossy_conditional_result(ensemble, cfg)
    return PointQueryRecord(
        success=True,
        message=f"Fidelity {result.fidelity:.6f} at delta={cfg.delta}, eta={cfg.eta} for p={cfg.p}, w={ensemble.w}",
        config={
            'p': cfg.p, 'w': ensemble.w, 'delta': cfg.delta, 'eta': cfg.eta, 'omega': cfg.omega,
            'lambda': cfg.lambda_, 'theta': cfg.theta, 'phi': cfg.phi,
        },
        result=QueryResult(
            weights=result.weights,
            p_delta=result.p_delta,
            fidelity=result.fidelity,
            rate=result.rate,
            p_ideal=result.p_ideal,
        ),
    )


TABLE_RUNNERS: Dict[str, Callable[[FigureSpec], pd.DataFrame]] = {
    'pxn': run_pxn,
    'density': run_density,
    'window-convergence': run_window_convergence,
    'rates': run_rates,
    'equiv-efficiency': run_equiv_efficiency,
    'detector-comparison': run_detector_comparison,
}


__all__ = [
    "PointQueryRecord",
    "QueryResult",
    "TABLE_RUNNERS",
    "run_density",
    "run_detector_comparison",
    "run_equiv_efficiency",
    "run_point_query",
    "run_pxn",
    "run_rates",
    "run_window_convergence",
]
