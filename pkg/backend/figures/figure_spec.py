"""Validated description of one figure request, assembled from defaults, a config file and flags."""

from __future__ import annotations

import math
from pathlib import Path
from typing import Any, Dict, List, Literal, Mapping, Optional

import numpy as np
from dotenv import dotenv_values
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from app.config import DETECTOR_DEFAULTS
from backend.figures.config import FIGURE_AXES, FIGURE_DEFAULTS, FIGURE_NAMES
from core.conditioning import PadConfig, TestEnsemble

FigureName = Literal[
    'pxn', 'density', 'window-convergence', 'rates', 'equiv-efficiency', 'point-query', 'detector-comparison'
]

_LIST_FIELDS = ('n_values', 'p_values', 'rates')
_GRID_PREFIX = 'grid_'


class GridAxis(BaseModel):
    """One sampled axis: count points from start to stop, linear or logarithmic."""

    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    start: float = Field(..., description="First grid value")
    stop: float = Field(..., description="Last grid value")
    count: int = Field(..., ge=2, description="Number of grid points")
    scale: Literal['linear', 'log'] = Field('linear', description="Spacing of the points")

    @classmethod
    def parse(cls, text: str) -> "GridAxis":
        """Parse ``start:stop:count[:log]``."""
        parts = [part.strip() for part in text.split(':')]
        if len(parts) not in (3, 4):
            raise ValueError(f"Grid axis '{text}' is not start:stop:count[:log]")
        fields = dict(zip(('start', 'stop', 'count', 'scale'), parts))
        return cls.model_validate(fields)

    @model_validator(mode='after')
    def _check_log_range(self):
        if self.scale == 'log' and (self.start <= 0 or self.stop <= 0):
            raise ValueError("Logarithmic grid axes need positive bounds")
        return self

    def values(self) -> np.ndarray:
        if self.scale == 'log':
            return np.geomspace(self.start, self.stop, self.count)
        return np.linspace(self.start, self.stop, self.count)


class FigureSpec(BaseModel):
    """Everything one figure command needs."""

    model_config = ConfigDict(frozen=True, populate_by_name=True, allow_inf_nan=False, extra='forbid')

    figure: FigureName = Field(..., description="Which data product to emit")
    p: int = Field(DETECTOR_DEFAULTS['p'], ge=0, description="Auxiliary / target photon number")
    w: int = Field(DETECTOR_DEFAULTS['w'], ge=0, description="Window half-width of the test ensemble")
    delta: float = Field(DETECTOR_DEFAULTS['delta'], ge=0.0, description="Acceptance radius")
    eta: float = Field(DETECTOR_DEFAULTS['eta'], gt=0.0, le=1.0, description="Homodyne efficiency")
    omega: float = Field(DETECTOR_DEFAULTS['omega'], ge=0.0, le=math.pi / 2, description="Beam-splitter angle")
    lambda_: float = Field(DETECTOR_DEFAULTS['lambda'], alias='lambda', description="Phase on mode b")
    theta: float = Field(DETECTOR_DEFAULTS['theta'], description="Phase of the x detector")
    phi: float = Field(DETECTOR_DEFAULTS['phi'], description="Phase of the y detector")
    n_values: List[int] = Field(default_factory=list, description="Signal photon numbers to tabulate")
    p_values: List[int] = Field(default_factory=list, description="Target photon numbers to sweep")
    rates: List[float] = Field(default_factory=list, description="Probability rates R to solve for")
    p_max: int = Field(6, ge=0, description="Largest target photon number in the rates sweep")
    w_max: int = Field(4, ge=1, description="Largest window half-width in the convergence sweep")
    grid: Dict[str, GridAxis] = Field(default_factory=dict, description="Sampled axes by name")
    output_path: Optional[Path] = Field(None, description="Destination file; stdout when absent")
    format: Literal['csv', 'json'] = Field('csv', description="Output table format")
    jobs: int = Field(1, ge=1, description="Worker processes for grid evaluation")

    @field_validator(*_LIST_FIELDS, mode='before')
    @classmethod
    def _split_lists(cls, value: Any) -> Any:
        if isinstance(value, str):
            return [item.strip() for item in value.split(',') if item.strip()]
        if isinstance(value, (int, float)):
            return [value]
        return value

    @field_validator('n_values', 'p_values')
    @classmethod
    def _non_negative(cls, value: List[int]) -> List[int]:
        if any(n < 0 for n in value):
            raise ValueError("Photon numbers must be non-negative")
        return value

    @field_validator('rates')
    @classmethod
    def _positive_rates(cls, value: List[float]) -> List[float]:
        if any(rate <= 0 for rate in value):
            raise ValueError("Probability rates must be positive")
        return value

    @field_validator('grid', mode='before')
    @classmethod
    def _parse_grid(cls, value: Any) -> Any:
        if isinstance(value, Mapping):
            return {
                axis: GridAxis.parse(spec) if isinstance(spec, str) else spec
                for axis, spec in value.items()
            }
        return value

    @model_validator(mode='after')
    def _check_axes(self):
        expected = FIGURE_AXES[self.figure]
        unknown = sorted(set(self.grid) - set(expected))
        if unknown:
            raise ValueError(f"Figure '{self.figure}' has no grid axis {', '.join(unknown)}")
        missing = [axis for axis in expected if axis not in self.grid]
        if missing:
            raise ValueError(f"Figure '{self.figure}' needs grid axes {', '.join(missing)}")
        return self

    def pad_config(self, **update: Any) -> PadConfig:
        values = {
            'p': self.p, 'omega': self.omega, 'lambda': self.lambda_, 'theta': self.theta,
            'phi': self.phi, 'delta': self.delta, 'eta': self.eta,
        }
        values.update(update)
        return PadConfig.model_validate(values)

    def ensemble(self, p: Optional[int] = None) -> TestEnsemble:
        return TestEnsemble(p=self.p if p is None else p, w=self.w)

    def axis(self, name: str) -> np.ndarray:
        return self.grid[name].values()


def _normalise_key(key: str) -> str:
    return key.strip().lower().replace('-', '_')


def load_config_file(path: Path) -> Dict[str, Any]:
    """Read ``key=value`` lines into figure-spec fields and grid axes."""
    raw = dotenv_values(path)
    values: Dict[str, Any] = {}
    grid: Dict[str, str] = {}
    for key, value in raw.items():
        if value is None:
            raise ValueError(f"Config entry '{key}' in {path} has no value")
        name = _normalise_key(key)
        if name.startswith(_GRID_PREFIX):
            grid[name[len(_GRID_PREFIX):]] = value
        else:
            values[name] = value
    if grid:
        values['grid'] = grid
    return values


def build_figure_spec(
    figure: str,
    overrides: Optional[Mapping[str, Any]] = None,
    config_path: Optional[Path] = None,
) -> FigureSpec:
    """Layer detector defaults, figure defaults, the config file and explicit flags, in that order."""
    if figure not in FIGURE_NAMES:
        raise ValueError(f"Unknown figure '{figure}'")
    defaults = FIGURE_DEFAULTS[figure]
    values: Dict[str, Any] = {**DETECTOR_DEFAULTS, **{k: v for k, v in defaults.items() if k != 'grid'}}
    grid: Dict[str, Any] = dict(defaults.get('grid', {}))

    layers = [load_config_file(config_path)] if config_path is not None else []
    layers.append(dict(overrides or {}))
    for layer in layers:
        layer = dict(layer)
        grid.update(layer.pop('grid', {}) or {})
        # a single explicit target replaces the swept list
        if 'p' in layer and 'p_values' in defaults and 'p_values' not in layer:
            values['p_values'] = [layer['p']]
        values.update(layer)

    values['figure'] = figure
    values['grid'] = grid
    return FigureSpec.model_validate(values)


__all__ = ["FigureSpec", "GridAxis", "build_figure_spec", "load_config_file"]
