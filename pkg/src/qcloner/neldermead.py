"""From-scratch Nelder-Mead simplex minimizer for noisy angle-space objectives.

Coordinates are angles in degrees; the simplex-size metric wraps coordinate
differences modulo the half-wave-plate period (180 degrees) so equivalent
settings count as close.  Classical transform coefficients, greedy
expansion, and strict-inequality acceptance rules throughout.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

Objective = Callable[[np.ndarray], float]
TraceSink = Callable[[np.ndarray, float, float], None]


class StepKind(enum.Enum):
    REFLECT = "reflect"
    EXPAND = "expand"
    CONTRACT_OUTSIDE = "contract_outside"
    CONTRACT_INSIDE = "contract_inside"
    SHRINK = "shrink"


@dataclass
class OptimizerConfig:
    reflection: float = 1.0
    expansion: float = 2.0
    contraction: float = 0.5
    shrink: float = 0.5
    size_tolerance: float = 0.1
    max_evaluations: int = 200
    angle_period: Optional[float] = 180.0

    def __post_init__(self):
        if self.reflection <= 0:
            raise ValueError("reflection coefficient must be positive")
        if self.expansion <= 1:
            raise ValueError("expansion coefficient must exceed 1")
        if not 0 < self.contraction < 1:
            raise ValueError("contraction coefficient must lie in (0, 1)")
        if not 0 < self.shrink < 1:
            raise ValueError("shrink coefficient must lie in (0, 1)")
        if self.size_tolerance <= 0:
            raise ValueError("size tolerance must be positive")
        if self.max_evaluations < 1:
            raise ValueError("evaluation budget must be positive")


@dataclass
class Simplex:
    """N+1 vertices in N-dimensional angle space with cached objective values.

    Kept sorted by value (best first) once evaluated.
    """

    vertices: np.ndarray
    values: np.ndarray = field(default=None)

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[0] != v.shape[1] + 1:
            raise ValueError(f"need N+1 vertices of dimension N, got shape {v.shape}")
        self.vertices = v
        if self.values is None:
            self.values = np.full(v.shape[0], np.nan)
        else:
            self.values = np.asarray(self.values, dtype=float)
            if self.values.shape != (v.shape[0],):
                raise ValueError("one cached value per vertex required")

    @property
    def dim(self) -> int:
        return self.vertices.shape[1]

    def size(self, angle_period: Optional[float] = 180.0) -> float:
        """Maximum pairwise vertex distance, coordinate differences wrapped
        into [-period/2, period/2) when a period is given."""
        m = self.vertices.shape[0]
        worst = 0.0
        for i in range(m):
            for j in range(i + 1, m):
                d = self.vertices[i] - self.vertices[j]
                if angle_period is not None:
                    half = angle_period / 2.0
                    d = (d + half) % angle_period - half
                worst = max(worst, float(np.linalg.norm(d)))
        return worst

    def sort(self):
        order = np.argsort(self.values, kind="stable")
        self.vertices = self.vertices[order]
        self.values = self.values[order]


@dataclass
class MinimizeResult:
    x: np.ndarray
    fun: float
    nfev: int
    converged: bool
    simplex: Simplex


class _Evaluator:
    """Counts objective calls, screens non-finite values, feeds the sink."""

    def __init__(self, objective: Objective, simplex: Simplex, config: OptimizerConfig,
                 sink: Optional[TraceSink]):
        self.objective = objective
        self.simplex = simplex
        self.config = config
        self.sink = sink
        self.nfev = 0

    def __call__(self, point: np.ndarray) -> float:
        value = float(self.objective(np.array(point, copy=True)))
        if not np.isfinite(value):
            raise ValueError(f"objective returned non-finite value {value!r} at {point!r}")
        self.nfev += 1
        if self.sink is not None:
            self.sink(np.array(point, copy=True), value,
                      self.simplex.size(self.config.angle_period))
        return value


def _ensure_evaluated(simplex: Simplex, evaluate: _Evaluator):
    for i in range(simplex.vertices.shape[0]):
        if np.isnan(simplex.values[i]):
            simplex.values[i] = evaluate(simplex.vertices[i])
    simplex.sort()


def step(simplex: Simplex, objective: Objective, config: OptimizerConfig = None,
         sink: Optional[TraceSink] = None, _evaluate: _Evaluator = None) -> tuple[Simplex, StepKind]:
    """One Nelder-Mead iteration on a fully evaluated simplex.

    Candidate points are evaluated before the simplex is touched, so an
    objective failure leaves it intact.
    """
    config = config or OptimizerConfig()
    evaluate = _evaluate or _Evaluator(objective, simplex, config, sink)
    if np.isnan(simplex.values).any():
        raise ValueError("all simplex vertices need cached values; call run() or evaluate first")
    simplex.sort()

    alpha, gamma, rho, sigma = (config.reflection, config.expansion,
                                config.contraction, config.shrink)
    worst = simplex.vertices[-1]
    centroid = simplex.vertices[:-1].mean(axis=0)

    reflected = centroid + alpha * (centroid - worst)
    f_reflected = evaluate(reflected)

    if f_reflected < simplex.values[0]:
        expanded = centroid + alpha * gamma * (centroid - worst)
        f_expanded = evaluate(expanded)
        if f_expanded < f_reflected:
            _replace_worst(simplex, expanded, f_expanded)
            return simplex, StepKind.EXPAND
        _replace_worst(simplex, reflected, f_reflected)
        return simplex, StepKind.REFLECT

    if f_reflected < simplex.values[-2]:
        _replace_worst(simplex, reflected, f_reflected)
        return simplex, StepKind.REFLECT

    if f_reflected < simplex.values[-1]:
        contracted = centroid + rho * alpha * (centroid - worst)
        f_contracted = evaluate(contracted)
        if f_contracted <= f_reflected:
            _replace_worst(simplex, contracted, f_contracted)
            return simplex, StepKind.CONTRACT_OUTSIDE
    else:
        contracted = centroid - rho * (centroid - worst)
        f_contracted = evaluate(contracted)
        if f_contracted < simplex.values[-1]:
            _replace_worst(simplex, contracted, f_contracted)
            return simplex, StepKind.CONTRACT_INSIDE

    best = simplex.vertices[0]
    shrunk = [best + sigma * (v - best) for v in simplex.vertices[1:]]
    shrunk_values = [evaluate(p) for p in shrunk]
    simplex.vertices[1:] = shrunk
    simplex.values[1:] = shrunk_values
    simplex.sort()
    return simplex, StepKind.SHRINK


def _replace_worst(simplex: Simplex, point: np.ndarray, value: float):
    simplex.vertices[-1] = point
    simplex.values[-1] = value
    simplex.sort()


def run(simplex: Simplex, objective: Objective, config: OptimizerConfig = None,
        sink: Optional[TraceSink] = None) -> MinimizeResult:
    """Iterate until the simplex collapses below the size tolerance or the
    evaluation budget runs out.  Unevaluated initial vertices are charged to
    the budget and emitted to the sink like any other evaluation."""
    config = config or OptimizerConfig()
    evaluate = _Evaluator(objective, simplex, config, sink)
    _ensure_evaluated(simplex, evaluate)

    converged = False
    while True:
        if simplex.size(config.angle_period) < config.size_tolerance:
            converged = True
            break
        if evaluate.nfev >= config.max_evaluations:
            break
        step(simplex, objective, config, _evaluate=evaluate)

    return MinimizeResult(
        x=np.array(simplex.vertices[0], copy=True),
        fun=float(simplex.values[0]),
        nfev=evaluate.nfev,
        converged=converged,
        simplex=simplex,
    )
