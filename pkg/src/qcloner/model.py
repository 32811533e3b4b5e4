"""Training harness: cost function, online learning loop, test sets, scans.

The trainable gate is exposed as a scikit-learn style estimator.  Training
is an online reinforcement loop: every cost evaluation draws a fresh random
equatorial signal phase, measures (exactly or with shot noise) both clone
fidelities at the proposed angles, and feeds the scalar cost back to the
simplex optimizer.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from sklearn.base import BaseEstimator

from . import neldermead
from .cloner import (
    FidelityPair,
    estimate_fidelities,
    exact_fidelities,
    sample_counts,
)
from .optics import GateParams
from .validation import check_rng

#: Fidelity of the optimal symmetric phase-covariant cloner.
OPTIMAL_FIDELITY = 0.5 * (1.0 + 1.0 / math.sqrt(2.0))

#: Half-wave-plate angles are equivalent modulo 180 degrees.
ANGLE_PERIOD_DEG = 180.0

TRACE_COLUMNS = ("run", "phi_deg", "theta_deg", "omega_deg", "eta_rad",
                 "f1", "f2", "cost", "simplex_size_deg")

#: Trivial-cloning start (balanced splitter) with 10-degree simplex edges.
DEFAULT_SIMPLEX_TWO_PARAM = ((22.5, 22.5), (32.5, 22.5), (22.5, 32.5))
DEFAULT_SIMPLEX_THREE_PARAM = ((22.5, 22.5, 22.5), (32.5, 22.5, 22.5),
                               (22.5, 32.5, 22.5), (22.5, 22.5, 32.5))

DEFAULT_BUDGET = {"exact": 200, "shot": 120}


def cost(fidelities) -> float:
    """Squared shortfall of both clones plus a symmetry penalty."""
    f1, f2 = fidelities
    return (1.0 - f1) ** 2 + (1.0 - f2) ** 2 + (f1 - f2) ** 2


@dataclass
class TraceRecord:
    run: int
    phi_deg: float
    theta_deg: float
    omega_deg: float
    eta_rad: float
    f1: float
    f2: float
    cost: float
    simplex_size_deg: float

    def as_row(self) -> list:
        return [self.run, self.phi_deg, self.theta_deg, self.omega_deg,
                self.eta_rad, self.f1, self.f2, self.cost, self.simplex_size_deg]


@dataclass
class LearningTrace:
    """Ordered record of every objective evaluation of a training run."""

    runs: list = field(default_factory=list)
    best_params_deg: tuple = None
    best_cost: float = None
    converged: bool = False
    evaluations: int = 0

    def append(self, record: TraceRecord):
        self.runs.append(record)

    def write_csv(self, path):
        """Deterministic CSV serialization (repr floats, LF newlines)."""
        with open(path, "w", newline="\n") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(TRACE_COLUMNS)
            for record in self.runs:
                writer.writerow([_fmt(v) for v in record.as_row()])


def _fmt(value):
    if isinstance(value, int):
        return value
    return repr(float(value))


def _default_simplex(model: int):
    return DEFAULT_SIMPLEX_TWO_PARAM if model == 1 else DEFAULT_SIMPLEX_THREE_PARAM


class PhaseCovariantCloner(BaseEstimator):
    """Learned linear-optical 1->2 cloner for equatorial qubits.

    Parameters
    ----------
    model : int
        1 trains the two splitter angles with the ancilla fixed at
        `fixed_omega_deg`; 2 also trains the ancilla angle.
    fixed_omega_deg : float
        Ancilla half-wave-plate angle used by model 1.  The default 0
        (horizontal ancilla) is one of the two equivalent optimal
        eigen-ancillas of the simulated gate.
    noise : str
        "exact" evaluates fidelities analytically, "shot" estimates them
        from Poisson-sampled coincidence counts.
    mean_counts : float
        Expected total coincidences per evaluation in shot mode.
    seed : int
        Seeds the signal-phase draws and the count sampling.
    initial_simplex_deg : sequence of vertices or None
        Starting simplex in degrees; None selects the trivial-cloning
        default for the chosen model.
    max_evaluations : int or None
        Objective-call budget; None selects 200 (exact) or 120 (shot).

    Attributes (after fit)
    ----------------------
    phi_deg_, theta_deg_, omega_deg_ : learned angles in degrees.
    trace_ : LearningTrace of every evaluation.
    converged_ : whether the simplex shrank below `size_tolerance_deg`.
    n_evaluations_ : objective calls consumed.
    best_cost_ : objective value at the returned point.
    """

    def __init__(self, model: int = 2, fixed_omega_deg: float = 0.0,
                 noise: str = "exact", mean_counts: float = 400.0, seed: int = 0,
                 initial_simplex_deg: Optional[Sequence] = None,
                 size_tolerance_deg: float = 0.1,
                 max_evaluations: Optional[int] = None,
                 reflection: float = 1.0, expansion: float = 2.0,
                 contraction: float = 0.5, shrink: float = 0.5,
                 test_set_size: int = 40):
        self.model = model
        self.fixed_omega_deg = fixed_omega_deg
        self.noise = noise
        self.mean_counts = mean_counts
        self.seed = seed
        self.initial_simplex_deg = initial_simplex_deg
        self.size_tolerance_deg = size_tolerance_deg
        self.max_evaluations = max_evaluations
        self.reflection = reflection
        self.expansion = expansion
        self.contraction = contraction
        self.shrink = shrink
        self.test_set_size = test_set_size

    def _validate(self):
        if self.model not in (1, 2):
            raise ValueError("model must be 1 (two angles) or 2 (three angles)")
        if self.noise not in ("exact", "shot"):
            raise ValueError("noise must be 'exact' or 'shot'")
        ndim = 2 if self.model == 1 else 3
        simplex = (self.initial_simplex_deg if self.initial_simplex_deg is not None
                   else _default_simplex(self.model))
        vertices = np.asarray(simplex, dtype=float)
        if vertices.shape != (ndim + 1, ndim):
            raise ValueError(
                f"model {self.model} needs {ndim + 1} simplex vertices of "
                f"dimension {ndim}, got shape {vertices.shape}")
        return vertices

    def _point_to_params(self, point) -> GateParams:
        if self.model == 1:
            return GateParams.from_degrees(point[0], point[1], self.fixed_omega_deg)
        return GateParams.from_degrees(point[0], point[1], point[2])

    def _measure(self, params: GateParams, eta: float, rng) -> FidelityPair:
        if self.noise == "exact":
            return exact_fidelities(params, eta)
        counts = sample_counts(params, eta, self.mean_counts, rng)
        return estimate_fidelities(counts)

    def fit(self, X=None, y=None):
        """Run the online training loop.  X and y are ignored; training
        instances are generated internally."""
        vertices = self._validate()
        rng = np.random.default_rng(self.seed)
        trace = LearningTrace()
        pending = []

        def objective(point):
            eta = float(rng.uniform(0.0, 2.0 * math.pi))
            params = self._point_to_params(point)
            fid = self._measure(params, eta, rng)
            value = cost(fid)
            pending.append((params, eta, fid, value))
            return value

        def sink(point, value, simplex_size):
            params, eta, fid, c = pending.pop(0)
            phi_deg, theta_deg, omega_deg = params.to_degrees()
            trace.append(TraceRecord(
                run=len(trace.runs) + 1,
                phi_deg=phi_deg, theta_deg=theta_deg, omega_deg=omega_deg,
                eta_rad=eta, f1=fid.f1, f2=fid.f2, cost=c,
                simplex_size_deg=simplex_size,
            ))

        config = neldermead.OptimizerConfig(
            reflection=self.reflection, expansion=self.expansion,
            contraction=self.contraction, shrink=self.shrink,
            size_tolerance=self.size_tolerance_deg,
            max_evaluations=self.max_evaluations or DEFAULT_BUDGET[self.noise],
            angle_period=ANGLE_PERIOD_DEG,
        )
        result = neldermead.run(neldermead.Simplex(vertices), objective, config, sink)

        best = self._point_to_params(result.x)
        self.phi_deg_, self.theta_deg_, self.omega_deg_ = best.to_degrees()
        self.gate_params_ = best
        trace.best_params_deg = (self.phi_deg_, self.theta_deg_, self.omega_deg_)
        trace.best_cost = result.fun
        trace.converged = result.converged
        trace.evaluations = result.nfev
        self.trace_ = trace
        self.converged_ = result.converged
        self.n_evaluations_ = result.nfev
        self.best_cost_ = result.fun
        self._rng = rng
        return self

    def predict(self, eta) -> np.ndarray:
        """Exact clone fidelities at the learned angles, one (f1, f2) row
        per signal phase in `eta` (radians)."""
        self._check_fitted()
        etas = np.atleast_1d(np.asarray(eta, dtype=float))
        out = np.empty((etas.size, 2))
        for i, e in enumerate(etas):
            out[i] = exact_fidelities(self.gate_params_, float(e))
        return out

    def evaluate(self, n_instances: Optional[int] = None, rng=None) -> dict:
        """Test-set performance at the learned angles under `self.noise`."""
        self._check_fitted()
        if rng is None:
            rng = np.random.default_rng((self.seed, 1))
        return evaluate_test_set(
            self.gate_params_, noise=self.noise, mean_counts=self.mean_counts,
            n_instances=n_instances or self.test_set_size, rng=rng)

    def score(self, X=None, y=None) -> float:
        """Mean clone fidelity on a fresh test set (higher is better)."""
        result = self.evaluate()
        return 0.5 * (result["mean_f1"] + result["mean_f2"])

    def _check_fitted(self):
        if not hasattr(self, "gate_params_"):
            raise RuntimeError("this estimator has not been fitted; call fit() first")


def evaluate_test_set(params: GateParams, *, noise: str = "exact",
                      mean_counts: float = 400.0, n_instances: int = 40,
                      rng=None) -> dict:
    """Fidelity statistics over freshly drawn random equatorial states.

    Returns sample means and standard deviations per clone; a single-instance
    test set reports std 0 by convention and is flagged degenerate.
    """
    if n_instances < 1:
        raise ValueError("test set needs at least one instance")
    generator = check_rng(rng if rng is not None else np.random.default_rng(0))
    f1s, f2s = [], []
    for _ in range(n_instances):
        eta = float(generator.uniform(0.0, 2.0 * math.pi))
        if noise == "exact":
            fid = exact_fidelities(params, eta)
        elif noise == "shot":
            fid = estimate_fidelities(sample_counts(params, eta, mean_counts, generator))
        else:
            raise ValueError("noise must be 'exact' or 'shot'")
        f1s.append(fid.f1)
        f2s.append(fid.f2)
    degenerate = n_instances == 1
    return {
        "n_instances": n_instances,
        "mean_f1": float(np.mean(f1s)),
        "std_f1": 0.0 if degenerate else float(np.std(f1s, ddof=1)),
        "mean_f2": float(np.mean(f2s)),
        "std_f2": 0.0 if degenerate else float(np.std(f2s, ddof=1)),
        "degenerate_std": degenerate,
    }


@dataclass
class ScanResult:
    """Cost (and fidelity) grids over splitter angles at fixed ancilla."""

    phi_deg: np.ndarray
    theta_deg: np.ndarray
    cost: np.ndarray
    f1: np.ndarray
    f2: np.ndarray
    omega_deg: float

    @property
    def min_cost(self) -> float:
        return float(self.cost.min())

    @property
    def argmin_deg(self) -> tuple[float, float]:
        i, j = np.unravel_index(int(np.argmin(self.cost)), self.cost.shape)
        return float(self.phi_deg[i]), float(self.theta_deg[j])

    @property
    def max_min_fidelity(self) -> float:
        return float(np.minimum(self.f1, self.f2).max())

    @property
    def argmax_fidelity_deg(self) -> tuple[float, float]:
        i, j = np.unravel_index(int(np.argmin(-np.minimum(self.f1, self.f2))),
                                self.cost.shape)
        return float(self.phi_deg[i]), float(self.theta_deg[j])


def _is_eigen_ancilla(omega_deg: float, tol: float = 1e-9) -> bool:
    """Ancilla is |H> or |V> when the half-wave-plate angle is a multiple
    of 45 degrees."""
    return min(abs(math.sin(2 * math.radians(omega_deg))),
               abs(math.cos(2 * math.radians(omega_deg)))) < tol


_COINC_PAIRS = ((0, 2), (0, 3), (1, 2), (1, 3))  # (mode-1, mode-2) index pairs


def _coincidence_transfer(u: np.ndarray) -> np.ndarray:
    """Two-photon transfer between coincidence configurations for a stack of
    mode matrices u of shape (..., 4, 4).  Equal to the 2x2 permanents of the
    corresponding submatrices (all modes distinct, so no factorial factors)."""
    out = np.empty(u.shape[:-2] + (4, 4), dtype=np.complex128)
    for oi, (j1, j2) in enumerate(_COINC_PAIRS):
        for ii, (i1, i2) in enumerate(_COINC_PAIRS):
            out[..., oi, ii] = u[..., j1, i1] * u[..., j2, i2] + u[..., j1, i2] * u[..., j2, i1]
    return out


def _grid_fidelities(phi_rad: np.ndarray, theta_rad: np.ndarray,
                     omega_rad: float, eta: float) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized exact fidelities over a (phi, theta) mesh."""
    c = np.cos(2 * phi_rad)[:, None]
    s = np.sin(2 * phi_rad)[:, None]
    cv = np.cos(2 * theta_rad)[None, :]
    sv = np.sin(2 * theta_rad)[None, :]
    shape = np.broadcast_shapes(c.shape, cv.shape)
    u = np.zeros(shape + (4, 4), dtype=np.complex128)
    u[..., 0, 0] = c
    u[..., 0, 2] = s
    u[..., 2, 0] = -s
    u[..., 2, 2] = c
    u[..., 1, 1] = cv
    u[..., 1, 3] = sv
    u[..., 3, 1] = -sv
    u[..., 3, 3] = cv

    transfer = _coincidence_transfer(u)
    a, b = math.cos(2 * omega_rad), math.sin(2 * omega_rad)
    e = np.exp(1j * eta)
    vin = np.array([a, a * e, b, b * e], dtype=np.complex128) / math.sqrt(2)
    state = transfer @ vin

    par = np.array([1.0, e]) / math.sqrt(2)
    perp = np.array([1.0, -e]) / math.sqrt(2)
    projectors = np.stack([np.kron(v1, v2).conj()
                           for v1 in (par, perp) for v2 in (par, perp)])
    probs = np.abs(np.einsum("pi,...i->...p", projectors, state)) ** 2
    sigma = probs.sum(axis=-1)
    f1 = (probs[..., 0] + probs[..., 1]) / sigma
    f2 = (probs[..., 0] + probs[..., 2]) / sigma
    return f1, f2


def scan_landscape(phi_deg, theta_deg, omega_deg: float = 0.0,
                   eta_samples: int = 16) -> ScanResult:
    """Exact cost over a (phi, theta) grid at a fixed ancilla angle.

    For a non-eigenstate ancilla the cost depends on the signal phase and is
    averaged over `eta_samples` uniformly spaced phases; eigen-ancillas are
    phase covariant and evaluated once.
    """
    phi = np.asarray(phi_deg, dtype=float)
    theta = np.asarray(theta_deg, dtype=float)
    if phi.size < 2 or theta.size < 2:
        raise ValueError("grid needs at least 2 points per axis")
    if eta_samples < 1:
        raise ValueError("eta_samples must be positive")
    etas = ([0.0] if _is_eigen_ancilla(omega_deg)
            else list(np.linspace(0.0, 2.0 * math.pi, eta_samples, endpoint=False)))

    phi_rad = np.radians(phi)
    theta_rad = np.radians(theta)
    omega_rad = math.radians(omega_deg)
    cost_acc = np.zeros((phi.size, theta.size))
    f1_acc = np.zeros_like(cost_acc)
    f2_acc = np.zeros_like(cost_acc)
    for eta in etas:
        f1, f2 = _grid_fidelities(phi_rad, theta_rad, omega_rad, eta)
        cost_acc += (1 - f1) ** 2 + (1 - f2) ** 2 + (f1 - f2) ** 2
        f1_acc += f1
        f2_acc += f2
    n = len(etas)
    return ScanResult(phi_deg=phi, theta_deg=theta, cost=cost_acc / n,
                      f1=f1_acc / n, f2=f2_acc / n, omega_deg=float(omega_deg))
