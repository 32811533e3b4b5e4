import json
import math
from pathlib import Path

import numpy as np
import pytest

from qcloner.neldermead import (
    MinimizeResult,
    OptimizerConfig,
    Simplex,
    StepKind,
    _Evaluator,
    _ensure_evaluated,
    run,
    step,
)

FIXTURE = Path(__file__).parent / "data" / "rosenbrock_nm_trace.json"


def rosenbrock(x):
    return float((1 - x[0]) ** 2 + 100.0 * (x[1] - x[0] ** 2) ** 2)


def free_config(**kw):
    kw.setdefault("angle_period", None)
    kw.setdefault("max_evaluations", 10_000)
    return OptimizerConfig(**kw)


def stepper(simplex, objective, config):
    evaluator = _Evaluator(objective, simplex, config, None)
    _ensure_evaluated(simplex, evaluator)
    return evaluator


class TestStep:
    def test_quadratic_converges_within_200_steps(self):
        objective = lambda x: float((x[0] - 1) ** 2 + (x[1] - 2) ** 2)
        simplex = Simplex(np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]))
        cfg = free_config()
        evaluator = stepper(simplex, objective, cfg)
        for _ in range(200):
            step(simplex, objective, cfg, _evaluate=evaluator)
        assert np.linalg.norm(simplex.vertices[0] - [1.0, 2.0]) <= 1e-4

    def test_constant_objective_contracts(self):
        objective = lambda x: 1.0
        simplex = Simplex(np.array([[0.0, 0.0], [4.0, 0.0], [0.0, 4.0]]))
        cfg = free_config()
        evaluator = stepper(simplex, objective, cfg)
        _, kind = step(simplex, objective, cfg, _evaluate=evaluator)
        assert kind in (StepKind.SHRINK, StepKind.CONTRACT_INSIDE, StepKind.CONTRACT_OUTSIDE)
        size = simplex.size(None)
        for _ in range(50):
            step(simplex, objective, cfg, _evaluate=evaluator)
            new_size = simplex.size(None)
            assert new_size <= size + 1e-12
            size = new_size

    def test_one_dimensional_path(self):
        objective = lambda x: float(abs(x[0] - 3.0))
        simplex = Simplex(np.array([[0.0], [1.0]]))
        result = run(simplex, objective, free_config(size_tolerance=1e-4, max_evaluations=500))
        assert result.converged
        assert result.x[0] == pytest.approx(3.0, abs=1e-3)

    def test_requires_evaluated_simplex(self):
        simplex = Simplex(np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]))
        with pytest.raises(ValueError):
            step(simplex, rosenbrock, free_config())

    def test_non_finite_objective_leaves_simplex_intact(self):
        calls = {"n": 0}

        def objective(x):
            calls["n"] += 1
            if calls["n"] > 3:
                return float("nan")
            return float(x[0] ** 2 + x[1] ** 2)

        simplex = Simplex(np.array([[1.0, 1.0], [2.0, 1.0], [1.0, 2.0]]))
        cfg = free_config()
        evaluator = stepper(simplex, objective, cfg)
        vertices = simplex.vertices.copy()
        values = simplex.values.copy()
        with pytest.raises(ValueError):
            step(simplex, objective, cfg, _evaluate=evaluator)
        assert np.array_equal(simplex.vertices, vertices)
        assert np.array_equal(simplex.values, values)


class TestReferenceTrace:
    def test_matches_independent_implementation(self):
        fixture = json.loads(FIXTURE.read_text())
        simplex = Simplex(np.asarray(fixture["initial_simplex"], dtype=float))
        cfg = free_config()
        evaluator = stepper(simplex, rosenbrock, cfg)
        for snapshot in fixture["iterations"]:
            step(simplex, rosenbrock, cfg, _evaluate=evaluator)
            assert np.max(np.abs(simplex.vertices - np.asarray(snapshot["vertices"]))) <= 1e-9
            assert np.max(np.abs(simplex.values - np.asarray(snapshot["values"]))) <= 1e-9


class TestRun:
    def test_rosenbrock(self):
        simplex = Simplex(np.array([[-1.2, 1.0], [-0.95, 1.0], [-1.2, 1.25]]))
        result = run(simplex, rosenbrock, free_config(size_tolerance=1e-5, max_evaluations=500))
        assert result.converged
        assert result.nfev <= 500
        assert np.linalg.norm(result.x - [1.0, 1.0]) <= 1e-3

    def test_best_value_non_increasing(self):
        simplex = Simplex(np.array([[-1.2, 1.0], [-0.95, 1.0], [-1.2, 1.25]]))
        cfg = free_config()
        evaluator = stepper(simplex, rosenbrock, cfg)
        best = simplex.values[0]
        for _ in range(60):
            step(simplex, rosenbrock, cfg, _evaluate=evaluator)
            assert simplex.values[0] <= best + 1e-15
            best = simplex.values[0]

    def test_never_reevaluates_cached_vertices(self):
        seen = []

        def objective(x):
            point = tuple(np.round(x, 12))
            assert point not in seen, "objective re-evaluated a cached vertex"
            seen.append(point)
            return rosenbrock(x)

        simplex = Simplex(np.array([[-1.2, 1.0], [-0.95, 1.0], [-1.2, 1.25]]))
        run(simplex, objective, free_config(size_tolerance=1e-3, max_evaluations=300))

    def test_evaluation_count_equals_sink_emissions(self):
        emissions = []
        simplex = Simplex(np.array([[-1.2, 1.0], [-0.95, 1.0], [-1.2, 1.25]]))
        result = run(simplex, rosenbrock,
                     free_config(size_tolerance=1e-4, max_evaluations=200),
                     sink=lambda point, value, size: emissions.append((point, value, size)))
        assert len(emissions) == result.nfev
        # emissions carry the evaluated values in call order
        assert emissions[0][1] == pytest.approx(rosenbrock(np.array([-1.2, 1.0])))

    def test_budget_exhaustion_flags_not_converged(self):
        simplex = Simplex(np.array([[-1.2, 1.0], [-0.95, 1.0], [-1.2, 1.25]]))
        result = run(simplex, rosenbrock, free_config(size_tolerance=1e-12, max_evaluations=20))
        assert isinstance(result, MinimizeResult)
        assert not result.converged
        assert result.nfev >= 20
        assert result.fun == pytest.approx(min(result.simplex.values))


class TestSimplexGeometry:
    def test_shape_validation(self):
        with pytest.raises(ValueError):
            Simplex(np.zeros((3, 3)))

    def test_wrapped_size_metric(self):
        simplex = Simplex(np.array([[0.0, 0.0], [179.9, 0.0], [0.0, 179.9]]))
        assert simplex.size(angle_period=180.0) == pytest.approx(0.1 * math.sqrt(2), abs=1e-9)
        assert simplex.size(angle_period=None) == pytest.approx(179.9 * math.sqrt(2), abs=1e-9)

    def test_values_follow_vertices_after_sort(self):
        simplex = Simplex(np.array([[1.0, 0.0], [0.0, 0.0], [0.0, 1.0]]),
                          values=np.array([3.0, 1.0, 2.0]))
        simplex.sort()
        assert np.array_equal(simplex.values, [1.0, 2.0, 3.0])
        assert np.array_equal(simplex.vertices[0], [0.0, 0.0])


class TestOptimizerConfig:
    @pytest.mark.parametrize("kw", [
        dict(reflection=0.0),
        dict(expansion=1.0),
        dict(contraction=0.0),
        dict(contraction=1.0),
        dict(shrink=1.0),
        dict(size_tolerance=0.0),
        dict(max_evaluations=0),
    ])
    def test_invalid_coefficients(self, kw):
        with pytest.raises(ValueError):
            OptimizerConfig(**kw)
