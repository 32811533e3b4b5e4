"""Input validation helpers shared across the package."""

from __future__ import annotations

import numbers

import numpy as np

UNITARITY_TOL = 1e-12


def as_complex_matrix(m) -> np.ndarray:
    """Coerce input to a 2-D complex128 array without copying when possible."""
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got ndim={a.ndim}")
    return a


def check_square(m) -> np.ndarray:
    a = as_complex_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"matrix must be square, got shape {a.shape}")
    return a


def unitarity_defect(u) -> float:
    """Max-norm of U^dag U - I."""
    a = check_square(u)
    eye = np.eye(a.shape[0])
    return float(np.max(np.abs(a.conj().T @ a - eye)))


def is_unitary(u, tol: float = UNITARITY_TOL) -> bool:
    return unitarity_defect(u) <= tol


def check_unitary(u, tol: float = UNITARITY_TOL) -> np.ndarray:
    a = check_square(u)
    defect = unitarity_defect(a)
    if defect > tol:
        raise ValueError(f"matrix is not unitary (defect {defect:.3e} > {tol:.1e})")
    return a


def check_rng(rng) -> np.random.Generator:
    """Require an explicitly seeded generator; no global RNG fallback."""
    if isinstance(rng, np.random.Generator):
        return rng
    if isinstance(rng, numbers.Integral):
        return np.random.default_rng(int(rng))
    raise TypeError("rng must be a numpy Generator or an integer seed")
