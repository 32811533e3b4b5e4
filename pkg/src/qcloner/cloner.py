"""Measurement model: post-selected coincidences, fidelities, shot noise.

After the gate, only events with exactly one photon per output spatial mode
are kept.  Each output photon is projected onto the signal state or its
orthogonal complement, giving four coincidence rates from which both clone
fidelities follow.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .optics import (
    GateParams,
    PolarizationQubit,
    build_scattering_matrix,
    evolve,
    prepare_input,
)
from .validation import check_rng


class PostSelectionError(ValueError):
    """No coincidence probability left to normalize on."""


class EmptySampleError(ValueError):
    """Coincidence counts sum to zero."""


class FidelityPair(NamedTuple):
    f1: float
    f2: float


@dataclass(frozen=True)
class CoincidenceCounts:
    """Projected coincidence tallies; indices are (clone 1, clone 2) with
    'p' for the signal-state projection and 'o' for its orthogonal."""

    cc_pp: int
    cc_po: int
    cc_op: int
    cc_oo: int

    def __post_init__(self):
        for name in ("cc_pp", "cc_po", "cc_op", "cc_oo"):
            value = getattr(self, name)
            if value < 0:
                raise ValueError(f"{name} must be non-negative, got {value}")

    @property
    def sigma(self) -> int:
        return self.cc_pp + self.cc_po + self.cc_op + self.cc_oo


def _coincidence_state(params: GateParams, eta: float) -> np.ndarray:
    u = build_scattering_matrix(params.phi, params.theta)
    out = evolve(prepare_input(eta, params.omega), u)
    return out.coincidence_amplitudes()


def _projection_vectors(eta: float) -> tuple[np.ndarray, np.ndarray]:
    signal = PolarizationQubit.equatorial(eta)
    return signal.as_vector(), signal.orthogonal().as_vector()


def coincidence_probabilities(params: GateParams, eta: float) -> tuple[float, float, float, float]:
    """Absolute probabilities (p_pp, p_po, p_op, p_oo) of the four projected
    coincidence events.  Not normalized: their sum is the total coincidence
    probability, at most 1."""
    state = _coincidence_state(params, eta)
    par, perp = _projection_vectors(eta)
    probs = []
    for v1 in (par, perp):
        for v2 in (par, perp):
            amp = np.kron(v1, v2).conj() @ state
            probs.append(float(abs(amp) ** 2))
    return tuple(probs)


def _fidelities_from_rates(pp: float, po: float, op: float, oo: float) -> FidelityPair:
    sigma = pp + po + op + oo
    if sigma <= 0.0:
        raise PostSelectionError("total coincidence probability is zero")
    return FidelityPair((pp + po) / sigma, (pp + op) / sigma)


def exact_fidelities(params: GateParams, eta: float) -> FidelityPair:
    """Clone fidelities from exact projected probabilities."""
    return _fidelities_from_rates(*coincidence_probabilities(params, eta))


def post_selected_density_matrix(params: GateParams, eta: float) -> np.ndarray:
    """Normalized two-qubit polarization density matrix of the post-selected
    output, basis order (HH, HV, VH, VV)."""
    state = _coincidence_state(params, eta)
    p_cc = float(np.sum(np.abs(state) ** 2))
    if p_cc <= 0.0:
        raise PostSelectionError("total coincidence probability is zero")
    return np.outer(state, state.conj()) / p_cc


def reduced_density_matrices(params: GateParams, eta: float) -> tuple[np.ndarray, np.ndarray]:
    """Single-clone density matrices by partial trace over the other clone."""
    rho = post_selected_density_matrix(params, eta).reshape(2, 2, 2, 2)
    rho1 = np.einsum("ikjk->ij", rho)
    rho2 = np.einsum("kikj->ij", rho)
    return rho1, rho2


def fidelities_via_density_matrix(params: GateParams, eta: float) -> FidelityPair:
    """Clone fidelities as overlaps <psi_s| rho_j |psi_s> with the reduced
    clone states; an independent route to the same quantities."""
    rho1, rho2 = reduced_density_matrices(params, eta)
    par, _ = _projection_vectors(eta)
    f1 = float(np.real(par.conj() @ rho1 @ par))
    f2 = float(np.real(par.conj() @ rho2 @ par))
    return FidelityPair(f1, f2)


def sample_counts(params: GateParams, eta: float, mean_total: float, rng) -> CoincidenceCounts:
    """Draw Poisson coincidence counts for the four projection settings.

    Each setting is sampled independently with mean proportional to its
    post-selected probability, normalized so the expected total is
    `mean_total`.  Deterministic for a given generator state.
    """
    if mean_total <= 0:
        raise ValueError("mean_total must be positive")
    generator = check_rng(rng)
    pp, po, op, oo = coincidence_probabilities(params, eta)
    p_cc = pp + po + op + oo
    if p_cc <= 0.0:
        raise PostSelectionError("total coincidence probability is zero")
    means = [mean_total * p / p_cc for p in (pp, po, op, oo)]
    draws = [int(generator.poisson(m)) for m in means]
    return CoincidenceCounts(*draws)


def estimate_fidelities(counts: CoincidenceCounts) -> FidelityPair:
    """Clone fidelities from raw coincidence counts."""
    sigma = counts.sigma
    if sigma <= 0:
        raise EmptySampleError("cannot estimate fidelities from zero counts")
    return FidelityPair(
        (counts.cc_pp + counts.cc_po) / sigma,
        (counts.cc_pp + counts.cc_op) / sigma,
    )
