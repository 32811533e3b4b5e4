"""The tunable polarization-dependent beam splitter and two-photon evolution.

The gate is a Mach-Zehnder-style four-mode transformation: horizontal
components of the two spatial modes mix with angle 2*phi, vertical
components with angle 2*theta.  Angles are half-wave-plate rotations,
radians internally, degrees only at I/O boundaries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fock import FockConfig, enumerate_fock_configs, transition_amplitude
from .validation import check_unitary

#: Canonical basis of two photons over the four gate modes:
#: six distinct-mode pairs plus four doubly occupied configurations.
TWO_PHOTON_BASIS: tuple[FockConfig, ...] = tuple(enumerate_fock_configs(4, 2))

_BASIS_INDEX = {cfg: i for i, cfg in enumerate(TWO_PHOTON_BASIS)}

#: Coincidence configurations (one photon per spatial mode) by polarization
#: pattern: (mode-1 pol, mode-2 pol) -> basis index.
COINCIDENCE_CONFIGS = {
    ("H", "H"): _BASIS_INDEX[FockConfig((1, 0, 1, 0))],
    ("H", "V"): _BASIS_INDEX[FockConfig((1, 0, 0, 1))],
    ("V", "H"): _BASIS_INDEX[FockConfig((0, 1, 1, 0))],
    ("V", "V"): _BASIS_INDEX[FockConfig((0, 1, 0, 1))],
}


@dataclass(frozen=True)
class PolarizationQubit:
    """Single-photon polarization state alpha|H> + beta|V>, unit norm."""

    alpha_h: complex
    beta_v: complex

    def __post_init__(self):
        norm = abs(self.alpha_h) ** 2 + abs(self.beta_v) ** 2
        if abs(norm - 1.0) > 1e-10:
            raise ValueError(f"amplitudes must be normalized, got |a|^2+|b|^2 = {norm}")

    @classmethod
    def equatorial(cls, eta: float) -> "PolarizationQubit":
        """(|H> + e^{i eta}|V>)/sqrt(2)."""
        return cls(1 / math.sqrt(2), np.exp(1j * eta) / math.sqrt(2))

    @classmethod
    def from_waveplate(cls, omega: float) -> "PolarizationQubit":
        """cos(2w)|H> + sin(2w)|V>: a horizontal photon behind a half-wave
        plate at angle w."""
        return cls(math.cos(2 * omega), math.sin(2 * omega))

    def orthogonal(self) -> "PolarizationQubit":
        return PolarizationQubit(-np.conj(self.beta_v), np.conj(self.alpha_h))

    def as_vector(self) -> np.ndarray:
        return np.array([self.alpha_h, self.beta_v], dtype=np.complex128)


@dataclass
class GateParams:
    """The three trainable gate angles, in radians.

    Half-wave-plate action has period pi, so angles compare modulo pi;
    raw values are kept so an optimizer sees a continuous parameter.
    """

    phi: float
    theta: float
    omega: float = 0.0

    @classmethod
    def from_degrees(cls, phi_deg: float, theta_deg: float, omega_deg: float = 0.0) -> "GateParams":
        return cls(math.radians(phi_deg), math.radians(theta_deg), math.radians(omega_deg))

    def to_degrees(self) -> tuple[float, float, float]:
        return (math.degrees(self.phi), math.degrees(self.theta), math.degrees(self.omega))

    def reduced(self) -> "GateParams":
        """Angles folded into [0, pi) for comparison purposes."""
        return GateParams(self.phi % math.pi, self.theta % math.pi, self.omega % math.pi)


def build_scattering_matrix(phi: float, theta: float) -> np.ndarray:
    """Four-mode scattering matrix of the gate in canonical mode order.

    Horizontal block rotates (H,1)-(H,2) by 2*phi, vertical block rotates
    (V,1)-(V,2) by 2*theta.  Real-valued and orthogonal for any angles.
    Angles are reduced modulo pi first so settings one half-wave-plate
    period apart produce bit-identical matrices.
    """
    phi = phi % math.pi
    theta = theta % math.pi
    c, s = math.cos(2 * phi), math.sin(2 * phi)
    cv, sv = math.cos(2 * theta), math.sin(2 * theta)
    return np.array(
        [
            [c, 0, s, 0],
            [0, cv, 0, sv],
            [-s, 0, c, 0],
            [0, -sv, 0, cv],
        ],
        dtype=np.complex128,
    )


def splitting_ratios(phi: float, theta: float) -> tuple[float, float]:
    """Intensity transmittances (t_H, t_V) for photons staying in their
    spatial mode: the cos^2 of the respective block angle."""
    return math.cos(2 * (phi % math.pi)) ** 2, math.cos(2 * (theta % math.pi)) ** 2


@dataclass
class TwoPhotonState:
    """Complex amplitudes over TWO_PHOTON_BASIS."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        if amps.shape != (len(TWO_PHOTON_BASIS),):
            raise ValueError(f"expected {len(TWO_PHOTON_BASIS)} amplitudes, got shape {amps.shape}")
        self.amplitudes = amps

    def norm(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2))

    def coincidence_amplitudes(self) -> np.ndarray:
        """Amplitudes on the four coincidence configurations, ordered
        (HH, HV, VH, VV) by (mode-1, mode-2) polarization."""
        idx = [
            COINCIDENCE_CONFIGS[("H", "H")],
            COINCIDENCE_CONFIGS[("H", "V")],
            COINCIDENCE_CONFIGS[("V", "H")],
            COINCIDENCE_CONFIGS[("V", "V")],
        ]
        return self.amplitudes[idx]


def prepare_input(eta: float, omega: float) -> TwoPhotonState:
    """Product state of ancilla (spatial mode 1) and signal (spatial mode 2).

    Ancilla: cos(2w)|H,1> + sin(2w)|V,1>.  Signal: (|H,2> + e^{i eta}|V,2>)/sqrt(2).
    """
    ancilla = PolarizationQubit.from_waveplate(omega).as_vector()
    signal = PolarizationQubit.equatorial(eta).as_vector()
    amps = np.zeros(len(TWO_PHOTON_BASIS), dtype=np.complex128)
    for anc_mode, a in zip((0, 1), ancilla):
        for sig_mode, s in zip((2, 3), signal):
            occ = [0, 0, 0, 0]
            occ[anc_mode] += 1
            occ[sig_mode] += 1
            amps[_BASIS_INDEX[FockConfig(tuple(occ))]] += a * s
    return TwoPhotonState(amps)


def evolve(state: TwoPhotonState, u) -> TwoPhotonState:
    """Propagate a two-photon state through mode matrix u.

    Output amplitudes follow from permanent-based transition amplitudes
    between all basis configurations; u must be unitary so the norm is
    preserved.
    """
    mat = check_unitary(u)
    out = np.zeros(len(TWO_PHOTON_BASIS), dtype=np.complex128)
    for s_idx, s_cfg in enumerate(TWO_PHOTON_BASIS):
        a_in = state.amplitudes[s_idx]
        if a_in == 0:
            continue
        for t_idx, t_cfg in enumerate(TWO_PHOTON_BASIS):
            out[t_idx] += a_in * transition_amplitude(mat, s_cfg, t_cfg)
    return TwoPhotonState(out)
