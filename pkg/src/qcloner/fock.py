"""Mode bookkeeping and permanent-based multi-photon transition amplitudes.

Optical modes carry a polarization (H or V) and a spatial index.  The
canonical flat ordering interleaves polarization within each spatial mode:
(H,1), (V,1), (H,2), (V,2), ...  All multi-photon amplitudes reduce to
matrix permanents of row/column-repeated submatrices of the single-photon
mode transformation.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .validation import check_square

PERMANENT_SIZE_LIMIT = 24

POLARIZATIONS = ("H", "V")


class PhotonConservationError(ValueError):
    """Input and output occupations carry different photon numbers."""


@dataclass(frozen=True)
class ModeLabel:
    """A single optical mode: polarization times spatial path."""

    polarization: str
    spatial: int

    def __post_init__(self):
        if self.polarization not in POLARIZATIONS:
            raise ValueError(f"polarization must be one of {POLARIZATIONS}")
        if self.spatial < 1:
            raise ValueError("spatial index starts at 1")

    @property
    def index(self) -> int:
        """Canonical flat index: (H,1)=0, (V,1)=1, (H,2)=2, (V,2)=3, ..."""
        return 2 * (self.spatial - 1) + POLARIZATIONS.index(self.polarization)

    @classmethod
    def from_index(cls, index: int) -> "ModeLabel":
        if index < 0:
            raise ValueError("mode index must be non-negative")
        return cls(POLARIZATIONS[index % 2], index // 2 + 1)


#: The four modes of the two-spatial-mode gate, in canonical order.
GATE_MODES = tuple(ModeLabel.from_index(i) for i in range(4))


@dataclass(frozen=True)
class FockConfig:
    """Occupation numbers, one per mode in canonical order."""

    occupations: tuple[int, ...]

    def __post_init__(self):
        occ = tuple(int(n) for n in self.occupations)
        if any(n < 0 for n in occ):
            raise ValueError("occupation numbers must be non-negative")
        object.__setattr__(self, "occupations", occ)

    @property
    def n_modes(self) -> int:
        return len(self.occupations)

    @property
    def total_photons(self) -> int:
        return sum(self.occupations)

    def __iter__(self):
        return iter(self.occupations)


def enumerate_fock_configs(n_modes: int, n_photons: int) -> list[FockConfig]:
    """All occupation vectors of `n_photons` photons over `n_modes` modes."""
    configs = []
    for placement in itertools.combinations_with_replacement(range(n_modes), n_photons):
        occ = [0] * n_modes
        for mode in placement:
            occ[mode] += 1
        configs.append(FockConfig(tuple(occ)))
    return configs


def permanent(m) -> complex:
    """Permanent of a square complex matrix via Ryser's formula.

    Gray-code subset enumeration keeps the per-step update O(n), for an
    overall O(2^n * n) cost.  Sizes above PERMANENT_SIZE_LIMIT are refused
    to bound runtime.
    """
    a = check_square(m)
    n = a.shape[0]
    if n > PERMANENT_SIZE_LIMIT:
        raise ValueError(f"matrix size {n} exceeds the limit of {PERMANENT_SIZE_LIMIT}")
    if n == 0:
        return complex(1.0)
    if n == 1:
        return complex(a[0, 0])

    # Ryser: Perm(A) = (-1)^n sum_{S != {}} (-1)^{|S|} prod_i sum_{j in S} a_ij.
    # Plain Python scalars beat numpy calls at these sizes.
    columns = [[complex(a[i, j]) for i in range(n)] for j in range(n)]
    sums = [0j] * n
    total = 0j
    subset_sign = 1  # starts at |S| = 0; flipped before each term
    gray = 0
    for k in range(1, 1 << n):
        bit = k & -k
        j = bit.bit_length() - 1
        gray ^= bit
        col = columns[j]
        if gray & bit:
            for i in range(n):
                sums[i] += col[i]
        else:
            for i in range(n):
                sums[i] -= col[i]
        subset_sign = -subset_sign
        term = 1 + 0j
        for s in sums:
            term *= s
        total += subset_sign * term
    if n % 2:
        total = -total
    return complex(total)


def amplitude_submatrix(u, input_config: FockConfig, output_config: FockConfig) -> np.ndarray:
    """Build the N x N matrix whose permanent gives the transition amplitude.

    Column i of the mode matrix is repeated input_config[i] times and row j
    output_config[j] times; unoccupied rows/columns drop out.
    """
    a = check_square(u)
    n_in = input_config.total_photons
    n_out = output_config.total_photons
    if n_in != n_out:
        raise PhotonConservationError(
            f"photon number mismatch: input {n_in}, output {n_out}"
        )
    if input_config.n_modes != a.shape[0] or output_config.n_modes != a.shape[0]:
        raise ValueError("occupation vectors must match the matrix mode count")
    cols = [i for i, n in enumerate(input_config) for _ in range(n)]
    rows = [j for j, n in enumerate(output_config) for _ in range(n)]
    return a[np.ix_(rows, cols)]


def transition_amplitude(u, input_config: FockConfig, output_config: FockConfig) -> complex:
    """Amplitude <output|U|input> for photons scattering through mode matrix u.

    Equals Perm(submatrix) normalized by sqrt of the factorials of the
    mode occupations on both sides.
    """
    sub = amplitude_submatrix(u, input_config, output_config)
    norm = 1.0
    for n in input_config:
        norm *= math.factorial(n)
    for n in output_config:
        norm *= math.factorial(n)
    return permanent(sub) / math.sqrt(norm)
