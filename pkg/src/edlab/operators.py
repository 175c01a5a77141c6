"""Sector-restricted XXZ Hamiltonians as sparse symmetric matrices.

The chain Hamiltonian on sites 1..L with anisotropy Delta > 1 is

    H = -sum_{x=1}^{L-1} [ (1/Delta)(S1_x S1_{x+1} + S2_x S2_{x+1})
                           + (S3_x S3_{x+1} - 1/4) ]
        - A(Delta) (left_sign * S3_1 + right_sign * S3_L)

with A(Delta) = sqrt(1 - Delta**-2) / 2. In a fixed-magnetization basis
the matrix elements are: -1/(2 Delta) between configurations that differ
by one exchange of an adjacent up-down pair, and on the diagonal +1/2 per
anti-aligned bond plus the boundary-field term. The lattice builder is the
same bond algebra on an arbitrary nearest-neighbor graph with per-site S^3
fields; the -1/4 bond constant is included by default so a fully aligned
region costs zero energy, and can be disabled for the bare S3 S3 coupling.
"""

import io
import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from . import _kernels
from .basis import SpinBasisSector
from .lattice import LatticeSpec


@dataclass(frozen=True)
class AnisotropyParam:
    """Ising-like anisotropy Delta > 1 and its parameter q in (0, 1)."""

    delta: float
    q: float

    def __post_init__(self):
        recon = (self.q + 1.0 / self.q) / 2.0
        if not math.isfinite(recon) or abs(recon - self.delta) > 1e-12 * abs(self.delta):
            raise ValueError(
                f"inconsistent pair delta={self.delta}, q={self.q}: "
                f"(q + 1/q)/2 = {recon}"
            )

    @classmethod
    def from_q(cls, q: float) -> "AnisotropyParam":
        if not 0.0 < q < 1.0:
            raise ValueError(f"q must lie in (0, 1), got {q}")
        return cls((q + 1.0 / q) / 2.0, q)


def make_anisotropy_from_delta(delta: float) -> AnisotropyParam:
    """The (delta, q) pair with q = delta - sqrt(delta**2 - 1) in (0, 1)."""
    if delta <= 1.0:
        raise ValueError(
            f"delta must exceed 1 (Ising-like regime), got {delta}"
        )
    q = delta - math.sqrt(delta * delta - 1.0)
    return AnisotropyParam(delta, q)


def boundary_field_amplitude(delta: float) -> float:
    """Field strength A(delta) = sqrt(1 - delta**-2) / 2.

    This is the boundary-field magnitude at which the kink and antikink
    states become exact zero modes, and the energy of the one-droplet
    multiplet.
    """
    if delta <= 1.0:
        raise ValueError(
            f"delta must exceed 1 (Ising-like regime), got {delta}"
        )
    return 0.5 * math.sqrt(1.0 - 1.0 / (delta * delta))


@dataclass(frozen=True)
class SparseOperator:
    """Real symmetric CSR matrix restricted to one magnetization sector."""

    matrix: sp.csr_matrix
    sector_tag: tuple

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def nnz(self) -> int:
        return self.matrix.nnz

    def matvec(self, x: np.ndarray) -> np.ndarray:
        m = self.matrix
        return _kernels.csr_matvec(m.indptr, m.indices, m.data, x)

    def to_dense(self) -> np.ndarray:
        return self.matrix.toarray()

    def to_triplet_text(self) -> str:
        """Plain-text triplet form: 'dim nnz' then 'row col value' lines.

        Entries appear in row-major order with 17 significant digits,
        which round-trips 64-bit floats exactly.
        """
        m = self.matrix.tocoo()
        buf = io.StringIO()
        buf.write(f"{self.dim} {m.nnz}\n")
        for r, c, v in zip(m.row, m.col, m.data):
            buf.write(f"{r} {c} {v:.17g}\n")
        return buf.getvalue()

    @staticmethod
    def from_triplet_text(text: str, sector_tag=(0, 0)) -> "SparseOperator":
        lines = text.strip().splitlines()
        dim, nnz = (int(t) for t in lines[0].split())
        rows = np.empty(nnz, dtype=np.int64)
        cols = np.empty(nnz, dtype=np.int64)
        vals = np.empty(nnz)
        for k, line in enumerate(lines[1:1 + nnz]):
            r, c, v = line.split()
            rows[k], cols[k], vals[k] = int(r), int(c), float(v)
        return _operator_from_triplets(dim, rows, cols, vals, sector_tag)


def _operator_from_triplets(dim, rows, cols, vals, sector_tag) -> SparseOperator:
    mat = sp.coo_matrix((vals, (rows, cols)), shape=(dim, dim)).tocsr()
    mat.sort_indices()
    return SparseOperator(mat, tuple(sector_tag))


def build_chain_hamiltonian(site_count: int, delta: float, left_sign: int,
                            right_sign: int,
                            sector: SpinBasisSector) -> SparseOperator:
    """Open-chain Hamiltonian with +/- boundary fields on one sector.

    ``left_sign``/``right_sign`` choose the sign in front of S^3 at the
    first and last site inside the boundary term -A(delta)(l*S3_1 + r*S3_L):
    (+1, +1) pins both ends up, (+1, -1) and (-1, +1) are the kink and
    antikink Hamiltonians, (-1, -1) pins both ends down.
    """
    if site_count < 2:
        raise ValueError(f"chain needs at least 2 sites, got {site_count}")
    if sector.site_count != site_count:
        raise ValueError(
            f"sector is for {sector.site_count} sites, chain has {site_count}"
        )
    if left_sign not in (-1, 1) or right_sign not in (-1, 1):
        raise ValueError(f"boundary signs must be +/-1, got "
                         f"({left_sign}, {right_sign})")
    amp = boundary_field_amplitude(delta)
    rows, cols, vals = _kernels.chain_triplets(
        sector.states, site_count, -1.0 / (2.0 * delta),
        -amp * left_sign, -amp * right_sign)
    return _operator_from_triplets(
        sector.dim, rows, cols, vals, (site_count, sector.down_count))


def build_lattice_hamiltonian(lattice: LatticeSpec, delta: float,
                              sector: SpinBasisSector,
                              include_bond_constant: bool = True) -> SparseOperator:
    """Nearest-neighbor XXZ Hamiltonian on a lattice graph, one sector.

    Each unordered edge is counted once. With ``include_bond_constant``
    the diagonal carries +1/2 per anti-aligned edge (aligned edges cost
    nothing); without it the bare -S3 S3 convention applies (-1/4 aligned,
    +1/4 anti-aligned). ``lattice.boundary_fields`` enters as
    +sum_x field(x) * S^3_x.
    """
    if delta <= 1.0:
        raise ValueError(f"delta must exceed 1, got {delta}")
    if sector.site_count != lattice.n_sites:
        raise ValueError(
            f"sector is for {sector.site_count} sites, lattice has "
            f"{lattice.n_sites}"
        )
    eu, ev = lattice.edge_arrays()
    if include_bond_constant:
        diag_aligned, diag_anti = 0.0, 0.5
    else:
        diag_aligned, diag_anti = -0.25, 0.25
    rows, cols, vals = _kernels.lattice_triplets(
        sector.states, lattice.n_sites, eu, ev, -1.0 / (2.0 * delta),
        diag_aligned, diag_anti, lattice.field_array())
    return _operator_from_triplets(
        sector.dim, rows, cols, vals,
        (lattice.n_sites, sector.down_count))
