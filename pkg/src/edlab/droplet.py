"""Kink, antikink, and droplet states of the anisotropic chain.

For q in (0, 1) the kink state on an interval of m sites with n down spins
weights each configuration by q raised to the sum, over down-spin
positions, of the distance to the right interval end (so the down spins
pile up on the right); the antikink mirrors this toward the left end.
These are exact zero modes of the chain Hamiltonian with (+, -) and
(-, +) boundary fields at strength A(delta).

A droplet state centered at a cut x glues a kink on sites 1..x holding
floor(n/2) down spins to an antikink on sites x+1..L holding ceil(n/2):
the n down spins cluster around x. The span of all L-n+1 centers is the
droplet subspace; its distance to the span of the lowest L-n+1
eigenvectors of the (+, +) chain is the quantity the multiplet report
measures, together with the width of the eigenvalue cluster around
A(delta) and the gap above it (reference value 1 - 1/delta).
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _kernels
from .basis import SpinBasisSector, enumerate_sector
from .eigensolve import (SubspaceBasis, full_spectrum, lowest_k,
                         orthonormalize, projection_distance)
from .operators import (boundary_field_amplitude, build_chain_hamiltonian,
                        make_anisotropy_from_delta)


class RankDeficiencyError(ValueError):
    """Droplet vectors failed to span the expected dimension."""

    def __init__(self, message, gram_eigenvalues):
        super().__init__(message)
        self.gram_eigenvalues = np.asarray(gram_eigenvalues)


def _interval_states(length: int, n_down: int) -> np.ndarray:
    if length == 0:
        if n_down != 0:
            raise ValueError("down spins on an empty interval")
        return np.zeros(1, dtype=np.int64)
    return _kernels.sector_states(length, n_down)


def kink_amplitudes(length: int, n_down: int, q: float,
                    toward_left: bool = False):
    """Unnormalized kink amplitudes over the (length, n_down) sector.

    Returns (states, amplitudes) aligned arrays. The amplitude of a
    configuration is q ** sum over its down positions p (0-based from the
    interval's left end) of (length - p); with ``toward_left`` the weight
    per down position is (p + 1) instead, giving the antikink.
    """
    states = _interval_states(length, n_down)
    exps = np.zeros(states.shape[0], dtype=np.int64)
    for p in range(length):
        weight = (p + 1) if toward_left else (length - p)
        exps += (((states >> np.int64(p)) & 1) * weight).astype(np.int64)
    return states, np.power(q, exps.astype(float))


def _validate_interval(a: int, b: int, n_down: int, q: float) -> int:
    if a > b:
        raise ValueError(f"empty interval [{a}, {b}]")
    length = b - a + 1
    if not 0 <= n_down <= length:
        raise ValueError(
            f"down count {n_down} outside [0, {length}] on [{a}, {b}]"
        )
    if not 0.0 < q < 1.0:
        raise ValueError(f"q must lie in (0, 1), got {q}")
    return length


def kink_state(a: int, b: int, n_down: int, q: float) -> np.ndarray:
    """Unit-normalized kink state on sites [a, b] in its sector basis."""
    length = _validate_interval(a, b, n_down, q)
    _, amps = kink_amplitudes(length, n_down, q)
    return amps / np.linalg.norm(amps)


def antikink_state(a: int, b: int, n_down: int, q: float) -> np.ndarray:
    """Unit-normalized antikink state on sites [a, b] in its sector basis."""
    length = _validate_interval(a, b, n_down, q)
    _, amps = kink_amplitudes(length, n_down, q, toward_left=True)
    return amps / np.linalg.norm(amps)


def droplet_centers(site_count: int, down_count: int) -> range:
    """Admissible droplet centers: floor(n/2) <= x <= L - ceil(n/2)."""
    n_left = down_count // 2
    n_right = down_count - n_left
    return range(n_left, site_count - n_right + 1)


def _droplet_raw(sector: SpinBasisSector, x: int, q: float) -> np.ndarray:
    """Unnormalized droplet vector centered at x, in the sector basis."""
    L, n = sector.site_count, sector.down_count
    n_left = n // 2
    n_right = n - n_left
    left_states, left_amps = kink_amplitudes(x, n_left, q)
    right_states, right_amps = kink_amplitudes(L - x, n_right, q,
                                               toward_left=True)
    configs = (left_states[:, np.newaxis]
               | (right_states[np.newaxis, :] << np.int64(x))).ravel()
    amps = (left_amps[:, np.newaxis] * right_amps[np.newaxis, :]).ravel()
    vec = np.zeros(sector.dim)
    vec[np.searchsorted(sector.states, configs)] = amps
    return vec


def droplet_state(site_count: int, down_count: int, x: int,
                  q: float) -> np.ndarray:
    """Unit-normalized droplet state centered at x in the (L, n) sector."""
    if not 0 <= down_count <= site_count:
        raise ValueError(
            f"down count {down_count} outside [0, {site_count}]"
        )
    if not 0.0 < q < 1.0:
        raise ValueError(f"q must lie in (0, 1), got {q}")
    centers = droplet_centers(site_count, down_count)
    if x not in centers:
        raise ValueError(
            f"center {x} outside admissible range "
            f"[{centers.start}, {centers.stop - 1}] for "
            f"(L, n) = ({site_count}, {down_count})"
        )
    sector = enumerate_sector(site_count, down_count)
    raw = _droplet_raw(sector, x, q)
    return raw / np.linalg.norm(raw)


@dataclass(frozen=True)
class DropletFamily:
    """All droplet vectors of one sector and a basis of their span.

    For n >= 1 the L-n+1 raw vectors are linearly independent and the
    basis rank equals the number of centers; for n = 0 every center gives
    the same all-up state and the span is one-dimensional.
    """

    site_count: int
    down_count: int
    q: float
    centers: tuple
    raw_vectors: tuple
    basis: SubspaceBasis


def droplet_subspace(site_count: int, down_count: int, q: float,
                     rank_tol: float = 1e-10) -> DropletFamily:
    """Droplet vectors for every admissible center plus their span basis.

    Raises RankDeficiencyError (with the Gram spectrum of the normalized
    vectors attached) if the detected rank differs from the expected
    span dimension.
    """
    if not 0 <= down_count <= site_count:
        raise ValueError(
            f"down count {down_count} outside [0, {site_count}]"
        )
    if not 0.0 < q < 1.0:
        raise ValueError(f"q must lie in (0, 1), got {q}")
    sector = enumerate_sector(site_count, down_count)
    centers = tuple(droplet_centers(site_count, down_count))
    raws = [_droplet_raw(sector, x, q) for x in centers]
    normalized = [v / np.linalg.norm(v) for v in raws]
    basis = orthonormalize(normalized, rank_tol=rank_tol)
    expected = len(centers) if down_count >= 1 else 1
    if basis.rank != expected:
        stack = np.array(normalized)
        gram = stack @ stack.T
        raise RankDeficiencyError(
            f"droplet span of (L, n) = ({site_count}, {down_count}) has "
            f"rank {basis.rank}, expected {expected}",
            np.linalg.eigvalsh(gram))
    return DropletFamily(site_count, down_count, q, centers,
                         tuple(raws), basis)


@dataclass
class DropletMultipletReport:
    """Measured droplet-multiplet properties of one (L, n, delta) sector."""

    site_count: int
    down_count: int
    delta: float
    multiplet_size: int
    window_halfwidth: float
    gap_value: Optional[float]
    subspace_distance: float
    gap_reference: float
    degenerate_cut: bool
    method: str
    low_eigenvalues: tuple

    def to_dict(self) -> dict:
        return {
            "L": self.site_count,
            "n": self.down_count,
            "delta": self.delta,
            "multiplet_size": self.multiplet_size,
            "window_halfwidth": self.window_halfwidth,
            "gap_value": self.gap_value,
            "subspace_distance": self.subspace_distance,
            "gap_reference": self.gap_reference,
            "degenerate_cut": self.degenerate_cut,
            "method": self.method,
            "low_eigenvalues": list(self.low_eigenvalues),
        }


def droplet_multiplet_report(site_count: int, down_count: int, delta: float,
                             dense_cap: int = 4096, tol: float = 1e-10,
                             max_iter: int = 20000,
                             seed: int = 0) -> DropletMultipletReport:
    """Measure the droplet multiplet of one sector of the (+, +) chain.

    Reports the half-width of the eigenvalue window around A(delta) over
    the lowest L-n+1 eigenvalues, the gap of the next eigenvalue above
    A(delta) (None when the sector is too small to have one), and the
    projection distance between the droplet span and the span of the
    lowest L-n+1 eigenvectors. Dense diagonalization below `dense_cap`,
    otherwise the iterative solver with L-n+2 requested pairs.
    """
    L, n = site_count, down_count
    aniso = make_anisotropy_from_delta(delta)
    amp = boundary_field_amplitude(delta)
    sector = enumerate_sector(L, n)
    op = build_chain_hamiltonian(L, delta, +1, +1, sector)
    m_want = min(L - n + 1, sector.dim)
    k_need = min(L - n + 2, sector.dim)
    if sector.dim <= dense_cap:
        res = full_spectrum(op, want_vectors=True, dense_cap=dense_cap)
    else:
        res = lowest_k(op, k_need, tol=tol, max_iter=max_iter, seed=seed)
    window = float(np.max(np.abs(res.eigenvalues[:m_want] - amp)))
    gap = None
    if sector.dim >= L - n + 2:
        gap = float(res.eigenvalues[L - n + 1] - amp)
    degenerate = sector.dim > m_want and res.is_degenerate_cut(m_want)
    family = droplet_subspace(L, n, aniso.q)
    spectral = SubspaceBasis(res.eigenvectors[:, :m_want])
    distance = projection_distance(family.basis, spectral)
    return DropletMultipletReport(
        site_count=L,
        down_count=n,
        delta=delta,
        multiplet_size=L - n + 1,
        window_halfwidth=window,
        gap_value=gap,
        subspace_distance=distance,
        gap_reference=1.0 - 1.0 / delta,
        degenerate_cut=bool(degenerate),
        method=res.method,
        low_eigenvalues=tuple(float(v) for v in res.eigenvalues[:k_need]),
    )


def kink_annihilation_check(site_count: int, down_count: int,
                            delta: float) -> float:
    """Norm of the (+, -) chain Hamiltonian applied to the kink state.

    Zero (to rounding) for every sector: the kink states are exact zero
    modes under the (+, -) boundary-field convention used by the builder,
    which makes this check the arbiter of the boundary-sign convention.
    """
    if site_count < 2:
        raise ValueError(f"chain needs at least 2 sites, got {site_count}")
    sector = enumerate_sector(site_count, down_count)
    op = build_chain_hamiltonian(site_count, delta, +1, -1, sector)
    q = make_anisotropy_from_delta(delta).q
    vec = kink_state(1, site_count, down_count, q)
    return float(np.linalg.norm(op.matvec(vec)))
