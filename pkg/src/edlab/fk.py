"""Spinless electrons hopping through a classical ion background.

Per ion configuration W (0/1 per site) the electrons are free fermions
with one-body matrix h = -(adjacency) + 2U diag(W): many-body ground
energies are filled-level sums and the grand-canonical free energy is a
closed form over the levels. The staggered variable
s_x = (-1)**|x| (2 W(x) - 1) (|x| = coordinate-sum parity) turns the two
checkerboard ion arrangements into the two uniform s = +/-1 states, which
is the language used by the sampler's boundary pinning.

Everything here is half-filled and neutral by default: ions = electrons =
half the sites, and mu = U is the particle-hole symmetric chemical
potential that keeps the average electron filling at 1/2 for every ion
configuration on a bipartite lattice.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _kernels
from .lattice import LatticeSpec

#: Dense one-body diagonalization cap.
MAX_FK_SITES = 4096

#: Exhaustive half-filled enumeration cap (binomial(20, 10) = 184756).
MAX_ENUM_SITES = 20

#: Metropolis lattice cap (8 x 8 x 8).
MAX_MC_SITES = 512


@dataclass(frozen=True)
class IonConfiguration:
    """A 0/1 ion occupancy on a lattice, with derived staggered spins."""

    lattice: LatticeSpec
    occupancy: np.ndarray

    def __post_init__(self):
        occ = np.asarray(self.occupancy, dtype=np.uint8)
        if occ.shape != (self.lattice.n_sites,):
            raise ValueError(
                f"occupancy has shape {occ.shape}, lattice has "
                f"{self.lattice.n_sites} sites"
            )
        if np.any(occ > 1):
            raise ValueError("occupancy values must be 0 or 1")
        occ.setflags(write=False)
        object.__setattr__(self, "occupancy", occ)

    @property
    def ion_count(self) -> int:
        return int(self.occupancy.sum())

    def staggered_spins(self) -> np.ndarray:
        """s_x = (-1)**|x| (2 W(x) - 1), recomputed from the occupancy."""
        return self.lattice.parities * (2 * self.occupancy.astype(np.int64) - 1)

    @classmethod
    def checkerboard(cls, lattice: LatticeSpec,
                     sublattice: int = 1) -> "IonConfiguration":
        """Ions on one coordinate-parity sublattice (+1: even, -1: odd)."""
        if sublattice not in (-1, 1):
            raise ValueError(f"sublattice must be +/-1, got {sublattice}")
        occ = (lattice.parities == sublattice).astype(np.uint8)
        return cls(lattice, occ)

    @classmethod
    def from_spins(cls, lattice: LatticeSpec, spins) -> "IonConfiguration":
        """Occupancy with the given staggered spins: W = (1 + s*(-1)**|x|)/2."""
        s = np.asarray(spins, dtype=np.int64)
        if set(np.unique(s)) - {-1, 1}:
            raise ValueError("spins must be +/-1")
        occ = ((1 + s * lattice.parities) // 2).astype(np.uint8)
        return cls(lattice, occ)

    def hop(self, src: int, dst: int) -> "IonConfiguration":
        """Move one ion from an occupied site to a vacant site."""
        if not self.occupancy[src]:
            raise ValueError(f"site {src} holds no ion")
        if self.occupancy[dst]:
            raise ValueError(f"site {dst} is already occupied")
        occ = self.occupancy.copy()
        occ[src], occ[dst] = 0, 1
        return IonConfiguration(self.lattice, occ)


def one_body_matrix(config: IonConfiguration, coupling: float) -> np.ndarray:
    """Dense symmetric h with h[x][y] = -1 per edge, h[x][x] = 2U W(x)."""
    n = config.lattice.n_sites
    if n > MAX_FK_SITES:
        raise ValueError(f"{n} sites exceeds the dense cap {MAX_FK_SITES}")
    h = np.zeros((n, n))
    for (i, j) in config.lattice.edges:
        h[i, j] = -1.0
        h[j, i] = -1.0
    h[np.arange(n), np.arange(n)] = 2.0 * coupling * config.occupancy
    return h


def single_particle_levels(config: IonConfiguration,
                           coupling: float) -> np.ndarray:
    """Ascending eigenvalues of the one-body matrix."""
    return np.linalg.eigvalsh(one_body_matrix(config, coupling))


@dataclass(frozen=True)
class FreeFermionResult:
    """Single-particle levels of one ion configuration, plus energy sums."""

    levels: np.ndarray
    coupling: float
    electron_count: int

    def ground_energy_at(self, n_electrons: int) -> float:
        if not 0 <= n_electrons <= self.levels.shape[0]:
            raise ValueError(
                f"electron count {n_electrons} outside "
                f"[0, {self.levels.shape[0]}]"
            )
        return float(self.levels[:n_electrons].sum())

    @property
    def ground_energy(self) -> float:
        return self.ground_energy_at(self.electron_count)

    def free_energy(self, beta: float, mu: float) -> float:
        return _levels_free_energy(self.levels, beta, mu)


def solve_free_fermions(config: IonConfiguration, coupling: float,
                        n_electrons: Optional[int] = None) -> FreeFermionResult:
    """Levels and default electron count (half filling unless given)."""
    levels = single_particle_levels(config, coupling)
    if n_electrons is None:
        n_electrons = config.lattice.n_sites // 2
    if not 0 <= n_electrons <= config.lattice.n_sites:
        raise ValueError(
            f"electron count {n_electrons} outside "
            f"[0, {config.lattice.n_sites}]"
        )
    return FreeFermionResult(levels, coupling, n_electrons)


def electron_ground_energy(config: IonConfiguration, coupling: float,
                           n_electrons: int) -> float:
    """Sum of the n lowest one-body levels (free-fermion ground energy)."""
    if not 0 <= n_electrons <= config.lattice.n_sites:
        raise ValueError(
            f"electron count {n_electrons} outside "
            f"[0, {config.lattice.n_sites}]"
        )
    levels = single_particle_levels(config, coupling)
    return float(levels[:n_electrons].sum())


def _levels_free_energy(levels: np.ndarray, beta: float, mu: float) -> float:
    # -1/beta sum_i log(1 + exp(-beta (e_i - mu))); logaddexp keeps the
    # large-beta branch max(0, mu - e_i) overflow-safe.
    return float(-np.sum(np.logaddexp(0.0, -beta * (levels - mu))) / beta)


def electron_free_energy(config: IonConfiguration, coupling: float,
                         beta: float, mu: float) -> float:
    """Grand-canonical free energy of the electrons at (beta, mu)."""
    if beta <= 0:
        raise ValueError(f"beta must be positive, got {beta}")
    return _levels_free_energy(single_particle_levels(config, coupling),
                               beta, mu)


@dataclass
class CheckerboardReport:
    """Exhaustive half-filled ground-energy scan over ion configurations."""

    coupling: float
    n_sites: int
    n_configurations: int
    min_energy: float
    argmin_states: tuple          # ion bitmasks within the tie tolerance
    argmin_is_checkerboards: bool
    checkerboard_energy_split: float
    gap_to_next: Optional[float]

    def to_dict(self) -> dict:
        return {
            "U": self.coupling,
            "n_sites": self.n_sites,
            "n_configurations": self.n_configurations,
            "min_energy": self.min_energy,
            "argmin_states": [int(s) for s in self.argmin_states],
            "argmin_is_checkerboards": self.argmin_is_checkerboards,
            "checkerboard_energy_split": self.checkerboard_energy_split,
            "gap_to_next": self.gap_to_next,
        }


def _occupancy_bits(states: np.ndarray, n_sites: int) -> np.ndarray:
    bits = (states[:, np.newaxis] >> np.arange(n_sites, dtype=np.int64)) & 1
    return bits.astype(np.float64)


def checkerboard_check(lattice: LatticeSpec, coupling: float,
                       tie_tol: float = 1e-12,
                       batch: int = 2048) -> CheckerboardReport:
    """Scan every neutral ion configuration for the ground-energy argmin.

    Enumerates all binomial(N, N/2) half-filled configurations, computes
    the half-filled electron ground energy of each, and reports the full
    set within `tie_tol` of the minimum together with whether that set is
    exactly the two checkerboards. Ties beyond the checkerboards are
    reported, never dropped.
    """
    n = lattice.n_sites
    if coupling <= 0:
        raise ValueError(f"coupling must be positive, got {coupling}")
    if n % 2:
        raise ValueError(f"need an even site count, got {n}")
    if n > MAX_ENUM_SITES:
        raise ValueError(
            f"{n} sites exceeds the enumeration cap {MAX_ENUM_SITES}"
        )
    if not lattice.is_bipartite():
        raise ValueError("lattice is not bipartite under coordinate parity")
    half = n // 2
    states = _kernels.sector_states(n, half)
    hop = np.zeros((n, n))
    for (i, j) in lattice.edges:
        hop[i, j] = -1.0
        hop[j, i] = -1.0
    energies = np.empty(states.shape[0])
    for lo in range(0, states.shape[0], batch):
        chunk = states[lo:lo + batch]
        occ = _occupancy_bits(chunk, n)
        h = np.broadcast_to(hop, (chunk.shape[0], n, n)).copy()
        h[:, np.arange(n), np.arange(n)] = 2.0 * coupling * occ
        levels = np.linalg.eigvalsh(h)
        energies[lo:lo + chunk.shape[0]] = levels[:, :half].sum(axis=1)
    e_min = float(energies.min())
    argmin_mask = energies <= e_min + tie_tol
    argmin_states = tuple(int(s) for s in states[argmin_mask])

    parities = lattice.parities
    boards = []
    for sub in (1, -1):
        occ = (parities == sub).astype(np.int64)
        boards.append(int(np.sum(occ << np.arange(n, dtype=np.int64))))
    board_idx = np.searchsorted(states, np.sort(boards))
    board_energies = energies[board_idx]
    above = energies[~argmin_mask]
    return CheckerboardReport(
        coupling=coupling,
        n_sites=n,
        n_configurations=int(states.shape[0]),
        min_energy=e_min,
        argmin_states=argmin_states,
        argmin_is_checkerboards=set(argmin_states) == set(boards),
        checkerboard_energy_split=float(abs(board_energies[0]
                                            - board_energies[1])),
        gap_to_next=float(above.min() - e_min) if above.size else None,
    )


@dataclass
class CouplingEstimate:
    """Leading staggered-spin coupling from one ion-hop energy cost.

    The estimator hops one ion from the checkerboard to a neighboring
    vacancy, which flips the two adjacent staggered spins, and divides the
    electron ground-energy cost by twice the number of edges leaving the
    flipped pair (the count of frustrated effective bonds, each worth 2J).
    """

    j_est: float
    energy_cost: float
    pair_coordination: int
    flipped_sites: tuple
    warning: Optional[str]

    def to_dict(self) -> dict:
        return {
            "j_est": self.j_est,
            "energy_cost": self.energy_cost,
            "pair_coordination": self.pair_coordination,
            "flipped_sites": list(self.flipped_sites),
            "warning": self.warning,
        }


def effective_coupling_estimate(lattice: LatticeSpec,
                                coupling: float) -> CouplingEstimate:
    """Estimate the nearest-neighbor coupling of the staggered spins.

    The estimate approaches 1/(4U) from the exact electron problem as U
    grows; corrections enter at relative order 1/U**2. The flip protocol
    is fixed: the occupied site with the smallest index hops to its
    vacant neighbor with the smallest index.
    """
    if coupling < 2:
        raise ValueError(
            f"estimator needs coupling >= 2, got {coupling}"
        )
    if not lattice.is_bipartite():
        raise ValueError("lattice is not bipartite under coordinate parity")
    base = IonConfiguration.checkerboard(lattice, 1)
    occupied = np.nonzero(base.occupancy)[0]
    src = int(occupied[0])
    neighbors = sorted(
        j if i == src else i
        for (i, j) in lattice.edges if src in (i, j)
    )
    vacant = [s for s in neighbors if not base.occupancy[s]]
    if not vacant:
        raise ValueError(f"site {src} has no vacant neighbor")
    dst = int(vacant[0])
    hopped = base.hop(src, dst)
    half = lattice.n_sites // 2
    cost = (electron_ground_energy(hopped, coupling, half)
            - electron_ground_energy(base, coupling, half))
    pair = {src, dst}
    z_pair = sum(1 for (i, j) in lattice.edges
                 if (i in pair) != (j in pair))
    warning = None
    if lattice.extents is not None and min(lattice.extents) < 4:
        warning = ("lattice has under 4 sites along some direction; "
                   "the hopped pair is not bulk-like")
    return CouplingEstimate(
        j_est=cost / (2.0 * z_pair),
        energy_cost=float(cost),
        pair_coordination=z_pair,
        flipped_sites=(src, dst),
        warning=warning,
    )


def _default_plane_threshold(lattice: LatticeSpec) -> float:
    if lattice.extents is None:
        raise ValueError("lattice has no extents; pass a threshold")
    return sum(e - 1 for e in lattice.extents) / 2.0


def plane_split_spins(lattice: LatticeSpec,
                      threshold: Optional[float] = None) -> np.ndarray:
    """Staggered spins +/-1 by coordinate-sum side of a diagonal plane.

    Default threshold is the midpoint of the coordinate-sum range; sums
    above or equal map to +1.
    """
    if threshold is None:
        threshold = _default_plane_threshold(lattice)
    sums = np.array([sum(c) for c in lattice.sites])
    return np.where(sums >= threshold, 1, -1).astype(np.int64)


def plane_boundary_pinning(lattice: LatticeSpec,
                           threshold: Optional[float] = None) -> dict:
    """Boundary pinning map emulating diagonal-interface conditions."""
    spins = plane_split_spins(lattice, threshold)
    return {idx: int(spins[idx]) for idx in lattice.boundary_sites()}


def neutral_plane_configuration(lattice: LatticeSpec,
                                threshold: Optional[float] = None,
                                pinning: Optional[dict] = None) -> IonConfiguration:
    """Neutral occupancy close to a plane-split staggered-spin profile.

    Starts from the plane-side spins (overridden by any pinning), then
    restores neutrality by flipping unpinned spins nearest the plane,
    smallest site index first.
    """
    if threshold is None:
        threshold = _default_plane_threshold(lattice)
    spins = plane_split_spins(lattice, threshold).copy()
    pinning = dict(pinning or {})
    for idx, val in pinning.items():
        spins[idx] = val
    config = IonConfiguration.from_spins(lattice, spins)
    occ = config.occupancy.copy()
    target = lattice.n_sites // 2
    excess = int(occ.sum()) - target
    if excess != 0:
        sums = np.array([sum(c) for c in lattice.sites], dtype=float)
        order = sorted(
            (i for i in range(lattice.n_sites) if i not in pinning),
            key=lambda i: (abs(sums[i] - threshold), i))
        want = 1 if excess < 0 else 0
        for idx in order:
            if excess == 0:
                break
            if occ[idx] != want:
                occ[idx] = want
                excess += 1 if want else -1
        if excess != 0:
            raise ValueError(
                "cannot reach neutrality with the given pinning"
            )
    return IonConfiguration(lattice, occ)


@dataclass
class MetropolisResult:
    """Time-averaged staggered spins from one seeded Metropolis chain."""

    mean_spins: np.ndarray
    stderr_spins: np.ndarray
    acceptance_rate: float
    steps: int
    coupling: float
    beta: float
    mu: float
    seed: int
    pinned_sites: tuple
    final_occupancy: np.ndarray


def metropolis_ions(lattice: LatticeSpec, coupling: float, beta: float,
                    steps: int, seed: int, mu: Optional[float] = None,
                    boundary_pinning: Optional[dict] = None,
                    initial: Optional[IonConfiguration] = None,
                    n_batches: int = 20) -> MetropolisResult:
    """Sample neutral ion configurations with ion/vacancy swap proposals.

    The configuration weight is exp(-beta * F) with F the electron free
    energy at (beta, mu); mu defaults to the particle-hole symmetric value
    U. `boundary_pinning` freezes staggered spins on boundary sites (their
    ions never move). beta = 0 runs the accept-all limit without touching
    the electron problem. Per-site standard errors come from `n_batches`
    batch means. Deterministic for a fixed seed.
    """
    n = lattice.n_sites
    if n > MAX_MC_SITES:
        raise ValueError(f"{n} sites exceeds the sampler cap {MAX_MC_SITES}")
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")
    if beta < 0:
        raise ValueError(f"beta must be >= 0, got {beta}")
    if mu is None:
        mu = coupling
    pinning = dict(boundary_pinning or {})
    if pinning:
        allowed = set(lattice.boundary_sites())
        bad = sorted(set(pinning) - allowed)
        if bad:
            raise ValueError(f"pinned sites {bad} are not boundary sites")
        if set(np.unique(list(pinning.values()))) - {-1, 1}:
            raise ValueError("pinned values must be +/-1")
    if initial is None:
        if pinning:
            config = neutral_plane_configuration(lattice, pinning=pinning)
        else:
            config = IonConfiguration.checkerboard(lattice, 1)
    else:
        if initial.lattice is not lattice and initial.lattice != lattice:
            raise ValueError("initial configuration uses a different lattice")
        config = initial
    if config.ion_count != n // 2:
        raise ValueError(
            f"initial configuration has {config.ion_count} ions, "
            f"needs {n // 2}"
        )
    spins = config.staggered_spins()
    for idx, val in pinning.items():
        if spins[idx] != val:
            raise ValueError(
                f"initial configuration violates pinning at site {idx}"
            )

    rng = np.random.default_rng(seed)
    occ = config.occupancy.astype(np.int64).copy()
    parities = lattice.parities
    free_sites = np.array([i for i in range(n) if i not in pinning],
                          dtype=np.int64)
    ion_list = [int(i) for i in free_sites if occ[i] == 1]
    vac_list = [int(i) for i in free_sites if occ[i] == 0]
    ion_pos = {s: i for i, s in enumerate(ion_list)}
    vac_pos = {s: i for i, s in enumerate(vac_list)}

    current_f = None
    if beta > 0:
        current_f = _levels_free_energy(
            np.linalg.eigvalsh(_one_body_from_occ(lattice, occ, coupling)),
            beta, mu)

    s_sum = np.zeros(n)
    n_batches = max(1, min(n_batches, steps))
    batch_edges = np.linspace(0, steps, n_batches + 1).astype(int)
    batch_means = np.zeros((n_batches, n))
    batch_start = np.zeros(n)
    batch_idx = 0
    accepted = 0
    movable = bool(ion_list) and bool(vac_list)

    for step in range(steps):
        if movable:
            src = ion_list[int(rng.integers(len(ion_list)))]
            dst = vac_list[int(rng.integers(len(vac_list)))]
            occ[src], occ[dst] = 0, 1
            if beta == 0.0:
                accept = True
            else:
                new_f = _levels_free_energy(
                    np.linalg.eigvalsh(
                        _one_body_from_occ(lattice, occ, coupling)),
                    beta, mu)
                delta_f = new_f - current_f
                accept = delta_f <= 0 or rng.random() < math.exp(-beta * delta_f)
            if accept:
                if beta > 0.0:
                    current_f = new_f
                a, b = ion_pos.pop(src), vac_pos.pop(dst)
                ion_list[a] = dst
                vac_list[b] = src
                ion_pos[dst] = a
                vac_pos[src] = b
                accepted += 1
            else:
                occ[src], occ[dst] = 1, 0
        s_sum += parities * (2 * occ - 1)
        if step + 1 == batch_edges[batch_idx + 1]:
            span = batch_edges[batch_idx + 1] - batch_edges[batch_idx]
            batch_means[batch_idx] = (s_sum - batch_start) / span
            batch_start = s_sum.copy()
            batch_idx += 1

    mean = s_sum / steps
    if n_batches > 1:
        stderr = batch_means.std(axis=0, ddof=1) / math.sqrt(n_batches)
    else:
        stderr = np.zeros(n)
    return MetropolisResult(
        mean_spins=mean,
        stderr_spins=stderr,
        acceptance_rate=accepted / steps,
        steps=steps,
        coupling=coupling,
        beta=beta,
        mu=mu,
        seed=seed,
        pinned_sites=tuple(sorted(pinning)),
        final_occupancy=occ.astype(np.uint8),
    )


def _one_body_from_occ(lattice: LatticeSpec, occ: np.ndarray,
                       coupling: float) -> np.ndarray:
    n = lattice.n_sites
    h = np.zeros((n, n))
    for (i, j) in lattice.edges:
        h[i, j] = -1.0
        h[j, i] = -1.0
    h[np.arange(n), np.arange(n)] = 2.0 * coupling * occ
    return h
