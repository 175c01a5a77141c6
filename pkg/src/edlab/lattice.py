"""Finite lattices with nearest-neighbor edges and optional site fields.

Sites carry integer coordinates in 1, 2, or 3 dimensions; edges join sites
at (torus) distance 1 and are stored once as index pairs (i, j) with i < j.
The same geometry serves the spin Hamiltonian builders (with S^3 fields)
and the ion/electron model (as a hopping graph).
"""

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class LatticeSpec:
    """A finite graph of integer-coordinate sites with distance-1 edges."""

    sites: tuple
    edges: tuple
    boundary_fields: dict = field(default_factory=dict)
    extents: tuple = None
    periodic: tuple = None

    def __post_init__(self):
        n = len(self.sites)
        if n == 0:
            raise ValueError("lattice needs at least one site")
        dims = {len(c) for c in self.sites}
        if len(dims) != 1:
            raise ValueError("sites have inconsistent coordinate dimensions")
        if len(set(self.sites)) != n:
            raise ValueError("duplicate site coordinates")
        seen = set()
        for (i, j) in self.edges:
            if not (0 <= i < n and 0 <= j < n):
                raise ValueError(f"edge ({i}, {j}) references a missing site")
            if i == j:
                raise ValueError(f"self-edge at site {i}")
            key = (min(i, j), max(i, j))
            if key in seen:
                raise ValueError(f"duplicate edge {key}")
            seen.add(key)
            if self._distance2(i, j) != 1:
                raise ValueError(
                    f"edge {key} joins sites at distance != 1: "
                    f"{self.sites[i]} -- {self.sites[j]}"
                )
        for s in self.boundary_fields:
            if not 0 <= s < n:
                raise ValueError(f"field on missing site index {s}")

    def _distance2(self, i: int, j: int) -> int:
        a, b = self.sites[i], self.sites[j]
        total = 0
        for axis in range(len(a)):
            d = abs(a[axis] - b[axis])
            if self.periodic is not None and self.periodic[axis]:
                d = min(d, self.extents[axis] - d)
            total += d * d
        return total

    @property
    def n_sites(self) -> int:
        return len(self.sites)

    @property
    def ndim(self) -> int:
        return len(self.sites[0])

    @property
    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.n_sites, dtype=np.int64)
        for (i, j) in self.edges:
            deg[i] += 1
            deg[j] += 1
        return deg

    @property
    def parities(self) -> np.ndarray:
        """(-1)**(sum of coordinates) per site."""
        return np.array([1 - 2 * (sum(c) & 1) for c in self.sites],
                        dtype=np.int64)

    def is_bipartite(self) -> bool:
        """True when coordinate parity two-colors every edge."""
        par = self.parities
        return all(par[i] != par[j] for (i, j) in self.edges)

    def boundary_sites(self) -> list:
        """Indices of sites missing a neighbor along some open axis."""
        out = []
        for idx, coords in enumerate(self.sites):
            for axis, c in enumerate(coords):
                if self.periodic is not None and self.periodic[axis]:
                    continue
                if self.extents is None:
                    continue
                if self.extents[axis] > 1 and (c == 0 or c == self.extents[axis] - 1):
                    out.append(idx)
                    break
        return out

    def with_fields(self, fields: dict) -> "LatticeSpec":
        return LatticeSpec(self.sites, self.edges, dict(fields),
                           self.extents, self.periodic)

    def edge_arrays(self):
        eu = np.array([e[0] for e in self.edges], dtype=np.int64)
        ev = np.array([e[1] for e in self.edges], dtype=np.int64)
        return eu, ev

    def field_array(self) -> np.ndarray:
        f = np.zeros(self.n_sites)
        for s, val in self.boundary_fields.items():
            f[s] = val
        return f

    def site_index(self, coords) -> int:
        try:
            return self.sites.index(tuple(coords))
        except ValueError:
            raise KeyError(f"no site at {tuple(coords)}") from None


def hypercubic(extents, periodic=False, fields=None) -> LatticeSpec:
    """Hypercubic lattice with the given extents (1 to 3 axes).

    `periodic` is a bool applied to every axis or a per-axis tuple. Wrap
    edges that coincide with an interior edge (extent 2) are stored once.
    """
    extents = tuple(int(e) for e in extents)
    if not 1 <= len(extents) <= 3:
        raise ValueError("1 to 3 axes supported")
    if any(e < 1 for e in extents):
        raise ValueError(f"extents must be positive, got {extents}")
    if isinstance(periodic, bool):
        periodic = tuple(periodic for _ in extents)
    else:
        periodic = tuple(bool(p) for p in periodic)

    sites = []
    ranges = [range(e) for e in extents]
    if len(extents) == 1:
        sites = [(x,) for x in ranges[0]]
    elif len(extents) == 2:
        sites = [(x, y) for y in ranges[1] for x in ranges[0]]
    else:
        sites = [(x, y, z) for z in ranges[2] for y in ranges[1]
                 for x in ranges[0]]
    index = {c: i for i, c in enumerate(sites)}

    edges = set()
    for c in sites:
        for axis in range(len(extents)):
            nb = list(c)
            nb[axis] += 1
            if nb[axis] >= extents[axis]:
                if not periodic[axis] or extents[axis] < 2:
                    continue
                nb[axis] -= extents[axis]
            i, j = index[c], index[tuple(nb)]
            if i != j:
                edges.add((min(i, j), max(i, j)))
    return LatticeSpec(tuple(sites), tuple(sorted(edges)),
                       dict(fields or {}), extents, periodic)


def chain(length: int, fields=None) -> LatticeSpec:
    """Open 1D path of `length` sites."""
    return hypercubic((length,), periodic=False, fields=fields)
