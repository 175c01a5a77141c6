"""Pure-numpy kernel backend.

Mirrors the compiled backend in `_core.pyx` function for function. Both
backends must produce bit-identical arrays: diagonal accumulation order
and the emitted triplet set are part of the contract, not an accident.
"""

import numpy as np

BACKEND_NAME = "python"


def sector_states(site_count, down_count):
    """All `site_count`-bit integers with `down_count` set bits, ascending.

    Built by the Pascal recursion over prefix length: states with the top
    bit clear come first, then states with the top bit set, which keeps
    every intermediate array sorted without an explicit sort.
    """
    L, n = int(site_count), int(down_count)
    if n < 0 or n > L:
        raise ValueError(f"down_count {n} outside [0, {L}]")
    prev = {0: np.zeros(1, dtype=np.int64)}
    for length in range(1, L + 1):
        lo = max(0, n - (L - length))
        hi = min(length, n)
        cur = {}
        for m in range(lo, hi + 1):
            parts = []
            a = prev.get(m)
            if a is not None:
                parts.append(a)
            b = prev.get(m - 1)
            if b is not None:
                parts.append(b + np.int64(1 << (length - 1)))
            cur[m] = parts[0] if len(parts) == 1 else np.concatenate(parts)
        prev = cur
    return np.ascontiguousarray(prev[n])


def _spin_z(states, site_bit):
    # S^3 expectation of the basis configuration at one site: +1/2 up, -1/2 down
    return np.where((states >> np.int64(site_bit)) & 1 == 1, -0.5, 0.5)


def chain_triplets(states, site_count, offdiag, field_left, field_right):
    """COO triplets of the open-chain sector Hamiltonian.

    Bond terms couple sites (x, x+1) for x = 0..L-2: +1/2 on the diagonal
    per anti-aligned bond and `offdiag` between configurations that differ
    by one exchange of an adjacent up-down pair. `field_left`/`field_right`
    are the coefficients of S^3 at the first and last site.
    """
    s = np.asarray(states, dtype=np.int64)
    L = int(site_count)
    dim = s.shape[0]
    anti = np.zeros(dim, dtype=np.int64)
    for x in range(L - 1):
        anti += ((s >> np.int64(x)) ^ (s >> np.int64(x + 1))) & 1
    diag = 0.5 * anti
    diag = diag + field_left * _spin_z(s, 0)
    diag = diag + field_right * _spin_z(s, L - 1)

    rows = []
    cols = []
    vals = []
    keep = np.nonzero(diag != 0.0)[0]
    rows.append(keep)
    cols.append(keep)
    vals.append(diag[keep])
    for x in range(L - 1):
        mask = (((s >> np.int64(x)) ^ (s >> np.int64(x + 1))) & 1) == 1
        i = np.nonzero(mask)[0]
        flip = np.int64((1 << x) | (1 << (x + 1)))
        j = np.searchsorted(s, s[i] ^ flip)
        rows.append(i)
        cols.append(j)
        vals.append(np.full(i.shape[0], offdiag))
    return (np.concatenate(rows).astype(np.int64),
            np.concatenate(cols).astype(np.int64),
            np.concatenate(vals))


def lattice_triplets(states, site_count, edges_u, edges_v, offdiag,
                     diag_aligned, diag_anti, site_fields):
    """COO triplets of a general nearest-neighbor sector Hamiltonian.

    `diag_aligned`/`diag_anti` are the diagonal energies per aligned and
    anti-aligned edge; `site_fields[x]` multiplies S^3 at site x.
    """
    s = np.asarray(states, dtype=np.int64)
    L = int(site_count)
    dim = s.shape[0]
    eu = np.asarray(edges_u, dtype=np.int64)
    ev = np.asarray(edges_v, dtype=np.int64)
    n_edges = eu.shape[0]

    anti = np.zeros(dim, dtype=np.int64)
    for e in range(n_edges):
        anti += ((s >> eu[e]) ^ (s >> ev[e])) & 1
    diag = diag_anti * anti + diag_aligned * (n_edges - anti)
    for x in range(L):
        f = float(site_fields[x])
        if f != 0.0:
            diag = diag + f * _spin_z(s, x)

    rows = []
    cols = []
    vals = []
    keep = np.nonzero(diag != 0.0)[0]
    rows.append(keep)
    cols.append(keep)
    vals.append(diag[keep])
    for e in range(n_edges):
        mask = (((s >> eu[e]) ^ (s >> ev[e])) & 1) == 1
        i = np.nonzero(mask)[0]
        flip = np.int64((1 << int(eu[e])) | (1 << int(ev[e])))
        j = np.searchsorted(s, s[i] ^ flip)
        rows.append(i)
        cols.append(j)
        vals.append(np.full(i.shape[0], offdiag))
    return (np.concatenate(rows).astype(np.int64),
            np.concatenate(cols).astype(np.int64),
            np.concatenate(vals))


def csr_matvec(indptr, indices, data, x):
    """y = A @ x for a CSR matrix, rows accumulated in stored index order.

    Delegates to scipy's CSR product, which runs the same sequential
    per-row accumulation as the compiled backend.
    """
    import scipy.sparse as sp

    dim = indptr.shape[0] - 1
    mat = sp.csr_matrix((data, indices, indptr), shape=(dim, dim), copy=False)
    return mat @ x
