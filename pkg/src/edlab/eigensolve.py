"""Spectra of sparse symmetric operators and subspace comparison tools.

Two solver routes are kept deliberately independent so they can check each
other: `full_spectrum` is dense LAPACK diagonalization (the small-dimension
oracle), `lowest_k` is a thick-restart Lanczos iteration with full
reorthogonalization written here. Full reorthogonalization matters because
the spectra of interest contain tight clusters of nearly degenerate
eigenvalues, exactly the regime where unorthogonalized Lanczos produces
ghost copies.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .operators import SparseOperator


class ConvergenceError(RuntimeError):
    """Iterative solve ran out of budget; carries the best residual norms."""

    def __init__(self, message, residuals):
        super().__init__(message)
        self.residuals = np.asarray(residuals)


@dataclass
class SpectralResult:
    """Eigenvalues (ascending) and optional eigenvectors of one operator."""

    eigenvalues: np.ndarray
    eigenvectors: Optional[np.ndarray]  # columns aligned with eigenvalues
    method: str
    residual_norms: Optional[np.ndarray]
    sector_tag: tuple

    def is_degenerate_cut(self, k: int, tol: float = 1e-12) -> bool:
        """True when eigenvalues k and k+1 (1-based cut) nearly coincide.

        Subspace comparisons across such a cut are ill-posed; callers
        decide what to do.
        """
        if k < 1 or k >= self.eigenvalues.shape[0]:
            raise ValueError(f"cut {k} has no neighbor eigenvalue")
        return abs(self.eigenvalues[k] - self.eigenvalues[k - 1]) < tol

    def to_record(self, delta=None) -> dict:
        L, n = self.sector_tag
        return {
            "L": L,
            "n": n,
            "delta": delta,
            "method": self.method,
            "eigenvalues": [float(v) for v in self.eigenvalues],
            "residuals": None if self.residual_norms is None
                         else [float(r) for r in self.residual_norms],
        }


@dataclass(frozen=True)
class SubspaceBasis:
    """Orthonormal column basis of a subspace of R^dim_ambient."""

    vectors: np.ndarray

    def __post_init__(self):
        v = self.vectors
        if v.ndim != 2 or v.shape[1] == 0:
            raise ValueError("basis must be a nonempty (dim, rank) array")
        gram = v.T @ v
        if np.max(np.abs(gram - np.eye(v.shape[1]))) > 1e-10:
            raise ValueError("basis columns are not orthonormal to 1e-10")

    @property
    def dim_ambient(self) -> int:
        return self.vectors.shape[0]

    @property
    def rank(self) -> int:
        return self.vectors.shape[1]


def _fix_phases(columns: np.ndarray) -> np.ndarray:
    """Make the largest-magnitude component of each column positive."""
    idx = np.argmax(np.abs(columns), axis=0)
    signs = np.sign(columns[idx, np.arange(columns.shape[1])])
    signs[signs == 0] = 1.0
    return columns * signs


def full_spectrum(op: SparseOperator, want_vectors: bool = False,
                  dense_cap: int = 4096) -> SpectralResult:
    """Dense diagonalization of the whole sector spectrum."""
    if op.dim > dense_cap:
        raise ValueError(
            f"dimension {op.dim} exceeds the dense cap {dense_cap}; "
            "use lowest_k for the extreme eigenpairs"
        )
    dense = op.to_dense()
    if not want_vectors:
        vals = np.linalg.eigvalsh(dense)
        return SpectralResult(vals, None, "dense", None, op.sector_tag)
    vals, vecs = np.linalg.eigh(dense)
    vecs = _fix_phases(vecs)
    resid = op.matrix @ vecs - vecs * vals[np.newaxis, :]
    norms = np.linalg.norm(resid, axis=0)
    return SpectralResult(vals, vecs, "dense", norms, op.sector_tag)


def _orthogonal_replacement(rng, basis, count):
    """Deterministic random unit vector orthogonal to the given rows."""
    dim = basis.shape[1]
    for _ in range(50):
        v = rng.standard_normal(dim)
        for _ in range(2):
            v -= basis[:count].T @ (basis[:count] @ v)
        nv = np.linalg.norm(v)
        if nv > 1e-8 * np.sqrt(dim):
            return v / nv
    raise RuntimeError("could not draw a vector outside the current basis")


def lowest_k(op: SparseOperator, k: int, tol: float = 1e-10,
             max_iter: int = 10000, seed: int = 0,
             ncv: Optional[int] = None) -> SpectralResult:
    """Lowest k eigenpairs by thick-restart Lanczos, fully reorthogonalized.

    Deterministic for a fixed seed: the start vector, any breakdown
    replacements, and the restart schedule are all functions of the seed
    and the operator. `max_iter` bounds the number of operator
    applications inside the Lanczos recurrence; exceeding it raises
    ConvergenceError with the best residual norms achieved.

    Acceptance requires more than small residuals: inside a near-degenerate
    cluster a member can stay invisible for many iterations while every
    found pair already looks converged, so the lowest k Ritz values must
    also hold still over two consecutive restart cycles before the result
    is returned. When the basis saturates the full space the projected
    problem is exact and the stability wait is skipped.
    """
    dim = op.dim
    if not 1 <= k <= dim:
        raise ValueError(f"k must lie in [1, {dim}], got {k}")
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")
    if ncv is None:
        ncv = min(dim, max(2 * k + 24, 48))
    ncv = max(min(ncv, dim), min(k + 2, dim))
    keep = max(1, min(k + 12, ncv - 2))
    exact_basis = ncv == dim

    rng = np.random.default_rng(seed)
    V = np.zeros((ncv, dim))
    B = np.zeros((ncv, ncv))
    v = rng.standard_normal(dim)
    v /= np.linalg.norm(v)
    start = 0
    used = 0
    breakdown = 1e-13
    best_resids = None
    prev_lowest = None
    stable_cycles = 0

    while True:
        last_beta = 0.0
        last_w = None
        for j in range(start, ncv):
            V[j] = v
            w = op.matvec(v)
            used += 1
            B[j, j] = v @ w
            for _ in range(2):
                w -= V[:j + 1].T @ (V[:j + 1] @ w)
            beta = np.linalg.norm(w)
            if j + 1 < ncv:
                if beta > breakdown:
                    v = w / beta
                    B[j + 1, j] = B[j, j + 1] = beta
                else:
                    v = _orthogonal_replacement(rng, V, j + 1)
                    B[j + 1, j] = B[j, j + 1] = 0.0
            else:
                last_beta = beta
                last_w = w

        theta, y = np.linalg.eigh(B)
        estimates = np.abs(last_beta * y[-1, :k])
        if prev_lowest is not None and np.max(np.abs(theta[:k] - prev_lowest)) <= tol:
            stable_cycles += 1
        else:
            stable_cycles = 0
        prev_lowest = theta[:k].copy()

        if np.max(estimates) <= tol and (exact_basis or stable_cycles >= 2):
            vecs = (y[:, :k].T @ V).T
            vecs = _fix_phases(vecs)
            resid = np.empty(k)
            for i in range(k):
                resid[i] = np.linalg.norm(op.matvec(vecs[:, i])
                                          - theta[i] * vecs[:, i])
            best_resids = resid
            if np.max(resid) <= tol:
                return SpectralResult(theta[:k].copy(), vecs, "lanczos",
                                      resid, op.sector_tag)
            stable_cycles = 0
        if used >= max_iter:
            if best_resids is None:
                vecs = (y[:, :k].T @ V).T
                best_resids = np.array([
                    np.linalg.norm(op.matvec(vecs[:, i]) - theta[i] * vecs[:, i])
                    for i in range(k)
                ])
            raise ConvergenceError(
                f"no convergence to tol={tol} within {max_iter} operator "
                f"applications (best residual {np.max(best_resids):.3e})",
                best_resids)

        kept = (y[:, :keep].T @ V)
        V[:keep] = kept
        V[keep:] = 0.0
        couplings = last_beta * y[-1, :keep]
        B[:, :] = 0.0
        B[np.arange(keep), np.arange(keep)] = theta[:keep]
        B[keep, :keep] = couplings
        B[:keep, keep] = couplings
        if last_beta > breakdown:
            v = last_w / last_beta
        else:
            v = _orthogonal_replacement(rng, V, keep)
            B[keep, :keep] = 0.0
            B[:keep, keep] = 0.0
        start = keep


def orthonormalize(vectors, rank_tol: float = 1e-10) -> SubspaceBasis:
    """Orthonormal basis of the span of the given vectors.

    Directions whose singular value falls below `rank_tol` relative to the
    largest are treated as dependent and dropped; the surviving count is
    the detected rank.
    """
    rows = [np.asarray(v, dtype=float) for v in vectors]
    if not rows:
        raise ValueError("no vectors given")
    stack = np.array(rows)
    if stack.ndim != 2:
        raise ValueError("vectors must share one ambient dimension")
    if not np.any(np.linalg.norm(stack, axis=1) > 0.0):
        raise ValueError("all input vectors are zero")
    u, s, _ = np.linalg.svd(stack.T, full_matrices=False)
    rank = int(np.sum(s > rank_tol * s[0]))
    return SubspaceBasis(_fix_phases(u[:, :rank]))


def projection_distance(p: SubspaceBasis, q: SubspaceBasis) -> float:
    """Operator norm of the difference of two orthogonal projections.

    Computed from principal angles: the largest singular value of the
    component of either basis orthogonal to the other space, which is the
    sine of the largest principal angle and avoids cancellation when the
    subspaces nearly coincide. Equals 1 whenever the ranks differ.
    """
    if p.dim_ambient != q.dim_ambient:
        raise ValueError(
            f"ambient dimensions differ: {p.dim_ambient} vs {q.dim_ambient}"
        )
    a = q.vectors - p.vectors @ (p.vectors.T @ q.vectors)
    b = p.vectors - q.vectors @ (q.vectors.T @ p.vectors)
    sin_a = np.linalg.svd(a, compute_uv=False)[0]
    sin_b = np.linalg.svd(b, compute_uv=False)[0]
    return float(min(1.0, max(sin_a, sin_b)))
