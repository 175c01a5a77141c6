"""Exact-diagonalization lab for droplet and interface physics.

Spin-1/2 XXZ chains and small lattices in fixed-magnetization sectors,
explicit kink/antikink/droplet states and their span, a seeded iterative
eigensolver cross-checked against dense diagonalization, diagonal
interface gap probes, and a free-fermion treatment of classical ions
coupled to electrons (checkerboard selection, effective coupling,
Metropolis sampling).
"""

from ._kernels import BACKEND as kernel_backend

__version__ = "0.1.0"

__all__ = ["__version__", "kernel_backend"]
