"""Kernel backend selection.

Prefers the compiled extension (`_core`, built from Cython) and falls back
to the pure-numpy implementation when the extension is missing or when
``EDLAB_PURE_PYTHON`` is set to a non-empty value other than ``0``.
"""

import os

from . import pykernels

if os.environ.get("EDLAB_PURE_PYTHON", "0") not in ("", "0"):
    impl = pykernels
else:
    try:
        from . import _core as impl
    except ImportError:
        impl = pykernels

BACKEND = impl.BACKEND_NAME

sector_states = impl.sector_states
chain_triplets = impl.chain_triplets
lattice_triplets = impl.lattice_triplets
csr_matvec = impl.csr_matvec
