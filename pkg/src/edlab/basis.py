"""Fixed-magnetization bases for spin-1/2 systems.

A configuration is a plain integer: bit x set means the spin at site x+1
points down (sites are numbered 1..L). A sector collects every L-bit
configuration with exactly n down spins, sorted ascending as integers, so
that the number of down spins is the popcount and the basis order is
reproducible across backends and runs.
"""

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import _kernels

#: Enumeration refuses systems beyond this many sites; index maps and state
#: arrays are kept fully materialized, which is only sane at desk scale.
MAX_SITES = 32


@dataclass(frozen=True)
class SpinBasisSector:
    """Ordered basis of the n-down-spin sector of an L-site system."""

    site_count: int
    down_count: int
    states: np.ndarray

    @property
    def dim(self) -> int:
        return self.states.shape[0]

    @cached_property
    def _index(self) -> dict:
        return {int(s): i for i, s in enumerate(self.states)}

    def index_of(self, configuration: int) -> int:
        """Position of a configuration in ``states``; KeyError if absent."""
        key = int(configuration)
        try:
            return self._index[key]
        except KeyError:
            raise KeyError(
                f"configuration {key:#x} not in sector "
                f"(L={self.site_count}, n={self.down_count})"
            ) from None

    def __contains__(self, configuration: int) -> bool:
        return int(configuration) in self._index


def _check_site_count(site_count: int) -> None:
    if site_count < 1:
        raise ValueError(f"site_count must be >= 1, got {site_count}")
    if site_count > MAX_SITES:
        raise ValueError(
            f"site_count {site_count} exceeds the enumeration cap {MAX_SITES}"
        )


def enumerate_sector(site_count: int, down_count: int) -> SpinBasisSector:
    """Enumerate the fixed-magnetization sector with `down_count` down spins.

    The states array is ascending and read-only; its length is
    binomial(site_count, down_count).
    """
    _check_site_count(site_count)
    if not 0 <= down_count <= site_count:
        raise ValueError(
            f"down_count out of range: (L, n) = ({site_count}, {down_count})"
        )
    states = _kernels.sector_states(site_count, down_count)
    states.setflags(write=False)
    return SpinBasisSector(site_count, down_count, states)


def sector_dimensions(site_count: int) -> list:
    """Dimensions of all sectors n = 0..L; they sum to 2**L."""
    _check_site_count(site_count)
    return [math.comb(site_count, n) for n in range(site_count + 1)]


def apply_lowering(configuration: int, site: int, site_count: int):
    """Flip the spin at `site` (1-based) down; None if it is already down.

    Models the spin-1/2 lowering operator on a basis configuration: acting
    on an up spin produces the flipped configuration with coefficient one,
    acting on a down spin annihilates the state.
    """
    if not 1 <= site <= site_count:
        raise ValueError(f"site {site} outside [1, {site_count}]")
    bit = 1 << (site - 1)
    if configuration & bit:
        return None
    return configuration | bit


def spin_flip(configuration: int, site_count: int) -> int:
    """Flip every spin; maps the (L, n) sector onto the (L, L-n) sector."""
    return configuration ^ ((1 << site_count) - 1)


def configuration_string(configuration: int, site_count: int) -> str:
    """Render a configuration as 'u'/'d' characters, site 1 first."""
    return "".join(
        "d" if (configuration >> x) & 1 else "u" for x in range(site_count)
    )
