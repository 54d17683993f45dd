"""Band plan and per-cell channel bookkeeping.

The spectrum is cut into six segments F1..F6.  Every cell splits them into a
centre-user part (CUP) and an edge-user part (EUP).  Channels inside a band
are interchangeable, so a pool only tracks counts per band: how many are
occupied by the cell's own calls and how many are lent out to another cell.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field
from enum import IntEnum

from .errors import BandExhausted, ConfigError, ConsistencyError

CELLS = (1, 2, 3, 4, 5, 6, 7)
REFERENCE_CELL = 7


class Band(IntEnum):
    F1 = 1
    F2 = 2
    F3 = 3
    F4 = 4
    F5 = 5
    F6 = 6

    def __str__(self):
        return self.name


ALL_BANDS = frozenset(Band)


@dataclass(frozen=True)
class BandAllocation:
    cup_bands: frozenset
    eup_bands: frozenset

    def __post_init__(self):
        cup = frozenset(Band(b) for b in self.cup_bands)
        eup = frozenset(Band(b) for b in self.eup_bands)
        if cup & eup:
            raise ConfigError("CUP and EUP bands overlap")
        if cup | eup != ALL_BANDS:
            raise ConfigError("CUP and EUP bands must cover F1..F6")
        if len(eup) != 2:
            raise ConfigError("EUP must hold exactly two bands")
        object.__setattr__(self, "cup_bands", cup)
        object.__setattr__(self, "eup_bands", eup)

    @property
    def admission_order(self):
        """Bands in the order calls are placed: CUP first, then EUP."""
        return tuple(sorted(self.cup_bands)) + tuple(sorted(self.eup_bands))


# Frequency plan of the cluster: reuse groups {1,3,5}, {2,4,6} and {7}.
ALLOC_FIRST = BandAllocation(frozenset({1, 2, 3, 4}), frozenset({5, 6}))
ALLOC_SECOND = BandAllocation(frozenset({1, 2, 5, 6}), frozenset({3, 4}))
ALLOC_REFERENCE = BandAllocation(frozenset({3, 4, 5, 6}), frozenset({1, 2}))


@dataclass
class ChannelPool:
    """Per-band channel counts of one cell (index 0 is F1)."""

    total: list
    occupied: list = field(default_factory=list)
    lent: list = field(default_factory=list)

    def __post_init__(self):
        if len(self.total) != 6:
            raise ConfigError("a pool needs exactly six band counts")
        if not self.occupied:
            self.occupied = [0] * 6
        if not self.lent:
            self.lent = [0] * 6
        for t, o, l in zip(self.total, self.occupied, self.lent):
            if min(t, o, l) < 0 or o + l > t:
                raise ConsistencyError(f"invalid pool counts total={t} occupied={o} lent={l}")

    def free(self, band):
        i = int(band) - 1
        return self.total[i] - self.occupied[i] - self.lent[i]

    def capacity(self):
        return sum(self.total) - sum(self.lent)

    def busy(self):
        return sum(self.occupied)


@dataclass
class CellSpectrum:
    allocation: BandAllocation
    pool: ChannelPool


@dataclass
class SpectrumPlan:
    cells: dict

    def __getitem__(self, cell):
        return self.cells[cell]

    def allocation(self, cell):
        return self.cells[cell].allocation

    def pool(self, cell):
        return self.cells[cell].pool

    def copy(self):
        return copy.deepcopy(self)

    @property
    def channels_per_cell(self):
        return sum(self.cells[REFERENCE_CELL].pool.total)


def segment_channel_counts(total):
    """Split ``total`` channels over six bands; the remainder goes to the lowest bands."""
    if total < 6:
        raise ConfigError(f"need at least 6 channels per cell, got {total}")
    base, extra = divmod(int(total), 6)
    return [base + (1 if i < extra else 0) for i in range(6)]


def allocation_for(cell):
    if cell == REFERENCE_CELL:
        return ALLOC_REFERENCE
    if cell in (1, 3, 5):
        return ALLOC_FIRST
    if cell in (2, 4, 6):
        return ALLOC_SECOND
    raise ConfigError(f"unknown cell {cell}")


def default_plan(total_channels_per_cell=120):
    if total_channels_per_cell < 6 or total_channels_per_cell % 6:
        raise ConfigError(
            f"channels per cell must be a positive multiple of 6, got {total_channels_per_cell}"
        )
    counts = segment_channel_counts(total_channels_per_cell)
    return SpectrumPlan(
        {c: CellSpectrum(allocation_for(c), ChannelPool(list(counts))) for c in CELLS}
    )


def free_eup_count(plan, cell):
    if cell not in plan.cells:
        raise ConfigError(f"unknown cell {cell}")
    cs = plan[cell]
    return sum(cs.pool.free(b) for b in cs.allocation.eup_bands)


def reserve_channel(pool, band):
    i = int(band) - 1
    if pool.total[i] - pool.occupied[i] - pool.lent[i] <= 0:
        raise BandExhausted(Band(band))
    pool.occupied[i] += 1
    return pool


def release_channel(pool, band):
    i = int(band) - 1
    if pool.occupied[i] <= 0:
        raise ConsistencyError(f"release on empty band F{i + 1}")
    pool.occupied[i] -= 1
    return pool


def check_conservation(plan):
    """Raise ConsistencyError when any band's counts leave [0, total]."""
    for cell, cs in plan.cells.items():
        p = cs.pool
        for i in range(6):
            o, l, t = p.occupied[i], p.lent[i], p.total[i]
            if o < 0 or l < 0 or o + l > t:
                raise ConsistencyError(
                    f"cell {cell} band F{i + 1}: occupied={o} lent={l} total={t}"
                )
