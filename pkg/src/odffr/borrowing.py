"""Dynamic channel assignment from lightly loaded cells into a congested cell.

A borrower first asks the first-category cell with the most unoccupied EUP
channels (the alpha lender).  If that is not enough, the remainder is asked
from the best second-category cell (the beta lender).  Borrowed bands are
pinned to a sector of the borrower: F3 and F5 go to X, F4 and F6 go to Y.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .cluster import CATEGORY_MEMBERS, Category
from .errors import ConfigError, ConsistencyError
from .spectrum import Band, free_eup_count

SECTOR_OF_BAND = {Band.F3: "X", Band.F5: "X", Band.F4: "Y", Band.F6: "Y"}


@dataclass(frozen=True)
class BorrowRequest:
    borrower: int
    needed: int
    additional: int = 0

    def __post_init__(self):
        if self.needed < 0:
            raise ConfigError(f"needed must be nonnegative, got {self.needed}")
        if not 0 <= self.additional <= self.needed:
            raise ConfigError("additional must lie in [0, needed]")


@dataclass(frozen=True)
class BorrowGrant:
    lender: int
    borrower: int
    band: Band
    channels: int
    sector: str

    def __post_init__(self):
        if self.channels < 1:
            raise ConfigError(f"a grant carries at least one channel, got {self.channels}")
        if self.sector not in ("X", "Y"):
            raise ConfigError(f"grant sector must be X or Y, got {self.sector!r}")


@dataclass
class ActiveGrant:
    """A grant currently held by a borrower; ``in_use`` channels carry calls."""

    lender: int
    borrower: int
    band: Band
    channels: int
    sector: str
    in_use: int = 0

    @property
    def idle(self):
        return self.channels - self.in_use


@dataclass
class LendingState:
    grants: list = field(default_factory=list)
    last_returned: list = field(default_factory=list)

    def lent_totals(self):
        totals = {}
        for g in self.grants:
            totals[g.lender] = totals.get(g.lender, 0) + g.channels
        return totals

    def borrowed_total(self, borrower):
        return sum(g.channels for g in self.grants if g.borrower == borrower)

    def check(self, plan):
        """Lent counts in the pools must equal the sum of active grants."""
        per_band = {}
        for g in self.grants:
            if g.in_use < 0 or g.in_use > g.channels:
                raise ConsistencyError(f"grant {g} has in_use outside [0, channels]")
            key = (g.lender, int(g.band))
            per_band[key] = per_band.get(key, 0) + g.channels
        for cell, cs in plan.cells.items():
            for i, lent in enumerate(cs.pool.lent):
                if lent != per_band.get((cell, i + 1), 0):
                    raise ConsistencyError(
                        f"cell {cell} band F{i + 1}: pool lent={lent}, grants={per_band.get((cell, i + 1), 0)}"
                    )


def needs_borrowing(cell_occupancy, threshold=80):
    return cell_occupancy >= threshold


def select_lender(plan, category):
    """Category member with the most free EUP channels (ties: lowest index)."""
    if category is Category.REFERENCE or category not in CATEGORY_MEMBERS:
        raise ConfigError("lenders are drawn from the first or second category only")
    best, best_free = None, 0
    for cell in CATEGORY_MEMBERS[category]:
        free = free_eup_count(plan, cell)
        if free > best_free:
            best, best_free = cell, free
    return best


def sector_for_band(band):
    band = Band(band)
    if band not in SECTOR_OF_BAND:
        raise ConfigError(f"{band} is a native band of the reference cell and is never borrowed")
    return SECTOR_OF_BAND[band]


def _draw(plan, lender, borrower, count):
    """Split ``count`` channels of a lender over its EUP bands, lowest band first."""
    grants = []
    pool = plan.pool(lender)
    for band in sorted(plan.allocation(lender).eup_bands):
        if count <= 0:
            break
        take = min(count, pool.free(band))
        if take > 0:
            grants.append(BorrowGrant(lender, borrower, band, take, sector_for_band(band)))
            count -= take
    return grants


def plan_assignment(request, plan):
    """Grants satisfying ``request.needed`` per the alpha-then-beta cascade.

    The plan is not modified; use :func:`apply_grants` to commit the result.
    """
    needed = request.needed
    if needed <= 0:
        return []
    grants = []
    alpha = select_lender(plan, Category.FIRST)
    s_alpha = free_eup_count(plan, alpha) if alpha is not None else 0
    if s_alpha >= needed:
        return _draw(plan, alpha, request.borrower, needed)
    if s_alpha > 0:
        grants += _draw(plan, alpha, request.borrower, s_alpha)
    additional = needed - s_alpha
    beta = select_lender(plan, Category.SECOND)
    s_beta = free_eup_count(plan, beta) if beta is not None else 0
    if s_beta > 0:
        grants += _draw(plan, beta, request.borrower, min(s_beta, additional))
    return grants


def apply_grants(state, plan, grants):
    """Commit grants: lenders mark the channels as lent, the borrower holds them."""
    for g in grants:
        alloc = plan.allocation(g.lender)
        if g.band not in alloc.eup_bands:
            raise ConsistencyError(f"cell {g.lender} cannot lend {g.band}: not an EUP band")
        pool = plan.pool(g.lender)
        if g.channels > pool.free(g.band):
            raise ConsistencyError(
                f"cell {g.lender} over-commits {g.band}: {g.channels} > {pool.free(g.band)} free"
            )
        pool.lent[int(g.band) - 1] += g.channels
        state.grants.append(ActiveGrant(g.lender, g.borrower, g.band, g.channels, g.sector))
    return state


def release_grants(state, plan, borrower_occupancy, threshold=80, hysteresis=10, borrower=None):
    """Hand idle borrowed channels back once the borrower drops below the low mark.

    Busy borrowed channels stay with the borrower; they come back on a later
    call of this function after their calls have ended.  With ``borrower``
    set, only that cell's grants are considered.
    """
    if hysteresis < 0:
        raise ConfigError("hysteresis must be nonnegative")
    state.last_returned = []
    if not state.grants or borrower_occupancy >= threshold - hysteresis:
        return state
    kept = []
    for g in state.grants:
        idle = g.idle if borrower is None or g.borrower == borrower else 0
        if idle > 0:
            plan.pool(g.lender).lent[int(g.band) - 1] -= idle
            g.channels -= idle
            state.last_returned.append((g.lender, g.borrower, g.band, idle, g.sector))
        if g.channels > 0:
            kept.append(g)
    state.grants = kept
    return state
