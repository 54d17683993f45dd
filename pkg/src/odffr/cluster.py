"""Hexagonal 7-cell cluster: geometry, categories, sectors and co-channel cells.

Cell 7 sits at the origin; cell k (k = 1..6) sits at distance sqrt(3)*R at an
angle of (k - 1) * 60 degrees, R being the hexagon corner radius.  Each cell
is split into a CUP disk and an EUP annulus, and the EUP of a borrowing cell
can be cut into three 120-degree sectors X, Y and Native.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ConfigError
from .spectrum import CELLS, REFERENCE_CELL, Band

TWO_PI = 2.0 * math.pi
SECTOR_WIDTH = TWO_PI / 3.0


class Category(Enum):
    FIRST = "first"
    SECOND = "second"
    REFERENCE = "reference"


CATEGORY_MEMBERS = {
    Category.FIRST: (1, 3, 5),
    Category.SECOND: (2, 4, 6),
    Category.REFERENCE: (7,),
}


def category_of(cell):
    for cat, members in CATEGORY_MEMBERS.items():
        if cell in members:
            return cat
    raise ConfigError(f"unknown cell {cell}")


@dataclass(frozen=True)
class CellGeometry:
    center: tuple
    radius: float
    cup_radius: float

    def __post_init__(self):
        if not 0.0 < self.cup_radius < self.radius:
            raise ConfigError("cup_radius must lie strictly inside the cell radius")


@dataclass(frozen=True)
class SectorRegion:
    """Annulus sector of a cell's EUP; angles in radians, ``start`` in [0, 2pi)."""

    cell: int
    label: str
    start: float
    width: float
    r_inner: float
    r_outer: float

    @property
    def bisector(self):
        return (self.start + self.width / 2.0) % TWO_PI

    def contains_angle(self, theta):
        return ((np.asarray(theta) - self.start) % TWO_PI) < self.width


@dataclass(frozen=True)
class CellPart:
    """The whole CUP disk or EUP annulus of a cell."""

    cell: int
    part: str  # "CUP" or "EUP"

    def __post_init__(self):
        if self.part not in ("CUP", "EUP"):
            raise ConfigError(f"cell part must be CUP or EUP, got {self.part!r}")


@dataclass(frozen=True)
class CochannelCell:
    cell: int
    tier: int
    center: tuple
    mirror: int | None = None  # index of the wrap-around cluster copy


@dataclass(frozen=True)
class ClusterLayout:
    cells: dict
    adjacency: dict
    categories: dict
    mirror_shifts: tuple

    @property
    def radius(self):
        return self.cells[REFERENCE_CELL].radius

    @property
    def cup_radius(self):
        return self.cells[REFERENCE_CELL].cup_radius

    def center(self, cell):
        return np.asarray(self.cells[cell].center, dtype=float)

    def bearing(self, src, dst):
        """Angle of the vector from cell ``src``'s centre to cell ``dst``'s centre."""
        d = self.center(dst) - self.center(src)
        return math.atan2(d[1], d[0]) % TWO_PI


def build_cluster(radius=1000.0, cup_area_fraction=0.5):
    if not radius > 0:
        raise ConfigError(f"cell radius must be positive, got {radius}")
    if not 0.0 < cup_area_fraction < 1.0:
        raise ConfigError(f"cup_area_fraction must be in (0, 1), got {cup_area_fraction}")
    isd = math.sqrt(3.0) * radius
    cup_radius = radius * math.sqrt(cup_area_fraction)

    centers = {REFERENCE_CELL: (0.0, 0.0)}
    for k in range(6):
        a = k * math.pi / 3.0
        centers[k + 1] = (isd * math.cos(a), isd * math.sin(a))
    cells = {c: CellGeometry(centers[c], float(radius), cup_radius) for c in CELLS}

    adjacency = {REFERENCE_CELL: frozenset(range(1, 7))}
    for k in range(1, 7):
        left = (k - 2) % 6 + 1
        right = k % 6 + 1
        adjacency[k] = frozenset({REFERENCE_CELL, left, right})

    # 7-cell reuse: the cluster repeats at shift 2*a1 + a2 and its 60-degree rotations.
    base = np.array([2.5 * isd, math.sqrt(3.0) / 2.0 * isd])
    shifts = []
    for k in range(6):
        a = k * math.pi / 3.0
        rot = np.array([[math.cos(a), -math.sin(a)], [math.sin(a), math.cos(a)]])
        shifts.append(tuple(rot @ base))

    return ClusterLayout(
        cells=cells,
        adjacency=adjacency,
        categories={c: category_of(c) for c in CELLS},
        mirror_shifts=tuple(shifts),
    )


def _angle_gap(a, b):
    d = (a - b) % TWO_PI
    return min(d, TWO_PI - d)


def sector_regions(layout, cell, alpha_lender, beta_lender):
    """Cut the borrower's EUP into sectors X, Y and Native.

    X points directly away from the beta lender.  Y takes whichever of the
    two remaining 120-degree arcs lies closest to the direction pointing away
    from the alpha lender; Native is the arc left over.
    """
    for lender in (alpha_lender, beta_lender):
        if lender not in layout.adjacency[cell]:
            raise ConfigError(f"lender {lender} is not adjacent to cell {cell}")
    geom = layout.cells[cell]
    away_beta = (layout.bearing(cell, beta_lender) + math.pi) % TWO_PI
    away_alpha = (layout.bearing(cell, alpha_lender) + math.pi) % TWO_PI

    x_mid = away_beta
    candidates = [(x_mid + SECTOR_WIDTH) % TWO_PI, (x_mid + 2 * SECTOR_WIDTH) % TWO_PI]
    gaps = [_angle_gap(c, away_alpha) for c in candidates]
    # Ties (alpha opposite to X) go to the counter-clockwise arc.
    y_idx = 0 if gaps[0] <= gaps[1] + 1e-12 else 1
    y_mid = candidates[y_idx]
    native_mid = candidates[1 - y_idx]

    def region(label, mid):
        return SectorRegion(
            cell, label, (mid - SECTOR_WIDTH / 2.0) % TWO_PI, SECTOR_WIDTH,
            geom.cup_radius, geom.radius,
        )

    return region("X", x_mid), region("Y", y_mid), region("Native", native_mid)


def sample_position(layout, region, rng, size=None):
    """Uniform point(s) over a region's area.

    Returns shape ``(2,)`` when ``size`` is None, otherwise ``(size, 2)``.
    """
    n = 1 if size is None else int(size)
    geom = layout.cells[region.cell]
    if isinstance(region, SectorRegion):
        r_in, r_out = region.r_inner, region.r_outer
        theta = region.start + region.width * rng.random(n)
    elif region.part == "CUP":
        r_in, r_out = 0.0, geom.cup_radius
        theta = TWO_PI * rng.random(n)
    else:
        r_in, r_out = geom.cup_radius, geom.radius
        theta = TWO_PI * rng.random(n)
    r = np.sqrt(r_in * r_in + (r_out * r_out - r_in * r_in) * rng.random(n))
    pts = np.column_stack((r * np.cos(theta), r * np.sin(theta))) + np.asarray(geom.center)
    return pts[0] if size is None else pts


def _role(plan, grants, cell, band):
    if any(g.borrower == cell and g.band == band for g in grants):
        return "EUP"
    alloc = plan.allocation(cell)
    if band in alloc.eup_bands:
        return "EUP"
    if band in alloc.cup_bands:
        return "CUP"
    return None


def _uses(plan, grants, cell, band, role):
    alloc = plan.allocation(cell)
    if role == "CUP":
        return band in alloc.cup_bands
    return band in alloc.eup_bands or any(g.borrower == cell and g.band == band for g in grants)


def cochannel_cells(layout, plan, grants, cell, band, tiers=1):
    """Cells using ``band`` in the same role (CUP or EUP) as ``cell``.

    Tier 1 scans the cluster itself; tier 2 adds the six wrap-around copies
    of the cluster, each carrying the same allocation and grants.
    """
    if tiers not in (0, 1, 2):
        raise ConfigError(f"tiers must be 0, 1 or 2, got {tiers}")
    band = Band(band)
    grants = tuple(grants or ())
    role = _role(plan, grants, cell, band)
    if tiers == 0 or role is None:
        return []
    users = [c for c in CELLS if _uses(plan, grants, c, band, role)]
    out = [CochannelCell(c, 1, tuple(layout.center(c))) for c in users if c != cell]
    if tiers == 2:
        for m, shift in enumerate(layout.mirror_shifts):
            for c in users:
                out.append(CochannelCell(c, 2, tuple(layout.center(c) + shift), mirror=m))
    return out
