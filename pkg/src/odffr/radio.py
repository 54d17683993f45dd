"""Downlink SINR and outage for users on a borrowed band.

Received power follows a log-distance law.  Base stations are either omni
or transmit a band through a 120-degree sector antenna with flat in-sector
gain and a finite front-to-back attenuation.  SINR is serving power over the
sum of co-channel powers from every interfering tier plus thermal noise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .borrowing import BorrowGrant, sector_for_band
from .cluster import (
    SECTOR_WIDTH,
    TWO_PI,
    Category,
    CATEGORY_MEMBERS,
    cochannel_cells,
    sample_position,
    sector_regions,
)
from .errors import ConfigError
from .spectrum import REFERENCE_CELL, Band

SPEED_OF_LIGHT = 299_792_458.0
# Directivity of an ideal 120-degree sector radiating the same total power as an omni.
SECTOR_GAIN_DB = 10.0 * math.log10(3.0)


@dataclass(frozen=True)
class PathLossModel:
    exponent: float = 3.5
    reference_distance: float = 1.0
    reference_loss_db: float = 31.53  # free space at 1 m, 900 MHz

    def __post_init__(self):
        if self.exponent < 2:
            raise ConfigError(f"path-loss exponent must be >= 2, got {self.exponent}")
        if self.reference_distance <= 0:
            raise ConfigError("reference distance must be positive")


def free_space_reference(carrier_hz=900e6, exponent=3.5, reference_distance=1.0):
    """Log-distance model anchored to free-space loss at ``reference_distance``."""
    loss = 20.0 * math.log10(4.0 * math.pi * reference_distance * carrier_hz / SPEED_OF_LIGHT)
    return PathLossModel(exponent, reference_distance, loss)


def hata_urban(carrier_mhz=900.0, bs_height=100.0, mobile_height=1.5):
    """Okumura-Hata urban loss written as a log-distance model anchored at 1 km."""
    a_hm = (1.1 * math.log10(carrier_mhz) - 0.7) * mobile_height - (
        1.56 * math.log10(carrier_mhz) - 0.8
    )
    loss_1km = 69.55 + 26.16 * math.log10(carrier_mhz) - 13.82 * math.log10(bs_height) - a_hm
    exponent = (44.9 - 6.55 * math.log10(bs_height)) / 10.0
    return PathLossModel(exponent, 1000.0, loss_1km)


PRESETS = {"log-distance": free_space_reference, "hata": hata_urban}


@dataclass(frozen=True)
class LinkBudget:
    tx_power_w: float = 1500.0
    bs_height_m: float = 100.0
    noise_power_w: float = 0.0

    def __post_init__(self):
        if self.tx_power_w <= 0:
            raise ConfigError("transmit power must be positive")
        if self.noise_power_w < 0:
            raise ConfigError("noise power must be nonnegative")


@dataclass(frozen=True)
class AntennaPattern:
    in_sector_gain_db: float = SECTOR_GAIN_DB
    front_to_back_db: float = 20.0
    beamwidth: float = SECTOR_WIDTH

    def __post_init__(self):
        if self.front_to_back_db < 0:
            raise ConfigError("front-to-back attenuation must be nonnegative")


@dataclass(frozen=True)
class Emitter:
    """A base station transmitting the band of interest."""

    cell: int
    position: tuple
    tier: int = 0
    pattern: AntennaPattern | None = None
    boresight: float | None = None
    mirror: int | None = None


@dataclass(frozen=True)
class SinrSample:
    position: tuple
    serving_cell: int
    band: Band
    sinr: float
    interference_by_tier: dict = field(default_factory=dict)

    @property
    def sinr_db(self):
        return 10.0 * math.log10(self.sinr) if self.sinr > 0 else -math.inf


def path_loss(distance, model):
    """Linear attenuation; distances below the reference distance are clamped to it."""
    d = np.maximum(np.asarray(distance, dtype=float), model.reference_distance)
    loss_db = model.reference_loss_db + 10.0 * model.exponent * np.log10(d / model.reference_distance)
    out = 10.0 ** (loss_db / 10.0)
    return float(out) if np.ndim(out) == 0 else out


def gain_db(emitter, points):
    """Antenna gain of ``emitter`` towards each point (omni emitters give 0 dB)."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if emitter.pattern is None:
        return np.zeros(len(pts))
    p = emitter.pattern
    d = pts - np.asarray(emitter.position)
    bearing = np.arctan2(d[:, 1], d[:, 0])
    off = np.abs((bearing - emitter.boresight + math.pi) % TWO_PI - math.pi)
    inside = off <= p.beamwidth / 2.0 + 1e-12
    return np.where(inside, p.in_sector_gain_db, p.in_sector_gain_db - p.front_to_back_db)


def received_power(budget, gain, distance, model):
    """Transmit power times antenna gain (dB) over path loss, in watts."""
    return budget.tx_power_w * 10.0 ** (np.asarray(gain) / 10.0) / path_loss(distance, model)


def _power_from(emitter, pts, budget, model):
    dist = np.hypot(pts[:, 0] - emitter.position[0], pts[:, 1] - emitter.position[1])
    return received_power(budget, gain_db(emitter, pts), dist, model)


def sinr_values(points, serving, interferers, budget, model, shadowing_db=0.0, rng=None):
    """Vectorised SINR (linear) at an ``(n, 2)`` array of user positions.

    With ``shadowing_db`` > 0 every link gets an independent log-normal
    shadowing term drawn from ``rng``.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))

    def link(emitter):
        p = _power_from(emitter, pts, budget, model)
        if shadowing_db > 0:
            p = p * 10.0 ** (rng.normal(0.0, shadowing_db, len(pts)) / 10.0)
        return p

    signal = link(serving)
    interference = np.zeros(len(pts))
    for e in interferers:
        interference = interference + link(e)
    denom = interference + budget.noise_power_w
    with np.errstate(divide="ignore"):
        return np.where(denom > 0, signal / np.where(denom > 0, denom, 1.0), np.inf)


def sinr(user, serving, band, interferers, budget, model):
    """SINR of one user; returns ``inf`` when there is neither interference nor noise."""
    pts = np.atleast_2d(np.asarray(user, dtype=float))
    by_tier = {}
    for e in interferers:
        by_tier[e.tier] = by_tier.get(e.tier, 0.0) + float(_power_from(e, pts, budget, model)[0])
    value = float(sinr_values(pts, serving, interferers, budget, model)[0])
    return SinrSample(tuple(pts[0]), serving.cell, Band(band), value, by_tier)


def noise_for_edge_snr(budget, model, edge_distance, snr_db=20.0):
    """Noise power giving ``snr_db`` on a 0 dB-gain link at ``edge_distance``."""
    return float(received_power(budget, 0.0, edge_distance, model)) / 10.0 ** (snr_db / 10.0)


@dataclass(frozen=True)
class RadioScenario:
    name: str
    band: Band
    serving: Emitter
    interferers: tuple
    region: object
    grant: BorrowGrant


def _lender_for_band(band, alpha, beta):
    if band in (Band.F3, Band.F4):
        return beta
    return alpha


def borrowed_band_scenario(layout, plan, band=Band.F3, alpha=3, beta=2, sectored=True,
                           pattern=None, tiers=2):
    """Reference-cell EUP users served on a band borrowed from a neighbour.

    Users are placed in the sector the band is pinned to.  With ``sectored``
    the reference cell transmits the band only into that sector and the
    lender keeps its remaining channels of the band in its own sector facing
    away from the reference cell; both are modelled with ``pattern``.
    Without it every transmitter is omni (borrowing without sectoring).
    Wrap-around copies of the cluster replicate the same arrangement.
    """
    band = Band(band)
    if alpha not in CATEGORY_MEMBERS[Category.FIRST] or beta not in CATEGORY_MEMBERS[Category.SECOND]:
        raise ConfigError("alpha must be a first-category cell and beta a second-category cell")
    pattern = AntennaPattern() if pattern is None else pattern
    borrower = REFERENCE_CELL
    lender = _lender_for_band(band, alpha, beta)
    sector = sector_for_band(band)
    grant = BorrowGrant(lender, borrower, band, 1, sector)
    regions = {r.label: r for r in sector_regions(layout, borrower, alpha, beta)}
    region = regions[sector]

    lender_out = layout.bearing(borrower, lender)

    def emitter_for(cell, tier, center, mirror):
        if sectored and cell == borrower:
            return Emitter(cell, center, tier, pattern, region.bisector, mirror)
        if sectored and cell == lender:
            return Emitter(cell, center, tier, pattern, lender_out, mirror)
        return Emitter(cell, center, tier, None, None, mirror)

    serving = emitter_for(borrower, 0, tuple(layout.center(borrower)), None)
    interferers = tuple(
        emitter_for(cc.cell, cc.tier, cc.center, cc.mirror)
        for cc in cochannel_cells(layout, plan, [grant], borrower, band, tiers)
    )
    name = "proposed" if sectored else "unsectored"
    return RadioScenario(name, band, serving, interferers, region, grant)


@dataclass(frozen=True)
class OutageEstimate:
    probability: float
    stderr: float
    trials: int


def scenario_sinr(scenario, points, budget, model, shadowing_db=0.0, rng=None):
    return sinr_values(points, scenario.serving, scenario.interferers, budget, model,
                       shadowing_db, rng)


def outage_from_sinr(sinr_linear, gamma_db):
    """Fraction of samples below ``gamma_db`` with its binomial standard error."""
    vals = np.asarray(sinr_linear)
    gamma = 10.0 ** (gamma_db / 10.0)
    n = len(vals)
    p = float(np.count_nonzero(vals < gamma)) / n
    return OutageEstimate(p, math.sqrt(p * (1.0 - p) / n), n)


def outage_probability(scenario, gamma_db, trials, rng, layout, budget, model,
                       shadowing_db=0.0):
    """Monte-Carlo estimate of P(SINR < gamma) over users uniform in the scenario region."""
    if trials < 1:
        raise ConfigError("trials must be at least 1")
    pts = sample_position(layout, scenario.region, rng, size=trials)
    vals = scenario_sinr(scenario, pts, budget, model, shadowing_db, rng)
    return outage_from_sinr(vals, gamma_db)


def paired_sinr(scenarios, trials, rng, layout, budget, model):
    """SINR of every scenario at one shared set of user positions.

    All scenarios must share a region; returns ``(points, {name: sinr array})``.
    """
    first = scenarios[0]
    if any(s.region != first.region for s in scenarios):
        raise ConfigError("paired evaluation needs scenarios over the same region")
    pts = sample_position(layout, first.region, rng, size=trials)
    return pts, {s.name: scenario_sinr(s, pts, budget, model) for s in scenarios}
