"""Loss-system analytics: Erlang-B, truncated-Poisson steady states, overall blocking.

Every cell is an M/M/S/S system with offered load A = lambda / mu.  The
steady state of the birth-death chain is the truncated Poisson law and its
last state is the Erlang-B blocking probability.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .borrowing import BorrowRequest, apply_grants, plan_assignment, LendingState
from .errors import DomainError
from .spectrum import CELLS, REFERENCE_CELL

MODES = ("literal", "traffic_weighted")


@dataclass(frozen=True)
class TrafficProfile:
    """Per-cell arrival rates and release rates, indexed by cell 1..7 (tuple index 0 is cell 1)."""

    arrival: tuple
    release: tuple

    def __post_init__(self):
        if len(self.arrival) != len(self.release):
            raise DomainError("arrival and release vectors differ in length")
        if any(l < 0 for l in self.arrival):
            raise DomainError("arrival rates must be nonnegative")
        if any(m <= 0 for m in self.release):
            raise DomainError("release rates must be positive")

    @classmethod
    def from_ratio(cls, total_rate, ratio, holding_time=90.0):
        weight = float(sum(ratio))
        if weight <= 0:
            raise DomainError("arrival ratio needs a positive entry")
        arrival = tuple(total_rate * r / weight for r in ratio)
        return cls(arrival, tuple(1.0 / holding_time for _ in ratio))

    @property
    def loads(self):
        return tuple(l / m for l, m in zip(self.arrival, self.release))


@dataclass(frozen=True)
class StateDistribution:
    probs: np.ndarray
    offered_load: float

    @property
    def capacity(self):
        return len(self.probs) - 1

    def mean(self):
        return float(np.dot(np.arange(len(self.probs)), self.probs))


@dataclass(frozen=True)
class BlockingResult:
    per_cell: tuple
    overall: float
    mode: str


def erlang_b(servers, offered_load):
    """Erlang-B blocking B(S, A) via B(k) = A B(k-1) / (k + A B(k-1)).

    The running value is kept as mantissa and binary exponent so that deep
    tails (tiny A, large S) keep full relative precision until the final
    conversion to float.
    """
    if servers < 0 or offered_load < 0:
        raise DomainError(f"erlang_b needs S >= 0 and A >= 0, got S={servers}, A={offered_load}")
    a = float(offered_load)
    m, e = 0.5, 1  # B(0) = 1
    for k in range(1, int(servers) + 1):
        am = a * m
        m, de = math.frexp(am / (k + math.ldexp(am, e)))
        e += de
    return math.ldexp(m, e)


def birth_death_steady_state(arrival, release, capacity):
    """Stationary law of the M/M/S/S chain with birth rate lambda and death rate k*mu."""
    if release <= 0:
        raise DomainError(f"release rate must be positive, got {release}")
    if arrival < 0 or capacity < 0:
        raise DomainError("arrival rate and capacity must be nonnegative")
    a = arrival / release
    s = int(capacity)
    # Unnormalised terms relative to the mode, held as (mantissa, exponent)
    # so the far tails only round once, at the final scaling.
    man = [0.0] * (s + 1)
    exp = [0] * (s + 1)
    mode = min(int(math.floor(a)), s)
    man[mode] = 1.0
    for k in range(mode + 1, s + 1):
        m, de = math.frexp(man[k - 1] * a / k)
        man[k], exp[k] = m, exp[k - 1] + de
    for k in range(mode, 0, -1):
        m, de = math.frexp(man[k] * k / a)
        man[k - 1], exp[k - 1] = m, exp[k] + de
    total = math.fsum(math.ldexp(m, e) for m, e in zip(man, exp))
    probs = np.array([math.ldexp(m / total, e) for m, e in zip(man, exp)])
    return StateDistribution(probs, a)


def effective_capacity(base, grants, cell=None):
    """Channels available to ``cell`` after grants: borrowed ones added, lent ones removed.

    Without ``cell`` every grant counts as borrowed.
    """
    if cell is None:
        return base + sum(g.channels for g in grants)
    gained = sum(g.channels for g in grants if g.borrower == cell)
    lost = sum(g.channels for g in grants if g.lender == cell)
    return base + gained - lost


def overall_blocking(profile, per_cell_capacity, mode="traffic_weighted"):
    if mode not in MODES:
        raise DomainError(f"unknown mode {mode!r}")
    if len(per_cell_capacity) != len(profile.arrival):
        raise DomainError("capacity vector length does not match the traffic profile")
    pb = tuple(erlang_b(s, a) for s, a in zip(per_cell_capacity, profile.loads))
    lam = profile.arrival
    if mode == "literal":
        m = len(lam)
        carried = sum(l * (1.0 - p) for l, p in zip(lam, pb))
        overall = 1.0 - carried / (m * sum(per_cell_capacity))
    else:
        total = sum(lam)
        if total <= 0:
            raise DomainError("traffic-weighted blocking is undefined with zero total arrivals")
        overall = sum(l * p for l, p in zip(lam, pb)) / total
    return BlockingResult(pb, overall, mode)


def expected_eup_busy(load, capacity, cup_size):
    """Mean number of calls overflowing a CUP of ``cup_size`` channels into the EUP."""
    dist = birth_death_steady_state(load, 1.0, capacity)
    k = np.arange(dist.capacity + 1)
    return float(np.dot(np.maximum(k - cup_size, 0), dist.probs))


def proposed_capacities(profile, plan, borrower=REFERENCE_CELL, threshold=80,
                        headroom=None, quantum=20):
    """Static picture of the borrowing scheme at mean load.

    Lenders are charged their mean EUP overflow; the borrower then repeats
    the cascade in steps of ``quantum`` until its capacity covers its offered
    load plus ``headroom`` or no lender has channels left.  Returns the
    per-cell capacities (cell order 1..7) and the applied grants.
    """
    plan = plan.copy()
    s = plan.channels_per_cell
    if headroom is None:
        headroom = s - threshold
    loads = dict(zip(CELLS, profile.loads))
    for cell in CELLS:
        if cell == borrower:
            continue
        cs = plan[cell]
        cup_size = sum(cs.pool.total[int(b) - 1] for b in cs.allocation.cup_bands)
        busy = int(round(expected_eup_busy(loads[cell], s, cup_size)))
        for b in sorted(cs.allocation.eup_bands):
            take = min(busy, cs.pool.free(b))
            cs.pool.occupied[int(b) - 1] += take
            busy -= take

    state = LendingState()
    target = math.ceil(loads[borrower]) + headroom
    if loads[borrower] >= threshold:
        while True:
            deficit = target - effective_capacity(s, state.grants, borrower)
            if deficit <= 0:
                break
            grants = plan_assignment(
                BorrowRequest(borrower, quantum * math.ceil(deficit / quantum)), plan
            )
            if not grants:
                break
            apply_grants(state, plan, grants)
    caps = tuple(effective_capacity(s, state.grants, c) for c in CELLS)
    return caps, list(state.grants)
