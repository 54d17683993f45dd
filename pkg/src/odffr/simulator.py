"""Discrete-event simulation of the 7-cell loss system.

Calls arrive per cell as Poisson streams and hold a channel for an
exponential time.  A call goes to the first free band in admission order
(CUP bands, then the cell's own EUP bands); in the proposed scheme the
borrowing cell may also place it on a borrowed channel.  Each cell owns two
random streams (inter-arrival gaps and holding times) derived from the run
seed, so both schemes see identical traffic when run with the same seed.
"""

from __future__ import annotations

import heapq
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .borrowing import (
    BorrowRequest,
    LendingState,
    apply_grants,
    needs_borrowing,
    plan_assignment,
    release_grants,
)
from .errors import ConfigError, ConsistencyError
from .spectrum import CELLS, REFERENCE_CELL, check_conservation, default_plan

SCHEMES = ("conventional", "proposed")

# Listed reference cell first, then cells 1..6.
REFERENCE_RATIO_LISTING = (7, 1, 2, 4, 5, 5, 6)


def ratio_from_listing(listing):
    """Reorder a reference-first ratio listing into cell order 1..7."""
    if len(listing) != 7:
        raise ConfigError(f"arrival ratio needs 7 entries, got {len(listing)}")
    return tuple(listing[1:]) + (listing[0],)


REFERENCE_RATIO = ratio_from_listing(REFERENCE_RATIO_LISTING)

_ARRIVAL = 0
_DEPARTURE = 1
_CHUNK = 4096


@dataclass(frozen=True)
class SimConfig:
    scheme: str = "conventional"
    total_arrival_rate: float = 4.0
    ratio: tuple = REFERENCE_RATIO
    holding_time_mean: float = 90.0
    duration: float = 20000.0
    warmup: float | None = None
    seed: int = 1
    threshold: int = 80
    hysteresis: int = 10
    headroom: int | None = None
    quantum: int = 20
    borrowers: tuple = (REFERENCE_CELL,)
    batches: int = 20
    check_invariants: bool = False

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ConfigError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if len(self.ratio) != 7 or any(r < 0 for r in self.ratio) or not any(r > 0 for r in self.ratio):
            raise ConfigError("ratio needs 7 nonnegative entries with at least one positive")
        if self.total_arrival_rate < 0:
            raise ConfigError("total arrival rate must be nonnegative")
        if self.holding_time_mean <= 0:
            raise ConfigError("holding time must be positive")
        if not self.duration > self.warmup_time >= 0:
            raise ConfigError("need duration > warmup >= 0")
        if self.batches < 1:
            raise ConfigError("batches must be at least 1")
        if self.hysteresis < 0 or self.quantum < 1:
            raise ConfigError("hysteresis must be >= 0 and quantum >= 1")

    @property
    def warmup_time(self):
        return 0.1 * self.duration if self.warmup is None else float(self.warmup)

    def arrival_rates(self):
        w = float(sum(self.ratio))
        return tuple(self.total_arrival_rate * r / w for r in self.ratio)


@dataclass
class Metrics:
    offered: list
    blocked: list
    carried: list
    occupancy_area: list  # channel-seconds per cell after warmup
    observed_time: float
    channels_per_cell: int
    grant_log: list = field(default_factory=list)
    batch_offered: list = field(default_factory=list)  # [batch][cell index]
    batch_blocked: list = field(default_factory=list)

    def blocking(self, cell):
        i = cell - 1
        return self.blocked[i] / self.offered[i] if self.offered[i] else 0.0

    def batch_standard_error(self, cell):
        """Batch-means standard error of the blocking estimate of ``cell``."""
        i = cell - 1
        ratios = [b[i] / o[i] for o, b in zip(self.batch_offered, self.batch_blocked) if o[i]]
        if len(ratios) < 2:
            return float("nan")
        return float(np.std(ratios, ddof=1) / math.sqrt(len(ratios)))

    def mean_occupancy(self, cell):
        return self.occupancy_area[cell - 1] / self.observed_time

    def merge(self, other):
        """Sum two runs of the same configuration."""
        return Metrics(
            [a + b for a, b in zip(self.offered, other.offered)],
            [a + b for a, b in zip(self.blocked, other.blocked)],
            [a + b for a, b in zip(self.carried, other.carried)],
            [a + b for a, b in zip(self.occupancy_area, other.occupancy_area)],
            self.observed_time + other.observed_time,
            self.channels_per_cell,
            self.grant_log + other.grant_log,
            self.batch_offered + other.batch_offered,
            self.batch_blocked + other.batch_blocked,
        )


class _Stream:
    """Chunked exponential draws: column 0 inter-arrival, column 1 holding."""

    def __init__(self, seed_seq, rate, mean_hold):
        self.gen = np.random.default_rng(seed_seq)
        self.scale_gap = 1.0 / rate
        self.mean_hold = mean_hold
        self.buf = []
        self.pos = 0

    def next(self):
        if self.pos >= len(self.buf):
            raw = self.gen.standard_exponential((_CHUNK, 2))
            self.buf = list(zip((raw[:, 0] * self.scale_gap).tolist(),
                                (raw[:, 1] * self.mean_hold).tolist()))
            self.pos = 0
        item = self.buf[self.pos]
        self.pos += 1
        return item


def _check_all(plan, state, n, s):
    check_conservation(plan)
    state.check(plan)
    busy = sum(sum(plan.pool(c).occupied) for c in CELLS) + sum(g.in_use for g in state.grants)
    if busy != sum(n):
        raise ConsistencyError(f"occupancy mismatch: pools+grants={busy}, calls={sum(n)}")
    free = sum(plan.pool(c).capacity() - sum(plan.pool(c).occupied) for c in CELLS)
    lent_idle = sum(g.idle for g in state.grants)
    # Calls on borrowed channels count at the borrower, so only idle lent channels add here.
    if sum(n) + free + lent_idle != 7 * s:
        raise ConsistencyError(
            f"channel conservation violated: busy={sum(n)} free={free} lent_idle={lent_idle}"
        )


def run_sim(config, plan=None, layout=None):
    """Simulate one configuration; ``plan`` is copied, never mutated.

    ``layout`` is accepted for interface symmetry; admission is count-based
    and does not depend on user positions.
    """
    plan = default_plan(120) if plan is None else plan.copy()
    s = plan.channels_per_cell
    headroom = s - config.threshold if config.headroom is None else config.headroom
    warmup = config.warmup_time
    horizon = config.duration
    proposed = config.scheme == "proposed"
    borrowers = frozenset(config.borrowers) if proposed else frozenset()

    rates = config.arrival_rates()
    children = np.random.SeedSequence(config.seed).spawn(7)
    streams = {
        c: _Stream(children[c - 1], rates[c - 1], config.holding_time_mean)
        for c in CELLS if rates[c - 1] > 0
    }

    pools = {c: plan.pool(c) for c in CELLS}
    order = {c: tuple(int(b) - 1 for b in plan.allocation(c).admission_order) for c in CELLS}
    state = LendingState()
    grant_log = []

    offered = [0] * 7
    blocked = [0] * 7
    n = [0] * 7
    area = [0.0] * 7
    last = [0.0] * 7

    n_batches = config.batches
    batch_len = (horizon - warmup) / n_batches
    b_off = [[0] * 7 for _ in range(n_batches)]
    b_blk = [[0] * 7 for _ in range(n_batches)]

    heap = []
    seq = 0
    for c, st in streams.items():
        gap, hold = st.next()
        heap.append((gap, seq, _ARRIVAL, c, hold, None))
        seq += 1
    heapq.heapify(heap)

    check = config.check_invariants
    while heap:
        t, _, kind, c, payload, grant = heapq.heappop(heap)
        if t > horizon:
            break
        i = c - 1
        if t > warmup:
            lt = last[i]
            area[i] += n[i] * (t - (lt if lt > warmup else warmup))
        last[i] = t

        if kind == _ARRIVAL:
            hold = payload
            gap, nxt_hold = streams[c].next()
            heapq.heappush(heap, (t + gap, seq, _ARRIVAL, c, nxt_hold, None))
            seq += 1
            counted = t >= warmup
            if counted:
                offered[i] += 1
                row = min(int((t - warmup) / batch_len), n_batches - 1)
                b_off[row][i] += 1

            if c in borrowers and needs_borrowing(n[i], config.threshold):
                deficit = n[i] + headroom - (s + state.borrowed_total(c))
                if deficit > 0:
                    grants = plan_assignment(
                        BorrowRequest(c, config.quantum * math.ceil(deficit / config.quantum)), plan
                    )
                    if grants:
                        apply_grants(state, plan, grants)
                        for g in grants:
                            grant_log.append((t, g.lender, g.borrower, int(g.band), g.channels, g.sector))

            pool = pools[c]
            tot, occ, lent = pool.total, pool.occupied, pool.lent
            placed = -1
            for b in order[c]:
                if tot[b] - occ[b] - lent[b] > 0:
                    occ[b] += 1
                    placed = b
                    break
            used = None
            if placed < 0 and c in borrowers:
                for g in state.grants:
                    if g.borrower == c and g.channels > g.in_use:
                        g.in_use += 1
                        used = g
                        break
            if placed >= 0 or used is not None:
                n[i] += 1
                heapq.heappush(heap, (t + hold, seq, _DEPARTURE, c, placed, used))
                seq += 1
            elif counted:
                blocked[i] += 1
                b_blk[row][i] += 1
        else:
            if grant is None:
                occ = pools[c].occupied
                if occ[payload] <= 0:
                    raise ConsistencyError(f"cell {c}: departure from empty band F{payload + 1}")
                occ[payload] -= 1
            else:
                if grant.in_use <= 0:
                    raise ConsistencyError(f"cell {c}: departure from idle grant {grant}")
                grant.in_use -= 1
            n[i] -= 1
            if c in borrowers and state.grants:
                release_grants(state, plan, n[i], config.threshold, config.hysteresis, borrower=c)
                for lender, borrower, band, count, sector in state.last_returned:
                    grant_log.append((t, lender, borrower, int(band), -count, sector))
        if check:
            _check_all(plan, state, n, s)

    for i in range(7):
        lt = last[i]
        area[i] += n[i] * (horizon - (lt if lt > warmup else warmup))

    carried = [o - b for o, b in zip(offered, blocked)]
    return Metrics(offered, blocked, carried, area, horizon - warmup, s, grant_log, b_off, b_blk)


def utilization(metrics, plan=None):
    """Time-averaged busy channels over all cells divided by 7*S."""
    s = metrics.channels_per_cell if plan is None else plan.channels_per_cell
    if metrics.observed_time <= 0:
        raise ConfigError("utilization needs a positive observation window")
    return sum(metrics.occupancy_area) / (metrics.observed_time * 7 * s)


@dataclass(frozen=True)
class PairedRow:
    total_arrival_rate: float
    conventional: Metrics
    proposed: Metrics


def _run_pair(args):
    config, rate, plan = args
    base = replace(config, total_arrival_rate=rate)
    return PairedRow(
        rate,
        run_sim(replace(base, scheme="conventional"), plan),
        run_sim(replace(base, scheme="proposed"), plan),
    )


def compare_schemes(config, sweep, plan=None, workers=1):
    """Both schemes at every swept total rate, sharing the seed (common random numbers)."""
    sweep = list(sweep)
    if not sweep:
        raise ConfigError("sweep must contain at least one total arrival rate")
    jobs = [(config, float(r), plan) for r in sweep]
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            rows = list(ex.map(_run_pair, jobs))
    else:
        rows = [_run_pair(j) for j in jobs]
    return sorted(rows, key=lambda r: r.total_arrival_rate)
