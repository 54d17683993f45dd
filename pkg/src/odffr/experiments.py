"""Experiment sweeps turning a Scenario into the rows of each result file."""

from __future__ import annotations

import numpy as np

from .cluster import build_cluster, sample_position
from .queueing import TrafficProfile, erlang_b, overall_blocking, proposed_capacities
from .radio import (
    AntennaPattern,
    LinkBudget,
    borrowed_band_scenario,
    free_space_reference,
    hata_urban,
    noise_for_edge_snr,
    outage_from_sinr,
    paired_sinr,
    scenario_sinr,
)
from .scenario import radio_seed
from .simulator import SimConfig, compare_schemes, ratio_from_listing, utilization
from .spectrum import REFERENCE_CELL, default_plan


def cell_ratio(scenario):
    return ratio_from_listing(scenario.arrival_ratio)


def sim_config(scenario):
    return SimConfig(
        ratio=cell_ratio(scenario),
        holding_time_mean=scenario.holding_time_s,
        duration=scenario.duration_s,
        warmup=scenario.warmup_s,
        seed=scenario.seed,
        threshold=scenario.channel_assign_threshold,
        hysteresis=scenario.hysteresis,
        headroom=scenario.headroom,
        quantum=scenario.request_quantum,
    )


def analytic_point(scenario, rate, plan=None):
    plan = default_plan(scenario.channels_per_cell) if plan is None else plan
    s = scenario.channels_per_cell
    profile = TrafficProfile.from_ratio(rate, cell_ratio(scenario), scenario.holding_time_s)
    conv_caps = (s,) * 7
    prop_caps, _ = proposed_capacities(
        profile, plan, REFERENCE_CELL, scenario.channel_assign_threshold,
        scenario.headroom, scenario.request_quantum,
    )
    loads = profile.loads
    out = {"total_arrival_rate": rate}
    for name, caps in (("conventional", conv_caps), ("proposed", prop_caps)):
        pb = [erlang_b(c, a) for c, a in zip(caps, loads)]
        out[f"{name}_blocking"] = pb[REFERENCE_CELL - 1]
        out[f"{name}_utilization"] = sum(a * (1 - b) for a, b in zip(loads, pb)) / (7 * s)
        if sum(profile.arrival) > 0 or scenario.eq2_mode == "literal":
            out[f"{name}_overall"] = overall_blocking(profile, caps, scenario.eq2_mode).overall
        else:
            out[f"{name}_overall"] = None
    return out


def blocking_and_utilization(scenario, simulate=True, workers=1):
    """Rows for ``blocking.csv``, ``utilization.csv`` and ``grants.csv``."""
    plan = default_plan(scenario.channels_per_cell)
    rates = scenario.sweep()
    analytic = [analytic_point(scenario, r, plan) for r in rates]
    sims = {}
    if simulate:
        for row in compare_schemes(sim_config(scenario), rates, plan, workers=workers):
            sims[row.total_arrival_rate] = row

    blocking, util, grants = [], [], []
    for a in analytic:
        r = a["total_arrival_rate"]
        sim = sims.get(r)
        blocking.append({
            "total_arrival_rate": r,
            "conventional_analytic": a["conventional_blocking"],
            "proposed_analytic": a["proposed_blocking"],
            "conventional_simulated": sim.conventional.blocking(REFERENCE_CELL) if sim else None,
            "proposed_simulated": sim.proposed.blocking(REFERENCE_CELL) if sim else None,
            "overall_conventional_analytic": a["conventional_overall"],
            "overall_proposed_analytic": a["proposed_overall"],
        })
        util.append({
            "total_arrival_rate": r,
            "conventional_analytic": a["conventional_utilization"],
            "proposed_analytic": a["proposed_utilization"],
            "conventional_simulated": utilization(sim.conventional) if sim else None,
            "proposed_simulated": utilization(sim.proposed) if sim else None,
        })
        if sim:
            for t, lender, borrower, band, channels, sector in sim.proposed.grant_log:
                grants.append((r, t, lender, borrower, f"F{band}", channels, sector))
    return blocking, util, grants


def radio_models(scenario):
    layout = build_cluster(scenario.cell_radius_m, scenario.cup_area_fraction)
    plan = default_plan(scenario.channels_per_cell)
    if scenario.path_loss_preset == "hata":
        model = hata_urban(scenario.carrier_hz / 1e6, scenario.bs_height_m, scenario.mobile_height_m)
    else:
        model = free_space_reference(scenario.carrier_hz, scenario.path_loss_exponent)
    budget = LinkBudget(scenario.tx_power_w, scenario.bs_height_m)
    noise = scenario.noise_power_w
    if noise is None:
        noise = noise_for_edge_snr(budget, model, scenario.cell_radius_m, scenario.edge_snr_db)
    budget = LinkBudget(scenario.tx_power_w, scenario.bs_height_m, noise)
    pattern = AntennaPattern(scenario.sector_gain_db, scenario.sector_front_to_back_db)
    return layout, plan, budget, model, pattern


def radio_scenarios(scenario):
    layout, plan, budget, model, pattern = radio_models(scenario)
    kwargs = dict(band=scenario.borrowed_band, alpha=scenario.alpha_lender,
                  beta=scenario.beta_lender, pattern=pattern, tiers=scenario.tiers)
    proposed = borrowed_band_scenario(layout, plan, sectored=True, **kwargs)
    unsectored = borrowed_band_scenario(layout, plan, sectored=False, **kwargs)
    return layout, budget, model, proposed, unsectored


def radio_samples(scenario):
    """Paired SINR arrays ``{name: linear sinr}`` at shared user positions."""
    layout, budget, model, proposed, unsectored = radio_scenarios(scenario)
    rng = np.random.default_rng(radio_seed(scenario.seed))
    if scenario.shadowing_db > 0:
        pts = sample_position(layout, proposed.region, rng, size=scenario.radio_trials)
        # Both schemes see the same shadowing draws.
        state = rng.bit_generator.state
        vals = {}
        for sc in (unsectored, proposed):
            rng.bit_generator.state = state
            vals[sc.name] = scenario_sinr(sc, pts, budget, model, scenario.shadowing_db, rng)
        return pts, vals
    return paired_sinr([unsectored, proposed], scenario.radio_trials, rng, layout, budget, model)


def radio_rows(scenario):
    """Rows for ``sinr_cdf.csv`` and ``outage.csv``."""
    _, vals = radio_samples(scenario)
    levels = np.linspace(0.0, 1.0, scenario.sinr_cdf_points)
    with np.errstate(divide="ignore"):
        db = {k: 10.0 * np.log10(v) for k, v in vals.items()}
    cdf = []
    for q in levels:
        cdf.append({
            "cdf": float(q),
            "unsectored_sinr_db": float(np.quantile(db["unsectored"], q)),
            "proposed_sinr_db": float(np.quantile(db["proposed"], q)),
        })
    outage = []
    for g in scenario.gamma_sweep():
        u = outage_from_sinr(vals["unsectored"], g)
        p = outage_from_sinr(vals["proposed"], g)
        outage.append({
            "gamma_db": g,
            "unsectored": u.probability,
            "proposed": p.probability,
            "unsectored_stderr": u.stderr,
            "proposed_stderr": p.stderr,
        })
    return cdf, outage
