"""Scenario files: flat ``key = value`` text with ``#`` comments.

Unknown keys and malformed values are rejected with the offending line
number.  Every key is optional; missing keys keep the defaults below, which
reproduce the reference parameter table (120 channels, threshold 80,
1.5 kW, 100 m, 90 s, 1 km).
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, fields

import numpy as np

from .errors import ConfigError
from .spectrum import Band

EQ2_MODES = {"literal": "literal", "weighted": "traffic_weighted",
             "traffic_weighted": "traffic_weighted"}


def _bool(text):
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def _ratio(text):
    parts = [p for p in text.replace(",", ":").split(":") if p.strip()]
    vals = tuple(float(p) for p in parts)
    if len(vals) != 7:
        raise ValueError(f"expected 7 ratio entries, got {len(vals)}")
    return vals


def _band(text):
    t = text.strip().upper()
    if t.startswith("F"):
        t = t[1:]
    return Band(int(t))


def _optional_float(text):
    return None if text.strip().lower() in ("auto", "none", "") else float(text)


def _eq2(text):
    t = text.strip().lower()
    if t not in EQ2_MODES:
        raise ValueError(f"eq2_mode must be literal or weighted, got {text!r}")
    return EQ2_MODES[t]


def _preset(text):
    t = text.strip().lower()
    if t not in ("log-distance", "hata"):
        raise ValueError(f"path_loss_preset must be log-distance or hata, got {text!r}")
    return t


@dataclass(frozen=True)
class Scenario:
    # reference parameter table
    channels_per_cell: int = 120
    channel_assign_threshold: int = 80
    tx_power_w: float = 1500.0
    bs_height_m: float = 100.0
    holding_time_s: float = 90.0
    cell_radius_m: float = 1000.0
    # traffic and sweep; the ratio lists the reference cell first, then cells 1..6
    arrival_ratio: tuple = (7.0, 1.0, 2.0, 4.0, 5.0, 5.0, 6.0)
    sweep_start: float = 2.0
    sweep_stop: float = 6.0
    sweep_step: float = 1.0
    duration_s: float = 20000.0
    warmup_s: float | None = None
    seed: int = 1
    hysteresis: int = 10
    headroom: int | None = None
    request_quantum: int = 20
    cup_area_fraction: float = 0.5
    simulate: bool = True
    eq2_mode: str = "traffic_weighted"
    # radio
    path_loss_preset: str = "log-distance"
    path_loss_exponent: float = 3.5
    carrier_hz: float = 900e6
    mobile_height_m: float = 1.5
    noise_power_w: float | None = None
    edge_snr_db: float = 20.0
    sector_gain_db: float = 10.0 * math.log10(3.0)
    sector_front_to_back_db: float = 20.0
    gamma_db: float = 9.0
    gamma_start_db: float = 0.0
    gamma_stop_db: float = 20.0
    gamma_step_db: float = 1.0
    radio_trials: int = 100000
    sinr_cdf_points: int = 101
    borrowed_band: Band = Band.F3
    alpha_lender: int = 3
    beta_lender: int = 2
    tiers: int = 2
    shadowing_db: float = 0.0
    output_dir: str = "results"

    def __post_init__(self):
        if self.sweep_step <= 0:
            raise ConfigError("sweep_step must be positive")
        if self.sweep_start > self.sweep_stop:
            raise ConfigError("sweep_start must not exceed sweep_stop")
        if self.gamma_step_db <= 0 or self.gamma_start_db > self.gamma_stop_db:
            raise ConfigError("gamma sweep needs start <= stop and a positive step")
        if self.channels_per_cell < 6 or self.channels_per_cell % 6:
            raise ConfigError("channels_per_cell must be a positive multiple of 6")
        if not 0 <= self.channel_assign_threshold <= self.channels_per_cell:
            raise ConfigError("channel_assign_threshold must lie in [0, channels_per_cell]")
        if self.radio_trials < 1 or self.sinr_cdf_points < 2:
            raise ConfigError("radio_trials must be >= 1 and sinr_cdf_points >= 2")
        if self.tiers not in (0, 1, 2):
            raise ConfigError("tiers must be 0, 1 or 2")
        if self.seed < 0 or self.seed >= 2**64:
            raise ConfigError("seed must be an unsigned 64-bit integer")

    def sweep(self):
        """Total arrival rates from start to stop inclusive."""
        n = int(math.floor((self.sweep_stop - self.sweep_start) / self.sweep_step + 1e-9)) + 1
        return [round(self.sweep_start + k * self.sweep_step, 12) for k in range(n)]

    def gamma_sweep(self):
        n = int(math.floor((self.gamma_stop_db - self.gamma_start_db) / self.gamma_step_db + 1e-9)) + 1
        return [round(self.gamma_start_db + k * self.gamma_step_db, 12) for k in range(n)]

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)


def _optional_int(text):
    return None if text.strip().lower() in ("auto", "none", "") else int(text)


# Field annotations are strings here (postponed evaluation).
_BY_TYPE = {
    "int": int,
    "float": float,
    "bool": _bool,
    "str": str.strip,
    "float | None": _optional_float,
    "int | None": _optional_int,
}
_BY_NAME = {
    "arrival_ratio": _ratio,
    "borrowed_band": _band,
    "eq2_mode": _eq2,
    "path_loss_preset": _preset,
}


def _converter(f):
    return _BY_NAME.get(f.name) or _BY_TYPE[f.type]


def parse_scenario(text, source="<scenario>"):
    known = {f.name: f for f in fields(Scenario)}
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in known:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        try:
            values[key] = _converter(known[key])(value)
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"{source}:{lineno}: bad value for {key}: {exc}") from None
    try:
        return Scenario(**values)
    except ConfigError as exc:
        raise ConfigError(f"{source}: {exc}") from None


def load_scenario(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read scenario {path}: {exc.strerror}") from None
    return parse_scenario(text, source=str(path))


def format_scenario(scenario):
    """Render a scenario back to the key-value format."""
    lines = []
    for f in fields(Scenario):
        v = getattr(scenario, f.name)
        if v is None:
            v = "auto"
        elif f.name == "arrival_ratio":
            v = ":".join(f"{x:g}" for x in v)
        elif isinstance(v, Band):
            v = v.name
        elif isinstance(v, bool):
            v = str(v).lower()
        elif isinstance(v, float):
            v = repr(v)
        lines.append(f"{f.name} = {v}")
    return "\n".join(lines) + "\n"


def radio_seed(seed):
    """Seed sequence for the radio Monte Carlo, separate from the traffic streams."""
    return np.random.SeedSequence([int(seed), 0x5241444F])
