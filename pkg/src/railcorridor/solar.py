"""Off-grid PV energy balance for sleep-capable repeater nodes.

The battery is simulated hour by hour.  Charging is lossless (all losses
are applied to PV production) and surplus above capacity is discarded.  The
battery never discharges below the cutoff: whatever part of an hour's load
would take it lower goes unserved, and that hour counts as downtime.
"""

from __future__ import annotations

import csv
import dataclasses
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .energy import PowerModelParams, TrafficSchedule, node_power, passage_duration
from .errors import InsufficientDataError, InvalidParameterError, NoFeasibleSystemError

HOUR = np.timedelta64(3600, "s")


@dataclass(frozen=True)
class PVSystem:
    peak_power: float = 540.0  # Wp
    battery_capacity: float = 720.0  # Wh
    discharge_cutoff: float = 0.40  # fraction of capacity kept in reserve
    system_loss: float = 0.14
    tilt: float = 90.0  # degrees
    azimuth: float = 0.0  # degrees, 0 = south

    def __post_init__(self):
        if not self.peak_power > 0:
            raise InvalidParameterError("peak_power must be > 0")
        if not self.battery_capacity > 0:
            raise InvalidParameterError("battery_capacity must be > 0")
        if not 0 <= self.discharge_cutoff < 1:
            raise InvalidParameterError("discharge_cutoff must be within [0, 1)")
        if not 0 <= self.system_loss < 1:
            raise InvalidParameterError("system_loss must be within [0, 1)")

    @property
    def usable_energy(self) -> float:
        return self.battery_capacity * (1.0 - self.discharge_cutoff)

    def replace(self, **changes) -> "PVSystem":
        return dataclasses.replace(self, **changes)


@dataclass(frozen=True, eq=False)
class IrradianceSeries:
    """Hourly plane-of-array irradiance (``kind="poa"``, W/m^2) or PV output (``kind="pv"``, W).

    ``timestamps`` are UTC ``datetime64[s]``.  A PV-output series carries the
    peak power it was computed for so it can be rescaled to other panel sizes.
    """

    timestamps: np.ndarray
    values: np.ndarray
    kind: str = "poa"
    reference_peak_power: float | None = None
    source: str = ""

    def __post_init__(self):
        ts = np.asarray(self.timestamps, dtype="datetime64[s]")
        vals = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "timestamps", ts)
        object.__setattr__(self, "values", vals)
        if self.kind not in ("poa", "pv"):
            raise InvalidParameterError(f"kind must be 'poa' or 'pv', got {self.kind!r}")
        if ts.ndim != 1 or ts.shape != vals.shape:
            raise InvalidParameterError("timestamps and values must be 1-D and equally long")
        if len(ts) > 1:
            bad = np.flatnonzero(np.diff(ts) != HOUR)
            if bad.size:
                i = int(bad[0]) + 1
                raise InvalidParameterError(
                    f"record {i} ({ts[i]}) breaks the hourly cadence after {ts[i - 1]}")
        bad = np.flatnonzero(~np.isfinite(vals) | (vals < 0))
        if bad.size:
            i = int(bad[0])
            raise InvalidParameterError(f"record {i} ({ts[i]}) has invalid value {vals[i]}")

    def __len__(self):
        return len(self.values)

    def __eq__(self, other):
        if not isinstance(other, IrradianceSeries):
            return NotImplemented
        return (self.kind == other.kind
                and self.reference_peak_power == other.reference_peak_power
                and np.array_equal(self.timestamps, other.timestamps)
                and np.array_equal(self.values, other.values))

    @property
    def hour_of_day(self) -> np.ndarray:
        return ((self.timestamps - self.timestamps.astype("datetime64[D]"))
                // HOUR).astype(int)

    @property
    def day_index(self) -> np.ndarray:
        days = self.timestamps.astype("datetime64[D]")
        return np.unique(days, return_inverse=True)[1]

    def production(self, system: PVSystem) -> np.ndarray:
        """Hourly PV production (W, equivalently Wh per hour) for ``system``."""
        if self.kind == "poa":
            return pv_production(self.values, system)
        if self.reference_peak_power:
            return self.values * (system.peak_power / self.reference_peak_power)
        return self.values.copy()

    def scaled(self, factor: float) -> "IrradianceSeries":
        return dataclasses.replace(self, values=self.values * factor)

    def slice(self, start: int, stop: int | None = None) -> "IrradianceSeries":
        return dataclasses.replace(self, timestamps=self.timestamps[start:stop],
                                   values=self.values[start:stop])

    @classmethod
    def concat(cls, parts: Sequence["IrradianceSeries"]) -> "IrradianceSeries":
        first = parts[0]
        return dataclasses.replace(first,
                                   timestamps=np.concatenate([p.timestamps for p in parts]),
                                   values=np.concatenate([p.values for p in parts]))

    @classmethod
    def from_csv(cls, path, reference_peak_power: float | None = None) -> "IrradianceSeries":
        """Read ``timestamp_iso8601`` plus a ``poa_wm2`` or ``pv_w`` column."""
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            fields = reader.fieldnames or []
            if "timestamp_iso8601" not in fields:
                raise InvalidParameterError(f"{path}: missing timestamp_iso8601 column")
            if "poa_wm2" in fields:
                kind, col = "poa", "poa_wm2"
            elif "pv_w" in fields:
                kind, col = "pv", "pv_w"
            else:
                raise InvalidParameterError(f"{path}: need a poa_wm2 or pv_w column")
            ts, vals = [], []
            for row in reader:
                stamp = row["timestamp_iso8601"].strip()
                if stamp.endswith("Z"):
                    stamp = stamp[:-1]
                elif stamp.endswith("+00:00"):
                    stamp = stamp[:-6]
                ts.append(np.datetime64(stamp, "s"))
                vals.append(float(row[col]))
        return cls(np.array(ts, dtype="datetime64[s]"), np.array(vals), kind,
                   reference_peak_power, source=str(path))

    def to_csv(self, path) -> None:
        col = "poa_wm2" if self.kind == "poa" else "pv_w"
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["timestamp_iso8601", col])
            for t, v in zip(self.timestamps, self.values):
                w.writerow([f"{t}Z", repr(float(v))])


@dataclass(frozen=True)
class ConsumptionProfile:
    """Energy drawn in each hour of the day (Wh), index 0 = 00:00-01:00."""

    hourly_wh: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "hourly_wh", tuple(float(v) for v in self.hourly_wh))
        if len(self.hourly_wh) != 24:
            raise InvalidParameterError("a consumption profile needs 24 hourly values")
        if any(v < 0 or not math.isfinite(v) for v in self.hourly_wh):
            raise InvalidParameterError("hourly consumption must be finite and >= 0")

    @property
    def daily_wh(self) -> float:
        return math.fsum(self.hourly_wh)


@dataclass(frozen=True)
class AutonomyStats:
    days_battery_full: float  # %
    days_battery_empty: float  # %
    downtime_hours: float
    min_soc: float  # Wh
    n_days: int
    first_downtime_hour: int | None = None  # index into the series

    @property
    def first_downtime_day(self) -> int | None:
        """1-based day of the first unserved hour, counted from the series start."""
        if self.first_downtime_hour is None:
            return None
        return self.first_downtime_hour // 24 + 1


@dataclass(frozen=True, eq=False)
class BatteryTrace:
    soc: np.ndarray  # Wh at the end of each hour
    served: np.ndarray  # Wh delivered to the load
    unserved: np.ndarray  # Wh of load dropped
    surplus: np.ndarray  # Wh of production discarded at full charge


def build_consumption_profile(schedule: TrafficSchedule, lp_params: PowerModelParams,
                              night_start_hour: float = 0.0) -> ConsumptionProfile:
    """Hourly load of one sleep-mode repeater.

    Night hours draw sleep power only; every other hour draws the average of
    sleep and full-load power weighted by the share of that hour with a train
    in the node's section.
    """
    p_full = node_power(lp_params, 1.0)
    p_sleep = node_power(lp_params, 0.0)
    busy = min(passage_duration(schedule, schedule.lp_spacing)
               * schedule.trains_per_hour / 3600.0, 1.0)
    p_active = busy * p_full + (1.0 - busy) * p_sleep

    night = schedule.night_hours
    hourly = []
    for h in range(24):
        # share of [h, h+1) inside the (possibly wrapping) night window
        overlap = 0.0
        for shift in (-24.0, 0.0, 24.0):
            lo = night_start_hour + shift
            overlap += max(0.0, min(h + 1.0, lo + night) - max(float(h), lo))
        overlap = min(overlap, 1.0)
        hourly.append(overlap * p_sleep + (1.0 - overlap) * p_active)
    return ConsumptionProfile(tuple(hourly))


def pv_production(irradiance, system: PVSystem):
    """PV output (W) for plane-of-array irradiance in W/m^2."""
    irr = np.asarray(irradiance, dtype=float)
    if np.any(irr < 0):
        raise InvalidParameterError("irradiance must be >= 0")
    out = system.peak_power * (irr / 1000.0) * (1.0 - system.system_loss)
    return float(out) if out.ndim == 0 else out


def battery_trace(production_wh, consumption_wh, capacity, cutoff,
                  initial_soc: float | None = None) -> BatteryTrace:
    """Hour-by-hour battery balance."""
    prod = np.asarray(production_wh, dtype=float)
    cons = np.asarray(consumption_wh, dtype=float)
    floor = cutoff * capacity
    soc = capacity if initial_soc is None else float(initial_soc)
    n = prod.size
    out_soc = np.empty(n)
    served = np.empty(n)
    unserved = np.empty(n)
    surplus = np.empty(n)
    for i in range(n):
        available = soc + prod[i] - floor
        served[i] = min(cons[i], max(available, 0.0))
        unserved[i] = cons[i] - served[i]
        level = soc + prod[i] - served[i]
        surplus[i] = max(level - capacity, 0.0)
        soc = min(level, capacity)
        out_soc[i] = soc
    return BatteryTrace(out_soc, served, unserved, surplus)


def simulate_battery(series: IrradianceSeries, profile: ConsumptionProfile, system: PVSystem,
                     hours: int | None = None) -> AutonomyStats:
    """Simulate ``hours`` hours (default: the whole series) from a full battery.

    A day counts as *full* if the battery reaches capacity in any of its
    hours and as *empty* if it sits at the cutoff or drops load in any hour.
    """
    if hours is None:
        hours = len(series)
    if hours <= 0:
        raise InsufficientDataError("the simulated horizon must contain at least one hour")
    if len(series) < hours:
        raise InsufficientDataError(
            f"series has {len(series)} hourly records, {hours} required")
    series = series.slice(0, hours)
    prod = series.production(system)
    cons = np.asarray(profile.hourly_wh)[series.hour_of_day]
    trace = battery_trace(prod, cons, system.battery_capacity, system.discharge_cutoff)

    day = series.day_index
    n_days = int(day.max()) + 1
    floor = system.discharge_cutoff * system.battery_capacity
    tol = 1e-9 * system.battery_capacity
    full_days = np.zeros(n_days, dtype=bool)
    empty_days = np.zeros(n_days, dtype=bool)
    np.logical_or.at(full_days, day, trace.soc >= system.battery_capacity - tol)
    np.logical_or.at(empty_days, day, (trace.soc <= floor + tol) | (trace.unserved > 0))

    down = np.flatnonzero(trace.unserved > 0)
    return AutonomyStats(
        days_battery_full=float(100.0 * full_days.mean()),
        days_battery_empty=float(100.0 * empty_days.mean()),
        downtime_hours=float(down.size),
        min_soc=float(trace.soc.min()),
        n_days=n_days,
        first_downtime_hour=int(down[0]) if down.size else None,
    )


def size_system(series: IrradianceSeries, profile: ConsumptionProfile,
                panel_options: Sequence[float], battery_options: Sequence[float],
                base_system: PVSystem | None = None) -> PVSystem:
    """Smallest panel, then smallest battery, with zero downtime over the series."""
    base_system = base_system or PVSystem()
    for name, opts in (("panel_options", panel_options), ("battery_options", battery_options)):
        if not opts:
            raise InvalidParameterError(f"{name} must not be empty")
        if list(opts) != sorted(opts):
            raise InvalidParameterError(f"{name} must be sorted ascending")
    for panel in panel_options:
        for battery in battery_options:
            candidate = base_system.replace(peak_power=float(panel), battery_capacity=float(battery))
            if simulate_battery(series, profile, candidate).downtime_hours == 0:
                return candidate
    raise NoFeasibleSystemError(
        f"no combination of {list(panel_options)} Wp and {list(battery_options)} Wh "
        "avoids downtime")


def load_series(path, reference_peak_power: float | None = None) -> IrradianceSeries:
    """Load a plain CSV series or a verbatim PVGIS JSON payload, by extension."""
    path = Path(path)
    if path.suffix.lower() == ".csv":
        return IrradianceSeries.from_csv(path, reference_peak_power)
    from .pvgis import parse_series

    return parse_series(path.read_bytes(), source=str(path))
