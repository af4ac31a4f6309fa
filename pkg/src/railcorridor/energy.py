"""Load-dependent node power, traffic duty cycles and corridor energy.

Nodes follow a linear power model: ``p0 + delta_p * p_max * load`` while
serving traffic and ``p_sleep`` when the load is exactly zero.  A node runs
at full load while a train is inside its coverage section and is idle (or
asleep) otherwise; the night quiet period is always spent asleep.
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass
from typing import Sequence

from .errors import InvalidParameterError

SECONDS_PER_DAY = 86_400.0


@dataclass(frozen=True)
class PowerModelParams:
    p_max: float  # W, RF output at full load
    p0: float  # W, baseline with the radio powered
    delta_p: float  # load slope
    p_sleep: float  # W

    def __post_init__(self):
        if not self.p_max > 0:
            raise InvalidParameterError("p_max must be > 0")
        if self.delta_p < 0:
            raise InvalidParameterError("delta_p must be >= 0")
        if not self.p0 >= self.p_sleep >= 0:
            raise InvalidParameterError("require p0 >= p_sleep >= 0")

    @property
    def full_load_power(self) -> float:
        return self.p0 + self.delta_p * self.p_max


#: Parameters of one high-power RRH (two per mast).
HP_RRH = PowerModelParams(p_max=40.0, p0=168.0, delta_p=2.8, p_sleep=112.0)
#: Parameters of one low-power repeater node.
LP_REPEATER = PowerModelParams(p_max=1.0, p0=24.26, delta_p=4.0, p_sleep=4.72)
#: Repeater totals from the prototype component breakdown (full load, sleep), W.
LP_COMPONENT_TOTALS = (28.38, 4.72)


@dataclass(frozen=True)
class TrafficSchedule:
    """Railway traffic driving node duty cycles (SI units)."""

    trains_per_hour: float = 8.0
    night_hours: float = 5.0
    train_length: float = 400.0  # m
    velocity: float = 200.0 / 3.6  # m/s
    lp_spacing: float = 200.0  # m

    def __post_init__(self):
        if self.trains_per_hour < 0:
            raise InvalidParameterError("trains_per_hour must be >= 0")
        if not 0 <= self.night_hours <= 24:
            raise InvalidParameterError("night_hours must be within [0, 24]")
        if not self.velocity > 0:
            raise InvalidParameterError("velocity must be > 0")
        if self.train_length < 0:
            raise InvalidParameterError("train_length must be >= 0")
        if not self.lp_spacing > 0:
            raise InvalidParameterError("lp_spacing must be > 0")

    @property
    def active_hours(self) -> float:
        return 24.0 - self.night_hours

    @property
    def passages_per_day(self) -> float:
        return self.trains_per_hour * self.active_hours


class IdleMode(str, enum.Enum):
    SLEEP_WHEN_IDLE = "sleep_when_idle"
    IDLE_ON = "idle_on"


class OperatingPolicy(str, enum.Enum):
    """Repeater operation; high-power RRHs sleep when idle in every policy."""

    LP_ALWAYS_ON = "lp_always_on"
    LP_SLEEP = "lp_sleep"
    LP_SOLAR = "lp_solar"


@dataclass(frozen=True)
class EnergyReport:
    isd: float
    n_service: int
    n_nodes: int
    policy: OperatingPolicy
    w_per_km: float  # all nodes, W/km (= Wh per hour and km)
    mains_w_per_km: float
    savings_vs_baseline: float  # fraction of baseline mains consumption saved


def idle_power(params: PowerModelParams) -> float:
    """Power when switched on but carrying no traffic."""
    return params.p0


def node_power(params: PowerModelParams, load: float) -> float:
    """Input power (W) at traffic load ``load`` in [0, 1]; zero load means sleep."""
    if not 0.0 <= load <= 1.0:
        raise InvalidParameterError(f"load must be within [0, 1], got {load}")
    if load == 0.0:
        return params.p_sleep
    return params.p0 + params.delta_p * params.p_max * load


def passage_duration(schedule: TrafficSchedule, coverage_length) -> float:
    """Seconds a node spends at full load for one train passage."""
    if coverage_length < 0:
        raise InvalidParameterError("coverage_length must be >= 0")
    return (coverage_length + schedule.train_length) / schedule.velocity


def full_load_fraction(schedule: TrafficSchedule, coverage_length) -> float:
    """Share of a 24 h day spent at full load."""
    per_hour = passage_duration(schedule, coverage_length) * schedule.trains_per_hour / 3600.0
    return per_hour * schedule.active_hours / 24.0


def average_node_power(params: PowerModelParams, schedule: TrafficSchedule, coverage_length,
                       idle: IdleMode | str = IdleMode.SLEEP_WHEN_IDLE) -> float:
    """24 h average input power (W) of one node."""
    f = full_load_fraction(schedule, coverage_length)
    p_idle = params.p_sleep if IdleMode(idle) is IdleMode.SLEEP_WHEN_IDLE else idle_power(params)
    return f * node_power(params, 1.0) + (1.0 - f) * p_idle


def lp_node_count(n_service: int) -> int:
    """Service repeaters plus the donor nodes mounted on the HP masts."""
    if n_service < 0:
        raise InvalidParameterError("n_service must be >= 0")
    return n_service + min(n_service, 2)


def _segment_power(isd, n_service, schedule, hp_params, lp_params, policy, rrh_per_site):
    site = rrh_per_site * average_node_power(hp_params, schedule, isd, IdleMode.SLEEP_WHEN_IDLE)
    idle = IdleMode.IDLE_ON if policy is OperatingPolicy.LP_ALWAYS_ON else IdleMode.SLEEP_WHEN_IDLE
    lp = lp_node_count(n_service) * average_node_power(lp_params, schedule, schedule.lp_spacing, idle)
    mains_lp = 0.0 if policy is OperatingPolicy.LP_SOLAR else lp
    return site + lp, site + mains_lp


def corridor_energy_per_km(isd, n_service, schedule: TrafficSchedule | None = None,
                           hp_params: PowerModelParams = HP_RRH,
                           lp_params: PowerModelParams = LP_REPEATER,
                           policy: OperatingPolicy | str = OperatingPolicy.LP_SLEEP,
                           rrh_per_site: int = 2, baseline_isd=500.0) -> EnergyReport:
    """Average corridor power per km for one mast plus the repeaters of its segment.

    Savings are measured on mains consumption against a conventional corridor
    (masts every ``baseline_isd`` meters, no repeaters, RRH sleep enabled).
    """
    if not isd > 0:
        raise InvalidParameterError("isd must be > 0")
    schedule = schedule or TrafficSchedule()
    policy = OperatingPolicy(policy)
    total, mains = _segment_power(isd, n_service, schedule, hp_params, lp_params, policy,
                                  rrh_per_site)
    _, base_mains = _segment_power(baseline_isd, 0, schedule, hp_params, lp_params,
                                   OperatingPolicy.LP_SLEEP, rrh_per_site)
    km = isd / 1000.0
    base_per_km = base_mains / (baseline_isd / 1000.0)
    mains_per_km = mains / km
    return EnergyReport(
        isd=float(isd),
        n_service=int(n_service),
        n_nodes=lp_node_count(n_service),
        policy=policy,
        w_per_km=total / km,
        mains_w_per_km=mains_per_km,
        savings_vs_baseline=1.0 - mains_per_km / base_per_km,
    )


class OverlappingPassagesWarning(UserWarning):
    """Two train passages kept a node awake at the same time."""


def even_timetable(schedule: TrafficSchedule, duration: float, night_start=0.0) -> list[float]:
    """Passage start times (s after midnight) evenly spread over the active hours.

    Each train gets one slot of ``3600 / trains_per_hour`` seconds and its
    wake window is centred in the slot.
    """
    if schedule.trains_per_hour <= 0 or schedule.active_hours <= 0:
        return []
    period = 3600.0 / schedule.trains_per_hour
    count = int(round(schedule.passages_per_day))
    start = (night_start + schedule.night_hours) * 3600.0
    return [(start + (k + 0.5) * period - duration / 2.0) % SECONDS_PER_DAY
            for k in range(count)]


def simulate_day(schedule: TrafficSchedule, node_coverage, params: PowerModelParams,
                 transition_time=0.5, arrivals: Sequence[float] | None = None,
                 night_start=0.0) -> float:
    """Event-driven daily energy (Wh) of a node that sleeps between passages.

    The node wakes when a train enters its section and sleeps once it has
    left.  Each wake and each sleep edge is billed ``transition_time`` seconds
    at full-load power instead of sleep power.  Overlapping wake windows are
    merged; an :class:`OverlappingPassagesWarning` is emitted when that
    happens.  ``arrivals`` overrides the even timetable (seconds after
    midnight; windows wrapping past midnight continue into the next morning).
    """
    if transition_time < 0:
        raise InvalidParameterError("transition_time must be >= 0")
    duration = passage_duration(schedule, node_coverage)
    if arrivals is None:
        arrivals = even_timetable(schedule, duration, night_start)

    windows: list[list[float]] = []
    overlaps = 0
    for t0 in sorted(float(t) % SECONDS_PER_DAY for t in arrivals):
        t1 = t0 + duration
        if windows and t0 <= windows[-1][1]:
            overlaps += t0 < windows[-1][1]
            windows[-1][1] = max(windows[-1][1], t1)
        else:
            windows.append([t0, t1])
    # the last window may spill past midnight into the first ones
    while len(windows) > 1 and windows[-1][1] - SECONDS_PER_DAY >= windows[0][0]:
        first = windows.pop(0)
        overlaps += windows[-1][1] - SECONDS_PER_DAY > first[0]
        windows[-1][1] = max(windows[-1][1], first[1] + SECONDS_PER_DAY)
    if overlaps:
        warnings.warn(f"{overlaps} overlapping passage(s) merged", OverlappingPassagesWarning,
                      stacklevel=2)

    p_full = node_power(params, 1.0)
    p_sleep = node_power(params, 0.0)
    awake = min(sum(t1 - t0 for t0, t1 in windows), SECONDS_PER_DAY)
    edges = 2 * len(windows) if awake < SECONDS_PER_DAY else 0
    energy_j = p_full * awake + p_sleep * (SECONDS_PER_DAY - awake)
    energy_j += edges * transition_time * (p_full - p_sleep)
    return energy_j / 3600.0


def daily_energy(params: PowerModelParams, schedule: TrafficSchedule, coverage_length,
                 idle: IdleMode | str = IdleMode.SLEEP_WHEN_IDLE) -> float:
    """Closed-form daily energy (Wh)."""
    return 24.0 * average_node_power(params, schedule, coverage_length, idle)


__all__ = [
    "EnergyReport", "HP_RRH", "IdleMode", "LP_COMPONENT_TOTALS", "LP_REPEATER",
    "OperatingPolicy", "OverlappingPassagesWarning", "PowerModelParams", "TrafficSchedule",
    "average_node_power", "corridor_energy_per_km", "daily_energy", "even_timetable",
    "full_load_fraction", "idle_power", "lp_node_count", "node_power", "passage_duration",
    "simulate_day",
]
