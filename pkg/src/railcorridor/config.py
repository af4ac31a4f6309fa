"""Run configuration: every tunable in one validated document.

Defaults reproduce the reference corridor; a config file only needs the
keys it overrides.  Unknown keys are rejected at every nesting level.
"""

from __future__ import annotations

import json
from pathlib import Path

import yaml
from pydantic import BaseModel, ConfigDict, Field

from .corridor import CorridorConfig, ThroughputModel
from .energy import HP_RRH, LP_REPEATER, PowerModelParams, TrafficSchedule
from .planner import PlacementStrategy
from .pvgis import PVGISRequest
from .solar import PVSystem

#: Inter-site distances used for the energy scenarios when no sweep is run.
REFERENCE_MAX_ISD = {1: 1250.0, 2: 1450.0, 3: 1600.0, 4: 1800.0, 5: 1950.0,
                     6: 2100.0, 7: 2250.0, 8: 2400.0, 9: 2500.0, 10: 2650.0}

CITIES = {
    "madrid": (40.4168, -3.7038),
    "lyon": (45.7640, 4.8357),
    "vienna": (48.2082, 16.3738),
    "berlin": (52.5200, 13.4050),
}


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


class PlannerSettings(_Section):
    isd_step: float = Field(50.0, gt=0, description="ISD search step, m")
    grid_step: float = Field(1.0, gt=0, description="track sampling step, m")
    snr_threshold: float | None = Field(
        None, description="dB; default is the SNR where peak throughput is first reached")


class EnergySettings(_Section):
    rrh_per_site: int = Field(2, ge=1)
    baseline_isd: float = Field(500.0, gt=0, description="conventional corridor ISD, m")
    transition_time: float = Field(0.5, ge=0, description="sleep/wake transition, s")
    isd_by_nodes: dict[int, float] = Field(default_factory=lambda: dict(REFERENCE_MAX_ISD))


class SolarSettings(_Section):
    night_start_hour: float = Field(0.0, ge=0, lt=24, description="UTC hour the quiet period starts")
    panel_options: list[float] = Field(default_factory=lambda: [540.0, 600.0, 720.0])
    battery_options: list[float] = Field(default_factory=lambda: [720.0, 1080.0, 1440.0, 2160.0])


class PVGISSettings(_Section):
    url: str = "https://re.jrc.ec.europa.eu/api/v5_3/seriescalc"
    raddatabase: str | None = "PVGIS-SARAH3"
    start_year: int = 2019
    end_year: int = 2019
    retries: int = Field(3, ge=1)
    backoff: float = Field(1.0, ge=0, description="first retry delay, s (doubles)")
    timeout: float = Field(30.0, gt=0, description="per-attempt timeout, s")
    cities: dict[str, tuple[float, float]] = Field(default_factory=lambda: dict(CITIES))


class RunConfig(_Section):
    corridor: CorridorConfig = CorridorConfig()
    throughput: ThroughputModel = ThroughputModel()
    placement: PlacementStrategy = PlacementStrategy()
    planner: PlannerSettings = PlannerSettings()
    schedule: TrafficSchedule = TrafficSchedule()
    hp_power: PowerModelParams = HP_RRH
    lp_power: PowerModelParams = LP_REPEATER
    energy: EnergySettings = EnergySettings()
    pv: PVSystem = PVSystem()
    solar: SolarSettings = SolarSettings()
    pvgis: PVGISSettings = PVGISSettings()

    def effective(self) -> dict:
        """JSON-ready dump of the full configuration, defaults included."""
        return self.model_dump(mode="json")

    def pvgis_request(self, city: str | None = None, lat=None, lon=None) -> PVGISRequest:
        if city is not None:
            try:
                lat, lon = self.pvgis.cities[city.lower()]
            except KeyError:
                raise ValueError(f"unknown city {city!r}; known: {sorted(self.pvgis.cities)}")
        if lat is None or lon is None:
            raise ValueError("need a city or both lat and lon")
        return PVGISRequest(
            lat=float(lat), lon=float(lon), tilt=self.pv.tilt, azimuth=self.pv.azimuth,
            peak_power=self.pv.peak_power / 1000.0, loss=round(self.pv.system_loss * 100.0, 6),
            start_year=self.pvgis.start_year, end_year=self.pvgis.end_year,
            raddatabase=self.pvgis.raddatabase,
        )


def load_config(path=None) -> RunConfig:
    """Read a YAML or JSON config; ``None`` gives the defaults."""
    if path is None:
        return RunConfig()
    text = Path(path).read_text()
    if Path(path).suffix.lower() == ".json":
        data = json.loads(text)
    else:
        data = yaml.safe_load(text)
    return RunConfig.model_validate(data or {})
