"""Generate synthetic PVGIS-shaped hourly payloads for the four test cities.

These are NOT PVGIS data.  They come from a textbook clear-sky geometry
(Cooper declination, Spencer equation of time, Erbs diffuse split,
isotropic sky) scaled by a daily clearness index, modelled as an AR(1)
process around rough monthly climatological means.  The files exist so the
ingest and sizing paths can be exercised offline; absolute numbers are not
meant to match any published result.

Run from the repository root:  python tests/fixtures/make_synthetic_pvgis.py
"""

import json
import math
from pathlib import Path

import numpy as np

YEAR = 2019
PEAK_KW = 0.54
LOSS = 0.14
ALBEDO = 0.2

# approximate monthly mean clearness index, Jan..Dec
CLIMATE = {
    "madrid": ((40.4168, -3.7038), [0.52, 0.56, 0.60, 0.58, 0.60, 0.66, 0.70, 0.68, 0.62, 0.55, 0.50, 0.48]),
    "lyon": ((45.7640, 4.8357), [0.38, 0.44, 0.50, 0.50, 0.52, 0.56, 0.60, 0.58, 0.54, 0.46, 0.38, 0.34]),
    "vienna": ((48.2082, 16.3738), [0.32, 0.40, 0.44, 0.48, 0.50, 0.52, 0.54, 0.54, 0.50, 0.44, 0.32, 0.28]),
    "berlin": ((52.5200, 13.4050), [0.30, 0.36, 0.40, 0.46, 0.50, 0.50, 0.50, 0.50, 0.46, 0.40, 0.30, 0.26]),
}
SEEDS = {"madrid": 11, "lyon": 12, "vienna": 13, "berlin": 14}


def erbs_diffuse_fraction(kt):
    if kt <= 0.22:
        return 1.0 - 0.09 * kt
    if kt <= 0.80:
        return 0.9511 - 0.1604 * kt + 4.388 * kt**2 - 16.638 * kt**3 + 12.336 * kt**4
    return 0.165


def daily_clearness(monthly, seed):
    rng = np.random.default_rng(seed)
    days = np.arange(np.datetime64(f"{YEAR}-01-01"), np.datetime64(f"{YEAR + 1}-01-01"))
    months = days.astype("datetime64[M]").astype(int) % 12
    kt = np.empty(days.size)
    anomaly = 0.0
    for i, m in enumerate(months):
        anomaly = 0.6 * anomaly + rng.normal(0.0, 0.12)
        kt[i] = np.clip(monthly[m] + anomaly, 0.05, 0.78)
    return kt


def hourly_records(lat, lon, kt_daily):
    phi = math.radians(lat)
    records = []
    for day, kt in enumerate(kt_daily):
        n = day + 1
        decl = math.radians(23.45 * math.sin(math.radians(360.0 * (284 + n) / 365.0)))
        b = 2 * math.pi * (n - 1) / 365.0
        eot = 229.18 * (0.000075 + 0.001868 * math.cos(b) - 0.032077 * math.sin(b)
                        - 0.014615 * math.cos(2 * b) - 0.04089 * math.sin(2 * b))
        g0 = 1367.0 * (1 + 0.033 * math.cos(2 * math.pi * n / 365.0))
        date = np.datetime64(f"{YEAR}-01-01") + np.timedelta64(day, "D")
        stamp_day = str(date).replace("-", "")
        for hour in range(24):
            solar_time = hour + 0.5 + lon / 15.0 + eot / 60.0
            omega = math.radians(15.0 * (solar_time - 12.0))
            cos_z = math.sin(phi) * math.sin(decl) + math.cos(phi) * math.cos(decl) * math.cos(omega)
            poa = 0.0
            if cos_z > 0.01:
                ghi = kt * g0 * cos_z
                dhi = erbs_diffuse_fraction(kt) * ghi
                dni = (ghi - dhi) / cos_z
                # vertical plane facing due south
                cos_i = -math.sin(decl) * math.cos(phi) + math.cos(decl) * math.sin(phi) * math.cos(omega)
                poa = dni * max(cos_i, 0.0) + dhi * 0.5 + ghi * ALBEDO * 0.5
            p = PEAK_KW * 1000.0 * poa / 1000.0 * (1 - LOSS)
            records.append({"time": f"{stamp_day}:{hour:02d}10", "P": round(p, 2), "G(i)": round(poa, 2)})
    return records


def build(city):
    (lat, lon), monthly = CLIMATE[city]
    kt = daily_clearness(monthly, SEEDS[city])
    return {
        "inputs": {
            "location": {"latitude": lat, "longitude": lon},
            "meteo_data": {"radiation_db": "SYNTHETIC (not PVGIS)"},
            "mounting_system": {"fixed": {"slope": {"value": 90}, "azimuth": {"value": 0}}},
            "pv_module": {"peak_power": PEAK_KW, "system_loss": LOSS * 100},
        },
        "outputs": {"hourly": hourly_records(lat, lon, kt)},
        "meta": {"note": "synthetic clear-sky x AR(1) clearness; generated by make_synthetic_pvgis.py"},
    }


def main():
    out = Path(__file__).parent
    for city in CLIMATE:
        path = out / f"synthetic_pvgis_{city}_{YEAR}.json"
        path.write_text(json.dumps(build(city), separators=(",", ":")))
        print(path)


if __name__ == "__main__":
    main()
