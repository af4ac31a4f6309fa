"""PVGIS hourly-series client with an on-disk, fingerprint-keyed cache.

Responses are stored verbatim next to a small JSON metadata record, so a
cached request never touches the network again and cached payloads can be
audited by hand.  Tests and offline runs either pre-seed the cache or parse
fixture payloads directly with :func:`parse_series`.
"""

from __future__ import annotations

import datetime as dt
import hashlib
import json
import logging
import os
import time
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Callable

import numpy as np
from filelock import FileLock

from .errors import HTTPStatusError, InvalidParameterError, NetworkError, ParseError
from .solar import IrradianceSeries

log = logging.getLogger(__name__)

CACHE_ENV_VAR = "PVGIS_CACHE_DIR"


@dataclass(frozen=True)
class PVGISRequest:
    lat: float
    lon: float
    tilt: float = 90.0
    azimuth: float = 0.0  # PVGIS aspect: 0 = south, 90 = west
    peak_power: float = 0.54  # kWp
    loss: float = 14.0  # %
    start_year: int = 2019
    end_year: int = 2019
    raddatabase: str | None = "PVGIS-SARAH3"

    def __post_init__(self):
        if not -90 <= self.lat <= 90:
            raise InvalidParameterError(f"lat out of range: {self.lat}")
        if not -180 <= self.lon <= 180:
            raise InvalidParameterError(f"lon out of range: {self.lon}")
        if self.end_year < self.start_year:
            raise InvalidParameterError("end_year precedes start_year")
        if not self.peak_power > 0:
            raise InvalidParameterError("peak_power must be > 0")

    def query_params(self) -> dict:
        params = {
            "lat": self.lat,
            "lon": self.lon,
            "angle": self.tilt,
            "aspect": self.azimuth,
            "pvcalculation": 1,
            "peakpower": self.peak_power,
            "loss": self.loss,
            "startyear": self.start_year,
            "endyear": self.end_year,
            "outputformat": "json",
        }
        if self.raddatabase:
            params["raddatabase"] = self.raddatabase
        return params

    def fingerprint(self) -> str:
        canonical = {k: (float(v) if isinstance(v, (int, float)) and not isinstance(v, bool)
                         else v)
                     for k, v in asdict(self).items()}
        blob = json.dumps(canonical, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:32]


@dataclass(frozen=True)
class CacheEntry:
    fingerprint: str
    fetched_at: str  # ISO 8601 UTC
    payload_path: str
    request: dict
    url: str = ""
    database: str | None = None


def _parse_time(stamp: str) -> np.datetime64:
    # PVGIS uses "YYYYMMDD:HHMM" in UTC
    return np.datetime64(dt.datetime.strptime(stamp, "%Y%m%d:%H%M"), "s")


def parse_series(payload: bytes, source: str = "") -> IrradianceSeries:
    """Parse a PVGIS ``seriescalc`` JSON response.

    If the response carries PV power (``P``) the series is a PV-output
    series scaled to the requested peak power; otherwise plane-of-array
    irradiance ``G(i)`` is used.

    Raises:
        ParseError: naming the first offending record.
    """
    try:
        doc = json.loads(payload)
        hourly = doc["outputs"]["hourly"]
    except (ValueError, KeyError, TypeError) as exc:
        raise ParseError(f"not a PVGIS hourly-series response: {exc}") from None
    if not isinstance(hourly, list) or not hourly:
        raise ParseError("payload contains no hourly records")

    key = "P" if "P" in hourly[0] else "G(i)"
    if key not in hourly[0]:
        raise ParseError("record 0 has neither 'P' nor 'G(i)'")
    stamps = np.empty(len(hourly), dtype="datetime64[s]")
    values = np.empty(len(hourly))
    for i, rec in enumerate(hourly):
        try:
            stamps[i] = _parse_time(rec["time"])
            values[i] = float(rec[key])
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"record {i}: malformed ({exc})") from None
        if not np.isfinite(values[i]) or values[i] < 0:
            raise ParseError(f"record {i} ({rec['time']}): invalid {key} value {rec[key]}")
        if i and stamps[i] <= stamps[i - 1]:
            raise ParseError(f"record {i} ({rec['time']}): timestamp not increasing")
        if i and stamps[i] - stamps[i - 1] != np.timedelta64(3600, "s"):
            raise ParseError(f"record {i} ({rec['time']}): breaks hourly cadence")

    ref = None
    if key == "P":
        try:
            ref = float(doc["inputs"]["pv_module"]["peak_power"]) * 1000.0
        except (KeyError, TypeError, ValueError):
            ref = None
    return IrradianceSeries(stamps, values, kind="pv" if key == "P" else "poa",
                            reference_peak_power=ref, source=source)


def default_cache_dir() -> Path:
    return Path(os.environ.get(CACHE_ENV_VAR, "./pvgis-cache"))


class PVGISClient:
    """Fetch PVGIS hourly series through a local cache.

    ``session`` is anything with a ``requests``-style ``get`` method; it is
    created lazily so fully cached or offline runs never import a network
    stack.  With ``offline=True`` a cache miss raises :class:`NetworkError`.
    """

    def __init__(self, base_url: str, cache_dir=None, retries: int = 3, backoff: float = 1.0,
                 timeout: float = 30.0, session=None, offline: bool = False,
                 sleep: Callable[[float], None] = time.sleep):
        if retries < 1:
            raise InvalidParameterError("retries must be >= 1")
        self.base_url = base_url
        self.cache_dir = Path(cache_dir) if cache_dir is not None else default_cache_dir()
        self.retries = retries
        self.backoff = backoff
        self.timeout = timeout
        self.offline = offline
        self._session = session
        self._sleep = sleep

    @property
    def session(self):
        if self._session is None:
            import requests

            self._session = requests.Session()
        return self._session

    def _paths(self, fp: str) -> tuple[Path, Path, Path]:
        return (self.cache_dir / f"{fp}.payload", self.cache_dir / f"{fp}.json",
                self.cache_dir / f"{fp}.lock")

    def cached_entry(self, req: PVGISRequest) -> CacheEntry | None:
        payload, meta, _ = self._paths(req.fingerprint())
        if payload.exists() and meta.exists():
            return CacheEntry(**json.loads(meta.read_text()))
        return None

    def fetch_payload(self, req: PVGISRequest) -> bytes:
        """Raw response bytes for ``req``, from cache when available."""
        fp = req.fingerprint()
        payload_path, meta_path, lock_path = self._paths(fp)
        self.cache_dir.mkdir(parents=True, exist_ok=True)
        # single-flight per fingerprint, across threads and processes
        with FileLock(str(lock_path)):
            if payload_path.exists() and meta_path.exists():
                log.debug("PVGIS cache hit %s", fp)
                return payload_path.read_bytes()
            if self.offline:
                raise NetworkError(f"offline mode and no cached payload for {fp}")
            body = self._download(req)
            parse_series(body)  # never cache a payload we cannot read
            tmp = payload_path.with_suffix(".tmp")
            tmp.write_bytes(body)
            tmp.replace(payload_path)
            database = None
            try:
                database = json.loads(body)["inputs"]["meteo_data"]["radiation_db"]
            except (KeyError, TypeError, ValueError):
                pass
            entry = CacheEntry(
                fingerprint=fp,
                fetched_at=dt.datetime.now(dt.timezone.utc).isoformat(timespec="seconds"),
                payload_path=payload_path.name,
                request=asdict(req),
                url=self.base_url,
                database=database or req.raddatabase,
            )
            meta_path.write_text(json.dumps(asdict(entry), indent=2, sort_keys=True))
            return body

    def fetch_series(self, req: PVGISRequest) -> IrradianceSeries:
        return parse_series(self.fetch_payload(req), source=f"pvgis:{req.fingerprint()}")

    def _download(self, req: PVGISRequest) -> bytes:
        last_exc: Exception | None = None
        for attempt in range(self.retries):
            if attempt:
                self._sleep(self.backoff * 2 ** (attempt - 1))
            try:
                resp = self.session.get(self.base_url, params=req.query_params(),
                                        timeout=self.timeout)
            except Exception as exc:  # transport errors of any HTTP library
                log.warning("PVGIS attempt %d/%d failed: %s", attempt + 1, self.retries, exc)
                last_exc = exc
                continue
            status = resp.status_code
            if status >= 500:
                last_exc = HTTPStatusError(status, resp.text[:200])
                continue
            if status != 200:
                raise HTTPStatusError(status, resp.text[:200])
            return resp.content
        if isinstance(last_exc, HTTPStatusError):
            raise last_exc
        raise NetworkError(f"PVGIS unreachable after {self.retries} attempts: {last_exc}")
