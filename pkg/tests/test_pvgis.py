import json

import numpy as np
import pytest

from railcorridor.errors import HTTPStatusError, NetworkError, ParseError
from railcorridor.pvgis import PVGISClient, PVGISRequest, default_cache_dir, parse_series

URL = "https://example.invalid/seriescalc"


def payload(records, pv=True, peak=0.54):
    key = "P" if pv else "G(i)"
    doc = {
        "inputs": {"pv_module": {"peak_power": peak}, "meteo_data": {"radiation_db": "PVGIS-SARAH3"}},
        "outputs": {"hourly": [{"time": t, key: v} for t, v in records]},
    }
    return json.dumps(doc).encode()


GOOD = payload([("20190101:0010", 0.0), ("20190101:0110", 12.5)])


class FakeResponse:
    def __init__(self, status, content=b""):
        self.status_code = status
        self.content = content
        self.text = content.decode(errors="replace")


class FakeSession:
    def __init__(self, responses):
        self.responses = list(responses)
        self.calls = []

    def get(self, url, params=None, timeout=None):
        self.calls.append(params)
        item = self.responses.pop(0)
        if isinstance(item, Exception):
            raise item
        return item


def client(tmp_path, session, **kw):
    return PVGISClient(URL, cache_dir=tmp_path, session=session, sleep=lambda s: None, **kw)


class TestParse:
    def test_two_records(self):
        s = parse_series(GOOD)
        assert s.kind == "pv" and s.reference_peak_power == 540.0
        assert list(s.values) == [0.0, 12.5]
        assert s.timestamps[1] - s.timestamps[0] == np.timedelta64(3600, "s")

    def test_irradiance_payload(self):
        s = parse_series(payload([("20190101:0010", 300.0)], pv=False))
        assert s.kind == "poa" and s.reference_peak_power is None

    def test_out_of_order(self):
        bad = payload([("20190101:0110", 1.0), ("20190101:0010", 1.0)])
        with pytest.raises(ParseError, match="record 1"):
            parse_series(bad)

    def test_gap(self):
        bad = payload([("20190101:0010", 1.0), ("20190101:0310", 1.0)])
        with pytest.raises(ParseError, match="cadence"):
            parse_series(bad)

    def test_negative(self):
        with pytest.raises(ParseError, match="record 0"):
            parse_series(payload([("20190101:0010", -3.0)]))

    @pytest.mark.parametrize("raw", [b"not json", b"{}", b'{"outputs": {"hourly": []}}',
                                     b'{"outputs": {"hourly": [{"time": "x", "P": 1}]}}',
                                     b'{"outputs": {"hourly": [{"time": "20190101:0010"}]}}'])
    def test_malformed(self, raw):
        with pytest.raises(ParseError):
            parse_series(raw)

    def test_fixture_full_year(self, fixtures_dir):
        s = parse_series((fixtures_dir / "synthetic_pvgis_vienna_2019.json").read_bytes())
        assert len(s) == 8760
        assert s.kind == "pv" and s.reference_peak_power == 540.0


class TestRequest:
    def test_fingerprint_stable(self):
        a = PVGISRequest(lat=48.2, lon=16.37)
        b = PVGISRequest(lon=16.37, lat=48.2, tilt=90, azimuth=0.0)
        assert a.fingerprint() == b.fingerprint()
        assert a.fingerprint() != PVGISRequest(lat=48.2, lon=16.38).fingerprint()

    def test_query_params(self):
        q = PVGISRequest(lat=40.4, lon=-3.7).query_params()
        assert q["angle"] == 90.0 and q["aspect"] == 0.0 and q["pvcalculation"] == 1
        assert q["peakpower"] == 0.54 and q["outputformat"] == "json"

    def test_validation(self):
        with pytest.raises(ValueError):
            PVGISRequest(lat=91.0, lon=0.0)
        with pytest.raises(ValueError):
            PVGISRequest(lat=0.0, lon=0.0, start_year=2020, end_year=2019)


class TestClient:
    REQ = PVGISRequest(lat=48.2, lon=16.37)

    def test_cache_idempotent(self, tmp_path):
        sess = FakeSession([FakeResponse(200, GOOD)])
        c = client(tmp_path, sess)
        first = c.fetch_payload(self.REQ)
        again = client(tmp_path, FakeSession([])).fetch_payload(self.REQ)
        assert first == again == GOOD
        assert len(sess.calls) == 1
        entry = c.cached_entry(self.REQ)
        assert entry.fingerprint == self.REQ.fingerprint()
        assert entry.database == "PVGIS-SARAH3"
        assert (tmp_path / entry.payload_path).read_bytes() == GOOD

    def test_series_from_cache(self, tmp_path):
        c = client(tmp_path, FakeSession([FakeResponse(200, GOOD)]))
        assert c.fetch_series(self.REQ) == client(tmp_path, FakeSession([])).fetch_series(self.REQ)

    def test_retries_then_network_error(self, tmp_path):
        sleeps = []
        sess = FakeSession([ConnectionError("down")] * 3)
        c = PVGISClient(URL, cache_dir=tmp_path, session=sess, retries=3, backoff=0.5,
                        sleep=sleeps.append)
        with pytest.raises(NetworkError):
            c.fetch_payload(self.REQ)
        assert len(sess.calls) == 3
        assert sleeps == [0.5, 1.0]
        assert c.cached_entry(self.REQ) is None

    def test_server_error_retried(self, tmp_path):
        sess = FakeSession([FakeResponse(503, b"busy"), FakeResponse(200, GOOD)])
        assert client(tmp_path, sess).fetch_payload(self.REQ) == GOOD
        assert len(sess.calls) == 2

    def test_persistent_server_error(self, tmp_path):
        sess = FakeSession([FakeResponse(500, b"x")] * 3)
        with pytest.raises(HTTPStatusError) as info:
            client(tmp_path, sess).fetch_payload(self.REQ)
        assert info.value.status == 500

    def test_client_error_not_retried(self, tmp_path):
        sess = FakeSession([FakeResponse(400, b"bad lat")])
        with pytest.raises(HTTPStatusError) as info:
            client(tmp_path, sess).fetch_payload(self.REQ)
        assert info.value.status == 400 and len(sess.calls) == 1

    def test_unparseable_body_not_cached(self, tmp_path):
        c = client(tmp_path, FakeSession([FakeResponse(200, b"<html>")]))
        with pytest.raises(ParseError):
            c.fetch_payload(self.REQ)
        assert c.cached_entry(self.REQ) is None

    def test_offline_miss(self, tmp_path):
        sess = FakeSession([])
        with pytest.raises(NetworkError):
            client(tmp_path, sess, offline=True).fetch_payload(self.REQ)
        assert sess.calls == []

    def test_offline_hit(self, tmp_path):
        client(tmp_path, FakeSession([FakeResponse(200, GOOD)])).fetch_payload(self.REQ)
        assert client(tmp_path, FakeSession([]), offline=True).fetch_payload(self.REQ) == GOOD

    def test_cache_dir_env(self, tmp_path, monkeypatch):
        monkeypatch.setenv("PVGIS_CACHE_DIR", str(tmp_path / "c"))
        assert default_cache_dir() == tmp_path / "c"
        assert PVGISClient(URL).cache_dir == tmp_path / "c"
