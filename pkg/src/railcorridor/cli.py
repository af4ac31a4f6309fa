"""Command-line interface.

Every subcommand writes a CSV (or stdout) and, with ``--report``, a JSON
report embedding the effective configuration.  Exit codes: 0 success,
2 invalid input, 3 infeasible problem, 4 network failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from dataclasses import asdict
from pathlib import Path

import pydantic

from . import energy as en
from .config import RunConfig, load_config
from .corridor import snr_profile
from .errors import (HTTPStatusError, InfeasibleError, InvalidParameterError, NetworkError,
                     PVGISError)
from .planner import place_repeaters, sweep_max_isd
from .pvgis import PVGISClient
from .solar import build_consumption_profile, load_series, simulate_battery, size_system

EXIT_OK, EXIT_INVALID, EXIT_INFEASIBLE, EXIT_NETWORK = 0, 2, 3, 4

log = logging.getLogger("railcorridor")


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(round(value, 6))
    if value is None:
        return ""
    return str(value)


def _write_csv(path, header, rows) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    if path in (None, "-"):
        sys.stdout.write(buf.getvalue())
    else:
        Path(path).write_text(buf.getvalue())


def _write_report(path, command, args_used, cfg: RunConfig, result) -> None:
    if not path:
        return
    doc = {"command": command, "arguments": args_used, "effective_config": cfg.effective(),
           "result": result}
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True, default=str) + "\n")


def parse_n_range(text: str) -> list[int]:
    """``"1-10"``, ``"0,2,4"`` or a mix such as ``"0,3-5"``."""
    out: set[int] = set()
    try:
        for part in text.split(","):
            part = part.strip()
            if "-" in part:
                lo, hi = part.split("-", 1)
                out.update(range(int(lo), int(hi) + 1))
            elif part:
                out.add(int(part))
    except ValueError:
        raise InvalidParameterError(f"cannot parse repeater range {text!r}") from None
    if not out or min(out) < 0:
        raise InvalidParameterError(f"repeater range {text!r} must be non-empty and >= 0")
    return sorted(out)


def cmd_profile(args, cfg: RunConfig) -> dict:
    isd = args.isd if args.isd is not None else cfg.corridor.isd
    grid_step = args.grid_step if args.grid_step is not None else cfg.planner.grid_step
    if args.n is None:
        positions = cfg.corridor.lp_positions
    else:
        positions = place_repeaters(isd, args.n, cfg.placement)
    corridor = cfg.corridor.replace(isd=float(isd), lp_positions=positions)
    prof = snr_profile(corridor, grid_step, cfg.throughput)
    _write_csv(args.output, prof.column_names(), prof.to_columns().tolist())
    return {"isd_m": isd, "lp_positions_m": list(positions), "min_snr_db": prof.min_snr,
            "min_signal_dbm": float(prof.total_signal.min())}


def cmd_max_isd(args, cfg: RunConfig) -> dict:
    ns = parse_n_range(args.n_range)
    result = sweep_max_isd(ns, cfg.corridor, cfg.placement, cfg.planner.isd_step,
                           cfg.planner.snr_threshold, cfg.planner.grid_step, cfg.throughput,
                           jobs=args.jobs)
    _write_csv(args.output, ["n", "max_isd_m", "min_snr_db"],
               [(r.n_repeaters, r.max_isd, r.min_snr_at_max) for r in result])
    return {"rows": [asdict(r) for r in result]}


def fig5_scenarios(max_n: int = 10) -> list[tuple[str, int]]:
    """Conventional corridor plus every repeater count under each policy."""
    out = [("conventional", 0)]
    for n in range(1, max_n + 1):
        for policy in en.OperatingPolicy:
            out.append((policy.value, n))
    return out


def parse_scenarios(text: str) -> list[tuple[str, int, float | None]]:
    """``fig5`` or a comma list of ``policy:n[:isd]`` / ``conventional``."""
    if text.strip() == "fig5":
        return [(p, n, None) for p, n in fig5_scenarios()]
    out = []
    for item in text.split(","):
        fields = item.strip().split(":")
        name = fields[0]
        if name == "conventional":
            out.append((name, 0, float(fields[1]) if len(fields) > 1 else None))
            continue
        try:
            en.OperatingPolicy(name)
        except ValueError:
            raise InvalidParameterError(
                f"unknown policy {name!r}; choose from "
                f"{[p.value for p in en.OperatingPolicy]} or 'conventional'") from None
        if len(fields) < 2:
            raise InvalidParameterError(f"scenario {item!r} needs a repeater count")
        try:
            n = int(fields[1])
            isd = float(fields[2]) if len(fields) > 2 else None
        except ValueError:
            raise InvalidParameterError(f"cannot parse scenario {item!r}") from None
        out.append((name, n, isd))
    return out


def cmd_energy(args, cfg: RunConfig) -> dict:
    scenarios = parse_scenarios(args.scenarios)
    swept: dict[int, float] = {}
    if args.isd_from_sweep:
        ns = sorted({n for _, n, isd in scenarios if isd is None and n > 0})
        if ns:
            res = sweep_max_isd(ns, cfg.corridor, cfg.placement, cfg.planner.isd_step,
                                cfg.planner.snr_threshold, cfg.planner.grid_step,
                                cfg.throughput, jobs=args.jobs)
            swept = {r.n_repeaters: r.max_isd for r in res}
    rows = []
    for name, n, isd in scenarios:
        if isd is None:
            if n == 0:
                isd = cfg.energy.baseline_isd
            elif n in swept:
                isd = swept[n]
            elif n in cfg.energy.isd_by_nodes:
                isd = cfg.energy.isd_by_nodes[n]
            else:
                raise InvalidParameterError(f"no ISD known for {n} repeaters; give policy:n:isd")
        policy = en.OperatingPolicy.LP_SLEEP if name == "conventional" else en.OperatingPolicy(name)
        rep = en.corridor_energy_per_km(isd, n, cfg.schedule, cfg.hp_power, cfg.lp_power, policy,
                                        cfg.energy.rrh_per_site, cfg.energy.baseline_isd)
        rows.append((name, n, isd, rep.mains_w_per_km, 100.0 * rep.savings_vs_baseline))
    _write_csv(args.output, ["scenario", "n_nodes", "isd_m", "w_per_km", "savings_pct"], rows)
    return {"rows": [dict(zip(["scenario", "n_nodes", "isd_m", "w_per_km", "savings_pct"], r))
                     for r in rows]}


def _client(cfg: RunConfig, offline=False) -> PVGISClient:
    return PVGISClient(cfg.pvgis.url, retries=cfg.pvgis.retries, backoff=cfg.pvgis.backoff,
                       timeout=cfg.pvgis.timeout, offline=offline)


def _series(args, cfg: RunConfig):
    if args.fixture:
        series = load_series(args.fixture)
    elif args.city:
        series = _client(cfg, args.offline).fetch_series(cfg.pvgis_request(city=args.city))
    else:
        raise InvalidParameterError("give --city or --fixture")
    if args.production_scale != 1.0:
        series = series.scaled(args.production_scale)
    return series


def _profile(cfg: RunConfig):
    return build_consumption_profile(cfg.schedule, cfg.lp_power, cfg.solar.night_start_hour)


def cmd_solar_sim(args, cfg: RunConfig) -> dict:
    stats = simulate_battery(_series(args, cfg), _profile(cfg), cfg.pv)
    d = asdict(stats)
    d["first_downtime_day"] = stats.first_downtime_day
    d = {k: (float(v) if hasattr(v, "dtype") else v) for k, v in d.items()}
    _write_csv(args.output, list(d), [list(d.values())])
    return d


def cmd_solar_size(args, cfg: RunConfig) -> dict:
    panels = cfg.solar.panel_options
    batteries = cfg.solar.battery_options
    if args.panels:
        panels = [float(x) for x in args.panels.split(",")]
    if args.batteries:
        batteries = [float(x) for x in args.batteries.split(",")]
    system = size_system(_series(args, cfg), _profile(cfg), panels, batteries, cfg.pv)
    d = asdict(system)
    _write_csv(args.output, list(d), [list(d.values())])
    return d


def cmd_fetch(args, cfg: RunConfig) -> dict:
    req = cfg.pvgis_request(city=args.city, lat=args.lat, lon=args.lon)
    client = _client(cfg)
    series = client.fetch_series(req)
    entry = client.cached_entry(req)
    info = {"fingerprint": req.fingerprint(), "records": len(series),
            "cache_dir": str(client.cache_dir),
            "database": entry.database if entry else None}
    _write_csv(args.output, list(info), [list(info.values())])
    return info


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="railcorridor", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="YAML/JSON run configuration (defaults if omitted)")
        sp.add_argument("-o", "--output", default="-", help="CSV output path (default stdout)")
        sp.add_argument("--report", help="write a JSON report with the effective config here")
        return sp

    sp = common(sub.add_parser("profile", help="signal/noise/SNR/throughput along a segment"))
    sp.add_argument("--isd", type=float, help="inter-site distance, m")
    sp.add_argument("--n", type=int, help="number of repeaters placed by the config strategy")
    sp.add_argument("--grid-step", type=float, help="track sampling step, m")
    sp.set_defaults(func=cmd_profile)

    sp = common(sub.add_parser("max-isd", help="maximum ISD per repeater count"))
    sp.add_argument("--n-range", default="0-10", help='repeater counts, e.g. "1-10" or "0,2,4"')
    sp.add_argument("--jobs", type=int, default=1, help="parallel worker processes")
    sp.set_defaults(func=cmd_max_isd)

    sp = common(sub.add_parser("energy", help="average corridor power per km (W/km)"))
    sp.add_argument("--scenarios", default="fig5",
                    help='"fig5" or comma list of conventional | policy:n[:isd_m]')
    sp.add_argument("--isd-from-sweep", action="store_true",
                    help="use the planner's max ISD instead of the configured table")
    sp.add_argument("--jobs", type=int, default=1)
    sp.set_defaults(func=cmd_energy)

    for name, func, text in (("solar-sim", cmd_solar_sim, "battery autonomy over a year"),
                             ("solar-size", cmd_solar_size, "smallest zero-downtime PV system")):
        sp = common(sub.add_parser(name, help=text))
        src = sp.add_mutually_exclusive_group(required=True)
        src.add_argument("--city", help="configured city, data via the PVGIS cache")
        src.add_argument("--fixture", help="PVGIS JSON payload or CSV (timestamp_iso8601, poa_wm2|pv_w)")
        sp.add_argument("--offline", action="store_true", help="never touch the network")
        sp.add_argument("--production-scale", type=float, default=1.0,
                        help="multiply PV production (0 = no sun stress test)")
        if name == "solar-size":
            sp.add_argument("--panels", help="comma list of peak powers, Wp, ascending")
            sp.add_argument("--batteries", help="comma list of capacities, Wh, ascending")
        sp.set_defaults(func=func)

    sp = common(sub.add_parser("fetch", help="download a PVGIS series into the cache "
                                             "(directory from $PVGIS_CACHE_DIR)"))
    sp.add_argument("--city")
    sp.add_argument("--lat", type=float, help="degrees north")
    sp.add_argument("--lon", type=float, help="degrees east")
    sp.set_defaults(func=cmd_fetch)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config)
        result = args.func(args, cfg)
    except (NetworkError, HTTPStatusError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NETWORK
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (pydantic.ValidationError, ValueError, PVGISError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    used = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "report")}
    _write_report(args.report, args.command, used, cfg, result)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
