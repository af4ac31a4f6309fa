"""Repeater placement and maximum inter-site distance search."""

from __future__ import annotations

import enum
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .corridor import CorridorConfig, ThroughputModel, snr_profile
from .errors import InfeasiblePlacementError, InvalidParameterError, NoFeasibleISDError


class PlacementKind(str, enum.Enum):
    UNIFORM = "uniform"
    FIXED_SPACING = "fixed-spacing"


@dataclass(frozen=True)
class PlacementStrategy:
    """How repeaters are laid out inside a segment.

    ``uniform`` splits the segment into ``n + 1`` equal parts; ``fixed-spacing``
    puts a comb of ``n`` nodes ``spacing`` meters apart, centred on the midpoint.
    """

    kind: PlacementKind = PlacementKind.UNIFORM
    spacing: float = 200.0

    def __post_init__(self):
        object.__setattr__(self, "kind", PlacementKind(self.kind))
        if self.kind is PlacementKind.FIXED_SPACING and not self.spacing > 0:
            raise InvalidParameterError("spacing must be > 0 for fixed-spacing placement")


@dataclass(frozen=True)
class SweepRow:
    n_repeaters: int
    max_isd: float
    min_snr_at_max: float


@dataclass(frozen=True)
class SweepResult:
    rows: tuple[SweepRow, ...] = field(default=())

    @property
    def max_isds(self) -> list[float]:
        return [r.max_isd for r in self.rows]

    def __iter__(self):
        return iter(self.rows)

    def __len__(self):
        return len(self.rows)


def place_repeaters(isd, n, strategy: PlacementStrategy | None = None) -> tuple[float, ...]:
    """Repeater positions (m) for ``n`` nodes in a segment of length ``isd``."""
    strategy = strategy or PlacementStrategy()
    if n < 0 or int(n) != n:
        raise InvalidParameterError(f"n must be a non-negative integer, got {n}")
    n = int(n)
    if strategy.kind is PlacementKind.UNIFORM:
        positions = tuple(k * isd / (n + 1) for k in range(1, n + 1))
    else:
        half_span = (n - 1) * strategy.spacing / 2.0
        positions = tuple(isd / 2.0 - half_span + k * strategy.spacing for k in range(n))
    if positions and not (positions[0] > 0.0 and positions[-1] < isd):
        raise InfeasiblePlacementError(
            f"{n} repeaters with {strategy.kind.value} placement do not fit in {isd} m")
    return positions


def min_snr(isd, n, base_config: CorridorConfig | None = None,
            strategy: PlacementStrategy | None = None, grid_step=1.0,
            model: ThroughputModel | None = None) -> float:
    """Minimum SNR (dB) over the track for a segment of length ``isd``."""
    base_config = base_config or CorridorConfig()
    cfg = base_config.replace(isd=float(isd), lp_positions=place_repeaters(isd, n, strategy))
    return snr_profile(cfg, grid_step, model).min_snr


def _resolve_threshold(snr_threshold, model):
    if snr_threshold is not None:
        return float(snr_threshold)
    return (model or ThroughputModel()).peak_snr


def max_isd_row(n, base_config: CorridorConfig | None = None,
                strategy: PlacementStrategy | None = None, isd_step=50.0,
                snr_threshold=None, grid_step=1.0, model: ThroughputModel | None = None,
                isd_limit=100_000.0) -> SweepRow:
    """Upward ISD scan; see :func:`max_isd`. Also reports min-SNR at the result."""
    if not isd_step > 0:
        raise InvalidParameterError(f"isd_step must be > 0, got {isd_step}")
    threshold = _resolve_threshold(snr_threshold, model)

    best = None
    k = 1
    while k * isd_step <= isd_limit:
        isd = k * isd_step
        k += 1
        try:
            value = min_snr(isd, n, base_config, strategy, grid_step, model)
        except InfeasiblePlacementError:
            if best is None:
                # comb does not fit yet; keep growing the segment
                continue
            raise
        if value < threshold:
            break
        best = (isd, value)
    else:
        raise InvalidParameterError(f"ISD search exceeded the {isd_limit} m limit")

    if best is None:
        raise NoFeasibleISDError(
            f"no ISD on the {isd_step} m grid reaches {threshold:.2f} dB with {n} repeaters")
    return SweepRow(int(n), float(best[0]), float(best[1]))


def max_isd(n, base_config: CorridorConfig | None = None,
            strategy: PlacementStrategy | None = None, isd_step=50.0,
            snr_threshold=None, grid_step=1.0, model: ThroughputModel | None = None,
            isd_limit=100_000.0) -> float:
    """Largest ISD on the ``isd_step`` grid whose minimum SNR meets the threshold.

    The scan starts at ``isd_step`` and stops at the first failing ISD; the
    last passing one is returned.  For ``fixed-spacing`` placement, grid ISDs
    too short to hold the comb are skipped rather than counted as failures.
    The default threshold is the SNR where peak throughput is first reached.

    Raises:
        NoFeasibleISDError: if the first evaluable ISD already fails.
    """
    return max_isd_row(n, base_config, strategy, isd_step, snr_threshold, grid_step,
                       model, isd_limit).max_isd


def sweep_max_isd(n_range: Iterable[int], base_config: CorridorConfig | None = None,
                  strategy: PlacementStrategy | None = None, isd_step=50.0,
                  snr_threshold=None, grid_step=1.0, model: ThroughputModel | None = None,
                  jobs: int = 1) -> SweepResult:
    """Run :func:`max_isd` for every repeater count in ``n_range``."""
    ns: Sequence[int] = sorted(set(int(n) for n in n_range))
    if not ns:
        raise InvalidParameterError("n_range must not be empty")
    args = dict(base_config=base_config, strategy=strategy, isd_step=isd_step,
                snr_threshold=snr_threshold, grid_step=grid_step, model=model)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(max_isd_row, n, **args) for n in ns]
            rows = [f.result() for f in futures]
    else:
        rows = [max_isd_row(n, **args) for n in ns]
    return SweepResult(tuple(rows))
