"""Link budget, SNR and throughput along one corridor segment.

A segment is bounded by two high-power (HP) masts at ``0`` and ``isd`` and
may contain ``N`` low-power (LP) repeaters in between.  Every quantity is
sampled on a regular track grid; power sums are done in linear mW.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyGridError, InvalidParameterError
from .units import db_to_linear, linear_to_db

SPEED_OF_LIGHT = 299_792_458.0  # m/s


@dataclass(frozen=True)
class CorridorConfig:
    """Geometry, radio and calibration parameters of one corridor segment.

    Distances are in meters, powers in dBm, losses and noise figures in dB.
    The HP masts sit at ``0`` and ``isd``; ``lp_positions`` are the repeater
    positions strictly inside the segment.
    """

    isd: float = 2400.0
    lp_positions: tuple[float, ...] = ()
    carrier_frequency: float = 3.5e9
    n_subcarriers: int = 3300
    hp_eirp: float = 64.0
    lp_eirp: float = 40.0
    hp_calib_loss: float = 33.0
    lp_calib_loss: float = 20.0
    nf_mt: float = 5.0
    nf_lp: float = 8.0
    noise_floor_per_subcarrier: float = -132.0
    min_propagation_distance: float = 10.0

    def __post_init__(self):
        object.__setattr__(self, "lp_positions", tuple(float(p) for p in self.lp_positions))
        if not (math.isfinite(self.isd) and self.isd > 0):
            raise InvalidParameterError(f"isd must be positive and finite, got {self.isd}")
        if not self.carrier_frequency > 0:
            raise InvalidParameterError("carrier_frequency must be > 0")
        if int(self.n_subcarriers) != self.n_subcarriers or self.n_subcarriers < 1:
            raise InvalidParameterError("n_subcarriers must be an integer >= 1")
        if not self.min_propagation_distance > 0:
            raise InvalidParameterError("min_propagation_distance must be > 0")
        for name in ("hp_eirp", "lp_eirp", "hp_calib_loss", "lp_calib_loss",
                     "nf_mt", "nf_lp", "noise_floor_per_subcarrier"):
            if not math.isfinite(getattr(self, name)):
                raise InvalidParameterError(f"{name} must be finite")
        prev = 0.0
        for p in self.lp_positions:
            if not prev < p < self.isd:
                raise InvalidParameterError(
                    f"lp_positions must be strictly increasing inside (0, {self.isd}), got "
                    f"{self.lp_positions}")
            prev = p

    @property
    def hp_positions(self) -> tuple[float, float]:
        return (0.0, self.isd)

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.carrier_frequency

    @property
    def n_repeaters(self) -> int:
        return len(self.lp_positions)

    def replace(self, **changes) -> "CorridorConfig":
        return dataclasses.replace(self, **changes)


@dataclass(frozen=True)
class ThroughputModel:
    """Calibrated Shannon mapping ``min(alpha*log2(1+snr), thr_max)``."""

    alpha: float = 0.6
    thr_max: float = 5.84  # bps/Hz
    snr_min: float = -10.0  # dB

    def __post_init__(self):
        if not self.alpha > 0:
            raise InvalidParameterError("alpha must be > 0")
        if not self.thr_max > 0:
            raise InvalidParameterError("thr_max must be > 0")

    @property
    def peak_snr(self) -> float:
        return peak_snr_threshold(self.alpha, self.thr_max)


@dataclass(frozen=True)
class LinkProfile:
    """Sampled link budget along the track.

    ``rsrp_lp`` has shape ``(N, len(grid))``; all other arrays share the grid
    length.  Powers are dBm, ``snr`` is dB, ``throughput`` is bps/Hz.
    """

    grid: np.ndarray
    rsrp_hp_left: np.ndarray
    rsrp_hp_right: np.ndarray
    rsrp_lp: np.ndarray
    total_signal: np.ndarray
    total_noise: np.ndarray
    snr: np.ndarray
    throughput: np.ndarray
    lp_positions: tuple[float, ...] = field(default=())

    @property
    def min_snr(self) -> float:
        return float(self.snr.min())

    @property
    def n_repeaters(self) -> int:
        return int(self.rsrp_lp.shape[0])

    def column_names(self) -> list[str]:
        lp = [f"rsrp_lp_{k + 1}_dbm" for k in range(self.n_repeaters)]
        return (["d_m", "rsrp_hp_left_dbm", "rsrp_hp_right_dbm"] + lp
                + ["signal_dbm", "noise_dbm", "snr_db", "thr_bps_hz"])

    def to_columns(self) -> np.ndarray:
        """Stack all series as columns in :meth:`column_names` order."""
        cols = [self.grid, self.rsrp_hp_left, self.rsrp_hp_right, *self.rsrp_lp,
                self.total_signal, self.total_noise, self.snr, self.throughput]
        return np.column_stack(cols)


def rstp_from_eirp(eirp, n_subcarriers):
    """Per-subcarrier reference signal power (dBm) from total EIRP (dBm)."""
    if n_subcarriers < 1:
        raise InvalidParameterError(f"n_subcarriers must be >= 1, got {n_subcarriers}")
    return eirp - 10.0 * math.log10(n_subcarriers)


def path_loss(d, node_pos, wavelength, calib_loss, min_distance=10.0):
    """Calibrated Friis attenuation in dB between track position ``d`` and a node.

    The separation is clamped to ``min_distance`` so the result stays finite
    when the receiver passes directly under the antenna.
    """
    if not wavelength > 0:
        raise InvalidParameterError("wavelength must be > 0")
    if not min_distance > 0:
        raise InvalidParameterError("min_distance must be > 0")
    sep = np.maximum(np.abs(np.asarray(d, dtype=float) - node_pos), min_distance)
    return 20.0 * np.log10(sep * 4.0 * math.pi / wavelength) + calib_loss


def throughput_from_snr(snr, alpha=0.6, thr_max=5.84, snr_min=-10.0):
    """Spectral efficiency (bps/Hz) for an SNR given in dB."""
    snr = np.asarray(snr, dtype=float)
    thr = np.minimum(alpha * np.log2(1.0 + db_to_linear(snr)), thr_max)
    out = np.where(snr < snr_min, 0.0, thr)
    return float(out) if out.ndim == 0 else out


def peak_snr_threshold(alpha=0.6, thr_max=5.84):
    """Lowest SNR (dB) at which the calibrated Shannon map reaches ``thr_max``."""
    if not alpha > 0:
        raise InvalidParameterError("alpha must be > 0")
    return 10.0 * math.log10(2.0 ** (thr_max / alpha) - 1.0)


def track_grid(isd, grid_step):
    """Symmetric grid over ``[0, isd]`` with spacing at most ``grid_step``."""
    if not grid_step > 0:
        raise InvalidParameterError(f"grid_step must be > 0, got {grid_step}")
    if isd < grid_step:
        raise EmptyGridError(f"isd {isd} m is shorter than grid_step {grid_step} m")
    n_int = math.ceil(isd / grid_step - 1e-9)
    return np.linspace(0.0, isd, n_int + 1)


def snr_profile(config: CorridorConfig, grid_step=1.0, model: ThroughputModel | None = None):
    """Evaluate signal, noise, SNR and throughput along the segment."""
    model = model or ThroughputModel()
    d = track_grid(config.isd, grid_step)
    lam = config.wavelength
    clamp = config.min_propagation_distance

    hp_rstp = rstp_from_eirp(config.hp_eirp, config.n_subcarriers)
    lp_rstp = rstp_from_eirp(config.lp_eirp, config.n_subcarriers)

    rsrp_left = hp_rstp - path_loss(d, 0.0, lam, config.hp_calib_loss, clamp)
    rsrp_right = hp_rstp - path_loss(d, config.isd, lam, config.hp_calib_loss, clamp)
    lp_loss = np.array([path_loss(d, p, lam, config.lp_calib_loss, clamp)
                        for p in config.lp_positions]).reshape(-1, d.size)
    rsrp_lp = lp_rstp - lp_loss

    signal_mw = db_to_linear(rsrp_left) + db_to_linear(rsrp_right) + db_to_linear(rsrp_lp).sum(axis=0)
    floor_mw = db_to_linear(config.noise_floor_per_subcarrier)
    # repeaters re-radiate their own input noise, attenuated like their signal
    noise_mw = (floor_mw * db_to_linear(config.nf_mt)
                + (floor_mw * db_to_linear(config.nf_lp) / db_to_linear(lp_loss)).sum(axis=0))
    snr = linear_to_db(signal_mw / noise_mw)

    return LinkProfile(
        grid=d,
        rsrp_hp_left=rsrp_left,
        rsrp_hp_right=rsrp_right,
        rsrp_lp=rsrp_lp,
        total_signal=linear_to_db(signal_mw),
        total_noise=linear_to_db(noise_mw),
        snr=snr,
        throughput=throughput_from_snr(snr, model.alpha, model.thr_max, model.snr_min),
        lp_positions=config.lp_positions,
    )
