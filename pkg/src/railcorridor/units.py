"""Decibel / linear conversions.

All power arithmetic in the package happens in linear milliwatts; these
helpers are the only place the logarithm appears.
"""

import numpy as np


def db_to_linear(x_db):
    """Convert a ratio in dB (or a power in dBm) to linear units (or mW)."""
    return np.power(10.0, np.asarray(x_db, dtype=float) / 10.0)


def linear_to_db(x):
    """Inverse of :func:`db_to_linear`. Zero maps to ``-inf``."""
    with np.errstate(divide="ignore"):
        return 10.0 * np.log10(np.asarray(x, dtype=float))


dbm_to_mw = db_to_linear
mw_to_dbm = linear_to_db
