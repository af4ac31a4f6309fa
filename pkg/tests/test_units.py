import math

import numpy as np
from hypothesis import given
from hypothesis import strategies as st

from railcorridor.units import db_to_linear, linear_to_db


@given(st.floats(min_value=1e-20, max_value=1e6))
def test_linear_db_round_trip(x):
    assert math.isclose(float(db_to_linear(linear_to_db(x))), x, rel_tol=1e-12)


def test_known_values():
    assert db_to_linear(30.0) == 1000.0
    assert linear_to_db(0.5) == 10 * math.log10(0.5)
    assert np.isneginf(linear_to_db(0.0))
