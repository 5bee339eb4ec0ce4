import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from setvi.extreal import (
    NEG_INF,
    POS_INF,
    ExtReal,
    ext_add,
    format_float,
    inf_residual,
    residual_floats,
)

finite = st.floats(min_value=-1e12, max_value=1e12, allow_nan=False)


def test_residual_finite_is_subtraction():
    assert inf_residual(5, 3) == ExtReal(2.0)
    assert inf_residual(-2.5, 4) == ExtReal(-6.5)


def test_residual_infinite_conventions():
    # -inf on the left or +inf on the right absorbs everything
    assert inf_residual(NEG_INF, 7) == NEG_INF
    assert inf_residual(3, POS_INF) == NEG_INF
    assert inf_residual(NEG_INF, POS_INF) == NEG_INF
    assert inf_residual(POS_INF, POS_INF) == NEG_INF
    # +inf over a finite or -inf base has no admissible finite shift
    assert inf_residual(POS_INF, 3) == POS_INF
    assert inf_residual(4, NEG_INF) == POS_INF
    assert inf_residual(POS_INF, NEG_INF) == POS_INF


def test_ext_add_absorbs():
    assert ext_add(POS_INF, -3) == POS_INF
    assert ext_add(NEG_INF, 10) == NEG_INF
    assert ext_add(2, 3) == ExtReal(5.0)
    with pytest.raises(ValueError):
        ext_add(2, math.inf)


def test_nan_rejected():
    with pytest.raises(ValueError):
        ExtReal(float("nan"))


def test_total_order():
    assert NEG_INF < ExtReal(-1e300) < ExtReal(0.0) < POS_INF
    assert ExtReal(1.5) == 1.5


@given(finite, finite)
def test_residual_matches_subtraction_on_finite(s, t):
    assert inf_residual(s, t).value == s - t


@given(finite, finite, finite)
def test_residual_monotone_in_first_argument(s1, s2, t):
    lo, hi = min(s1, s2), max(s1, s2)
    assert inf_residual(lo, t).value <= inf_residual(hi, t).value


quarter = st.integers(-4000, 4000).map(lambda k: k * 0.25)


@given(quarter, quarter, quarter)
def test_adjunction_on_nondegenerate_range(s, t, r):
    # residual(s, t) <= r exactly when s <= t + r; quarter-integer operands
    # keep every sum and difference exact so rounding cannot split the sides
    left = inf_residual(s, t).value <= r
    right = ExtReal(s).value <= ext_add(t, r).value
    assert left == right


def test_residual_floats_matches_scalar():
    import numpy as np

    s = np.array([5.0, -np.inf, np.inf, np.inf, 1.0])
    t = np.array([3.0, 7.0, 3.0, np.inf, -np.inf])
    out = residual_floats(s, t)
    expected = [2.0, -np.inf, np.inf, -np.inf, np.inf]
    assert out.tolist() == expected


def test_report_formatting():
    assert format_float(float("inf")) == "+inf"
    assert format_float(float("-inf")) == "-inf"
    assert format_float(0.1) == f"{0.1:.17g}"
    assert len(format_float(1 / 3).replace("0.", "")) == 17
