"""Coupling-schedule construction, evaluation, and inversion."""

import math

import numpy as np
import pytest

from groundstate import NonMonotoneError, evaluate, invert_monotone, make_scaling

ALL_FAMILIES = [
    ("identity", {}),
    ("power", {"p": 2.0}),
    ("power", {"p": 0.5}),
    ("expm1", {}),
    ("table", {"points": [[0, 0], [1, 0.5], [2, 4]]}),
]


def test_identity():
    f = make_scaling("identity")
    assert evaluate(f, 2.0) == 2.0
    assert evaluate(f, 0.0) == 0.0
    assert f.monotone


def test_power():
    f = make_scaling("power", p=2.0)
    assert evaluate(f, 3.0) == 9.0
    assert evaluate(f, 0.0) == 0.0
    g = make_scaling("power", p=3.0)
    assert evaluate(g, 2.0) == 8.0


def test_expm1():
    f = make_scaling("expm1")
    assert evaluate(f, 1.0) == pytest.approx(math.e - 1.0, rel=1e-15)
    assert f.monotone


def test_table_interpolation_and_extrapolation():
    f = make_scaling("table", points=[[0, 0], [1, 0.5], [2, 4]])
    assert evaluate(f, 1.5) == pytest.approx(2.25, abs=1e-15)
    assert evaluate(f, 0.5) == pytest.approx(0.25, abs=1e-15)
    # beyond the last sample: linear continuation of the final segment
    assert evaluate(f, 3.0) == pytest.approx(7.5, abs=1e-15)
    assert f.monotone
    assert f.notes  # limit at infinity is taken on trust, recorded


def test_eval_rejects_negative_t():
    f = make_scaling("identity")
    with pytest.raises(ValueError):
        evaluate(f, -0.5)


def test_make_scaling_rejections():
    with pytest.raises(ValueError):
        make_scaling("power", p=0.0)
    with pytest.raises(ValueError):
        make_scaling("warp")
    with pytest.raises(ValueError):
        make_scaling("identity", p=2.0)
    # table must start at the origin
    with pytest.raises(ValueError, match="start at"):
        make_scaling("table", points=[[0, 0.1], [1, 2]])
    with pytest.raises(ValueError, match="start at"):
        make_scaling("table", points=[[0.5, 0], [1, 2]])
    # interior values must be positive
    with pytest.raises(ValueError, match="positive"):
        make_scaling("table", points=[[0, 0], [1, -0.5], [2, 4]])
    with pytest.raises(ValueError, match="positive"):
        make_scaling("table", points=[[0, 0], [1, 0.0], [2, 4]])
    # growth witness: last value must exceed the configured bound
    with pytest.raises(ValueError, match="growth witness"):
        make_scaling("table", points=[[0, 0], [1, 0.2], [2, 0.5]])
    make_scaling("table", points=[[0, 0], [1, 0.2], [2, 0.5]], growth_witness=0.4)


def test_non_monotone_table_flagged():
    f = make_scaling("table", points=[[0, 0], [1, 5], [2, 3]])
    assert not f.monotone
    with pytest.raises(NonMonotoneError):
        invert_monotone(f, 2.0)


def test_invert_reference_values():
    assert invert_monotone(make_scaling("identity"), 0.5) == pytest.approx(0.5, abs=1e-12)
    assert invert_monotone(make_scaling("power", p=2.0), 9.0) == pytest.approx(3.0, rel=1e-12)
    assert invert_monotone(make_scaling("expm1"), 1.0) == pytest.approx(
        math.log(2.0), rel=1e-9
    )
    assert invert_monotone(make_scaling("identity"), 0.0) == 0.0


def test_invert_out_of_reach():
    f = make_scaling("identity")
    with pytest.raises(ValueError):
        invert_monotone(f, -1.0)
    with pytest.raises(ValueError):
        invert_monotone(f, 1e20, t_max=1e6)


@pytest.mark.parametrize("family,params", ALL_FAMILIES)
def test_conditions_hold_on_random_samples(family, params):
    """f(0) = 0, f > 0 on (0, inf), and monotone families increase pairwise."""
    f = make_scaling(family, **params)
    assert evaluate(f, 0.0) == 0.0
    rng = np.random.default_rng(42)
    ts = rng.uniform(1e-9, 50.0, size=10_000)
    vals = np.array([evaluate(f, t) for t in ts])
    assert np.all(vals > 0.0)
    if f.monotone:
        t1 = np.sort(rng.uniform(0.0, 20.0, size=500))
        v1 = np.array([evaluate(f, t) for t in t1])
        assert np.all(np.diff(v1) > 0.0)


@pytest.mark.parametrize("family,params", ALL_FAMILIES)
def test_invert_evaluate_roundtrip(family, params):
    f = make_scaling(family, **params)
    if not f.monotone:
        return
    rng = np.random.default_rng(9)
    for t in rng.uniform(0.01, 10.0, size=40):
        s = evaluate(f, float(t))
        back = invert_monotone(f, s)
        assert abs(evaluate(f, back) - s) <= 1e-12 * max(1.0, s)
