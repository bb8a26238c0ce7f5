"""Potential construction, admissibility classification, negative regions."""

import numpy as np
import pytest

from groundstate import (
    InadmissibleError,
    build_torus_grid,
    icosphere,
    make_potential,
    negative_region,
    validate_conditions,
)
from groundstate.potential import load_samples, mass_weighted_sum

TWO_PI = 2.0 * np.pi


def test_cos_plus_shift_reference(circle256, vcos01_256):
    v = vcos01_256
    assert v.integral == pytest.approx(0.2 * np.pi, abs=1e-12)
    assert v.sup_norm == pytest.approx(1.1, abs=1e-12)
    rep = v.condition_report
    assert rep.changes_sign and rep.positive_average and rep.admissible
    assert rep.classification == "admissible"


def test_zero_potential(circle256):
    v = make_potential(circle256, np.zeros(circle256.n_vertices))
    assert v.condition_report.classification == "zero"
    assert not v.condition_report.admissible
    assert v.sup_norm == 0.0


def test_pure_cosine_not_admissible(circle256):
    v = make_potential(circle256, "cos")
    rep = v.condition_report
    assert rep.changes_sign
    assert not rep.positive_average
    assert rep.classification == "sign_changing_nonpos_avg"


def test_signed_constant_classifications(circle64):
    n = circle64.n_vertices
    up = make_potential(circle64, np.ones(n))
    assert up.condition_report.classification == "nonneg"
    down = make_potential(circle64, -np.ones(n))
    assert down.condition_report.classification == "nonpos"
    assert not down.condition_report.positive_average


def test_classification_exhaustive_and_exclusive(circle64):
    n = circle64.n_vertices
    rng = np.random.default_rng(7)
    seen = set()
    for _ in range(200):
        vals = rng.normal(size=n) + rng.uniform(-1.5, 1.5)
        rep = make_potential(circle64, vals).condition_report
        seen.add(rep.classification)
        assert rep.admissible == (rep.changes_sign and rep.positive_average)
    assert {"admissible", "sign_changing_nonpos_avg"} <= seen


def test_negative_region_arc(circle256, vcos01_256):
    region = negative_region(circle256, vcos01_256, margin=0.0)
    frac = region.size / circle256.n_vertices
    assert abs(frac - 2.0 * np.arccos(0.1) / TWO_PI) < 2.0 / 256
    # contiguous arc modulo wraparound: gaps has exactly one jump
    gaps = np.diff(np.sort(region))
    assert np.sum(gaps > 1) <= 1


def test_negative_region_margin_errors(circle256, vcos01_256):
    with pytest.raises(InadmissibleError):
        negative_region(circle256, vcos01_256, margin=vcos01_256.sup_norm)
    with pytest.raises(ValueError):
        negative_region(circle256, vcos01_256, margin=-0.1)


def test_negative_region_uniform_negative(circle64):
    v = make_potential(circle64, -np.ones(circle64.n_vertices))
    region = negative_region(circle64, v, margin=0.5)
    assert region.size == circle64.n_vertices


def test_negative_region_antitone_in_margin(circle256, vcos01_256):
    margins = [0.0, 0.2, 0.5, 0.85]
    regions = [set(negative_region(circle256, vcos01_256, m).tolist()) for m in margins]
    for small, large in zip(regions[1:], regions[:-1]):
        assert small <= large


def test_make_potential_errors(circle64):
    with pytest.raises(ValueError, match="sample count"):
        make_potential(circle64, np.zeros(circle64.n_vertices + 1))
    bad = np.zeros(circle64.n_vertices)
    bad[3] = np.nan
    with pytest.raises(ValueError, match="non-finite"):
        make_potential(circle64, bad)


def test_scaling_values_scales_norms(circle128):
    rng = np.random.default_rng(11)
    vals = rng.normal(size=circle128.n_vertices) + 0.2
    v = make_potential(circle128, vals)
    for c in (0.5, 3.0, 17.0):
        w = v.scaled(c)
        assert w.integral == pytest.approx(c * v.integral, rel=1e-14)
        assert w.sup_norm == pytest.approx(c * v.sup_norm, rel=1e-14)
        assert w.condition_report == v.condition_report


def test_integral_bit_reproducible(circle256):
    rng = np.random.default_rng(3)
    vals = rng.normal(size=circle256.n_vertices)
    a = make_potential(circle256, vals).integral
    b = make_potential(circle256, vals.copy()).integral
    assert a == b
    assert a == mass_weighted_sum(circle256.mass_weights, vals)


def test_validate_conditions_matches_report(circle256, vcos01_256):
    rep = validate_conditions(circle256, vcos01_256)
    assert rep == vcos01_256.condition_report


def test_expression_parsing_torus_2d():
    m = build_torus_grid(2, (TWO_PI, TWO_PI), 12)
    v = make_potential(m, "0.5*cos:1,0-0.25*sin:0,2+0.125")
    assert v.integral == pytest.approx(0.125 * m.total_volume, abs=1e-10)
    x, y = m.coordinates[:, 0], m.coordinates[:, 1]
    expect = 0.5 * np.cos(x) - 0.25 * np.sin(2 * y) + 0.125
    assert np.allclose(v.values, expect, atol=1e-12)


def test_expression_parsing_mesh():
    m = icosphere(1.0, 1)
    v = make_potential(m, "z+0.25")
    assert np.allclose(v.values, m.coordinates[:, 2] + 0.25, atol=1e-12)
    zonal = make_potential(m, "0.3*z2")
    assert np.allclose(zonal.values, 0.3 * (3 * m.coordinates[:, 2] ** 2 - 1), atol=1e-12)


def test_expression_errors(circle64):
    with pytest.raises(ValueError):
        make_potential(circle64, "cos+banana")
    with pytest.raises(ValueError, match="meshes"):
        make_potential(circle64, "z+0.2")
    with pytest.raises(ValueError, match="dimension"):
        make_potential(circle64, "cos:1,2")
    sphere = icosphere(1.0, 0)
    with pytest.raises(ValueError, match="torus"):
        make_potential(sphere, "cos+0.1")


def test_callable_potential(circle64):
    v = make_potential(circle64, lambda xy: np.sin(xy[:, 0]) + 0.3)
    assert v.values == pytest.approx(np.sin(circle64.coordinates[:, 0]) + 0.3)


def test_load_samples(tmp_path, circle64):
    path = tmp_path / "v.txt"
    vals = np.linspace(-1, 1, circle64.n_vertices)
    path.write_text("# comment\n" + "\n".join(repr(float(x)) for x in vals) + "\n")
    loaded = load_samples(path)
    assert np.array_equal(loaded, vals)
    v = make_potential(circle64, loaded)
    assert v.values.shape == (circle64.n_vertices,)
