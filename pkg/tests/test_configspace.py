import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from confbraid.configspace import (Configuration, PathLeavesConfigurationSpace, all_derivatives, dpi, ds_exp,
                                   finite_difference_derivatives, g0_norm, g_norm, gb_norm, min_dist,
                                   min_dist_geodesic, path_length, random_configurations, random_tangents,
                                   sinha_embed, two_metrics_constant)
from confbraid.geometry import FlatTorus, RoundSphere, UnitDisc

X2 = np.array([[0.0, 0.0], [1.0, 0.0]])
V2 = np.array([[0.0, 1.0], [0.0, 0.0]])
X3 = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 2.0]])


def test_min_dist_examples():
    x = np.array([[0.0, 0.0], [3.0, 4.0], [0.0, 1.0]])
    assert min_dist(x) == 1.0
    assert min_dist(2.5 * x) == pytest.approx(2.5)
    pts = random_configurations(UnitDisc(), 2, 1000, np.random.default_rng(0))
    assert np.all(min_dist(pts) <= 2.0)


def test_configuration_rejects_coincident_points():
    with pytest.raises(ValueError):
        Configuration(np.array([[0.1, 0.1], [0.1, 0.1]]))


def test_geodesic_min_dist():
    pts = random_configurations(UnitDisc(), 3, 50, np.random.default_rng(1))
    assert np.array_equal(min_dist_geodesic(pts, UnitDisc()), min_dist(pts))
    t = FlatTorus()
    x = np.stack([t.embed([0.05, 0.5]), t.embed([0.95, 0.5])])
    # the deck translate gives 0.1, far below the chart difference 0.9; the
    # chord of the R^4 embedding is shorter still
    assert min_dist_geodesic(x, t) == pytest.approx(0.1)
    assert min_dist(x) <= min_dist_geodesic(x, t)
    for surface in (FlatTorus(), RoundSphere()):
        y = random_configurations(surface, 3, 200, np.random.default_rng(2))
        # chart round-off on nearly coincident pairs
        assert np.all(min_dist_geodesic(y, surface) >= min_dist(y) * (1 - 1e-8))


def test_sinha_examples():
    s = sinha_embed(X2)
    assert np.allclose(s.directions, [[-1.0, 0.0]])
    assert s.ratios_compactified.shape == (0,)
    s3 = sinha_embed(X3)
    assert s3.ratios_compactified[0] == pytest.approx(math.exp(-0.5))
    assert s3.ratios_compactified[0] == pytest.approx(0.60653, abs=1e-5)
    swapped = X2[::-1]
    assert np.allclose(sinha_embed(swapped).directions, -s.directions)
    with pytest.raises(ValueError):
        sinha_embed(np.array([[0.0, 0.0], [0.0, 0.0]]))


def test_dpi_examples():
    assert np.allclose(dpi(X2, V2, 0, 1), [0.0, 1.0])
    same = np.array([[0.3, -0.1], [0.3, -0.1]])
    assert np.all(dpi(X2, same, 0, 1) == 0)
    d = dpi(X2, V2, 0, 1)
    assert abs(np.dot(d, sinha_embed(X2).directions[0])) < 1e-10


def test_ds_exp_examples():
    v = np.array([[0.0, 0.0], [0.0, 0.0], [0.0, 1.0]])
    # moving x_3 away raises |x_1 - x_3|, so s falls and e^{-s} grows
    assert ds_exp(X3, v, 0, 1, 2) == pytest.approx(0.25 * math.exp(-0.5))
    assert ds_exp(X3, np.zeros_like(X3), 0, 1, 2) == 0.0
    _, fd = finite_difference_derivatives(X3, v)
    assert fd[0] == pytest.approx(0.25 * math.exp(-0.5), rel=1e-8)


def test_norm_examples():
    assert g0_norm(X2, V2) == pytest.approx(1.0)
    assert g_norm(X2, V2) == pytest.approx(math.sqrt(2))
    assert g0_norm(X2, np.zeros_like(V2)) == 0.0
    assert g_norm(X2, np.zeros_like(V2)) == 0.0
    assert g0_norm(3 * X2, 3 * V2) == pytest.approx(g0_norm(X2, V2))


def test_gb_norm_relations():
    rng = np.random.default_rng(3)
    x = random_configurations(UnitDisc(), 3, 200, rng)
    v = random_tangents(UnitDisc(), x, rng)
    assert np.allclose(gb_norm(x, v, UnitDisc()), g0_norm(x, v))
    t = FlatTorus()
    x = random_configurations(t, 3, 200, rng)
    v = random_tangents(t, x, rng)
    assert np.all(gb_norm(x, v, t) <= g0_norm(x, v) * (1 + 1e-8))
    y = np.stack([t.embed([0.05, 0.5]), t.embed([0.95, 0.5])])
    w = random_tangents(t, y, rng)
    assert gb_norm(y, w, t) < g0_norm(y, w)


def test_two_metrics_constant_examples():
    assert two_metrics_constant(2, 2) == 6
    assert two_metrics_constant(3, 2) == 25
    assert two_metrics_constant(2, 1e-12) == pytest.approx(2)
    with pytest.raises(ValueError):
        two_metrics_constant(1, 2)


@pytest.mark.parametrize("n", [3, 4])
def test_derivatives_match_finite_differences(n):
    rng = np.random.default_rng(n)
    x = random_configurations(UnitDisc(), n, 300, rng, min_squeeze=1e-3)
    v = random_tangents(UnitDisc(), x, rng)
    worst = 0.0
    for b in range(len(x)):
        exact = all_derivatives(x[b], v[b])
        approx = finite_difference_derivatives(x[b], v[b])
        for e, a in zip(exact, approx):
            scale = max(np.max(np.abs(e)), 1e-300)
            worst = max(worst, np.max(np.abs(e - a)) / scale)
    assert worst < 1e-6


@pytest.mark.parametrize("surface", [UnitDisc(), FlatTorus(), RoundSphere()], ids=lambda s: type(s).__name__)
@pytest.mark.parametrize("n", [2, 3, 4])
def test_metric_and_term_bounds(surface, n):
    rng = np.random.default_rng(10 + n)
    x = random_configurations(surface, n, 10000, rng)
    v = random_tangents(surface, x, rng)
    c = two_metrics_constant(n, surface.ambient_diameter_bound)
    assert np.all(g_norm(x, v) ** 2 < c * g0_norm(x, v) ** 2)
    d = min_dist(x)
    vnorm = np.linalg.norm(v.reshape(len(x), -1), axis=1)
    vsum = np.linalg.norm(v, axis=-1).sum(axis=-1)
    Dpi, Ds = all_derivatives(x, v)
    pi_max = np.linalg.norm(Dpi, axis=-1).max(axis=-1)
    assert np.all(pi_max <= math.sqrt(n) * vnorm / d * (1 + 1e-12))
    assert np.all(pi_max <= 2 * vsum / d * (1 + 1e-12))
    if n >= 3:
        s_max = np.abs(Ds).max(axis=-1)
        assert np.all(s_max <= 2 * math.sqrt(n) * vnorm / d * (1 + 1e-12))
        assert np.all(s_max <= 2 * vsum / d * (1 + 1e-12))


def test_g0_gb_ratio_bounded():
    t = FlatTorus()
    rng = np.random.default_rng(4)
    x = random_configurations(t, 3, 100000, rng)
    ratio = min_dist_geodesic(x, t) / min_dist(x)
    assert np.isfinite(ratio).all() and ratio.max() < 2.0


def test_ln2_path():
    path = lambda s: np.stack([np.zeros((len(s), 2)), np.c_[1 + s, np.zeros(len(s))]], axis=1)
    assert path_length(path, "g0") == pytest.approx(math.log(2), rel=5e-3)
    assert path_length(np.repeat(X2[None], 5, axis=0), "g") == 0.0


def test_path_length_comparisons():
    rng = np.random.default_rng(6)
    a, b = random_configurations(UnitDisc(), 3, 2, rng, near_collision_fraction=0)
    path = lambda s: (1 - s)[:, None, None] * a + s[:, None, None] * b
    try:
        lg, l0, lb = (path_length(path, m, UnitDisc()) for m in ("g", "g0", "gb"))
    except PathLeavesConfigurationSpace:
        pytest.skip("straight path met a diagonal")
    assert lb <= l0 * (1 + 1e-9)
    assert lg <= math.sqrt(two_metrics_constant(3, 2.0)) * l0


def test_path_through_diagonal_is_flagged():
    path = lambda s: np.stack([np.zeros((len(s), 2)), np.c_[1 - 2 * s, np.zeros(len(s))]], axis=1)
    with pytest.raises(PathLeavesConfigurationSpace):
        path_length(path, "g0")


def test_collision_paths_g_bounded_g0_diverges():
    g, g0 = [], []
    for eps in (1e-2, 1e-4, 1e-6):
        path = lambda s: np.stack([np.zeros((len(s), 2)), np.c_[1 - (1 - eps) * s, np.zeros(len(s))]], axis=1)
        g.append(path_length(path, "g"))
        g0.append(path_length(path, "g0"))
    assert max(g) - min(g) < 0.01 * max(g)
    assert np.allclose(np.diff(g0), math.log(100), rtol=0.02)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), scale=st.floats(0.1, 10.0))
def test_g0_scale_invariance(seed, scale):
    rng = np.random.default_rng(seed)
    x = random_configurations(UnitDisc(), 3, 1, rng)[0]
    v = random_tangents(UnitDisc(), x, rng)
    assert g0_norm(scale * x, scale * v) == pytest.approx(g0_norm(x, v), rel=1e-12)
    assert min_dist(scale * x) == pytest.approx(scale * min_dist(x), rel=1e-12)
