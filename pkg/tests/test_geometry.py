import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from confbraid.geometry import (AnnularTwist, Constant, FlatTorus, Quadratic, RadialBump, RoundSphere, UnitDisc,
                                ambient_field, area_sample, geodesic_distance, hamiltonian_vector_field,
                                preset_hamiltonian)

SURFACES = [UnitDisc(), FlatTorus(), RoundSphere()]
SPECS = {
    "disc": [Quadratic((0.0, 0.0), 1.0), RadialBump((0.1, 0.2), 0.2, 0.5, 3.0), AnnularTwist((0, 0), 0.3, 0.7, 2.0)],
    "torus": [preset_hamiltonian("torus_bump"), preset_hamiltonian("torus_shear")],
    "sphere": [preset_hamiltonian("sphere_rotation"), preset_hamiltonian("sphere_bump")],
}


def _specs(surface):
    key = {"UnitDisc": "disc", "FlatTorus": "torus", "RoundSphere": "sphere"}[type(surface).__name__]
    return SPECS[key]


def test_disc_mean_square_radius():
    pts = area_sample(UnitDisc(), 0, 10**6).ambient
    r2 = np.sum(pts**2, axis=1)
    assert abs(r2.mean() - 0.5) < 3 * r2.std() / math.sqrt(len(r2))


def test_torus_chart_means():
    t = FlatTorus(a=1.0, b=2.0)
    c = area_sample(t, 1, 200000).chart
    se = c.std(axis=0) / math.sqrt(len(c))
    assert np.all(np.abs(c.mean(axis=0) - [0.5, 1.0]) < 3 * se)


def test_sphere_height_mean():
    z = area_sample(RoundSphere(), 2, 200000).ambient[:, 2]
    assert abs(z.mean()) < 3 * z.std() / math.sqrt(len(z))


@pytest.mark.parametrize("surface", SURFACES, ids=lambda s: type(s).__name__)
def test_samples_on_surface(surface):
    p = area_sample(surface, 3, 5000)
    assert np.max(np.abs(surface.residual(p.ambient))) < 1e-12
    assert np.allclose(surface.embed(p.chart), p.ambient, atol=1e-12, rtol=0)
    assert surface.total_area > 0 and surface.ambient_diameter_bound > 0


def test_rotation_field_example():
    x = hamiltonian_vector_field(UnitDisc(), Quadratic((0.0, 0.0), 1.0), [0.3, 0.0])
    assert np.allclose(x.ambient, [0.0, 0.3], atol=1e-14)
    assert np.allclose(x.chart, [0.0, 0.3], atol=1e-7)


@pytest.mark.parametrize("surface", SURFACES, ids=lambda s: type(s).__name__)
def test_constant_field_vanishes(surface):
    p = area_sample(surface, 4, 100).ambient
    assert np.all(ambient_field(surface, Constant(2.5), p) == 0)


def test_bump_vanishes_outside_support():
    h = RadialBump((0.1, 0.0), 0.2, 0.4, 5.0)
    p = np.array([[0.6, 0.0], [0.1, 0.45], [-0.5, -0.5]])
    assert np.all(ambient_field(UnitDisc(), h, p) == 0)
    assert np.all(h.value(p) == 0)


@pytest.mark.parametrize("surface", SURFACES, ids=lambda s: type(s).__name__)
def test_field_is_level_preserving_and_isometric(surface):
    rng = np.random.default_rng(5)
    p = area_sample(surface, rng, 1000).ambient
    for h in _specs(surface):
        t = rng.uniform(0, 1)
        x = ambient_field(surface, h, p, t)
        grad = surface.tangent_project(p, h.gradient(p, t))
        assert np.allclose(np.linalg.norm(x, axis=-1), np.linalg.norm(grad, axis=-1), rtol=1e-12, atol=1e-14)
        # dH along the unit field direction, by central differences, relative
        # to the field's scale (round-off in H dominates where X is tiny)
        speed = np.linalg.norm(x, axis=-1)
        live = speed > 0
        u = x[live] / speed[live, None]
        q = p[live]
        eps = 1e-4
        dh = (h.value(surface.project(q + eps * u), t) - h.value(surface.project(q - eps * u), t)) / (2 * eps)
        assert np.max(np.abs(dh)) < 1e-6 * speed.max()


def test_geodesic_distance_examples():
    assert geodesic_distance(UnitDisc(), np.array([0.0, 0.0]), np.array([0.6, 0.0])) == pytest.approx(0.6)
    t = FlatTorus()
    p, q = t.embed([0.1, 0.3]), t.embed([0.9, 0.3])
    assert geodesic_distance(t, p, q) == pytest.approx(0.2, abs=1e-12)
    s = RoundSphere()
    assert geodesic_distance(s, np.array([0, 0, 1.0]), np.array([0, 0, -1.0])) == pytest.approx(math.pi)


@pytest.mark.parametrize("surface", SURFACES, ids=lambda s: type(s).__name__)
@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_geodesic_distance_is_a_metric(surface, seed):
    p, q, r = area_sample(surface, seed, 3).ambient
    d = lambda a, b: float(surface.geodesic_distance(a, b))
    assert d(p, q) == d(q, p)
    assert d(p, r) <= d(p, q) + d(q, r) + 1e-12
    assert np.linalg.norm(p - q) <= d(p, q) + 1e-12


def test_annular_twist_profile():
    h = AnnularTwist((0.0, 0.0), 0.3, 0.6, 2.0)
    r = np.array([0.1, 0.2, 0.65, 0.9])
    p = np.c_[r, np.zeros_like(r)]
    x = ambient_field(UnitDisc(), h, p)
    assert np.all(x[:, 0] == 0) and np.all(x[2:] == 0)
    assert np.all(h.value(p[2:]) == 0)
    assert h.value(p[:1]) == h.value(p[1:2])
