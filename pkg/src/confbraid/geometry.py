"""Surface models in Euclidean space, area sampling and Hamiltonian vector fields.

Every surface works on batched ambient arrays of shape ``(..., d)``. The
symplectic gradient is ``X_H = J grad_M H`` where ``J`` is the rotation by
+90 degrees in the oriented tangent plane, so ``dH(X_H) = 0`` and
``|X_H| = |grad_M H|``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from numpy.polynomial import Polynomial

from .sampling import as_generator

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class SurfacePoint:
    """Chart and ambient coordinates of one point or a batch of points."""

    chart: np.ndarray
    ambient: np.ndarray


class Surface:
    """Base class; subclasses fill in the embedding-specific pieces."""

    name = "surface"
    ambient_dim: int
    total_area: float
    ambient_diameter_bound: float

    # --- chart <-> ambient -------------------------------------------------
    def embed(self, chart):
        raise NotImplementedError

    def to_chart(self, ambient):
        raise NotImplementedError

    def sample_chart(self, rng: np.random.Generator, size: int) -> np.ndarray:
        raise NotImplementedError

    # --- tangent geometry --------------------------------------------------
    def project(self, ambient):
        """Nearest-point retraction onto the surface."""
        raise NotImplementedError

    def tangent_project(self, ambient, v):
        raise NotImplementedError

    def rotate(self, ambient, v):
        """Rotate a tangent vector by +90 degrees in the oriented tangent plane."""
        raise NotImplementedError

    def residual(self, ambient) -> np.ndarray:
        """Violation of the defining equation (0 on the surface)."""
        raise NotImplementedError

    # --- metric --------------------------------------------------------------
    def geodesic_distance(self, p, q) -> np.ndarray:
        raise NotImplementedError

    def path_between(self, p, q, s) -> np.ndarray:
        """Coordinate path rule used for short paths, ``s`` in [0, 1].

        ``p`` and ``q`` have shape ``(..., d)``; the result has shape
        ``(len(s), ..., d)``.
        """
        raise NotImplementedError

    def planar(self, ambient) -> np.ndarray:
        """Orientation-preserving planar chart used to read off braids."""
        raise NotImplementedError


@dataclass(frozen=True)
class UnitDisc(Surface):
    name = "disc"
    ambient_dim: int = 2
    total_area: float = math.pi
    ambient_diameter_bound: float = 2.0

    def embed(self, chart):
        return np.array(chart, dtype=float, copy=True)

    def to_chart(self, ambient):
        return np.array(ambient, dtype=float, copy=True)

    def sample_chart(self, rng, size):
        r = np.sqrt(rng.random(size))
        th = TWO_PI * rng.random(size)
        return np.stack([r * np.cos(th), r * np.sin(th)], axis=-1)

    def project(self, ambient):
        p = np.asarray(ambient, dtype=float)
        r = np.linalg.norm(p, axis=-1, keepdims=True)
        return np.where(r > 1.0, p / np.maximum(r, 1e-300), p)

    def tangent_project(self, ambient, v):
        return np.asarray(v, dtype=float)

    def rotate(self, ambient, v):
        v = np.asarray(v, dtype=float)
        return np.stack([-v[..., 1], v[..., 0]], axis=-1)

    def residual(self, ambient):
        return np.maximum(np.linalg.norm(ambient, axis=-1) - 1.0, 0.0)

    def geodesic_distance(self, p, q):
        return np.linalg.norm(np.asarray(p) - np.asarray(q), axis=-1)

    def path_between(self, p, q, s):
        s = np.asarray(s, dtype=float).reshape((-1,) + (1,) * np.ndim(p))
        return (1.0 - s) * p + s * q

    def planar(self, ambient):
        return np.asarray(ambient, dtype=float)


@dataclass(frozen=True)
class FlatTorus(Surface):
    """Product of two round circles in R^4 with circumferences ``a`` and ``b``.

    The induced metric is flat, the chart ``(u, v)`` lives in ``[0,a) x [0,b)``
    and is isometric to the fundamental domain.
    """

    a: float = 1.0
    b: float = 1.0
    name = "torus"
    ambient_dim: int = 4

    @property
    def total_area(self) -> float:
        return self.a * self.b

    @property
    def ambient_diameter_bound(self) -> float:
        return math.hypot(self.a / math.pi, self.b / math.pi)

    @property
    def radii(self) -> tuple[float, float]:
        return self.a / TWO_PI, self.b / TWO_PI

    def embed(self, chart):
        chart = np.asarray(chart, dtype=float)
        r1, r2 = self.radii
        al = TWO_PI * chart[..., 0] / self.a
        be = TWO_PI * chart[..., 1] / self.b
        return np.stack([r1 * np.cos(al), r1 * np.sin(al), r2 * np.cos(be), r2 * np.sin(be)], axis=-1)

    def _angles(self, ambient):
        p = np.asarray(ambient, dtype=float)
        return np.arctan2(p[..., 1], p[..., 0]), np.arctan2(p[..., 3], p[..., 2])

    def to_chart(self, ambient):
        al, be = self._angles(ambient)
        u = np.mod(al / TWO_PI * self.a, self.a)
        v = np.mod(be / TWO_PI * self.b, self.b)
        return np.stack([u, v], axis=-1)

    def sample_chart(self, rng, size):
        return np.stack([self.a * rng.random(size), self.b * rng.random(size)], axis=-1)

    def _frame(self, ambient):
        al, be = self._angles(ambient)
        z = np.zeros_like(al)
        e_u = np.stack([-np.sin(al), np.cos(al), z, z], axis=-1)
        e_v = np.stack([z, z, -np.sin(be), np.cos(be)], axis=-1)
        return e_u, e_v

    def project(self, ambient):
        p = np.asarray(ambient, dtype=float)
        r1, r2 = self.radii
        c1 = p[..., 0:2] / np.linalg.norm(p[..., 0:2], axis=-1, keepdims=True) * r1
        c2 = p[..., 2:4] / np.linalg.norm(p[..., 2:4], axis=-1, keepdims=True) * r2
        return np.concatenate([c1, c2], axis=-1)

    def tangent_project(self, ambient, v):
        e_u, e_v = self._frame(ambient)
        v = np.asarray(v, dtype=float)
        cu = np.sum(v * e_u, axis=-1, keepdims=True)
        cv = np.sum(v * e_v, axis=-1, keepdims=True)
        return cu * e_u + cv * e_v

    def rotate(self, ambient, v):
        e_u, e_v = self._frame(ambient)
        v = np.asarray(v, dtype=float)
        cu = np.sum(v * e_u, axis=-1, keepdims=True)
        cv = np.sum(v * e_v, axis=-1, keepdims=True)
        return cu * e_v - cv * e_u

    def residual(self, ambient):
        p = np.asarray(ambient, dtype=float)
        r1, r2 = self.radii
        return np.maximum(np.abs(np.linalg.norm(p[..., 0:2], axis=-1) - r1),
                          np.abs(np.linalg.norm(p[..., 2:4], axis=-1) - r2))

    def geodesic_distance(self, p, q):
        cp, cq = self.to_chart(p), self.to_chart(q)
        du = np.abs(cp[..., 0] - cq[..., 0])
        dv = np.abs(cp[..., 1] - cq[..., 1])
        du = np.minimum(du, self.a - du)
        dv = np.minimum(dv, self.b - dv)
        return np.hypot(du, dv)

    def path_between(self, p, q, s):
        # straight segment inside the fundamental domain: a flat geodesic that never
        # crosses the chart seam, so braids read in the chart stay faithful
        cp, cq = self.to_chart(p), self.to_chart(q)
        s = np.asarray(s, dtype=float).reshape((-1,) + (1,) * np.ndim(cp))
        return self.embed((1.0 - s) * cp + s * cq)

    def planar(self, ambient):
        return self.to_chart(ambient)


@dataclass(frozen=True)
class RoundSphere(Surface):
    radius: float = 1.0
    name = "sphere"
    ambient_dim: int = 3

    @property
    def total_area(self) -> float:
        return 4.0 * math.pi * self.radius**2

    @property
    def ambient_diameter_bound(self) -> float:
        return 2.0 * self.radius

    def embed(self, chart):
        # chart = (polar angle, azimuth)
        chart = np.asarray(chart, dtype=float)
        th, ph = chart[..., 0], chart[..., 1]
        st = np.sin(th)
        return self.radius * np.stack([st * np.cos(ph), st * np.sin(ph), np.cos(th)], axis=-1)

    def to_chart(self, ambient):
        p = np.asarray(ambient, dtype=float)
        r = np.linalg.norm(p, axis=-1)
        th = np.arccos(np.clip(p[..., 2] / r, -1.0, 1.0))
        ph = np.mod(np.arctan2(p[..., 1], p[..., 0]), TWO_PI)
        return np.stack([th, ph], axis=-1)

    def sample_chart(self, rng, size):
        z = 2.0 * rng.random(size) - 1.0
        ph = TWO_PI * rng.random(size)
        return np.stack([np.arccos(z), ph], axis=-1)

    def project(self, ambient):
        p = np.asarray(ambient, dtype=float)
        return self.radius * p / np.linalg.norm(p, axis=-1, keepdims=True)

    def _normal(self, ambient):
        p = np.asarray(ambient, dtype=float)
        return p / np.linalg.norm(p, axis=-1, keepdims=True)

    def tangent_project(self, ambient, v):
        n = self._normal(ambient)
        v = np.asarray(v, dtype=float)
        return v - np.sum(v * n, axis=-1, keepdims=True) * n

    def rotate(self, ambient, v):
        return np.cross(self._normal(ambient), np.asarray(v, dtype=float))

    def residual(self, ambient):
        return np.abs(np.linalg.norm(ambient, axis=-1) - self.radius)

    def geodesic_distance(self, p, q):
        chord = np.linalg.norm(np.asarray(p) - np.asarray(q), axis=-1)
        return 2.0 * self.radius * np.arcsin(np.clip(chord / (2.0 * self.radius), 0.0, 1.0))

    def path_between(self, p, q, s):
        # constant-speed great-circle arc (slerp); antipodal pairs are measure zero
        p = np.asarray(p, dtype=float) / self.radius
        q = np.asarray(q, dtype=float) / self.radius
        cosw = np.clip(np.sum(p * q, axis=-1, keepdims=True), -1.0, 1.0)
        w = np.arccos(cosw)
        sw = np.sin(w)
        small = sw < 1e-12
        s = np.asarray(s, dtype=float).reshape((-1,) + (1,) * np.ndim(p))
        safe = np.where(small, 1.0, sw)
        c0 = np.where(small, 1.0 - s, np.sin((1.0 - s) * w) / safe)
        c1 = np.where(small, s, np.sin(s * w) / safe)
        return self.radius * (c0 * p + c1 * q)

    def planar(self, ambient):
        # stereographic projection from the north pole; y flipped to keep orientation
        p = np.asarray(ambient, dtype=float)
        den = self.radius - p[..., 2]
        return np.stack([p[..., 0], -p[..., 1]], axis=-1) * (self.radius / den)[..., None]


def area_sample(surface: Surface, rng, size: int | None = None) -> SurfacePoint:
    """Draw points from the normalised area measure."""
    rng = as_generator(rng)
    chart = surface.sample_chart(rng, 1 if size is None else size)
    if size is None:
        chart = chart[0]
    return SurfacePoint(chart=chart, ambient=surface.embed(chart))


def surface_from_name(kind: str, **params) -> Surface:
    kind = kind.lower()
    if kind in ("disc", "unitdisc", "unit_disc"):
        return UnitDisc()
    if kind in ("torus", "flattorus", "flat_torus"):
        return FlatTorus(a=float(params.get("a", 1.0)), b=float(params.get("b", 1.0)))
    if kind in ("sphere", "roundsphere", "round_sphere"):
        return RoundSphere(radius=float(params.get("radius", 1.0)))
    raise ValueError(f"unknown surface kind {kind!r}")


# ---------------------------------------------------------------------------
# Hamiltonians
# ---------------------------------------------------------------------------

class Hamiltonian:
    """Time-dependent function on ambient space with an analytic gradient."""

    autonomous = True

    def value(self, p, t: float = 0.0) -> np.ndarray:
        raise NotImplementedError

    def gradient(self, p, t: float = 0.0) -> np.ndarray:
        raise NotImplementedError

    def __add__(self, other: "Hamiltonian") -> "Hamiltonian":
        return Sum((self, other))

    def __mul__(self, factor: float) -> "Hamiltonian":
        return Scaled(self, float(factor))

    __rmul__ = __mul__


@dataclass(frozen=True)
class Constant(Hamiltonian):
    c: float = 0.0

    def value(self, p, t=0.0):
        return np.full(np.shape(p)[:-1], self.c, dtype=float)

    def gradient(self, p, t=0.0):
        return np.zeros(np.shape(p), dtype=float)


@dataclass(frozen=True)
class Quadratic(Hamiltonian):
    """``rate * |p - center|^2 / 2``: rigid rotation about ``center`` on the disc."""

    center: tuple = (0.0, 0.0)
    rate: float = 1.0

    def value(self, p, t=0.0):
        d = np.asarray(p, dtype=float) - np.asarray(self.center)
        return 0.5 * self.rate * np.sum(d * d, axis=-1)

    def gradient(self, p, t=0.0):
        return self.rate * (np.asarray(p, dtype=float) - np.asarray(self.center))


@dataclass(frozen=True)
class Linear(Hamiltonian):
    """``amplitude * <direction, p>``: rotation of the sphere, shear of the torus."""

    direction: tuple = (0.0, 0.0, 1.0)
    amplitude: float = 1.0

    def value(self, p, t=0.0):
        return self.amplitude * (np.asarray(p, dtype=float) @ np.asarray(self.direction, dtype=float))

    def gradient(self, p, t=0.0):
        g = self.amplitude * np.asarray(self.direction, dtype=float)
        return np.broadcast_to(g, np.shape(p)).copy()


def _smoothstep_profile(r_in: float, r_out: float):
    """Polynomials for the radial bump: weight w(s) and potential rho(s) on the annulus."""
    L = r_out - r_in
    t = Polynomial([-r_in / L, 1.0 / L])
    w = 1.0 - (6 * t**5 - 15 * t**4 + 10 * t**3)
    sw = Polynomial([0.0, 1.0]) * w
    Q = sw.integ()
    rho = Q - Q(r_out)
    return w, rho, float(rho(r_in))


@dataclass(frozen=True)
class RadialBump(Hamiltonian):
    """Twist Hamiltonian ``amplitude * rho(|p - center|)``.

    ``rho' (r) = r w(r)`` with ``w = 1`` on ``[0, r_in]`` and a C^2 quintic
    decay to 0 at ``r_out``. On a flat chart the flow is rigid rotation with
    angular speed ``amplitude`` inside ``r_in`` and the identity outside
    ``r_out``; ``H`` vanishes identically there.
    """

    center: tuple = (0.0, 0.0)
    r_in: float = 0.3
    r_out: float = 0.5
    amplitude: float = 1.0
    _poly: tuple = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        if not 0.0 < self.r_in < self.r_out:
            raise ValueError("need 0 < r_in < r_out")
        object.__setattr__(self, "_poly", _smoothstep_profile(self.r_in, self.r_out))

    def angular_weight(self, r) -> np.ndarray:
        w, _, _ = self._poly
        r = np.asarray(r, dtype=float)
        return np.where(r <= self.r_in, 1.0, np.where(r >= self.r_out, 0.0, w(np.clip(r, self.r_in, self.r_out))))

    def profile(self, r) -> np.ndarray:
        _, rho, rho_in = self._poly
        r = np.asarray(r, dtype=float)
        inner = 0.5 * (r * r - self.r_in**2) + rho_in
        mid = rho(np.clip(r, self.r_in, self.r_out))
        return np.where(r <= self.r_in, inner, np.where(r >= self.r_out, 0.0, mid))

    def value(self, p, t=0.0):
        d = np.asarray(p, dtype=float) - np.asarray(self.center)
        return self.amplitude * self.profile(np.linalg.norm(d, axis=-1))

    def gradient(self, p, t=0.0):
        d = np.asarray(p, dtype=float) - np.asarray(self.center)
        w = self.angular_weight(np.linalg.norm(d, axis=-1))
        return self.amplitude * w[..., None] * d


def _annulus_profile(r_a: float, r_b: float):
    """Weight ``64 t^3 (1-t)^3`` on ``[r_a, r_b]`` and its potential vanishing at ``r_b``."""
    L = r_b - r_a
    t = Polynomial([-r_a / L, 1.0 / L])
    w = 64 * t**3 * (1 - t) ** 3
    Q = (Polynomial([0.0, 1.0]) * w).integ()
    rho = Q - Q(r_b)
    return w, rho, float(rho(r_a))


@dataclass(frozen=True)
class AnnularTwist(Hamiltonian):
    """Differential rotation of the annulus ``r_a < |p - center| < r_b``.

    Angular speed ``amplitude * 64 t^3 (1-t)^3`` with ``t`` the relative
    radius; the inner disc and the outside are fixed, so twists on disjoint
    annuli have disjoint supports and commute. ``H`` is constant inside
    ``r_a`` and vanishes outside ``r_b``.
    """

    center: tuple = (0.0, 0.0)
    r_a: float = 0.5
    r_b: float = 0.9
    amplitude: float = 1.0
    _poly: tuple = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        if not 0.0 <= self.r_a < self.r_b:
            raise ValueError("need 0 <= r_a < r_b")
        object.__setattr__(self, "_poly", _annulus_profile(self.r_a, self.r_b))

    @property
    def r_out(self) -> float:
        return self.r_b

    def angular_weight(self, r) -> np.ndarray:
        w, _, _ = self._poly
        r = np.asarray(r, dtype=float)
        inside = (r > self.r_a) & (r < self.r_b)
        return np.where(inside, w(np.clip(r, self.r_a, self.r_b)), 0.0)

    def profile(self, r) -> np.ndarray:
        _, rho, rho_a = self._poly
        r = np.asarray(r, dtype=float)
        mid = rho(np.clip(r, self.r_a, self.r_b))
        return np.where(r <= self.r_a, rho_a, np.where(r >= self.r_b, 0.0, mid))

    def value(self, p, t=0.0):
        d = np.asarray(p, dtype=float) - np.asarray(self.center)
        return self.amplitude * self.profile(np.linalg.norm(d, axis=-1))

    def gradient(self, p, t=0.0):
        d = np.asarray(p, dtype=float) - np.asarray(self.center)
        w = self.angular_weight(np.linalg.norm(d, axis=-1))
        return self.amplitude * w[..., None] * d


@dataclass(frozen=True)
class Sum(Hamiltonian):
    terms: tuple = ()

    @property
    def autonomous(self):
        return all(h.autonomous for h in self.terms)

    def value(self, p, t=0.0):
        return sum((h.value(p, t) for h in self.terms), np.zeros(np.shape(p)[:-1]))

    def gradient(self, p, t=0.0):
        return sum((h.gradient(p, t) for h in self.terms), np.zeros(np.shape(p)))


@dataclass(frozen=True)
class Scaled(Hamiltonian):
    base: Hamiltonian
    factor: float = 1.0

    @property
    def autonomous(self):
        return self.base.autonomous

    def value(self, p, t=0.0):
        return self.factor * self.base.value(p, t)

    def gradient(self, p, t=0.0):
        return self.factor * self.base.gradient(p, t)


@dataclass(frozen=True)
class TimeDependentBlend(Hamiltonian):
    """Switch ``spec`` on for ``t0 <= t < t1`` for each ``(spec, (t0, t1))``.

    Window edges should sit on the integrator's time grid.
    """

    pieces: tuple = ()
    autonomous = False

    def _active(self, t):
        return [h for h, (t0, t1) in self.pieces if t0 <= t < t1]

    def value(self, p, t=0.0):
        return sum((h.value(p, t) for h in self._active(t)), np.zeros(np.shape(p)[:-1]))

    def gradient(self, p, t=0.0):
        return sum((h.gradient(p, t) for h in self._active(t)), np.zeros(np.shape(p)))


@dataclass(frozen=True)
class Reversed(Hamiltonian):
    """Generator of ``t -> phi_{T-t} phi_T^{-1}``: ``-H(p, T - t)``."""

    base: Hamiltonian
    period: float = 1.0
    autonomous = False

    def value(self, p, t=0.0):
        return -self.base.value(p, self.period - t)

    def gradient(self, p, t=0.0):
        return -self.base.gradient(p, self.period - t)


@dataclass(frozen=True)
class Reparametrized(Hamiltonian):
    """Same time-``T`` map, run with clock ``s(t) = t - T sin(2 pi t / T) / (2 pi)``."""

    base: Hamiltonian
    period: float = 1.0
    autonomous = False

    def _clock(self, t):
        w = TWO_PI / self.period
        return t - math.sin(w * t) / w, 1.0 - math.cos(w * t)

    def value(self, p, t=0.0):
        s, ds = self._clock(t)
        return ds * self.base.value(p, s)

    def gradient(self, p, t=0.0):
        s, ds = self._clock(t)
        return ds * self.base.gradient(p, s)


@dataclass(frozen=True)
class Periodic(Hamiltonian):
    """``H(p, t mod T)``; flowing for ``kT`` gives the k-th iterate."""

    base: Hamiltonian
    period: float = 1.0

    @property
    def autonomous(self):
        return self.base.autonomous

    def value(self, p, t=0.0):
        return self.base.value(p, math.fmod(t, self.period))

    def gradient(self, p, t=0.0):
        return self.base.gradient(p, math.fmod(t, self.period))


@dataclass(frozen=True)
class Concatenation(Hamiltonian):
    """``first`` on ``[0, split)`` then ``second`` shifted by ``split``."""

    first: Hamiltonian
    second: Hamiltonian
    split: float = 1.0
    autonomous = False

    def value(self, p, t=0.0):
        return self.first.value(p, t) if t < self.split else self.second.value(p, t - self.split)

    def gradient(self, p, t=0.0):
        return self.first.gradient(p, t) if t < self.split else self.second.gradient(p, t - self.split)


def hamiltonian_vector_field(surface: Surface, spec: Hamiltonian, point, time: float = 0.0) -> SurfacePoint:
    """Symplectic gradient of ``spec`` at ``point`` (ambient, batched).

    Returns chart velocity and ambient velocity. Chart velocities are computed
    by differentiating the chart map and are meaningless at chart singularities
    (sphere poles).
    """
    p = np.asarray(point, dtype=float)
    x = ambient_field(surface, spec, p, time)
    h = 1e-7
    c0 = surface.to_chart(surface.project(p - h * x))
    c1 = surface.to_chart(surface.project(p + h * x))
    dc = c1 - c0
    if isinstance(surface, FlatTorus):
        dc[..., 0] = (dc[..., 0] + surface.a / 2) % surface.a - surface.a / 2
        dc[..., 1] = (dc[..., 1] + surface.b / 2) % surface.b - surface.b / 2
    elif isinstance(surface, RoundSphere):
        dc[..., 1] = (dc[..., 1] + math.pi) % TWO_PI - math.pi
    return SurfacePoint(chart=dc / (2 * h), ambient=x)


def ambient_field(surface: Surface, spec: Hamiltonian, p, t: float = 0.0) -> np.ndarray:
    """Ambient components of ``X_H`` (the hot path used by the integrator)."""
    g = surface.tangent_project(p, spec.gradient(p, t))
    return surface.rotate(p, g)


def geodesic_distance(surface: Surface, p, q):
    return surface.geodesic_distance(p, q)


def preset_hamiltonian(name: str, surface: Surface | None = None) -> Hamiltonian:
    """Named Hamiltonians used across tests and scenarios."""
    presets = {
        "zero": lambda: Constant(0.0),
        "rotation": lambda: Quadratic((0.0, 0.0), 1.0),
        "twist": lambda: RadialBump((0.0, 0.0), 0.5, 0.8, TWO_PI),
        "offcenter_bump": lambda: RadialBump((0.3, -0.2), 0.2, 0.45, TWO_PI),
        "double_bump": lambda: Sum((RadialBump((-0.45, 0.0), 0.2, 0.4, TWO_PI),
                                    RadialBump((0.45, 0.0), 0.2, 0.4, -2 * TWO_PI))),
        "torus_bump": lambda: RadialBump(tuple(FlatTorus().embed([0.5, 0.5])), 0.1, 0.2, TWO_PI),
        "torus_shear": lambda: Linear((0.0, 0.0, 0.0, 1.0), 1.0),
        "sphere_rotation": lambda: Linear((0.0, 0.0, 1.0), 1.0),
        "sphere_bump": lambda: RadialBump((0.0, 0.0, -1.0), 0.4, 0.8, TWO_PI),
    }
    try:
        return presets[name]()
    except KeyError:
        raise ValueError(f"unknown Hamiltonian preset {name!r}") from None
