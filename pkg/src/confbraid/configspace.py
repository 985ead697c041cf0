"""Configuration spaces X_n(M), the Sinha embedding and the metrics g, g0, g_b.

Configurations are arrays of shape ``(..., n, d)`` holding ambient points;
tangent vectors have the same shape and are taken ambiently, exactly as the
straight curve ``x + t v`` represents them (it may leave ``X_n(M)``).
Point indices are 0-based here.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from .geometry import Surface

COLLISION_THRESHOLD = 1e-7


class PathLeavesConfigurationSpace(ValueError):
    """A sampled path came closer to a diagonal than the collision threshold."""


@lru_cache(maxsize=None)
def pair_indices(n: int) -> tuple[np.ndarray, np.ndarray]:
    ij = np.array(list(itertools.combinations(range(n), 2)), dtype=int).reshape(-1, 2)
    return ij[:, 0], ij[:, 1]


@lru_cache(maxsize=None)
def triple_indices(n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    ijk = np.array(list(itertools.combinations(range(n), 3)), dtype=int).reshape(-1, 3)
    return ijk[:, 0], ijk[:, 1], ijk[:, 2]


@dataclass(frozen=True)
class Configuration:
    """``n`` distinct points of a surface, ambient coordinates ``(n, d)``."""

    points: np.ndarray
    surface: Surface | None = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2:
            raise ValueError("points must have shape (n, d)")
        object.__setattr__(self, "points", pts)
        if pts.shape[0] >= 2 and min_dist(pts) <= 0.0:
            raise ValueError("configuration points must be pairwise distinct")

    @property
    def n(self) -> int:
        return self.points.shape[0]


@dataclass(frozen=True)
class SinhaImage:
    base: np.ndarray                  # (n, d)
    directions: np.ndarray            # (n choose 2, d), pairs i<j
    ratios_compactified: np.ndarray   # (n choose 3,), exp(-s_ijk), triples i<j<k


def _pts(x) -> np.ndarray:
    return np.asarray(x.points if isinstance(x, Configuration) else x, dtype=float)


def pairwise_distances(x) -> np.ndarray:
    """Ambient distances for pairs i<j, shape ``(..., n choose 2)``."""
    x = _pts(x)
    i, j = pair_indices(x.shape[-2])
    return np.linalg.norm(x[..., i, :] - x[..., j, :], axis=-1)


def min_dist(x) -> np.ndarray:
    """Minimal pairwise ambient distance; ``inf`` for a single point."""
    x = _pts(x)
    if x.shape[-2] < 2:
        d = np.full(x.shape[:-2], np.inf)
        return float(d) if d.ndim == 0 else d
    d = pairwise_distances(x).min(axis=-1)
    return float(d) if d.ndim == 0 else d


def min_dist_geodesic(x, surface: Surface | None = None):
    if surface is None:
        surface = x.surface
    x = _pts(x)
    i, j = pair_indices(x.shape[-2])
    d = surface.geodesic_distance(x[..., i, :], x[..., j, :]).min(axis=-1)
    return float(d) if np.ndim(d) == 0 else d


def sinha_embed(config) -> SinhaImage:
    x = _pts(config)
    n = x.shape[-2]
    if n >= 2 and np.any(np.asarray(min_dist(x)) <= 0.0):
        raise ValueError("configuration has coincident points")
    i, j = pair_indices(n)
    diff = x[..., i, :] - x[..., j, :]
    dirs = diff / np.linalg.norm(diff, axis=-1, keepdims=True)
    a, b, c = triple_indices(n)
    s = np.linalg.norm(x[..., a, :] - x[..., b, :], axis=-1) / np.linalg.norm(x[..., a, :] - x[..., c, :], axis=-1)
    return SinhaImage(base=x.copy(), directions=dirs, ratios_compactified=np.exp(-s))


def dpi(config, tangent, i: int, j: int) -> np.ndarray:
    """Derivative of ``pi_ij = (x_i - x_j)/|x_i - x_j|`` along ``tangent``."""
    if not i < j:
        raise ValueError("need i < j")
    x, v = _pts(config), np.asarray(tangent, dtype=float)
    X = x[..., i, :] - x[..., j, :]
    V = v[..., i, :] - v[..., j, :]
    r = np.linalg.norm(X, axis=-1, keepdims=True)
    return V / r - X * np.sum(V * X, axis=-1, keepdims=True) / r**3


def ds_exp(config, tangent, i: int, j: int, k: int):
    """Derivative of ``exp(-s_ijk)``, ``s_ijk = |x_i - x_j| / |x_i - x_k|``.

    This is ``-e^{-s} Ds``; the sign matters for finite-difference checks
    only, every metric quantity uses the square.
    """
    if not i < j < k:
        raise ValueError("need i < j < k")
    x, v = _pts(config), np.asarray(tangent, dtype=float)
    Xij, Xik = x[..., i, :] - x[..., j, :], x[..., i, :] - x[..., k, :]
    Vij, Vik = v[..., i, :] - v[..., j, :], v[..., i, :] - v[..., k, :]
    rij, rik = np.linalg.norm(Xij, axis=-1), np.linalg.norm(Xik, axis=-1)
    ds = np.sum(Vij * Xij, axis=-1) / (rij * rik) - rij * np.sum(Xik * Vik, axis=-1) / rik**3
    out = -ds * np.exp(-rij / rik)
    return float(out) if np.ndim(out) == 0 else out


def _all_derivatives(x, v):
    """All ``D pi_ij`` (..., P, d) and ``D exp(-s_ijk)`` (..., T) at once."""
    n = x.shape[-2]
    i, j = pair_indices(n)
    X = x[..., i, :] - x[..., j, :]
    V = v[..., i, :] - v[..., j, :]
    r = np.linalg.norm(X, axis=-1, keepdims=True)
    Dpi = V / r - X * np.sum(V * X, axis=-1, keepdims=True) / r**3
    a, b, c = triple_indices(n)
    Xij, Xik = x[..., a, :] - x[..., b, :], x[..., a, :] - x[..., c, :]
    Vij, Vik = v[..., a, :] - v[..., b, :], v[..., a, :] - v[..., c, :]
    rij, rik = np.linalg.norm(Xij, axis=-1), np.linalg.norm(Xik, axis=-1)
    Ds = -(np.sum(Vij * Xij, axis=-1) / (rij * rik)
           - rij * np.sum(Xik * Vik, axis=-1) / rik**3) * np.exp(-rij / rik)
    return Dpi, Ds


all_derivatives = _all_derivatives


def finite_difference_derivatives(x, v, rel_step: float = 1e-3):
    """Central differences of the Sinha maps along ``x + t v``.

    Independent of the closed forms above: each map is re-evaluated in
    extended precision on a 5-point stencil. The step is chosen per pair or
    triple relative to the local distances (``rel_step * r / |dv|``) so that
    near-collision samples are resolved without losing digits.
    """
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    xl, vl = x.astype(np.longdouble), v.astype(np.longdouble)
    n = x.shape[-2]
    tiny = np.finfo(float).tiny

    def stencil(f, h):
        hh = h[..., None] if f(0 * h).ndim > h.ndim else h
        e = [f(k * h) for k in (-2, -1, 1, 2)]
        return ((e[0] - 8 * e[1] + 8 * e[2] - e[3]) / (12 * hh)).astype(float)

    i, j = pair_indices(n)
    Dpi = np.empty(x.shape[:-2] + (len(i), x.shape[-1]))
    for p, (a, b) in enumerate(zip(i, j)):
        r = np.linalg.norm(x[..., a, :] - x[..., b, :], axis=-1)
        dv = np.linalg.norm(v[..., a, :] - v[..., b, :], axis=-1) + tiny
        h = np.asarray(rel_step * r / dv, dtype=np.longdouble)

        def pi(t, a=a, b=b):
            y = xl + t[..., None, None] * vl
            d = y[..., a, :] - y[..., b, :]
            return d / np.sqrt(np.sum(d * d, axis=-1, keepdims=True))

        Dpi[..., p, :] = stencil(pi, h)

    a3, b3, c3 = triple_indices(n)
    Ds = np.empty(x.shape[:-2] + (len(a3),))
    for p, (a, b, c) in enumerate(zip(a3, b3, c3)):
        rij = np.linalg.norm(x[..., a, :] - x[..., b, :], axis=-1)
        rik = np.linalg.norm(x[..., a, :] - x[..., c, :], axis=-1)
        dv = (np.linalg.norm(v[..., a, :] - v[..., b, :], axis=-1)
              + np.linalg.norm(v[..., a, :] - v[..., c, :], axis=-1) + tiny)
        h = rel_step * np.minimum(rij, rik) / dv / np.maximum(1.0, rij / rik)
        h = np.asarray(h, dtype=np.longdouble)

        def es(t, a=a, b=b, c=c):
            y = xl + t[..., None, None] * vl
            u, w = y[..., a, :] - y[..., b, :], y[..., a, :] - y[..., c, :]
            return np.exp(-np.sqrt(np.sum(u * u, axis=-1)) / np.sqrt(np.sum(w * w, axis=-1)))

        Ds[..., p] = stencil(es, h)
    return Dpi, Ds


def _euclid(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    return np.sqrt(np.sum(v * v, axis=(-2, -1)))


def _scalar(a):
    return float(a) if np.ndim(a) == 0 else a


def g0_norm(config, tangent):
    """``|v| / d(x)`` with ``d`` the minimal ambient pairwise distance."""
    x = _pts(config)
    return _scalar(_euclid(tangent) / min_dist(x))


def gb_norm(config, tangent, surface: Surface | None = None):
    """``|v| / d_M(x)`` with ``d_M`` the minimal geodesic pairwise distance."""
    if surface is None:
        surface = config.surface
    return _scalar(_euclid(tangent) / min_dist_geodesic(_pts(config), surface))


def g_norm(config, tangent):
    """Norm of the pull-back of the product metric through the Sinha embedding."""
    x, v = _pts(config), np.asarray(tangent, dtype=float)
    Dpi, Ds = _all_derivatives(x, v)
    sq = np.sum(v * v, axis=(-2, -1)) + np.sum(Dpi * Dpi, axis=(-2, -1)) + np.sum(Ds * Ds, axis=-1)
    return _scalar(np.sqrt(sq))


def two_metrics_constant(n: int, A: float) -> float:
    """``C`` with ``|v|_g^2 <= C |v|_{g0}^2`` on configurations of diameter <= A."""
    if n < 2 or A <= 0:
        raise ValueError("need n >= 2 and A > 0")
    return A**2 + n * math.comb(n, 2) + 4 * n * math.comb(n, 3)


# ---------------------------------------------------------------------------
# path lengths
# ---------------------------------------------------------------------------

def _norm_fn(metric: str, surface: Surface | None):
    if metric == "g":
        return g_norm
    if metric == "g0":
        return g0_norm
    if metric == "gb":
        if surface is None:
            raise ValueError("metric 'gb' needs a surface")
        return lambda x, v: gb_norm(x, v, surface)
    raise ValueError(f"unknown metric {metric!r}")


def _as_callable(path, surface: Surface | None) -> tuple[Callable, np.ndarray]:
    if callable(path):
        return path, np.linspace(0.0, 1.0, 17)
    arr = np.asarray(path, dtype=float)
    m = arr.shape[0]
    nodes = np.linspace(0.0, 1.0, m)

    def f(s):
        s = np.atleast_1d(np.asarray(s, dtype=float))
        pos = np.clip(s * (m - 1), 0, m - 1)
        k = np.minimum(pos.astype(int), m - 2) if m > 1 else np.zeros_like(pos, dtype=int)
        frac = (pos - k)[:, None, None]
        out = arr[k] if m == 1 else (1 - frac) * arr[k] + frac * arr[k + 1]
        return surface.project(out) if surface is not None else out

    return f, nodes


def _segment_sum(f, nodes, norm):
    x = f(nodes)
    mid = f(0.5 * (nodes[:-1] + nodes[1:]))
    return float(np.sum(norm(mid, x[1:] - x[:-1]))), x


def path_length(path, metric: str = "g", surface: Surface | None = None,
                rel_tol: float = 5e-3, max_rounds: int = 12,
                collision_threshold: float = COLLISION_THRESHOLD) -> float:
    """Length of a path of configurations under ``g``, ``g0`` or ``gb``.

    ``path`` is either an array ``(m, n, d)`` of samples (read as the piecewise
    linear path through them, reprojected to ``surface`` when given) or a
    vectorised callable ``s -> (len(s), n, d)`` on ``[0, 1]``. Segments are
    bisected until ``d(x)`` changes by less than 10% across each, then the
    whole grid is doubled until the midpoint sum moves by less than
    ``rel_tol``. Raises :class:`PathLeavesConfigurationSpace` if the path
    comes within ``collision_threshold`` of a diagonal.
    """
    norm = _norm_fn(metric, surface)
    f, nodes = _as_callable(path, surface)
    if nodes.size < 2:
        return 0.0
    for _ in range(40):
        d = np.asarray(min_dist(f(nodes)))
        if np.any(d < collision_threshold):
            raise PathLeavesConfigurationSpace("path meets a diagonal of the configuration space")
        if not np.all(np.isfinite(d)):
            break  # a single point: no diagonal to resolve
        rel = np.abs(np.diff(d)) / np.minimum(d[:-1], d[1:])
        bad = np.nonzero(rel >= 0.1)[0]
        if bad.size == 0:
            break
        nodes = np.sort(np.concatenate([nodes, 0.5 * (nodes[bad] + nodes[bad + 1])]))
    length, x = _segment_sum(f, nodes, norm)
    for _ in range(max_rounds):
        nodes = np.sort(np.concatenate([nodes, 0.5 * (nodes[:-1] + nodes[1:])]))
        new, x = _segment_sum(f, nodes, norm)
        if np.any(np.asarray(min_dist(x)) < collision_threshold):
            raise PathLeavesConfigurationSpace("path meets a diagonal of the configuration space")
        done = abs(new - length) <= rel_tol * max(abs(new), 1e-300) or new == length
        length = new
        if done:
            break
    return length


# ---------------------------------------------------------------------------
# random samples for the verification campaigns
# ---------------------------------------------------------------------------

def random_configurations(surface: Surface, n: int, size: int, rng, near_collision_fraction: float = 0.5,
                          min_squeeze: float = 1e-6):
    """Configurations from mu^n, a fraction squeezed towards a random diagonal.

    Squeezed samples move one point toward another by a log-uniform factor in
    ``[min_squeeze, 1]`` so the ``e^{-s}`` and direction terms are stressed.
    """
    x = surface.embed(surface.sample_chart(rng, size * n)).reshape(size, n, -1)
    m = int(round(near_collision_fraction * size))
    if m and n >= 2:
        rows = np.arange(m)
        a = rng.integers(0, n, m)
        b = (a + rng.integers(1, n, m)) % n
        lam = 10.0 ** rng.uniform(math.log10(min_squeeze), 0, m)
        moved = x[rows, b] + lam[:, None] * (x[rows, a] - x[rows, b])
        x[rows, a] = surface.project(moved)
    return x


def random_tangents(surface: Surface, x, rng) -> np.ndarray:
    v = rng.standard_normal(np.shape(x))
    return surface.tangent_project(x, v)
