"""Isotopies generated by Hamiltonians: trajectories and L^p-lengths."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import partial

import numpy as np

from .geometry import Concatenation, Hamiltonian, Periodic, Reversed, Surface, ambient_field
from .sampling import DEFAULT_CHUNK, map_chunks

# Gauss-Legendre nodes on [0, 1] used for the time integral of l_p
_GL_NODES = np.array([0.5 - math.sqrt(3) / 6, 0.5 + math.sqrt(3) / 6])
_GL_WEIGHTS = np.array([0.5, 0.5])


@dataclass(frozen=True)
class Isotopy:
    surface: Surface
    spec: Hamiltonian
    t_start: float = 0.0
    t_end: float = 1.0
    steps: int = 200

    def __post_init__(self):
        if self.steps < 1:
            raise ValueError("steps must be >= 1")
        if not self.t_end > self.t_start:
            raise ValueError("t_end must exceed t_start")

    @property
    def duration(self) -> float:
        return self.t_end - self.t_start

    @property
    def dt(self) -> float:
        return self.duration / self.steps

    @property
    def times(self) -> np.ndarray:
        return np.linspace(self.t_start, self.t_end, self.steps + 1)

    def refined(self, factor: int = 2) -> "Isotopy":
        return replace(self, steps=self.steps * factor)


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    points: np.ndarray  # (len(times), ..., d) ambient

    @property
    def end(self) -> np.ndarray:
        return self.points[-1]


def _rk4_step(surface, spec, p, t, h):
    # last stage evaluated just inside the step so time-windowed specs switch on grid nodes
    t_end = t + h * (1.0 - 1e-9)
    k1 = ambient_field(surface, spec, p, t)
    k2 = ambient_field(surface, spec, p + 0.5 * h * k1, t + 0.5 * h)
    k3 = ambient_field(surface, spec, p + 0.5 * h * k2, t + 0.5 * h)
    k4 = ambient_field(surface, spec, p + h * k3, t_end)
    return surface.project(p + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4))


def advect(isotopy: Isotopy, start_point, keep_path: bool = True) -> Trajectory:
    """Classical RK4 on ambient coordinates, reprojecting after every step.

    ``start_point`` may be a batch ``(..., d)``; the trajectory then has shape
    ``(steps + 1, ..., d)``. With ``keep_path=False`` only the endpoints are kept.
    """
    s = isotopy.surface
    p = s.project(np.asarray(start_point, dtype=float))
    h = isotopy.dt
    times = isotopy.times
    if keep_path:
        out = np.empty((isotopy.steps + 1,) + p.shape)
        out[0] = p
    for k in range(isotopy.steps):
        p = _rk4_step(s, isotopy.spec, p, times[k], h)
        if keep_path:
            out[k + 1] = p
    if keep_path:
        return Trajectory(times, out)
    return Trajectory(times[[0, -1]], np.stack([np.asarray(start_point, dtype=float), p]))


def flow_map(isotopy: Isotopy, points) -> np.ndarray:
    """Time-``t_end`` map applied to a batch of points."""
    return advect(isotopy, points, keep_path=False).end


@dataclass(frozen=True)
class LengthEstimate:
    value: float
    standard_error: float
    n_samples: int

    def __float__(self):
        return self.value


def _speed_powers(isotopy: Isotopy, p: float, rng, size):
    """Per-sample |X_t(y)|^p at the Gauss nodes of every step; y fresh mu-samples.

    Autonomous specs need a single column.
    """
    s = isotopy.surface
    y = s.embed(s.sample_chart(rng, size))
    if isotopy.spec.autonomous:
        return (np.linalg.norm(ambient_field(s, isotopy.spec, y, isotopy.t_start), axis=-1) ** p)[:, None]
    h = isotopy.dt
    cols = []
    for k in range(isotopy.steps):
        t0 = isotopy.t_start + k * h
        for node in _GL_NODES:
            x = ambient_field(s, isotopy.spec, y, t0 + node * h)
            cols.append(np.linalg.norm(x, axis=-1) ** p)
    return np.stack(cols, axis=1)


def lp_length(isotopy: Isotopy, p: float = 1.0, n_quadrature_samples: int = 20000, rng=0,
              chunk_size: int = DEFAULT_CHUNK, workers: int = 1) -> LengthEstimate:
    """Monte Carlo estimate of ``int (vol^-1 int |X_t|^p dmu)^(1/p) dt``.

    The space integral uses fresh area samples (``X_t`` is explicit, so no
    advection is needed); the time integral uses 2-point Gauss-Legendre per
    integrator step. The standard error comes from the delta method.
    """
    if p < 1:
        raise ValueError("l_p is defined for p >= 1")
    parts = map_chunks(partial(_speed_powers, isotopy, p), n_quadrature_samples, rng,
                       chunk_size=chunk_size, workers=workers)
    f = np.concatenate(parts, axis=0)
    n = f.shape[0]
    m = f.mean(axis=0)
    if isotopy.spec.autonomous:
        w = np.array([isotopy.duration])
    else:
        w = np.tile(_GL_WEIGHTS, isotopy.steps) * isotopy.dt
    pos = m > 0
    value = float(np.sum(w[pos] * m[pos] ** (1.0 / p)))
    if n < 2 or not pos.any():
        return LengthEstimate(value, 0.0, n)
    # linearisation of the estimator in the per-sample contributions
    coef = np.zeros_like(m)
    coef[pos] = w[pos] * (1.0 / p) * m[pos] ** (1.0 / p - 1.0)
    y = f @ coef
    se = float(np.std(y, ddof=1) / math.sqrt(n))
    return LengthEstimate(value, se, n)


def d1_upper_bound(isotopy: Isotopy, n_quadrature_samples: int = 20000, rng=0, **kw) -> LengthEstimate:
    """L^1-length of this particular isotopy.

    An upper bound for ``d_1(id, phi_1)``, which is the infimum over all
    isotopies with the same endpoint; it is not ``d_1`` itself.
    """
    return lp_length(isotopy, 1.0, n_quadrature_samples, rng, **kw)


def iterate(isotopy: Isotopy, k: int) -> Isotopy:
    """Isotopy of the ``k``-th iterate: the same generator run ``k`` periods."""
    if k < 1:
        raise ValueError("k must be >= 1")
    spec = isotopy.spec
    if not spec.autonomous:
        spec = _Shifted(Periodic(_Shifted(spec, isotopy.t_start), isotopy.duration), -isotopy.t_start)
    return replace(isotopy, spec=spec, t_end=isotopy.t_start + k * isotopy.duration, steps=k * isotopy.steps)


def concatenate(first: Isotopy, second: Isotopy) -> Isotopy:
    """``first`` followed by ``second`` on one time axis (same surface and step size)."""
    if first.surface != second.surface:
        raise ValueError("isotopies live on different surfaces")
    spec = Concatenation(_Shifted(first.spec, first.t_start), _Shifted(second.spec, second.t_start),
                         first.duration)
    return Isotopy(first.surface, spec, 0.0, first.duration + second.duration, first.steps + second.steps)


def reverse(isotopy: Isotopy) -> Isotopy:
    """Isotopy ``t -> phi_{T-t} phi_T^{-1}`` from the identity to ``phi_T^{-1}``."""
    spec = Reversed(_Shifted(isotopy.spec, isotopy.t_start), isotopy.duration)
    return Isotopy(isotopy.surface, spec, 0.0, isotopy.duration, isotopy.steps)


@dataclass(frozen=True)
class _Shifted(Hamiltonian):
    """``H(p, t + offset)``."""

    base: Hamiltonian
    offset: float = 0.0

    @property
    def autonomous(self):
        return self.base.autonomous

    def value(self, p, t=0.0):
        return self.base.value(p, t + self.offset)

    def gradient(self, p, t=0.0):
        return self.base.gradient(p, t + self.offset)
