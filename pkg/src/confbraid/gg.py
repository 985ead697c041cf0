"""Averaging braid invariants of trajectories (the Gambaudo-Ghys construction).

For a configuration ``x`` the loop ``lambda(x)`` runs along the short path
from the base configuration ``q`` to ``x``, follows the isotopy and returns
along the short path of the endpoint. Its braid is read in the surface's
planar chart; averaging a quasimorphism (or the word norm) of that braid
over ``x ~ mu^n`` gives ``Phi`` (or ``W``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import partial

import numpy as np

from .braid import (BudgetExceeded, DegenerateProjection, PureBraid, WordNormEstimate,
                    extract_braid, word_norm)
from .configspace import COLLISION_THRESHOLD, min_dist, path_length
from .flow import Isotopy, advect, iterate
from .geometry import Surface
from .quasimorphism import Quasimorphism, evaluate
from .sampling import DEFAULT_CHUNK, map_chunks

BAD_SET_THRESHOLD = 1e-6
# generic direction for reading braids; base points are sorted along it so
# strand k of every extracted braid is base point k
PROJECTION_ANGLE = 0.1234


class InBadSet(ValueError):
    """The coordinate-wise short path of this configuration collides."""


def base_configuration(surface: Surface, center, radius: float, n: int) -> np.ndarray:
    """``n`` points evenly spaced on a circle of ``radius`` about ``center``."""
    c = surface.project(np.asarray(center, dtype=float))
    e1 = surface.tangent_project(c, np.eye(surface.ambient_dim)[0])
    if np.linalg.norm(e1) < 1e-6:
        e1 = surface.tangent_project(c, np.eye(surface.ambient_dim)[1])
    e1 = e1 / np.linalg.norm(e1)
    e2 = surface.rotate(c, e1)
    ang = 2 * np.pi * np.arange(n) / n
    return surface.project(c + radius * (np.cos(ang)[:, None] * e1 + np.sin(ang)[:, None] * e2))


def min_distance_along(paths) -> np.ndarray:
    """Minimum pairwise distance along piecewise-linear paths ``(m, ..., n, d)``.

    Exact for the linear interpolant: on each segment the relative position
    of two points is affine in time.
    """
    p = np.asarray(paths, dtype=float)
    n = p.shape[-2]
    a, b = np.triu_indices(n, 1)
    rel = p[..., a, :] - p[..., b, :]
    r0, r1 = rel[:-1], rel[1:]
    dr = r1 - r0
    den = np.sum(dr * dr, axis=-1)
    s = np.clip(-np.sum(r0 * dr, axis=-1) / np.where(den > 0, den, 1.0), 0.0, 1.0)
    closest = np.linalg.norm(r0 + s[..., None] * dr, axis=-1)
    return closest.min(axis=(0, -1))


@dataclass(frozen=True)
class ShortPathSystem:
    """Coordinate-wise paths from ``base`` (shape ``(n, d)``) to any configuration."""

    surface: Surface
    base: np.ndarray
    n_path_samples: int = 33
    bad_set_threshold: float = BAD_SET_THRESHOLD
    length_bound: float | None = None

    def __post_init__(self):
        base = np.asarray(self.base, dtype=float)
        if base.ndim != 2 or base.shape[0] < 1:
            raise ValueError("base must have shape (n, d) with n >= 1")
        e = np.array([math.cos(PROJECTION_ANGLE), math.sin(PROJECTION_ANGLE)])
        order = np.argsort(self.surface.planar(base) @ e, kind="stable")
        object.__setattr__(self, "base", base[order])

    @property
    def n(self) -> int:
        return self.base.shape[0]

    def paths(self, x) -> np.ndarray:
        """Ambient short paths ``(n_path_samples, ..., n, d)`` from ``q`` to ``x``."""
        s = np.linspace(0.0, 1.0, self.n_path_samples)
        x = np.asarray(x, dtype=float)
        q = np.broadcast_to(self.base, x.shape)
        return self.surface.path_between(q, x, s)

    def in_bad_set(self, x) -> np.ndarray:
        if self.n < 2:
            return np.zeros(np.shape(x)[:-2], dtype=bool)
        return min_distance_along(self.paths(x)) < self.bad_set_threshold


def short_path(system: ShortPathSystem, x) -> np.ndarray:
    """Sampled short path ``q -> x`` for one configuration ``(n, d)``."""
    x = np.asarray(x, dtype=float)
    if system.in_bad_set(x):
        raise InBadSet("short path leaves the configuration space")
    return system.paths(x)


def loop_paths(system: ShortPathSystem, isotopy: Isotopy, x) -> np.ndarray:
    """Ambient samples of ``gamma(x) # {phi_t x} # gamma(phi_1 x)^-1``, batched over ``x``."""
    x = np.asarray(x, dtype=float)
    traj = advect(isotopy, x).points
    end = traj[-1]
    return np.concatenate([system.paths(x)[:-1], traj, system.paths(end)[::-1][1:]], axis=0)


def loop_class(system: ShortPathSystem, isotopy: Isotopy, x) -> PureBraid:
    """Pure braid of the loop ``lambda(x)`` read in the planar chart."""
    x = np.asarray(x, dtype=float)
    if system.in_bad_set(x):
        raise InBadSet("configuration lies in the bad set")
    loop = loop_paths(system, isotopy, x)
    if system.in_bad_set(loop[system.n_path_samples - 1 + isotopy.steps]):
        raise InBadSet("endpoint of the trajectory lies in the bad set")
    return PureBraid(extract_braid(system.surface.planar(loop), PROJECTION_ANGLE))


@dataclass
class GGResult:
    estimate: float
    standard_error: float
    n_samples: int
    n_rejected: int
    records: list = field(default_factory=list, repr=False)

    @property
    def rejection_rate(self) -> float:
        total = self.n_samples + self.n_rejected
        return self.n_rejected / total if total else 0.0


def _sample_chunk(system: ShortPathSystem, isotopy: Isotopy, score, trace: bool, rng, size: int):
    """Draw ``size`` accepted configurations and score their loops.

    ``score(pure) -> (value, extra)``; rejected draws are replaced.
    """
    s = system.surface
    values, extras, records = [], [], []
    rejected = 0
    while len(values) < size:
        need = size - len(values)
        x = s.embed(s.sample_chart(rng, need * system.n)).reshape(need, system.n, -1)
        ok = ~system.in_bad_set(x) & (min_dist(x) > COLLISION_THRESHOLD)
        rejected += int((~ok).sum())
        x = x[ok]
        if len(x) == 0:
            continue
        loops = loop_paths(system, isotopy, x)  # (L, B, n, d)
        k_end = system.n_path_samples - 1 + isotopy.steps
        good_end = ~system.in_bad_set(loops[k_end])
        planar = s.planar(loops)
        for b in range(len(x)):
            if not good_end[b]:
                rejected += 1
                continue
            try:
                pure = PureBraid(extract_braid(planar[:, b], PROJECTION_ANGLE))
            except (DegenerateProjection, ValueError):
                rejected += 1
                continue
            v, extra = score(pure)
            values.append(v)
            extras.append(extra)
            if trace:
                records.append((x[b], pure.word.to_list(), extra, v))
    return np.array(values[:size]), extras[:size], rejected, records[:size]


def _norm_score(bfs_budget: int | None, pure: PureBraid):
    if pure.n_strands == 1:
        return 0.0, WordNormEstimate(0, 0, 0)
    try:
        est = word_norm(pure, bfs_budget)
    except BudgetExceeded as exc:
        est = exc.estimate
    # midpoint of the bracket; the half-width is added to the error budget
    return est.midpoint, est


def _qm_score(qm: Quasimorphism, pure: PureBraid):
    v = evaluate(qm, pure)
    return v, v


def _run(system, isotopy, score, n_samples, rng, chunk_size, workers, trace):
    fn = partial(_sample_chunk, system, isotopy, score, trace)
    parts = map_chunks(fn, n_samples, rng, chunk_size=chunk_size, workers=workers)
    values = np.concatenate([p[0] for p in parts]) if parts else np.zeros(0)
    extras = [e for p in parts for e in p[1]]
    rejected = sum(p[2] for p in parts)
    records = [r for p in parts for r in p[3]]
    return values, extras, rejected, records


def _mean_se(values: np.ndarray) -> tuple[float, float]:
    if len(values) == 0:
        return 0.0, 0.0
    if len(values) == 1:
        return float(values[0]), 0.0
    return float(values.mean()), float(values.std(ddof=1) / math.sqrt(len(values)))


def average_word_norm(system: ShortPathSystem, isotopy: Isotopy, n_samples: int = 2000,
                      bfs_budget: int | None = None, rng=0, chunk_size: int = DEFAULT_CHUNK,
                      workers: int = 1, trace: bool = False) -> GGResult:
    """Monte Carlo ``W = int |[lambda(x)]| dmu^n`` in the band-generator norm.

    Where only bounds are available the midpoint is averaged and the mean
    half-width is added to the standard error.
    """
    values, est, rejected, records = _run(system, isotopy, partial(_norm_score, bfs_budget),
                                          n_samples, rng, chunk_size, workers, trace)
    mean, se = _mean_se(values)
    slack = float(np.mean([e.half_width for e in est])) if est else 0.0
    return GGResult(mean, se + slack, len(values), rejected, records)


def gg_average(system: ShortPathSystem, isotopy: Isotopy, qm: Quasimorphism, n_samples: int = 2000,
               rng=0, chunk_size: int = DEFAULT_CHUNK, workers: int = 1, trace: bool = False) -> GGResult:
    """Monte Carlo ``Phi = int r([lambda(x)]) dmu^n``."""
    if qm.n_strands != system.n:
        raise ValueError("quasimorphism and short-path system disagree on n")
    values, _, rejected, records = _run(system, isotopy, partial(_qm_score, qm), n_samples, rng,
                                        chunk_size, workers, trace)
    mean, se = _mean_se(values)
    return GGResult(mean, se, len(values), rejected, records)


def gg_homogenized(system: ShortPathSystem, isotopy: Isotopy, qm: Quasimorphism, k_max: int = 4,
                   n_samples: int = 2000, rng=0, **kw) -> GGResult:
    """``Phi(phi^k) / k`` for ``k = k_max``; exact homogenization for homomorphisms."""
    if k_max < 2:
        raise ValueError("k_max must be >= 2")
    r = gg_average(system, iterate(isotopy, k_max), qm, n_samples, rng, **kw)
    extra = 0.0 if qm.is_homomorphism else (qm.declared_defect or math.inf) / k_max
    return GGResult(r.estimate / k_max, r.standard_error / k_max + extra, r.n_samples, r.n_rejected, r.records)


def loop_length_check(system: ShortPathSystem, isotopy: Isotopy, x) -> tuple[float, float, float]:
    """``(l_g(lambda), l_g(gamma(x)) + l_g(gamma(phi x)), l_g(trajectory))`` for one sample."""
    x = np.asarray(x, dtype=float)
    traj = advect(isotopy, x).points
    g1 = path_length(system.paths(x), "g", system.surface)
    g2 = path_length(system.paths(traj[-1]), "g", system.surface)
    lt = path_length(traj, "g", system.surface)
    total = path_length(loop_paths(system, isotopy, x), "g", system.surface)
    return total, g1 + g2, lt


def trace_rows(result: GGResult) -> list[dict]:
    """Flat per-sample rows for CSV output."""
    rows = []
    for x, word, extra, v in result.records:
        row = {"x": " ".join(f"{c:.17g}" for c in np.ravel(x)), "word": " ".join(map(str, word)), "value": v}
        if isinstance(extra, WordNormEstimate):
            row.update(lower=extra.lower, upper=extra.upper)
        rows.append(row)
    return rows
