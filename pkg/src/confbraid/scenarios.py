"""Scenario registry and the INI-style configuration file.

A config file has up to five sections; every key is optional and falls back
to the named scenario's value::

    [scenario]
    name = twist_pair
    seed = 3

    [surface]
    kind = disc

    [flow]
    hamiltonian = bump(0, 0, 0.5, 0.8, 6.283185307179586)
    t_end = 1.0
    steps = 100

    [gg]
    n = 2
    qm = lk
    k_range = 1-10

    [budgets]
    samples = 4000
    lp_samples = 20000
"""

from __future__ import annotations

import configparser
import math
import re
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .flow import Isotopy
from .geometry import (AnnularTwist, Constant, FlatTorus, Hamiltonian, Linear, Quadratic, RadialBump,
                       RoundSphere, Scaled, Sum, Surface, UnitDisc, preset_hamiltonian, surface_from_name)
from .gg import ShortPathSystem, base_configuration
from .quasimorphism import Quasimorphism, quasimorphism_from_name


class ConfigError(ValueError):
    """Malformed or unknown configuration (exit code 2 in the CLI)."""


@dataclass(frozen=True)
class Scenario:
    name: str
    surface: str = "disc"
    surface_params: tuple = ()
    hamiltonian: str = "twist"
    n: int = 2
    t_end: float = 1.0
    steps: int = 100
    k_range: tuple = (1,)
    samples: int = 4000
    lp_samples: int = 20000
    seed: int = 0
    qm: str = "lk"
    qm_coefficients: tuple | None = None
    base_radius: float | None = None
    bfs_depth: int | None = None
    chunk_size: int = 2000
    extra: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        for key in ("samples", "lp_samples", "steps", "chunk_size", "n"):
            if getattr(self, key) <= 0:
                raise ConfigError(f"{key} must be positive")
        if self.t_end <= 0:
            raise ConfigError("t_end must be positive")
        if not self.k_range or min(self.k_range) < 1:
            raise ConfigError("k_range must hold positive integers")

    # --- resolved objects ---------------------------------------------------
    def make_surface(self) -> Surface:
        try:
            return surface_from_name(self.surface, **dict(self.surface_params))
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def make_hamiltonian(self) -> Hamiltonian:
        return parse_hamiltonian(self.hamiltonian)

    def make_isotopy(self) -> Isotopy:
        return Isotopy(self.make_surface(), self.make_hamiltonian(), 0.0, self.t_end, self.steps)

    def make_short_paths(self) -> ShortPathSystem:
        surface = self.make_surface()
        center, radius = support_disc(self.make_hamiltonian(), surface)
        if self.base_radius is not None:
            radius = self.base_radius
        return ShortPathSystem(surface, base_configuration(surface, center, radius, self.n))

    def make_qm(self) -> Quasimorphism:
        try:
            return quasimorphism_from_name(self.qm, self.n, self.qm_coefficients)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("extra")
        d["k_range"] = list(self.k_range)
        d["surface_params"] = dict(self.surface_params)
        if self.qm_coefficients is not None:
            d["qm_coefficients"] = list(self.qm_coefficients)
        return d


# ---------------------------------------------------------------------------
# Hamiltonian expressions
# ---------------------------------------------------------------------------

_TERM = re.compile(r"^\s*(?:(?P<coef>[-+0-9.eE]+)\s*\*\s*)?(?P<name>[a-z_]+)\s*(?:\((?P<args>[^)]*)\))?\s*$")


def _floats(args: str | None) -> list[float]:
    if not args:
        return []
    try:
        return [float(a) for a in args.split(",")]
    except ValueError:
        raise ConfigError(f"bad numeric arguments {args!r}") from None


def parse_hamiltonian(text: str) -> Hamiltonian:
    """Parse ``term + term + ...`` with terms ``[c *] name[(args)]``.

    ``name`` is a preset, or one of ``bump(cx, cy, r_in, r_out, amp)``,
    ``annulus(cx, cy, r_a, r_b, amp)``, ``quadratic(rate)``,
    ``linear(d1, ..., dk, amp)`` and ``zero``.
    """
    terms = []
    for part in re.split(r"\+(?![^(]*\))", text):
        m = _TERM.match(part)
        if m is None:
            raise ConfigError(f"cannot parse Hamiltonian term {part!r}")
        name, a = m["name"], _floats(m["args"])
        try:
            if name == "bump":
                h = RadialBump((a[0], a[1]), a[2], a[3], a[4])
            elif name == "annulus":
                h = AnnularTwist((a[0], a[1]), a[2], a[3], a[4])
            elif name == "quadratic":
                h = Quadratic((0.0, 0.0), a[0] if a else 1.0)
            elif name == "linear":
                h = Linear(tuple(a[:-1]), a[-1])
            elif name == "zero":
                h = Constant(0.0)
            else:
                h = preset_hamiltonian(name)
        except (IndexError, ValueError) as exc:
            raise ConfigError(f"bad Hamiltonian term {part.strip()!r}: {exc}") from None
        if m["coef"] is not None:
            h = Scaled(h, float(m["coef"]))
        terms.append(h)
    return terms[0] if len(terms) == 1 else Sum(tuple(terms))


def _unwrap(h: Hamiltonian) -> Hamiltonian:
    """First elementary term of a composite Hamiltonian."""
    while True:
        if isinstance(h, Sum):
            h = h.terms[0]
        elif hasattr(h, "base"):
            h = h.base
        elif hasattr(h, "first"):
            h = h.first
        else:
            return h


def support_disc(h: Hamiltonian, surface: Surface) -> tuple[np.ndarray, float]:
    """Center and half the outer radius of the (first) bump, or a default disc."""
    h = _unwrap(h)
    if isinstance(h, (RadialBump, AnnularTwist)):
        return np.asarray(h.center, dtype=float), 0.5 * h.r_out
    if isinstance(surface, FlatTorus):
        return surface.embed([surface.a / 2, surface.b / 2]), 0.25 * min(surface.a, surface.b)
    if isinstance(surface, RoundSphere):
        return np.array([0.0, 0.0, -surface.radius]), 0.5 * surface.radius
    return np.zeros(2), 0.4


def radial_mean_value(h: Hamiltonian, surface: Surface) -> float:
    """``vol^-1 int H dmu`` for sums of radial bumps on the disc, by quadrature."""
    from scipy.integrate import quad

    if isinstance(h, Sum):
        return sum(radial_mean_value(t, surface) for t in h.terms)
    if isinstance(h, Scaled):
        return h.factor * radial_mean_value(h.base, surface)
    if isinstance(h, (RadialBump, AnnularTwist)) and isinstance(surface, UnitDisc):
        knots = [0.0, getattr(h, "r_in", getattr(h, "r_a", 0.0)), h.r_out]
        total = sum(quad(lambda r: h.profile(r) * r, lo, hi, epsabs=1e-13, epsrel=1e-12)[0]
                    for lo, hi in zip(knots[:-1], knots[1:]) if hi > lo)
        return h.amplitude * 2 * math.pi * total / surface.total_area
    raise ValueError("closed-form mean only for radial bumps on the disc")


# ---------------------------------------------------------------------------
# registry
# ---------------------------------------------------------------------------

TAU = 2 * math.pi

SCENARIOS: dict[str, Scenario] = {s.name: s for s in [
    Scenario("derivatives", samples=1000),
    Scenario("metric_bound", samples=100_000),
    Scenario("rotation_disc", hamiltonian="rotation", t_end=1.0, steps=50),
    Scenario("braid_turns", hamiltonian="twist", k_range=(1, 2, 3, 4, 5), steps=60),
    Scenario("twist_pair", hamiltonian=f"bump(0, 0, 0.7, 0.8, {TAU!r})", k_range=tuple(range(1, 11)),
             samples=6000, steps=60),
    Scenario("twist_triple", hamiltonian="twist", n=3, samples=1000, qm="lk"),
    Scenario("offcenter_pair", hamiltonian="offcenter_bump"),
    Scenario("double_bump_pair", hamiltonian="double_bump", steps=150),
    Scenario("torus_bump_pair", surface="torus", hamiltonian="torus_bump"),
    Scenario("sphere_bump_pair", surface="sphere", hamiltonian="sphere_bump"),
    Scenario("sphere_rotation_pair", surface="sphere", hamiltonian="sphere_rotation"),
    Scenario("schwarz_milnor", n=3, samples=10000, steps=80),
    Scenario("calabi_trio", samples=20000),
    Scenario("zk3", samples=4000, steps=160),
]}

# Hamiltonians of the Calabi-proportionality campaign
CALABI_HAMILTONIANS = (
    f"bump(0, 0, 0.5, 0.8, {TAU!r})",
    f"bump(0.05, -0.05, 0.3, 0.9, {1.5 * TAU!r})",
    f"annulus(0, 0, 0.7, 0.98, {TAU!r})",
)

# three disjoint annular twists for the Z^k embedding
ZK_ANNULI = ((0.12, 0.5), (0.55, 0.76), (0.8, 0.98))


def get_scenario(name: str) -> Scenario:
    try:
        return SCENARIOS[name]
    except KeyError:
        raise ConfigError(f"unknown scenario {name!r}; known: {', '.join(sorted(SCENARIOS))}") from None


def _parse_k_range(text: str) -> tuple:
    text = text.strip()
    try:
        if "-" in text and "," not in text:
            lo, hi = (int(t) for t in text.split("-"))
            return tuple(range(lo, hi + 1))
        return tuple(int(t) for t in text.split(","))
    except ValueError:
        raise ConfigError(f"bad k_range {text!r}") from None


_KEYS = {
    "scenario": {"name", "seed"},
    "surface": {"kind", "a", "b", "radius"},
    "flow": {"hamiltonian", "t_end", "steps"},
    "gg": {"n", "qm", "qm_coefficients", "k_range", "base_radius", "bfs_depth"},
    "budgets": {"samples", "lp_samples", "chunk_size"},
}


def load_config(path, default_name: str | None = None) -> Scenario:
    """Read a config file into a :class:`Scenario`; unknown keys are errors."""
    cp = configparser.ConfigParser()
    try:
        with open(path) as fh:
            cp.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    for sec in cp.sections():
        if sec not in _KEYS:
            raise ConfigError(f"unknown section [{sec}]")
        bad = set(cp[sec]) - _KEYS[sec]
        if bad:
            raise ConfigError(f"unknown keys in [{sec}]: {', '.join(sorted(bad))}")
    name = cp.get("scenario", "name", fallback=default_name)
    if name is None:
        raise ConfigError("config names no scenario")
    return apply_overrides(get_scenario(name), cp)


def apply_overrides(sc: Scenario, cp: configparser.ConfigParser) -> Scenario:
    kw = {}
    try:
        if cp.has_option("scenario", "seed"):
            kw["seed"] = cp.getint("scenario", "seed")
        if cp.has_section("surface"):
            s = cp["surface"]
            if "kind" in s:
                kw["surface"] = s["kind"]
            params = {k: float(s[k]) for k in ("a", "b", "radius") if k in s}
            if params:
                kw["surface_params"] = tuple(sorted(params.items()))
        if cp.has_section("flow"):
            f = cp["flow"]
            if "hamiltonian" in f:
                kw["hamiltonian"] = f["hamiltonian"]
            if "t_end" in f:
                kw["t_end"] = f.getfloat("t_end")
            if "steps" in f:
                kw["steps"] = f.getint("steps")
        if cp.has_section("gg"):
            g = cp["gg"]
            for key in ("n", "bfs_depth"):
                if key in g:
                    kw[key] = g.getint(key)
            if "qm" in g:
                kw["qm"] = g["qm"]
            if "qm_coefficients" in g:
                kw["qm_coefficients"] = tuple(float(t) for t in g["qm_coefficients"].split(","))
            if "k_range" in g:
                kw["k_range"] = _parse_k_range(g["k_range"])
            if "base_radius" in g:
                kw["base_radius"] = g.getfloat("base_radius")
        if cp.has_section("budgets"):
            b = cp["budgets"]
            for key in ("samples", "lp_samples", "chunk_size"):
                if key in b:
                    kw[key] = b.getint(key)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    sc = replace(sc, **kw)
    # resolve eagerly so bad expressions fail before any work starts
    sc.make_surface()
    sc.make_hamiltonian()
    sc.make_qm()
    return sc
