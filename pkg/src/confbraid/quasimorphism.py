"""Quasimorphisms on pure braid groups: evaluation, defects, homogenization."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .braid import BraidWord, NotPure, PureBraid, band_generators, is_pure, lk_matrix
from .sampling import as_generator


@dataclass(frozen=True)
class Quasimorphism:
    """A real function on P_n given by ``evaluator(word)``.

    ``declared_defect`` is a proven bound for the defect when known; for
    homomorphisms it is 0.
    """

    name: str
    n_strands: int
    evaluator: Callable[[BraidWord], float]
    declared_defect: float | None = None
    is_homomorphism: bool = False

    def __call__(self, pure) -> float:
        return evaluate(self, pure)


def _word(pure) -> BraidWord:
    return pure.word if isinstance(pure, PureBraid) else pure


def evaluate(qm: Quasimorphism, pure) -> float:
    w = _word(pure)
    if not is_pure(w):
        raise NotPure(f"{qm.name} is defined on pure braids")
    return float(qm.evaluator(w))


# evaluators are module-level classes so they pickle into worker processes

@dataclass(frozen=True)
class _PairLinking:
    i: int
    j: int

    def __call__(self, w: BraidWord) -> float:
        return float(lk_matrix(w)[self.i, self.j])


@dataclass(frozen=True)
class _LinkingCombination:
    coefficients: tuple

    def __call__(self, w: BraidWord) -> float:
        lk = lk_matrix(w)
        return float(np.dot(self.coefficients, lk[np.triu_indices(w.n_strands, 1)]))


def _exponent_sum(w: BraidWord) -> float:
    return float(sum(1 if a > 0 else -1 for a in w.letters))


def lk_quasimorphism(n: int, i: int, j: int) -> Quasimorphism:
    """Linking number of strands ``i < j`` (0-based), a homomorphism."""
    if not 0 <= i < j < n:
        raise ValueError("need 0 <= i < j < n")
    return Quasimorphism(f"lk_{i}{j}", n, _PairLinking(i, j), 0.0, True)


def exponent_sum(n: int) -> Quasimorphism:
    return Quasimorphism("exponent_sum", n, _exponent_sum, 0.0, True)


def lk_combination(n: int, coefficients) -> Quasimorphism:
    """``sum_{i<j} c_ij lk_ij`` with coefficients listed in pair order ``(0,1), (0,2), ...``."""
    c = np.asarray(coefficients, dtype=float)
    iu = np.triu_indices(n, 1)
    if c.shape != (len(iu[0]),):
        raise ValueError(f"need {len(iu[0])} coefficients for n = {n}")
    label = ",".join(f"{x:g}" for x in c)
    return Quasimorphism(f"lk[{label}]", n, _LinkingCombination(tuple(c.tolist())), 0.0, True)


def quasimorphism_from_name(name: str, n: int, coefficients=None) -> Quasimorphism:
    if name == "lk":
        return lk_combination(n, np.ones(n * (n - 1) // 2) if coefficients is None else coefficients)
    if name == "exponent_sum":
        return exponent_sum(n)
    if name.startswith("lk_") and len(name) == 5:
        return lk_quasimorphism(n, int(name[3]), int(name[4]))
    raise ValueError(f"unknown quasimorphism {name!r}")


def random_pure_word(n: int, length: int, rng) -> BraidWord:
    """Product of ``length`` random band generators and their inverses."""
    rng = as_generator(rng)
    gens = band_generators(n)
    idx = rng.integers(0, len(gens), length)
    sgn = rng.choice([-1, 1], length)
    letters: list[int] = []
    for k, s in zip(idx, sgn):
        g = gens[k][1]
        letters.extend(g.letters if s > 0 else g.inverse().letters)
    return BraidWord(n, tuple(letters))


def empirical_defect(qm: Quasimorphism, n_pairs: int = 200, word_length: int = 6, rng=0) -> float:
    """Largest ``|r(xy) - r(x) - r(y)|`` over random pairs: a lower bound for the defect."""
    rng = as_generator(rng)
    worst = 0.0
    for _ in range(n_pairs):
        x = random_pure_word(qm.n_strands, word_length, rng)
        y = random_pure_word(qm.n_strands, word_length, rng)
        worst = max(worst, abs(evaluate(qm, x * y) - evaluate(qm, x) - evaluate(qm, y)))
    return worst


@dataclass(frozen=True)
class HomogenizedValue:
    value: float
    error: float


def homogenize_value(qm: Quasimorphism, pure, k_max: int = 16) -> HomogenizedValue:
    """``r(x^k) / k`` with the telescoping error ``defect / k``."""
    if k_max < 4:
        raise ValueError("k_max must be at least 4")
    w = _word(pure)
    if qm.is_homomorphism:
        return HomogenizedValue(evaluate(qm, w), 0.0)
    d = qm.declared_defect
    err = math.inf if d is None else d / k_max
    return HomogenizedValue(evaluate(qm, w**k_max) / k_max, err)


def generating_set_max_value(qm: Quasimorphism) -> float:
    """``max |r(s)|`` over the band generators and their inverses."""
    vals = [abs(evaluate(qm, g)) for _, g in band_generators(qm.n_strands)]
    vals += [abs(evaluate(qm, g.inverse())) for _, g in band_generators(qm.n_strands)]
    return max(vals)


def qm_lower_bound_word_norm(qm: Quasimorphism, pure, max_on_generators: float | None = None) -> int:
    """``ceil(|r(g)| / (defect + max_s |r(s)|))``, a lower bound for ``|g|``."""
    if qm.declared_defect is None:
        raise ValueError("a declared defect is needed for the word norm bound")
    if max_on_generators is None:
        max_on_generators = generating_set_max_value(qm)
    denom = qm.declared_defect + max_on_generators
    if denom <= 0:
        return 0
    # guard against 2.0000000001 rounding up
    return int(math.ceil(abs(evaluate(qm, pure)) / denom - 1e-9))
