import math
import pickle

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from confbraid import braid as br
from confbraid.quasimorphism import (Quasimorphism, empirical_defect, evaluate, exponent_sum, homogenize_value,
                                     lk_combination, lk_quasimorphism, qm_lower_bound_word_norm,
                                     quasimorphism_from_name, random_pure_word)

# a genuine quasimorphism of P_3 that is not a homomorphism: floor(lk_01 / 2), defect 1
HALF_LK = Quasimorphism("half_lk", 3, lambda w: math.floor(br.lk_matrix(w)[0, 1] / 2), 1.0, False)


def test_evaluate_examples():
    lk = lk_quasimorphism(2, 0, 1)
    assert evaluate(lk, br.BraidWord(2)) == 0
    for k in (1, 3, -2):
        assert evaluate(lk, br.BraidWord(2, (1,) * (2 * k) if k > 0 else (-1,) * (-2 * k))) == k
    w = br.BraidWord(3, (1, 1, -2, -2))
    assert evaluate(exponent_sum(3), w) == 0
    with pytest.raises(br.NotPure):
        evaluate(lk, br.BraidWord(2, (1,)))


def test_homomorphisms_have_zero_defect():
    for qm in (lk_quasimorphism(3, 0, 2), exponent_sum(3), lk_combination(3, (1, -2, 3))):
        assert empirical_defect(qm, 100, 5, 0) == 0


def test_empirical_defect_below_declared():
    d = empirical_defect(HALF_LK, 300, 4, 1)
    assert 0 < d <= HALF_LK.declared_defect


def test_homogenize_homomorphism_is_exact():
    rng = np.random.default_rng(2)
    qm = lk_combination(3, (1, 1, 1))
    for _ in range(20):
        w = random_pure_word(3, 4, rng)
        h = homogenize_value(qm, w, 8)
        assert h.value == evaluate(qm, w) and h.error == 0
    assert homogenize_value(HALF_LK, br.BraidWord(3), 4).value == 0
    with pytest.raises(ValueError):
        homogenize_value(qm, br.BraidWord(3), 3)


def test_homogenize_power_consistency():
    rng = np.random.default_rng(3)
    for _ in range(30):
        x = random_pure_word(3, 3, rng)
        for k in (4, 6):
            a = homogenize_value(HALF_LK, x, 2 * k)
            b = homogenize_value(HALF_LK, x, k)
            assert abs(a.value - b.value) <= HALF_LK.declared_defect / k + 1e-12
            assert abs(a.value * 2 * k - b.value * k * 2) <= 2 * HALF_LK.declared_defect


def test_conjugation_invariance():
    rng = np.random.default_rng(4)
    qm = lk_quasimorphism(3, 1, 2)
    for _ in range(50):
        w, x = random_pure_word(3, 3, rng), random_pure_word(3, 3, rng)
        assert evaluate(qm, w * x * w.inverse()) == evaluate(qm, x)


def test_lower_bound_examples():
    lk = lk_quasimorphism(2, 0, 1)
    assert qm_lower_bound_word_norm(lk, br.BraidWord(2)) == 0
    a12 = br.band_generators(2)[0][1]
    for k in (1, 5, -3):
        assert qm_lower_bound_word_norm(lk, a12**k) == abs(k) == br.word_norm(a12**k).exact


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), length=st.integers(0, 4))
def test_lower_bound_below_bfs(seed, length):
    w = random_pure_word(3, length, np.random.default_rng(seed))
    exact = br.bfs_word_norm(w, 6)
    for qm in (lk_quasimorphism(3, 0, 1), lk_combination(3, (1, 1, 1)), exponent_sum(3), HALF_LK):
        assert qm_lower_bound_word_norm(qm, w) <= exact


def test_shipped_evaluators_pickle():
    w = br.BraidWord(3, (1, 1, 2, 2))
    for qm in (lk_quasimorphism(3, 1, 2), exponent_sum(3), lk_combination(3, (1, -2, 3))):
        copy = pickle.loads(pickle.dumps(qm))
        assert copy.name == qm.name and evaluate(copy, w) == evaluate(qm, w)


def test_names():
    assert quasimorphism_from_name("lk_02", 3).name == "lk_02"
    assert quasimorphism_from_name("lk", 3, (1, 0, 0)).n_strands == 3
    with pytest.raises(ValueError):
        quasimorphism_from_name("signature", 3)
    with pytest.raises(ValueError):
        lk_combination(3, (1, 2))
