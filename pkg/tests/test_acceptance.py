"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Runs every campaign at its default budget, so the whole file takes a few
minutes. Run it alone with ``pytest -v tests/test_acceptance.py``.
"""
import json

import numpy as np
import pytest

from confbraid import braid as br
from confbraid.campaigns import CAMPAIGNS
from confbraid.cli import main
from confbraid.flow import Isotopy
from confbraid.geometry import UnitDisc, preset_hamiltonian
from confbraid.gg import ShortPathSystem, base_configuration, loop_class
from confbraid.quasimorphism import (exponent_sum, lk_combination, lk_quasimorphism, qm_lower_bound_word_norm,
                                     random_pure_word)
from confbraid.scenarios import get_scenario

pytestmark = pytest.mark.acceptance

_cache = {}


def run(campaign: str):
    if campaign not in _cache:
        fn, default = CAMPAIGNS[campaign]
        _cache[campaign] = fn(get_scenario(default))
    return _cache[campaign]


def report(capsys, number: int, title: str, checks) -> None:
    ok = all(c.passed for c in checks)
    with capsys.disabled():
        print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {number}: {title}")
        for c in checks:
            print("    " + c.line())
    assert ok, [c.line() for c in checks if not c.passed]


def _named(rep, *names):
    return [c for c in rep.checks if any(c.name.startswith(n) for n in names)]


def test_c1_derivatives(capsys):
    report(capsys, 1, "derivative formulas vs central differences", run("verify-derivatives").checks)


def test_c2_two_metrics(capsys):
    rep = run("verify-metric-bound")
    assert all(r["samples"] >= 100_000 for r in rep.tables["metric_bound"])
    report(capsys, 2, "g^2 <= C g0^2 over 1e5 samples per (n, surface)", rep.checks)


def test_c3_lp_length(capsys):
    report(capsys, 3, "L^p length oracle and Jensen ordering", run("lp-length").checks)


def test_c4_braid_extraction(capsys):
    rep = run("extract-braid")
    assert [r["k"] for r in rep.tables["turns"]] == [1, 2, 3, 4, 5]
    report(capsys, 4, "k turns give s1^(2k), grid and angle invariant", rep.checks)


def test_c5_calabi(capsys):
    report(capsys, 5, "Calabi proportionality across three bumps", run("calabi-check").checks)


def test_c6_average_wordlength(capsys):
    rep = run("theorem1-scan")
    assert [r["k"] for r in rep.tables["scan"]] == list(range(1, 11))
    report(capsys, 6, "W(phi^k) linear in l_1 with predicted slope", rep.checks)


def test_c7_gg_lip(capsys):
    report(capsys, 7, "|Phi-bar| <= C_fit l_1 across the suite", _named(run("zk-embedding"), "|Phi-bar|"))


def test_c8_zk(capsys):
    rep = run("zk-embedding")
    assert len(rep.tables["zk_bounds"]) == 50
    report(capsys, 8, "Z^3 bi-Lipschitz bracket", [c for c in rep.checks if not c.name.startswith("|Phi-bar|")])


class _Check:
    def __init__(self, name, ok, value):
        self.name, self.passed, self.value = name, ok, value

    def line(self):
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name}: {self.value}"


def test_c9_word_norm_oracles(capsys):
    rng = np.random.default_rng(90)
    p2 = [random_pure_word(2, int(rng.integers(0, 9)), rng) for _ in range(100)]
    p2_bad = sum(br.bfs_word_norm(w, 10) != abs(br.lk(w, 0, 1)) for w in p2)

    depth = 6
    qms = (lk_quasimorphism(3, 0, 1), lk_quasimorphism(3, 1, 2), lk_combination(3, (1, 1, 1)), exponent_sum(3))
    words = [random_pure_word(3, int(rng.integers(0, 5)), rng) for _ in range(60)]
    disc = UnitDisc()
    iso = Isotopy(disc, preset_hamiltonian("twist"), 0.0, 1.0, 60)
    system = ShortPathSystem(disc, base_configuration(disc, (0.0, 0.0), 0.4, 3))
    extracted = []
    for _ in range(60):
        x = disc.embed(disc.sample_chart(rng, 3))
        if not system.in_bad_set(x):
            extracted.append(loop_class(system, iso, x).word)
    lower_bad = upper_bad = 0
    for w in words + extracted:
        exact = br.bfs_word_norm(w, depth)
        # beyond the search depth the norm is known to exceed it
        floor = exact if exact is not None else depth + 1
        lower_bad += sum(qm_lower_bound_word_norm(q, w) > floor for q in qms if exact is not None)
        try:
            est = br.word_norm(w)
        except br.BudgetExceeded as exc:
            est = exc.estimate
        upper_bad += est.upper < floor
        lower_bad += exact is not None and est.lower > exact
    checks = [_Check("BFS norm == |lk| on P2 (100 words)", p2_bad == 0, p2_bad),
              _Check(f"lower bounds <= BFS ({len(words) + len(extracted)} words)", lower_bad == 0, lower_bad),
              _Check(f"upper bounds >= BFS ({len(extracted)} extracted)", upper_bad == 0, upper_bad)]
    report(capsys, 9, "word-norm oracle consistency", checks)


def test_c10_determinism(tmp_path, capsys):
    checks = []
    for campaign in ("gg-average", "lp-length"):
        outs = []
        for tag, extra in (("a", []), ("b", []), ("w2", ["--workers", "2"])):
            out = tmp_path / f"{campaign}_{tag}"
            assert main([campaign, "--out", str(out)] + extra) in (0, 1)
            outs.append((out / "report.json").read_bytes())
        checks.append(_Check(f"{campaign}: repeat run byte-identical", outs[0] == outs[1], len(outs[0])))
        same = json.loads(outs[0]) == json.loads(outs[2])
        checks.append(_Check(f"{campaign}: workers 1 vs 2 identical numbers", same, outs[0] == outs[2]))
    report(capsys, 10, "determinism", checks)
