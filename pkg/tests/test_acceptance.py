"""Acceptance criteria 1-10, one test each, each printing a PASS/FAIL line.

The simulation runs of criteria 6-8 are shared through a module fixture.
"""

import itertools
import time

import numpy as np
import pytest

from conftest import config_grid
from mimo_dof import (
    AntennaConfig,
    QualityExponents,
    TargetInactive,
    baseline_region,
    build_phase_plan,
    calibrate,
    corner_coordinates,
    corner_points,
    delayed_csit_sufficient,
    general_dof_point,
    generate_block,
    inner_region,
    measured_exponent,
    outer_region,
    region_equal,
    simulate_dof,
    sufficient_delayed_threshold,
)
from mimo_dof.regions import Corner

LADDER = [1e3, 1e4, 1e5, 1e6]
SIM_CASES = {
    "C* M=2 N=1 alpha=0.5": (AntennaConfig(2, 1), QualityExponents.constant((0.5, 0.5), (1, 1)), "C*"),
    "E* M=3 N=2 alpha=0.8": (AntennaConfig(3, 2), QualityExponents.constant((0.8, 0.8), (1, 1)), "E*"),
}


@pytest.fixture
def verdict(capsys):
    def emit(k, ok, detail):
        with capsys.disabled():
            print(f"\ncriterion {k}: {'PASS' if ok else 'FAIL'} - {detail}")
        assert ok, detail
    return emit


@pytest.fixture(scope="module")
def sim_runs():
    t0 = time.perf_counter()
    runs = {name: simulate_dof(cfg, q, target, LADDER, 50, 7) for name, (cfg, q, target) in SIM_CASES.items()}
    return runs, time.perf_counter() - t0


def test_criterion_01_corner_fixtures(verdict):
    t0 = time.perf_counter()
    cfg = AntennaConfig(3, 2)
    expected = {
        0.5: {"D*": (2, 0.5), "B*": (0.5, 2), "C*": (1.4, 1.4)},
        0.8: {"D*": (2, 0.8), "B*": (0.8, 2), "E*": (1.4, 1.6), "F*": (1.6, 1.4)},
    }
    ok, bad = True, []
    for a, want in expected.items():
        got = {p.label.value: p.xy for p in corner_points(cfg, QualityExponents.constant((a, a), (1, 1)))}
        if set(got) != set(want) or any(np.hypot(*np.subtract(got[k], want[k])) > 1e-9 for k in want):
            ok = False
            bad.append((a, got))
    elapsed = time.perf_counter() - t0
    verdict(1, ok and elapsed < 1, f"{len(expected)} fixtures, {elapsed:.3f}s, mismatches={bad}")


def test_criterion_02_region_coincidence_sweep(verdict):
    t0 = time.perf_counter()
    violations, count = [], 0
    for cfg, q in config_grid():
        count += 1
        equal = region_equal(inner_region(cfg, q), outer_region(cfg, q))
        if equal != (q.min_beta >= sufficient_delayed_threshold(cfg, q)):
            violations.append((cfg, q))
    elapsed = time.perf_counter() - t0
    verdict(2, not violations and elapsed < 30,
            f"{count} configs, {len(violations)} violations, {elapsed:.1f}s")


def test_criterion_03_calibration_consistency(verdict):
    worst, count = 0.0, 0
    for cfg, q in config_grid():
        coords = corner_coordinates(cfg, q)
        for label in Corner:
            try:
                db, w = calibrate(cfg, q, label)
            except TargetInactive:
                continue
            d = general_dof_point(cfg, q, db, w)
            worst = max(worst, float(np.hypot(*np.subtract(d, coords[label]))))
            count += 1
    verdict(3, worst <= 1e-9, f"{count} active targets, max error {worst:.2e}")


def test_criterion_04_baseline_reductions(verdict):
    bad = []
    full, none_ = QualityExponents.constant((1, 1), (1, 1)), QualityExponents.constant((0, 0), (0, 0))
    for kind, m, n in itertools.product(("bc", "ic"), range(1, 7), range(1, 5)):
        cfg = AntennaConfig(m, n, kind)
        if not region_equal(outer_region(cfg, full), baseline_region(cfg, "full")):
            bad.append(("full", kind, m, n))
        if not region_equal(inner_region(cfg, none_), baseline_region(cfg, "nocsit")):
            bad.append(("nocsit", kind, m, n))
    verdict(4, not bad, f"48 antenna configs x 2 baselines, mismatches={bad}")


def test_criterion_05_optimal_sum_dof(verdict):
    rng = np.random.default_rng(2024)
    worst, tried = 0.0, 0
    while tried < 20:
        kind = rng.choice(["bc", "ic"])
        n = int(rng.integers(1, 5))
        m = int(rng.integers(n if kind == "ic" else 1, 2 * n + 3))
        cfg = AntennaConfig(m, n, kind)
        need = cfg.m_eff / n
        a1 = rng.uniform(need / 2, 1) if need <= 2 else 1.0
        a2 = rng.uniform(max(need - a1, 0), a1)
        if a1 + a2 < need:
            continue
        partial = QualityExponents.constant((a1, a2), (a1, a2))
        thr = sufficient_delayed_threshold(cfg, partial)
        b1, b2 = (rng.uniform(max(a, thr), 1) for a in (a1, a2))
        q = QualityExponents.constant((a1, a2), (b1, b2))
        if not delayed_csit_sufficient(cfg, q):
            continue
        worst = max(worst, abs(inner_region(cfg, q).max_sum() - min(m, 2 * n)))
        tried += 1
    verdict(5, worst <= 1e-9, f"{tried} random configs, max |sum - min(M,2N)| = {worst:.2e}")


def test_criterion_06_simulated_slopes(verdict, sim_runs):
    runs, elapsed = sim_runs
    worst, lines = 0.0, []
    for name, rep in runs.items():
        err = max(abs(d - c) for d, c in zip(rep.d_hat, rep.corner))
        worst = max(worst, err)
        lines.append(f"{name}: d_hat=({rep.d_hat[0]:.3f}, {rep.d_hat[1]:.3f}) "
                     f"corner=({rep.corner[0]:.3f}, {rep.corner[1]:.3f})")
    verdict(6, worst <= 0.15 and elapsed < 600,
            f"max slope error {worst:.3f}, {elapsed:.1f}s; " + "; ".join(lines))


def test_criterion_07_mac_margins(verdict, sim_runs):
    runs, _ = sim_runs
    fracs = {name: rep.feasible_fraction()[-2:].tolist() for name, rep in runs.items()}
    ok = all(min(f) >= 0.95 for f in fracs.values())
    verdict(7, ok, f"feasible fraction at the top two points: {fracs}")


def test_criterion_08_quantizer_boundedness(verdict, sim_runs):
    runs, _ = sim_runs
    dist = max(float(rep.distortion_max.max()) for rep in runs.values())
    gap = max(float(rep.quant_bits_gap.max()) for rep in runs.values())
    verdict(8, dist <= 10 and gap <= 1,
            f"max per-phase distortion {dist:.2f} (<= 10), max bit gap {gap:.3f} (<= 1)")


def test_criterion_09_exponent_fidelity(verdict):
    cfg = AntennaConfig(3, 2)
    q = QualityExponents.constant((0.5, 0.3), (0.9, 0.7))
    ladder = [1e2, 1e3, 1e4, 1e5]
    slots = -(-10_000 // (cfg.m_tx * cfg.n_rx))  # 10^4 samples per SNR point
    blocks = [generate_block(cfg, q, slots, p, seed=[9, k]) for k, p in enumerate(ladder)]
    worst, found = 0.0, {}
    for link, row in (("1", 0), ("2", 1)):
        for which, want in (("h_current", q.alpha_avg[row]), ("h_delayed", q.beta_avg[row])):
            samples = [np.concatenate([(s.h_true[link] - getattr(s, which)[link]).ravel() for s in b])
                       for b in blocks]
            est = measured_exponent(samples, ladder)
            found[f"{which}/{link}"] = round(est, 3)
            worst = max(worst, abs(est - want))
    verdict(9, worst <= 0.05, f"max exponent error {worst:.3f}; {found}")


def test_criterion_10_ic_parity(verdict):
    q = QualityExponents.constant((0.8, 0.8), (1, 1))
    kw = dict(t_slots=8, s_phases=10)
    bc = simulate_dof(AntennaConfig(3, 2), q, "E*", LADDER, 20, 13, **kw)
    ic = simulate_dof(AntennaConfig(3, 2, "ic"), q, "E*", LADDER, 20, 13, **kw)
    same_ledger = np.array_equal(bc.ledger, ic.ledger)
    led = build_phase_plan(AntennaConfig(3, 2, "ic"), q, "E*", t_slots=8).ledger()
    split_ok = abs(led["ic_common_1"] + led["ic_common_2"] - led["common"]) <= 1e-12
    cap = outer_region(AntennaConfig(2, 3, "ic"), QualityExponents.constant((0, 0), (0, 0))).halfplane("sum").c
    verdict(10, same_ledger and split_ok and cap == 3,
            f"ledger identical={same_ledger}, split sum identity={split_ok}, IC M=2 N=3 sum cap={cap}")
