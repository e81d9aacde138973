"""Acceptance battery.

Each test pins one exit criterion at its stated tolerance and runtime
budget, and prints a one-line PASS/FAIL verdict.  Run with `pytest -v -s
tests/test_acceptance.py` to see the lines.
"""

import dataclasses
import json
import os
import time

import numpy as np
import pytest

from ratinglab import (
    BisectorTable,
    ConstantK,
    ExperimentConfig,
    GainQuery,
    GaussianWalk,
    Grid,
    GreedyGain,
    NoDrift,
    NormalInit,
    RandomOpponent,
    RatingSystem,
    Separable,
    Verdict,
    build_skill_chain,
    builtin_systems,
    check_bisector_linear,
    check_p_opponent_indifference,
    check_p_separable,
    check_p_constant_k,
    check_strong_oi,
    cross_check_characterization,
    expected_gain,
    expected_gain_definitional,
    extract_bisector,
    fairness_residual,
    find_max_gain_opponent,
    run_experiment,
    run_replicates,
    strategic_advantage,
    verify_chain_identity,
)

DATA_DIR = os.path.join(os.path.dirname(__file__), "data")


def _report(num: int, label: str, ok: bool, elapsed: float, budget: float,
            detail: str = ""):
    status = "PASS" if ok and elapsed < budget else "FAIL"
    extra = f" [{detail}]" if detail else ""
    print(f"[acceptance] criterion {num} ({label}): {status} "
          f"in {elapsed:.2f}s (budget {budget:.0f}s){extra}")


def test_criterion_1_fairness_axiom():
    t0 = time.perf_counter()
    grid = Grid(1000.0, 2000.0, 1000.0 / 49.0)  # 50 x 50 points
    pts = grid.points()
    assert pts.size == 50
    failures = []
    for name, sys in builtin_systems().items():
        worst = float(np.max(np.abs(fairness_residual(sys, pts[:, None], pts[None, :]))))
        if worst > 1e-12:
            failures.append(f"{name}: {worst:.3g}")
    elapsed = time.perf_counter() - t0
    _report(1, "fairness axiom", not failures, elapsed, 1.0)
    assert not failures, failures
    assert elapsed < 1.0


def test_criterion_2_gain_form_equivalence():
    t0 = time.perf_counter()
    rng = np.random.default_rng(20260811)
    failures = []
    for name, sys in builtin_systems().items():
        q = GainQuery(*rng.uniform(1000.0, 2000.0, (4, 10_000)))
        worst = float(np.max(np.abs(expected_gain(sys, q)
                                    - expected_gain_definitional(sys, q))))
        if worst > 1e-12:
            failures.append(f"{name}: {worst:.3g}")
    elapsed = time.perf_counter() - t0
    _report(2, "award-form vs stake-form expected gain", not failures, elapsed, 1.0)
    assert not failures, failures
    assert elapsed < 1.0


def test_criterion_3_chain_bound_and_span_identity():
    t0 = time.perf_counter()
    table = BisectorTable(np.array([0.0, 4000.0]), np.array([0.0, 0.5]), reference=0.0)
    curve = Separable(table)
    failures = []
    for p, bound in [(0.6, 6), (0.75, 3), (0.9, 2)]:
        chain = build_skill_chain(curve, p, 0.0, budget=50, ceiling=4500.0)
        if chain.length_bound != bound or len(chain.ratings) > bound:
            failures.append(f"p={p}: length {len(chain.ratings)} vs bound {bound}")
        identity = verify_chain_identity(curve, chain, 1e-9)
        if identity.verdict is not Verdict.HOLDS:
            failures.append(f"p={p}: identity residual {identity.max_residual:.3g}")
    elapsed = time.perf_counter() - t0
    _report(3, "indifference chain bound", not failures, elapsed, 1.0)
    assert not failures, failures
    assert elapsed < 1.0


def test_criterion_4_full_scale_under_banded_indifference():
    t0 = time.perf_counter()
    sys = builtin_systems()["sonas_const"]
    poi = check_p_opponent_indifference(sys, 0.4 - 1e-6, Grid(1000.0, 2000.0, 25.0), 1e-9)
    chain = build_skill_chain(sys.curve, 0.9, 0.0, budget=50, ceiling=25000.0)
    ok = (poi.verdict is Verdict.HOLDS
          and len(chain.ratings) == 50
          and chain.terminated_reason == "budget_exhausted")
    elapsed = time.perf_counter() - t0
    _report(4, "banded indifference with full scale", ok, elapsed, 5.0,
            detail=f"p_oi={poi.verdict.value}, chain={len(chain.ratings)}")
    assert poi.verdict is Verdict.HOLDS
    assert len(chain.ratings) == 50 and chain.terminated_reason == "budget_exhausted"
    assert elapsed < 5.0


# system: (P OI, strong P OI) predicted by the characterizations:
# P OI <=> P separable and P constant K; strong P OI <=> Sonas-like shape
# (P separable with a linear bisector) and P constant K.
TRUTH_TABLE = {
    "sonas_const": (True, True),
    "sonas_ratingsum": (False, False),
    "logistic_clamped_const": (False, False),
    "logistic_clamped_ratingsum": (False, False),
    "logistic_const": (False, False),
    "logistic_ratingsum": (False, False),
    "tanh_separable_const": (True, False),
    "tanh_separable_ratingsum": (False, False),
}


def test_criterion_5_characterization_truth_table():
    t0 = time.perf_counter()
    systems = builtin_systems()
    grid = Grid(1000.0, 2000.0, 50.0)
    margin, tol = 0.4 - 1e-6, 1e-9
    failures = []
    for name, (want_poi, want_spoi) in TRUTH_TABLE.items():
        sys = systems[name]
        poi = check_p_opponent_indifference(sys, margin, grid, tol)
        psep, table = check_p_separable(sys.curve, margin, grid, tol)
        pck = check_p_constant_k(sys, margin, grid, tol)
        spoi = check_strong_oi(sys, grid, tol, margin=margin)
        blin = check_bisector_linear(table, grid, tol)
        rhs_poi = psep.verdict is Verdict.HOLDS and pck.verdict is Verdict.HOLDS
        rhs_spoi = rhs_poi and blin.verdict is Verdict.HOLDS
        cell = (poi.verdict is Verdict.HOLDS, spoi.verdict is Verdict.HOLDS)
        if cell != (want_poi, want_spoi):
            failures.append(f"{name}: verdicts {cell} != predicted {(want_poi, want_spoi)}")
        if (poi.verdict is Verdict.HOLDS) != rhs_poi:
            failures.append(f"{name}: indifference biconditional broke")
        if (spoi.verdict is Verdict.HOLDS) != rhs_spoi:
            failures.append(f"{name}: strong-indifference biconditional broke")
        cross = cross_check_characterization(sys, margin, grid, tol)
        if cross.verdict is not Verdict.HOLDS:
            failures.append(f"{name}: cross-check {cross.verdict.value}")
    elapsed = time.perf_counter() - t0
    _report(5, "characterization truth table", not failures, elapsed, 30.0)
    assert not failures, failures
    assert elapsed < 30.0


def test_criterion_6_elo_midpoint_property():
    t0 = time.perf_counter()
    sys = builtin_systems()["logistic_const"]
    found = find_max_gain_opponent(sys, 1500.0, 1700.0, (1400.0, 1800.0), 1.0)
    elapsed = time.perf_counter() - t0
    ok = found is not None and abs(found - 1600.0) <= 1.0
    _report(6, "max-gain opponent at the midpoint", ok, elapsed, 1.0,
            detail=f"found {found}")
    assert ok
    assert elapsed < 1.0


def test_criterion_7_simulation_calibration():
    t0 = time.perf_counter()
    cfg = ExperimentConfig(system=builtin_systems()["sonas_const"], pool_size=20,
                           init=NormalInit(1500.0, 200.0), rounds=10_000, seed=424242,
                           attacker_strategy=RandomOpponent(), drift=NoDrift(),
                           log_matches=False)
    res = run_experiment(cfg)
    total_matches = int(res.matches_played.sum()) // 2
    per_match = np.abs(res.final_current - res.initial_current) / res.matches_played
    bound = 3.0 * (32.0 / 2.0) / np.sqrt(res.matches_played)
    elapsed = time.perf_counter() - t0
    ok = total_matches >= 100_000 and bool(np.all(per_match <= bound))
    _report(7, "calibrated pool has no drift", ok, elapsed, 10.0,
            detail=f"{total_matches} matches, worst ratio "
                   f"{float(np.max(per_match / bound)):.2f}")
    assert total_matches >= 100_000
    assert np.all(per_match <= bound)
    assert elapsed < 10.0


def test_criterion_8_attack_differential():
    t0 = time.perf_counter()
    with open(os.path.join(DATA_DIR, "attack_pilot_baseline.json")) as fh:
        baseline = json.load(fh)
    systems = builtin_systems()
    seeds = baseline["seeds"]
    jobs = 4

    def run_pair(system, band):
        cfg = ExperimentConfig(system=system, pool_size=baseline["pool_size"],
                               init=NormalInit(1500.0, 300.0),
                               rounds=baseline["rounds"], seed=0,
                               attacker_strategy=GreedyGain(),
                               drift=GaussianWalk(baseline["drift_step"]),
                               band=band, log_matches=False)
        strategic = run_replicates(cfg, seeds, n_jobs=jobs)
        rand = run_replicates(dataclasses.replace(cfg, attacker_strategy=RandomOpponent()),
                              seeds, n_jobs=jobs)
        return strategic_advantage(strategic, rand)

    elo_delta, elo_ci = run_pair(systems["logistic_const"], band=None)
    son_delta, son_ci = run_pair(systems["sonas_const"], band=baseline["band"])
    elapsed = time.perf_counter() - t0

    elo_ok = elo_ci[0] > 0.0 and elo_delta >= baseline["thresholds"]["elo_delta_min"]
    son_ok = son_ci[0] <= 0.0 <= son_ci[1] and \
        abs(son_delta) <= baseline["thresholds"]["sonas_abs_delta_max"]
    _report(8, "attack differential sign pattern", elo_ok and son_ok, elapsed, 120.0,
            detail=f"elo {elo_delta:+.1f} CI ({elo_ci[0]:+.1f}, {elo_ci[1]:+.1f}); "
                   f"sonas banded {son_delta:+.1f} CI ({son_ci[0]:+.1f}, {son_ci[1]:+.1f})")
    assert elo_ci[0] > 0.0, "elo attack CI must be strictly positive"
    assert elo_delta >= baseline["thresholds"]["elo_delta_min"]
    assert son_ci[0] <= 0.0 <= son_ci[1], "banded sonas CI must contain 0"
    assert abs(son_delta) <= baseline["thresholds"]["sonas_abs_delta_max"]
    if np.__version__ == baseline["numpy_version"]:
        assert elo_delta == pytest.approx(baseline["elo"]["delta"], abs=1e-6)
        assert son_delta == pytest.approx(baseline["sonas_banded"]["delta"], abs=1e-6)
    assert elapsed < 120.0


def test_criterion_9_bisector_linearity():
    t0 = time.perf_counter()
    xs = np.arange(-800.0, 801.0, 25.0)
    tanh_table = BisectorTable(xs, 0.4 * np.tanh(xs / 500.0), reference=0.0)
    tanh_report = check_bisector_linear(tanh_table, Grid(-750.0, 750.0, 50.0), 1e-9)

    from ratinglab import SonasLike
    sonas_table = extract_bisector(SonasLike(0.001, 400.0), 0.0, (-300.0, 300.0), 10.0)
    sonas_report = check_bisector_linear(sonas_table, Grid(-300.0, 300.0, 10.0), 1e-9)
    slope = sonas_report.parameters["fitted_slope"]
    elapsed = time.perf_counter() - t0

    ok = (tanh_report.verdict is Verdict.REFUTED and tanh_report.max_residual > 1e-3
          and sonas_report.verdict is Verdict.HOLDS and abs(slope - 0.001) <= 1e-9)
    _report(9, "bisector additivity and slope", ok, elapsed, 1.0,
            detail=f"tanh residual {tanh_report.max_residual:.3g}, "
                   f"sonas slope {slope:.12f}")
    assert tanh_report.verdict is Verdict.REFUTED
    assert tanh_report.max_residual > 1e-3
    assert sonas_report.verdict is Verdict.HOLDS
    assert abs(slope - 0.001) <= 1e-9
    assert elapsed < 1.0
