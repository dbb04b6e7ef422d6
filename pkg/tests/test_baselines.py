import math

import numpy as np
import pytest

from acgm.baselines import BaselineConfig, Variant, preset_fista_cp, solve_baseline, solve_fista_bt
from acgm.problems import gen, oracle_bundle
from acgm.solvers import solve_ex
from conftest import max_rel_dev, small_lasso, textbook_fista


def test_fista_bt_no_backtracks_at_lipschitz_constant():
    prob, A, _ = small_lasso()
    L_f = np.linalg.norm(A, 2) ** 2
    _, tr = solve_fista_bt(prob, BaselineConfig(x0=np.ones(5), L0=L_f, K=50))
    assert all(r.backtracks == 0 for r in tr.records)
    assert all(r.L == L_f for r in tr.records)


def test_fista_bt_equals_textbook_fista():
    prob, A, _ = small_lasso()
    L_f = np.linalg.norm(A, 2) ** 2
    _, tr = solve_fista_bt(prob, BaselineConfig(x0=np.ones(5), L0=L_f, K=60), record_points=True)
    _, ref = textbook_fista(prob, np.ones(5), L_f, 60)
    assert max_rel_dev(tr.xs, ref) <= 1e-12


def test_fista_bt_t_sequence():
    prob, A, _ = small_lasso()
    L_f = np.linalg.norm(A, 2) ** 2
    _, tr = solve_fista_bt(prob, BaselineConfig(x0=np.ones(5), L0=L_f, K=10))
    t = 1.0
    for rec in tr.records:
        assert rec.A == pytest.approx(t * t / L_f, rel=1e-14)
        t = 0.5 * (1 + math.sqrt(1 + 4 * t * t))
    assert tr.records[1].A * L_f == pytest.approx(((1 + math.sqrt(5)) / 2) ** 2, rel=1e-14)


def test_fista_bt_lce_non_decreasing():
    prob, A, _ = small_lasso()
    _, tr = solve_fista_bt(prob, BaselineConfig(x0=10 * np.ones(5), L0=1e-3, K=50))
    L = tr.column("L")
    assert np.all(np.diff(L) >= 0)
    assert sum(r.backtracks for r in tr.records) > 0
    assert L[-1] <= 2.0 * np.linalg.norm(A, 2) ** 2


def test_fista_bt_matches_fixed_step_acgm_on_lasso():
    inst = gen("LASSO", 0)
    prob = oracle_bundle(inst)
    _, bt = solve_fista_bt(prob, BaselineConfig(x0=inst.x0, L0=inst.L_f, K=200),
                           record_points=True)
    _, cp = solve_ex(prob, preset_fista_cp(prob, inst.x0, inst.L_f, 200), record_points=True)
    assert max_rel_dev(bt.xs, cp.xs) <= 1e-8


def test_preset_fista_cp_fixed_step_on_ridge():
    inst = gen("RR", 0)
    prob = oracle_bundle(inst)
    cfg = preset_fista_cp(prob, inst.x0, inst.L_f, 100)
    assert (cfg.r_d, cfg.A0, cfg.gamma0) == (1.0, 0.0, 1.0)
    _, tr = solve_ex(prob, cfg)
    assert all(r.L == inst.L_f and r.backtracks == 0 for r in tr.records)


def test_preset_mfista_cp_monotone():
    inst = gen("LASSO", 1)
    prob = oracle_bundle(inst)
    _, tr = solve_baseline(prob, BaselineConfig(x0=inst.x0, L0=inst.L_f, K=200,
                                                variant=Variant.MFISTA_CP))
    F = np.concatenate([[tr.F0], tr.column("F")])
    assert np.all(np.diff(F) <= 0)
    assert tr.solver == "MFISTA-CP"


def test_preset_rejects_small_step():
    prob, _, _ = small_lasso()
    prob = prob.__class__(prob.f_eval, prob.grad_f, prob.psi_eval, prob.prox_psi, 1.0, 0.0, 5)
    with pytest.raises(ValueError):
        preset_fista_cp(prob, np.zeros(5), 0.5, 10)


def test_baseline_config_validation():
    with pytest.raises(ValueError):
        BaselineConfig(x0=np.zeros(2), L0=0.0)
    with pytest.raises(ValueError):
        BaselineConfig(x0=np.zeros(2), L0=1.0, r_u=0.5)
    assert BaselineConfig(x0=np.zeros(2), L0=1.0, variant="FISTA-CP").variant is Variant.FISTA_CP
