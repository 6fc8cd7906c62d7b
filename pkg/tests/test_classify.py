import json
import math

import numpy as np
import pytest

from gamestab import presets
from gamestab.classify import (
    check_differential_nash,
    classify_equilibrium,
    default_tau_grid,
    detect_structure,
    instability_certificate,
    lambda_summary,
    nash_status,
    potential_bounds,
    potential_robustness,
    schur_stability,
    zero_sum_bounds,
    zero_sum_robustness,
)
from gamestab.errors import NotAFixedPointError, StructureError
from gamestab.game import GameJacobian, LearningConfig, QuadraticGame, assemble_jacobian
from gamestab.spectral import eigenvalues, is_hurwitz

import randgames


def ex1(b):
    return assemble_jacobian(presets.example1(b))


def ex2(p):
    return assemble_jacobian(presets.example2(p))


def blocks(J11, J12, J22, J21=None):
    J12 = np.atleast_2d(np.asarray(J12, dtype=float))
    J21 = J12.T if J21 is None else J21
    return GameJacobian(J11, J12, J21, J22)


def test_default_tau_grid():
    g = default_tau_grid()
    assert g.size == 25
    assert g[0] == pytest.approx(1e-4) and g[-1] == pytest.approx(1e4)


def test_lambda_summary_examples():
    for b in (1.0, 2.0, 7.0):
        lam = lambda_summary(ex1(b))
        assert (lam.lam1_minus, lam.lam1_plus) == (-6, 2)
        assert (lam.lam2_minus, lam.lam2_plus) == (-12, -4)
        assert (lam.lam_minus, lam.lam_plus, lam.lam_under, lam.lam_over) == (-12, 2, -9, -1)
    lam = lambda_summary(ex2(1.0))
    assert (lam.lam1_minus, lam.lam1_plus, lam.lam2_minus, lam.lam2_plus) == (-4, -2, -8, -6)
    assert (lam.lam_minus, lam.lam_plus) == (-8, -2)
    lam = lambda_summary(blocks(-np.eye(2), np.zeros((2, 2)), -np.eye(2)))
    assert {lam.lam1_minus, lam.lam1_plus, lam.lam2_minus, lam.lam2_plus,
            lam.lam_under, lam.lam_over} == {-1.0}


def test_differential_nash_examples():
    for p in (0.0, 1.0, 4.0):
        assert check_differential_nash(ex2(p))
    for b in (0.5, 2.0):
        assert not check_differential_nash(ex1(b))
        assert nash_status(ex1(b)) == "not_nash"
    assert check_differential_nash(blocks(-np.eye(2), np.zeros((2, 2)), -np.eye(2)))
    assert nash_status(blocks(np.diag([0.0, -1.0]), [[1.0], [0.0]], [[-1.0]])) == "degenerate"


def test_detect_structure():
    assert detect_structure(ex1(2.0)) == "zero_sum"
    assert detect_structure(ex2(1.0)) == "potential"
    assert detect_structure(assemble_jacobian(presets.example4())) == "general"
    assert detect_structure(ex2(0.0)) == "zero_sum"


def test_zero_sum_bounds_example1():
    bounds = zero_sum_bounds(ex1(1.0))
    assert bounds.real_interval == (-12, 2)
    assert (bounds.re_min, bounds.re_max) == (-9, -1)
    assert bounds.im_max == pytest.approx(2.0)
    lam = eigenvalues(ex1(1.0).full).eigenvalues
    real = lam[np.abs(lam.imag) <= 1e-12].real
    assert np.all((real >= -12) & (real <= 2))
    cplx = lam[np.abs(lam.imag) > 1e-12]
    assert np.all((cplx.real >= -9) & (cplx.real <= -1) & (np.abs(cplx.imag) <= 2))

    bounds = zero_sum_bounds(ex1(2.0))
    assert bounds.im_max == pytest.approx(4.0)
    im = np.abs(eigenvalues(ex1(2.0).full).eigenvalues.imag)
    assert im.max() == pytest.approx(math.sqrt(7), abs=1e-10)


def test_zero_sum_bounds_separated_case():
    J = blocks([[-6.0]], [[1.0]], [[-1.0]], J21=[[-1.0]])
    bounds = zero_sum_bounds(J)
    assert bounds.delta == pytest.approx(5.0)
    assert bounds.all_real is True and bounds.im_max_refined == 0.0
    assert np.all(eigenvalues(J.full).is_real())

    J = blocks([[-6.0]], [[4.0]], [[-1.0]], J21=[[-4.0]])
    bounds = zero_sum_bounds(J)
    assert bounds.all_real is False
    assert bounds.im_max_refined == pytest.approx(math.sqrt(16 - 6.25))
    im = np.abs(eigenvalues(J.full).eigenvalues.imag).max()
    assert 0 < im <= bounds.im_max_refined + 1e-12


def test_zero_sum_bounds_rejects_potential():
    with pytest.raises(StructureError) as info:
        zero_sum_bounds(ex2(1.0))
    assert info.value.diagnostic == pytest.approx(1.0)


def test_potential_bounds_examples():
    b = potential_bounds(ex2(4.0))
    delta = math.sqrt(20) - 2
    assert b.delta_minus == pytest.approx(delta, abs=1e-12)
    assert b.delta_plus == pytest.approx(delta, abs=1e-12)
    assert b.outer == pytest.approx((-8 - delta, -2 + delta))
    lam = eigenvalues(ex2(4.0).full).eigenvalues
    assert np.all((lam.real >= b.outer[0] - 1e-8) & (lam.real <= b.outer[1] + 1e-8))

    b = potential_bounds(ex2(0.0))
    assert b.delta_minus == 0 and b.delta_plus == 0 and b.outer == (-8, -2)
    assert b.gap == (-6, -4)

    b = potential_bounds(blocks([[-1.0]], [[1.0]], [[-1.0]]))
    assert b.delta_minus == pytest.approx(1.0) and b.delta_plus == pytest.approx(1.0)
    assert b.outer == pytest.approx((-2.0, 0.0))
    assert b.gap is None


def test_potential_bounds_rejects_zero_sum_coupling():
    with pytest.raises(StructureError):
        potential_bounds(ex1(2.0))


def test_potential_gap_symmetric_reading():
    # lam1_plus < lam2_minus: J11 lives below J22
    rng = np.random.default_rng(3)
    for _ in range(200):
        J11 = -randgames.spd(rng, 2) - 5 * np.eye(2)
        J22 = -randgames.spd(rng, 2, floor=0.1) * 0.3
        P = rng.standard_normal((2, 2)) * 0.5
        J = GameJacobian(J11, P, P.T, J22)
        b = potential_bounds(J)
        lam = lambda_summary(J)
        if not lam.lam1_plus < lam.lam2_minus:
            continue
        assert b.gap == (lam.lam1_plus, lam.lam2_minus)
        ev = np.linalg.eigvalsh(J.full)
        assert not np.any((ev > b.gap[0] + 1e-9) & (ev < b.gap[1] - 1e-9))


def test_zero_sum_robustness_examples():
    cert = zero_sum_robustness(ex1(2.0))
    assert cert.applicable and not cert.holds

    rng = np.random.default_rng(0)
    Z = rng.standard_normal((2, 3)) * 3
    J = GameJacobian(-np.eye(2), Z, -Z.T, -2 * np.eye(3))
    cert = zero_sum_robustness(J)
    assert cert.holds
    assert cert.witness["trace_negative"] and cert.witness["det_positive"]
    for tau in (1e-3, 1.0, 1e3):
        assert is_hurwitz(J.scaled(tau))

    J = blocks([[-1.0]], [[5.0]], [[-1.0]], J21=[[-5.0]])
    assert zero_sum_robustness(J).holds
    assert all(is_hurwitz(J.scaled(t)) for t in default_tau_grid())

    assert not zero_sum_robustness(ex2(1.0)).applicable


def test_potential_robustness_examples():
    grid = np.logspace(-3, 3, 25)
    cert = potential_robustness(ex2(3.0))
    assert cert.holds
    assert cert.witness["coupling_sq"] == pytest.approx(9.0)
    assert cert.witness["weakest_curvature_product"] == pytest.approx(12.0)
    assert all(is_hurwitz(ex2(3.0).scaled(t)) for t in grid)

    for p in (5.0, 6.0):
        cert = potential_robustness(ex2(p))
        assert not cert.holds
        assert not is_hurwitz(ex2(p).full)
    # p = 5 passes the strongest-curvature product (32 > 25) but is unstable
    assert potential_robustness(ex2(5.0)).witness["strongest_curvature_product"] == 32

    assert potential_robustness(ex2(0.0)).holds
    assert not potential_robustness(ex1(2.0)).applicable
    assert not potential_robustness(blocks([[1.0]], [[0.0]], [[-1.0]])).holds


def test_instability_certificate_examples():
    cert = instability_certificate(assemble_jacobian(presets.example4()))
    assert cert.holds and cert.applicable
    w = cert.witness
    assert w["z2_norm"] == pytest.approx(4.0, abs=0.05)
    assert w["midpoint"] == pytest.approx(4.6, abs=0.05)
    assert w["min_positive"] == pytest.approx(4.8, abs=0.05)
    assert not is_hurwitz(assemble_jacobian(presets.example4()).full)

    cert = instability_certificate(np.diag([2.0, -1.0]))
    assert cert.holds and not is_hurwitz(np.diag([2.0, -1.0]))

    cert = instability_certificate(ex2(1.0))
    assert not cert.applicable and not cert.holds

    cert = instability_certificate(np.diag([1.0, 2.0]))
    assert cert.name == "positive_definite_symmetric_part" and cert.holds


def test_schur_examples():
    assert schur_stability(ex2(3.0)).holds
    assert is_hurwitz(ex2(3.0).full)
    assert not schur_stability(ex2(4.0)).holds
    assert not is_hurwitz(ex2(4.0).full)
    J = ex2(0.0)
    assert schur_stability(J).holds == bool(np.all(np.linalg.eigvalsh(J.J11) < 0))
    cert = schur_stability(blocks([[-1.0]], [[1.0]], [[0.0]]))
    assert not cert.applicable
    assert not schur_stability(assemble_jacobian(presets.example4())).applicable


def test_classify_examples():
    rep = classify_equilibrium(presets.example1(2.0), np.zeros(4))
    assert not rep.is_differential_nash and rep.is_stable
    assert rep.structure == "zero_sum" and rep.zero_sum_box is not None

    rep = classify_equilibrium(presets.example2(4.0), np.zeros(4))
    assert rep.is_differential_nash and not rep.is_stable
    assert rep.potential_intervals is not None
    assert rep.discrete_spectral_radius > 1

    rep = classify_equilibrium(presets.example2(1.0), np.zeros(4))
    assert rep.is_differential_nash and rep.is_stable
    assert all(rep.is_stable_under_tau.values())
    names = {c.name: c for c in rep.certificates}
    assert names["potential_robustness"].holds and names["schur_complement"].holds


def test_classify_includes_config_tau_and_serializes():
    rep = classify_equilibrium(presets.example5(0.9), np.zeros(4), LearningConfig(1e-3, 28.0))
    assert 28.0 in rep.is_stable_under_tau
    d = rep.to_dict()
    assert "lambda" in d and "lambda_" not in d
    assert d["config"] == {"gamma1": 1e-3, "tau": 28.0}
    json.dumps(d)


def test_classify_rejects_non_fixed_point():
    with pytest.raises(NotAFixedPointError) as info:
        classify_equilibrium(presets.example1(2.0), np.ones(4))
    assert info.value.residual > 1


def test_classify_shifted_equilibrium():
    rng = np.random.default_rng(8)
    game = randgames.general_game(rng, 3)
    Q1, Q2 = game.Q1, game.Q2
    g = QuadraticGame(game.d1, game.d2, Q1, Q2, b1=rng.standard_normal(game.d1 + game.d2),
                      b2=rng.standard_normal(game.d1 + game.d2))
    from gamestab.game import find_fixed_point
    x = find_fixed_point(g, np.zeros(g.d1 + g.d2)).vector
    rep = classify_equilibrium(g, x)
    assert rep.residual <= 1e-8
    lam = eigenvalues(assemble_jacobian(g).full)
    assert rep.is_stable == is_hurwitz(lam)
