import numpy as np
import pytest

from gamestab import presets
from gamestab.decomposition import (
    characteristic_residual,
    compress_to_2x2,
    quadratic_roots,
    rotated_block_form,
    split_potential_rotational,
    split_symmetric_skew,
)
from gamestab.game import GameJacobian, assemble_jacobian
from gamestab.qnr import sample_unit_pairs
from gamestab.spectral import spectral_norm, symmetric_eig

import randgames


def random_jacobian(rng, max_dim=5):
    return assemble_jacobian(randgames.general_game(rng, max_dim))


def test_split_zero_sum_and_potential_examples():
    J = assemble_jacobian(presets.example1(2.0))
    s = split_potential_rotational(J)
    assert not np.any(s.P)
    np.testing.assert_array_equal(s.Z, J.J12)

    J = assemble_jacobian(presets.example2(3.0))
    s = split_potential_rotational(J)
    assert not np.any(s.Z)
    np.testing.assert_array_equal(s.P, J.J12)


def test_split_example4():
    J = assemble_jacobian(presets.example4())
    np.testing.assert_array_equal(J.J12, [[-8, 0], [0, 2]])
    np.testing.assert_array_equal(J.J21, [[0, -2], [-2, 0]])
    s = split_potential_rotational(J)
    np.testing.assert_allclose(s.P, [[-4, -1], [-1, 1]])
    np.testing.assert_allclose(s.Z, [[-4, 1], [1, 1]])


def test_splits_reassemble_exactly():
    rng = np.random.default_rng(0)
    for _ in range(200):
        J = random_jacobian(rng)
        s = split_potential_rotational(J)
        assert np.max(np.abs(s.P + s.Z - J.J12)) <= 1e-12
        assert np.max(np.abs(s.P.T - s.Z.T - J.J21)) <= 1e-12
        sk = split_symmetric_skew(J)
        assert np.max(np.abs(sk.S + sk.A - J.full)) <= 1e-12
        assert np.array_equal(sk.S, sk.S.T)
        assert np.array_equal(sk.A, -sk.A.T)


def test_class_splits_vanish():
    rng = np.random.default_rng(1)
    for _ in range(100):
        assert spectral_norm(split_potential_rotational(
            assemble_jacobian(randgames.zero_sum_game(rng))).P) <= 1e-12
        assert spectral_norm(split_potential_rotational(
            assemble_jacobian(randgames.potential_game(rng))).Z) <= 1e-12


def test_symmetric_skew_example5():
    e = 0.9
    J = assemble_jacobian(presets.example5(e))
    sk = split_symmetric_skew(J)
    B = np.array([[1.0, 1.0], [1.0, -1.0]])
    np.testing.assert_allclose(sk.S, -(1 - e) * np.diag([2.0, 3.0, 4.0, 5.0]), atol=1e-15)
    A = e * np.block([[np.zeros((2, 2)), -B], [B.T, np.zeros((2, 2))]])
    np.testing.assert_allclose(sk.A, A, atol=1e-15)


def test_symmetric_skew_pure_inputs():
    S = np.array([[1.0, 2.0], [2.0, 3.0]])
    assert not np.any(split_symmetric_skew(S).A)
    A = np.array([[0.0, 2.0], [-2.0, 0.0]])
    assert not np.any(split_symmetric_skew(A).S)


def test_rotated_block_form_example4():
    form = rotated_block_form(assemble_jacobian(presets.example4()))
    assert form.k == 1
    assert form.applicable
    np.testing.assert_allclose(np.diag(form.Mplus), [4.8], atol=0.05)
    np.testing.assert_allclose(np.diag(form.Mminus), [-4.4, -5.7, -8.7], atol=0.05)
    assert spectral_norm(form.Z2) == pytest.approx(4.0, abs=0.05)


def test_rotated_block_form_degenerate_cases():
    form = rotated_block_form(-np.diag([1.0, 2.0, 3.0]))
    assert form.k == 0 and not form.applicable
    assert form.Mplus.shape == (0, 0) and form.Z2.shape == (0, 3)
    form = rotated_block_form(np.diag([1.0, -1.0]))
    assert form.k == 1
    np.testing.assert_allclose(np.abs(form.R), np.eye(2))
    assert form.Mplus[0, 0] == 1 and form.Mminus[0, 0] == -1
    assert not np.any(form.Z1) and not np.any(form.Z2) and not np.any(form.Z3)


def test_rotated_block_form_zero_eigenvalue_goes_to_minus_block():
    form = rotated_block_form(np.diag([2.0, 0.0, -1.0]))
    assert form.k == 1
    np.testing.assert_allclose(np.diag(form.Mminus), [0.0, -1.0])


def test_rotated_block_form_invariants():
    rng = np.random.default_rng(2)
    for _ in range(200):
        J = random_jacobian(rng)
        form = rotated_block_form(J)
        M = J.full
        assert np.max(np.abs(form.reconstruct() - M)) <= 1e-8
        assert np.max(np.abs(form.R @ form.R.T - np.eye(form.d))) <= 1e-8
        assert np.all(np.diag(form.Mplus) > 0)
        assert np.all(np.diag(form.Mminus) <= 0)
        for Zb in (form.Z1, form.Z3):
            assert np.max(np.abs(Zb + Zb.T), initial=0) <= 1e-10
        sym_vals = symmetric_eig(0.5 * (M + M.T)).values
        pos = sym_vals[sym_vals > 1e-10]
        nonpos = sym_vals[sym_vals <= 1e-10]
        if pos.size:
            assert form.min_positive == pytest.approx(pos.min(), abs=1e-12)
        if nonpos.size:
            assert form.max_nonpositive == pytest.approx(nonpos.max(), abs=1e-12)


def test_compress_scalar_game_is_identity():
    J = GameJacobian([[-1.0]], [[3.0]], [[-2.0]], [[-5.0]])
    c = compress_to_2x2(J, [1.0], [1.0])
    np.testing.assert_allclose(c.matrix, J.full)


def test_compress_example2():
    J = assemble_jacobian(presets.example2(1.0))
    c = compress_to_2x2(J, [1, 0], [1, 0])
    np.testing.assert_allclose(c.matrix, [[-2, -1], [-1, -6]])
    assert c.a == -2 and c.d == -6


def test_compress_zero_sum_structure():
    rng = np.random.default_rng(4)
    J = assemble_jacobian(randgames.zero_sum_game(rng, 4))
    V, W = sample_unit_pairs(J.d1, J.d2, 20, 0)
    for v, w in zip(V, W):
        m = compress_to_2x2(J, v, w).matrix
        assert abs(m[1, 0] + np.conj(m[0, 1])) <= 1e-12
        assert abs(m[0, 0].imag) == 0 and abs(m[1, 1].imag) == 0


def test_compress_rejects_non_unit():
    J = assemble_jacobian(presets.example2(1.0))
    with pytest.raises(ValueError):
        compress_to_2x2(J, [1, 1], [1, 0])
    with pytest.raises(ValueError):
        compress_to_2x2(J, [1, 0, 0], [1, 0])


def test_compression_roots_satisfy_characteristic_polynomial():
    rng = np.random.default_rng(7)
    J = random_jacobian(rng)
    V, W = sample_unit_pairs(J.d1, J.d2, 1000, 3)
    for v, w in zip(V, W):
        c = compress_to_2x2(J, v, w)
        m = c.matrix
        assert m[0, 0].imag == 0 and m[1, 1].imag == 0
        for lam in c.roots():
            res = characteristic_residual(m[0, 0], m[1, 1], m[0, 1] * m[1, 0], lam)
            assert abs(res) <= 1e-8
        np.testing.assert_allclose(np.sort_complex(c.roots()),
                                   np.sort_complex(np.linalg.eigvals(m)), atol=1e-9)


def test_quadratic_roots_avoid_cancellation():
    # l^2 - 1e8 l + 1 = 0: small root ~ 1e-8, naive formula loses it
    roots = quadratic_roots(1e8, 0.0, -1.0)
    small = roots[np.argmin(np.abs(roots))]
    assert small == pytest.approx(1e-8, rel=1e-12)
    np.testing.assert_allclose(quadratic_roots(0.0, 0.0, 0.0), [0, 0])
