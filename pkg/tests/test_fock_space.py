import numpy as np
import pytest

from ncschur.colligation import observability_operator, transfer_function
from ncschur.errors import DimensionError
from ncschur.fock_space import (
    FockBasis,
    apply_shift,
    eval_operator,
    mult_linear_operator,
    mult_operator_matrix,
    mult_operator_right,
    series_to_vector,
    shift_matrix,
    tau_matrix,
    vector_to_series,
)
from ncschur.formal_series import FormalSeries, multiply, tau
from ncschur.sampling import random_contractive_colligation, random_contractive_output_pair


def test_basis_layout():
    b = FockBasis(2, 3, 2)
    assert b.dim == 2 * 15
    assert all(b.label(b.index(w, i)) == (w, i) for w in b.words for i in range(2))
    assert b.block("1") == slice(2, 4)


def test_shift_examples():
    b = FockBasis(2, 1)
    S1 = shift_matrix(b, "right", 1)
    assert np.allclose(S1 @ b.unit(""), b.unit("1"))
    assert np.allclose(S1 @ b.unit("1"), 0)
    b2 = FockBasis(2, 2)
    assert np.allclose(shift_matrix(b2, "left", 1) @ b2.unit("2"), b2.unit("12"))
    assert np.allclose(shift_matrix(b2, "right", 1) @ b2.unit("2"), b2.unit("21"))


def test_shifts_have_orthogonal_ranges():
    b = FockBasis(3, 3, 2)
    P = np.diag(np.r_[np.ones(len(b.band(2))), np.zeros(b.dim - len(b.band(2)))])
    for i in (1, 2, 3):
        for j in (1, 2, 3):
            G = shift_matrix(b, "right", j, adjoint=True) @ shift_matrix(b, "right", i)
            assert np.allclose(G, P if i == j else 0)


def test_matrix_free_shift_matches_dense(rng):
    b = FockBasis(2, 3, 2)
    x = rng.standard_normal(b.dim) + 1j * rng.standard_normal(b.dim)
    for side in ("left", "right"):
        for adj in (False, True):
            assert np.allclose(apply_shift(x, b, side, 2, adj), shift_matrix(b, side, 2, adj) @ x)


def test_tau_conjugates_right_to_left():
    b = FockBasis(3, 3)
    T = tau_matrix(b)
    for j in (1, 2, 3):
        assert np.allclose(T @ shift_matrix(b, "right", j) @ T, shift_matrix(b, "left", j))


def test_mult_operator_examples():
    b = FockBasis(2, 2, 2)
    assert np.allclose(mult_operator_matrix(FormalSeries.constant(np.eye(2), 2, 2), b), np.eye(b.dim))
    theta = FormalSeries(2, 1, 1, 2, {"1": np.array([[1, 0]]), "2": np.array([[0, 1]])})
    bi, bo = FockBasis(2, 1, 2), FockBasis(2, 1, 1)
    M = mult_operator_matrix(theta, bi, bo)
    cols = M[:, bi.block("")]
    assert np.allclose(cols[:, 0], bo.unit("1")) and np.allclose(cols[:, 1], bo.unit("2"))
    c = FormalSeries.constant(np.array([[0.3, 0.4], [0.0, 0.5]]), 2, 2)
    assert np.linalg.norm(mult_operator_matrix(c, b), 2) <= 1 + 1e-12
    with pytest.raises(DimensionError):
        mult_operator_matrix(theta, FockBasis(2, 1, 1))


def test_right_multiplication(rng):
    b = FockBasis(2, 3)
    z1 = FormalSeries.from_scalars({"1": 1}, 2, 3)
    assert np.allclose(mult_operator_right(z1, b), shift_matrix(b, "right", 1))
    S = FormalSeries.from_scalars({"": 0.3, "12": -0.5, "2": 0.2j}, 2, 3)
    MR = mult_operator_right(S, b)
    # scalar case: M^R_S f = f (tau S)
    f = FormalSeries.from_scalars({"1": 1.0, "": 2.0}, 2, 3)
    lhs = vector_to_series(MR @ series_to_vector(f, b), b)
    assert lhs.max_abs_diff(multiply(f, tau(S), 3)) < 1e-14
    # commutes with left shifts on inputs of degree <= N - deg(S)
    band = b.band(1)
    for j in (1, 2):
        L = shift_matrix(b, "left", j)
        assert np.allclose((MR @ L - L @ MR)[:, band], 0)


def test_eval_operator():
    b = FockBasis(2, 2, 2)
    E = eval_operator(b)
    y = np.array([1.0, -2.0])
    f = FormalSeries(2, 2, 2, 1, {"": y.reshape(2, 1), "12": np.ones((2, 1))})
    assert np.allclose(E @ series_to_vector(f, b), y)
    assert np.allclose(E @ tau_matrix(b), E)
    g = FormalSeries(2, 2, 2, 1, {"12": y.reshape(2, 1)})
    x = series_to_vector(g, b)
    # backward shifts along "21" peel letters off the end: 2 first, then 1
    x = shift_matrix(b, "right", 2, adjoint=True) @ x
    x = shift_matrix(b, "right", 1, adjoint=True) @ x
    assert np.allclose(E @ x, y)


def test_intertwining_with_observability(rng):
    d, N = 2, 4
    for _ in range(5):
        pair = random_contractive_output_pair(d, 3, 2, rng)
        O = observability_operator(pair, N)
        b = FockBasis(d, N, 2)
        rows = b.band(N - 1)
        for j in range(d):
            lhs = shift_matrix(b, "right", j + 1, adjoint=True) @ O
            assert np.allclose(lhs[rows], (O @ pair.A[j])[rows], atol=1e-13)


def test_matrix_free_multiplication(rng):
    U = random_contractive_colligation(2, 2, 2, 3, rng)
    S = transfer_function(U, 3)
    bi, bo = FockBasis(2, 3, 2), FockBasis(2, 3, 3)
    x = rng.standard_normal(bi.dim) + 0j
    y = rng.standard_normal(bo.dim) + 0j
    for side, dense in (("left", mult_operator_matrix), ("right", mult_operator_right)):
        op = mult_linear_operator(S, bi, bo, side)
        M = dense(S, bi, bo)
        assert np.allclose(op.matvec(x), M @ x)
        assert np.allclose(op.rmatvec(y), M.conj().T @ y)


def test_schur_defect_is_psd(rng):
    for _ in range(5):
        S = transfer_function(random_contractive_colligation(2, 3, 1, 1, rng), 4)
        M = mult_operator_matrix(S, FockBasis(2, 4, 1))
        assert np.linalg.norm(M, 2) <= 1 + 1e-10
        assert np.linalg.eigvalsh(np.eye(M.shape[0]) - M @ M.conj().T).min() >= -1e-10
