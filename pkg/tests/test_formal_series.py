import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ncschur.errors import DimensionError
from ncschur.fock_space import FockBasis, series_to_vector, shift_matrix, vector_to_series
from ncschur.formal_series import (
    FormalSeries,
    KernelTable,
    adjoint_series,
    functional_calculus,
    left_eval,
    multiply,
    szego_kernel,
    tau,
)
from ncschur.free_words import enumerate_words


def random_series(rng, d, N, rows, cols):
    return FormalSeries(d, N, rows, cols, {
        w: rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))
        for w in enumerate_words(d, N)})


seeds = st.integers(0, 2 ** 32 - 1)


def test_multiply_examples():
    f = FormalSeries.from_scalars({"": 1, "2": 1}, 2, 3)
    z1 = FormalSeries.from_scalars({"1": 1}, 2, 3)
    prod = multiply(z1, f)
    assert prod == FormalSeries.from_scalars({"1": 1, "12": 1}, 2, 3)
    assert multiply(FormalSeries.constant(1, 2, 3), f) == f
    z22 = FormalSeries.from_scalars({"22": 1}, 2, 2)
    assert multiply(z1.truncate(2), z22, 2).words() == ()


def test_multiply_dimension_mismatch():
    with pytest.raises(DimensionError):
        multiply(FormalSeries.zero(2, 2, 1, 2), FormalSeries.zero(2, 2, 3, 1))
    with pytest.raises(DimensionError):
        multiply(FormalSeries.zero(2, 2), FormalSeries.zero(3, 2))


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_associativity(seed):
    rng = np.random.default_rng(seed)
    R, S, f = (random_series(rng, 2, 3, 2, 2) for _ in range(3))
    lhs = multiply(multiply(R, S, 3), f, 3)
    rhs = multiply(R, multiply(S, f, 3), 3)
    assert lhs.max_abs_diff(rhs) <= 1e-10 * (1 + lhs.max_abs_diff(FormalSeries.zero(2, 3, 2, 2)))


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_adjoint_reverses_products(seed):
    rng = np.random.default_rng(seed)
    S = random_series(rng, 2, 3, 2, 3)
    f = random_series(rng, 2, 3, 3, 1)
    lhs = adjoint_series(multiply(S, f, 3))
    rhs = multiply(adjoint_series(f), adjoint_series(S), 3)
    assert lhs.max_abs_diff(rhs) <= 1e-10


def test_adjoint_and_tau_examples(rng):
    c = np.array([[1 + 2j, 3j]])
    H = FormalSeries(2, 2, 1, 2, {"12": c, "1": c})
    Ha = adjoint_series(H)
    assert np.allclose(Ha.coeff("21"), c.conj().T)
    assert np.allclose(Ha.coeff("1"), c.conj().T)
    assert adjoint_series(Ha) == H
    f = random_series(rng, 3, 3, 2, 1)
    assert np.allclose(tau(f).coeff("123"), f.coeff("321"))
    assert tau(tau(f)) == f
    b = FockBasis(3, 3, 2)
    assert np.isclose(np.linalg.norm(series_to_vector(tau(f), b)), np.linalg.norm(series_to_vector(f, b)))


def test_functional_calculus_examples():
    A = np.array([[[0, 1], [0, 0]], [[0, 0], [1, 0]]], dtype=float)
    assert np.allclose(functional_calculus(A, ""), np.eye(2))
    assert np.allclose(functional_calculus(A, "12"), [[1, 0], [0, 0]])
    assert np.allclose(functional_calculus(A, "11"), 0)


def test_left_eval_examples(rng):
    Z = rng.standard_normal((2, 3, 3))
    X = rng.standard_normal((3, 2))
    y = rng.standard_normal((2, 1))
    f = FormalSeries(2, 2, 2, 1, {"": y})
    assert np.allclose(left_eval((Z, X), f), X @ y)
    g = random_series(rng, 2, 2, 2, 1)
    assert np.allclose(left_eval((np.zeros_like(Z), X), g), X @ g.coeff(""))
    h = FormalSeries.from_scalars({"": -0.5, "1": 1}, 1, 3)
    assert abs(left_eval(([[[0.5]]], [[1]]), h)[0, 0]) < 1e-15
    with pytest.raises(DimensionError):
        left_eval((Z, X), random_series(rng, 2, 2, 3, 1))


def test_left_eval_transposes_words(rng):
    Z = rng.standard_normal((2, 2, 2))
    X = rng.standard_normal((2, 1))
    f = FormalSeries.from_scalars({"12": 1}, 2, 2)
    # coefficient at "12" is weighted by Z^{"21"} = Z_2 Z_1
    assert np.allclose(left_eval((Z, X), f), Z[1] @ Z[0] @ X)


def test_tau_intertwines_shifts(rng):
    b = FockBasis(2, 3, 1)
    for j in (1, 2):
        for w in b.words:
            f = FormalSeries.from_scalars({w: 1}, 2, 3)
            right = vector_to_series(shift_matrix(b, "right", j) @ series_to_vector(f, b), b)
            left = vector_to_series(shift_matrix(b, "left", j) @ series_to_vector(tau(f), b), b)
            assert tau(right) == left


def test_szego_examples():
    K = szego_kernel(2, 3)
    assert np.allclose(K.entry("", ""), 1)
    assert np.allclose(K.entry("1", "2"), 0)
    assert np.allclose(K.gram(), np.eye(15))


def test_json_round_trip(rng):
    S = random_series(rng, 2, 2, 2, 3)
    assert FormalSeries.from_json(S.to_json()).max_abs_diff(S) == 0
    K = KernelTable.from_gram(np.eye(7), 2, 2, 1)
    assert KernelTable.from_json(K.to_json()).max_abs_diff(K) == 0


def test_degree_guard():
    with pytest.raises(ValueError):
        FormalSeries.from_scalars({"111": 1}, 1, 2)
