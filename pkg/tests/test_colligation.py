import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ncschur.colligation import (
    Colligation,
    InputPair,
    OutputPair,
    canonical_factor,
    classify,
    complete,
    coisometry_completion,
    gramian,
    is_strongly_stable,
    observability_operator,
    observability_rank,
    simulate,
    stability_iterates,
    transfer_function,
    unique_B_from_S,
    unitary_equivalence,
)
from ncschur.errors import (
    DimensionError,
    KernelMismatchError,
    NotContractiveError,
    NotObservableError,
    StabilityError,
)
from ncschur.fock_space import FockBasis, mult_operator_matrix
from ncschur.formal_series import FormalSeries, multiply, right_multiply
from ncschur.free_words import enumerate_words
from ncschur.kernels import kernel_KCA, kernel_KS
from ncschur.sampling import (
    random_coisometric_realization,
    random_contractive_colligation,
    random_contractive_output_pair,
    random_isometric_output_pair,
    random_unitary,
)

SHIFT = Colligation([[[0]]], [[[1]]], [[1]], [[0]])
ROW_SHIFT = Colligation(np.zeros((2, 1, 1)), [[[1, 0]], [[0, 1]]], [[1]], [[0, 0]])
seeds = st.integers(0, 2 ** 32 - 1)


def test_classify_examples():
    assert classify(SHIFT)["unitary"]
    assert classify(ROW_SHIFT)["unitary"]
    flags = classify(Colligation([[[0.5]]], [[[0]]], [[0]], [[0]]))
    assert flags == {"contractive": True, "isometric": False, "coisometric": False, "unitary": False}


def test_dimension_checks():
    with pytest.raises(DimensionError):
        Colligation(np.zeros((2, 2, 2)), np.zeros((2, 3, 1)), np.zeros((1, 2)), np.zeros((1, 1)))
    with pytest.raises(DimensionError):
        OutputPair(np.zeros((1, 3)), np.zeros((2, 2, 2)))


def test_transfer_examples():
    assert transfer_function(SHIFT, 4) == FormalSeries.from_scalars({"1": 1}, 1, 4)
    U = Colligation(np.zeros((2, 1, 1)), [[[0.3]], [[-0.4j]]], [[1]], [[0.2]])
    assert transfer_function(U, 3) == FormalSeries.from_scalars({"": 0.2, "1": 0.3, "2": -0.4j}, 2, 3)
    A1 = np.array([[0, 1], [0, 0]])
    A = np.stack([A1, np.zeros((2, 2))])
    B = np.stack([np.array([[1], [2]]), np.array([[0], [1]])])
    C = np.array([[1, 1]])
    S = transfer_function(Colligation(A, B, C, [[0]]), 5)
    assert S.max_word_length() == 2
    assert np.allclose(S.coeff("12"), C @ A[0] @ B[1])


def test_simulate_examples(rng):
    U = random_contractive_colligation(2, 3, 2, 2, rng)
    y0 = simulate(U, {}, "left", 3)
    assert all(np.allclose(v, 0) for v in y0.values())
    u0 = np.array([1.0, -1j])
    S = transfer_function(U, 3)
    y = simulate(U, {"": u0}, "left", 3)
    assert all(np.allclose(y[w], S.coeff(w) @ u0) for w in y)
    u1 = {w: rng.standard_normal(2) for w in ("", "1", "21")}
    u2 = {w: rng.standard_normal(2) for w in ("2", "1")}
    total = {w: u1.get(w, 0) + u2.get(w, 0) for w in set(u1) | set(u2)}
    for side in ("left", "right"):
        y1, y2, y12 = (simulate(U, u, side, 3) for u in (u1, u2, total))
        assert all(np.allclose(y12[w], y1[w] + y2[w]) for w in y12)


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_simulate_matches_products(seed):
    rng = np.random.default_rng(seed)
    d, N = int(rng.integers(1, 4)), 3
    U = random_contractive_colligation(d, 2, 2, 1, rng)
    S = transfer_function(U, N)
    u = {w: rng.standard_normal(2) + 1j * rng.standard_normal(2) for w in enumerate_words(d, N)}
    uh = FormalSeries(d, N, 2, 1, {w: v.reshape(2, 1) for w, v in u.items()})
    for side, prod in (("left", multiply), ("right", right_multiply)):
        y = simulate(U, u, side, N)
        yh = prod(S, uh, N)
        assert max(np.abs(y[w] - yh.coeff(w)[:, 0]).max() for w in y) <= 1e-12


def test_contractive_transfer_is_schur(rng):
    for _ in range(5):
        S = transfer_function(random_contractive_colligation(2, 3, 2, 2, rng), 3)
        assert np.linalg.norm(mult_operator_matrix(S, FockBasis(2, 3, 2)), 2) <= 1 + 1e-10


def test_observability_examples():
    O = observability_operator(OutputPair([[1, 2]], np.zeros((2, 2, 2))), 2)
    assert np.allclose(O[0], [1, 2]) and np.allclose(O[1:], 0)
    lam = 0.7
    O = observability_operator(OutputPair([[1]], [[[lam]]]), 4)
    assert np.allclose(O[:, 0], lam ** np.arange(5))
    assert observability_rank(OutputPair([[1, 0]], np.zeros((1, 2, 2))), 3)[0] == 1


def test_gramian_examples():
    X = np.array([[1, 0], [1j, 1]])
    assert np.allclose(gramian(InputPair(np.zeros((2, 2, 2)), X)), X @ X.conj().T)
    assert abs(gramian(InputPair(np.full((2, 1, 1), 0.5), [[1]]), tol=1e-15)[0, 0] - 2) <= 1e-12


def test_gramian_of_isometric_pair_is_identity(rng):
    for _ in range(5):
        pair = random_isometric_output_pair(2, 3, 2, rng)
        assert np.linalg.norm(gramian(pair, tol=1e-15) - np.eye(3), 2) <= 1e-12


def test_gramian_history_is_monotone(rng):
    pair = random_contractive_output_pair(2, 3, 1, rng, norm=0.9)
    sol = gramian(pair, return_history=True)
    r = np.array(sol.residuals)
    assert sol.iterations == len(r)
    assert np.all(np.diff(r) <= 1e-15 * r[0])
    O = observability_operator(pair, 12)
    errs = [np.linalg.norm(observability_operator(pair, k).conj().T @ observability_operator(pair, k) - sol.H, 2)
            for k in range(1, 13)]
    assert np.all(np.diff(errs) <= 1e-14)
    assert np.linalg.norm(O.conj().T @ O - sol.H, 2) <= stability_iterates(pair.A, 13, sol.H)[-1] + 1e-12


def test_gramian_rejects_unstable():
    with pytest.raises(StabilityError):
        gramian(OutputPair([[0]], np.stack([np.eye(1) / np.sqrt(2)] * 2)))


def test_stability_examples():
    ok, rho = is_strongly_stable(np.stack([np.eye(2) / 2] * 2))
    assert ok and abs(rho - 0.5) < 1e-12
    it = stability_iterates(np.stack([np.eye(2) / 2] * 2), 6)
    assert np.allclose(it, 2.0 ** -np.arange(7))
    ok, rho = is_strongly_stable(np.stack([np.eye(2) / np.sqrt(2)] * 2))
    assert not ok and abs(rho - 1) < 1e-12
    A1 = np.array([[0, 1], [0, 0]])
    ok, rho = is_strongly_stable(np.stack([A1, 2 * A1]))
    assert ok and rho < 1e-12


def test_completion_examples():
    U = complete(OutputPair([[1]], np.zeros((2, 1, 1))))
    assert U.m == 2
    assert np.allclose(U.B[0], [[1, 0]]) and np.allclose(U.B[1], [[0, 1]])
    assert transfer_function(U, 3) == transfer_function(ROW_SHIFT, 3)
    U = complete(OutputPair([[1]], [[[0]]]))
    S = transfer_function(U, 3)
    assert U.m == 1 and S.max_abs_diff(FormalSeries.from_scalars({"1": 1}, 1, 3)) <= 1e-12
    U = complete(OutputPair([[np.sqrt(3) / 2]], [[[0.5]]]))
    expected = FormalSeries.from_scalars({"": -0.5, "1": 0.75, "11": 0.375, "111": 0.1875}, 1, 3)
    assert transfer_function(U, 3).max_abs_diff(expected) <= 1e-12


def test_completion_rejects_expansive_pair():
    with pytest.raises(NotContractiveError):
        coisometry_completion(OutputPair([[1.0]], [[[0.5]]]))


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_completion_is_coisometric(seed):
    rng = np.random.default_rng(seed)
    pair = random_contractive_output_pair(int(rng.integers(1, 4)), 2, 2, rng, norm=float(rng.uniform(0.3, 1)))
    U = complete(pair)
    assert classify(U, 1e-10)["coisometric"]
    assert kernel_KS(transfer_function(U, 3)).max_abs_diff(kernel_KCA(pair, 3)) <= 1e-10


def test_canonical_factor_is_deterministic(rng):
    G = rng.standard_normal((4, 2)) + 1j * rng.standard_normal((4, 2))
    M = G @ G.conj().T
    F = canonical_factor(M)
    assert F.shape == (4, 2)
    assert np.allclose(F @ F.conj().T, M)
    assert np.allclose(np.triu(F, 1), 0)
    assert np.all(np.diag(F).real > 0) and np.allclose(np.diag(F).imag, 0)
    W = random_unitary(2, rng)
    assert np.allclose(canonical_factor((G @ W) @ (G @ W).conj().T), F)


def test_unique_B_examples():
    S = FormalSeries.from_scalars({"1": 1}, 1, 3)
    assert np.allclose(unique_B_from_S(OutputPair([[1]], [[[0]]]), S), [[[1]]])
    theta = transfer_function(ROW_SHIFT, 3)
    B = unique_B_from_S(OutputPair([[1]], np.zeros((2, 1, 1))), theta)
    assert np.allclose(B[0], [[1, 0]]) and np.allclose(B[1], [[0, 1]])
    with pytest.raises(KernelMismatchError):
        unique_B_from_S(OutputPair([[1]], [[[0]]]), FormalSeries.from_scalars({"1": 2}, 1, 3))


def test_unique_B_needs_observability():
    pair = OutputPair([[1, 0]], np.zeros((1, 2, 2)))
    with pytest.raises(NotObservableError):
        unique_B_from_S(pair, FormalSeries.from_scalars({"1": 1}, 1, 3))


def test_unique_B_random(rng):
    for _ in range(5):
        U = random_coisometric_realization(2, 2, 1, rng)
        B = unique_B_from_S(U.output_pair, transfer_function(U, 4), 4)
        assert np.max(np.abs(B - U.B)) <= 1e-8


def test_unitary_equivalence_examples(rng):
    U = random_coisometric_realization(2, 3, 1, rng)
    assert np.allclose(unitary_equivalence(U, U), np.eye(3), atol=1e-8)
    R = random_unitary(3, rng)
    assert np.allclose(unitary_equivalence(U, U.rotate_state(R)), R, atol=1e-8)
    V = random_coisometric_realization(2, 2, 1, rng)
    assert unitary_equivalence(U, V) is None


def test_json_round_trip(rng):
    U = random_contractive_colligation(2, 2, 3, 1, rng)
    V = Colligation.from_json(U.to_json())
    assert all(np.array_equal(getattr(U, k), getattr(V, k)) for k in "ABCD")
    pair = InputPair(rng.standard_normal((2, 2, 2)), rng.standard_normal((2, 1)))
    back = InputPair.from_json(pair.to_json())
    assert np.array_equal(back.Z, pair.Z) and np.array_equal(back.X, pair.X)
