"""Exact multiplication and cost-model unit tests."""

import numpy as np
import pytest

from convmm.exact import (BlockingScheme, blocked_multiply, blocked_rect_multiply,
                          best_exponent, exponent_calculator, naive_multiply,
                          stpp_batch_multiply, threshold_calculator)


def test_naive_trivia():
    A = np.arange(9.0).reshape(3, 3)
    assert np.array_equal(naive_multiply(np.eye(3), A), A)
    assert naive_multiply(np.array([[2.0]]), np.array([[3.0]]))[0, 0] == 6.0


def test_naive_associativity():
    rng = np.random.default_rng(1)
    A, B, C = (rng.standard_normal((6, 6)) for _ in range(3))
    lhs = naive_multiply(naive_multiply(A, B), C)
    rhs = naive_multiply(A, naive_multiply(B, C))
    assert np.abs(lhs - rhs).max() < 1e-9


def test_batch_known_product():
    A1 = np.array([[1.0, 2.0], [3.0, 4.0]])
    B1 = np.array([[5.0, 6.0], [7.0, 8.0]])
    C1, C2 = stpp_batch_multiply(3, 1, [A1, np.eye(2)], [B1, np.eye(2)])
    assert np.abs(C1 - [[19, 22], [43, 50]]).max() < 1e-10
    assert np.abs(C2 - np.eye(2)).max() < 1e-10


def test_batch_random_m4_n2():
    rng = np.random.default_rng(2)
    As = [rng.standard_normal((9, 9)) for _ in range(4)]
    Bs = [rng.standard_normal((9, 9)) for _ in range(4)]
    outs = stpp_batch_multiply(4, 2, As, Bs)
    for A, B, C in zip(As, Bs, outs):
        assert np.abs(C - A @ B).max() < 1e-9 * np.linalg.norm(A) * np.linalg.norm(B)


def test_batch_validation_errors():
    with pytest.raises(ValueError):
        stpp_batch_multiply(3, 1, [np.eye(2)], [np.eye(2)])  # wrong batch count
    with pytest.raises(ValueError):
        stpp_batch_multiply(3, 1, [np.eye(3), np.eye(3)], [np.eye(3), np.eye(3)])


def test_batch_bilinearity():
    rng = np.random.default_rng(3)
    A, A2, B = (rng.standard_normal((2, 2)) for _ in range(3))
    I = np.eye(2)
    lhs = stpp_batch_multiply(3, 1, [2 * A - 3 * A2, I], [B, I])[0]
    CA = stpp_batch_multiply(3, 1, [A, I], [B, I])[0]
    CA2 = stpp_batch_multiply(3, 1, [A2, I], [B, I])[0]
    assert np.abs(lhs - (2 * CA - 3 * CA2)).max() < 1e-9


def test_batch_order_permutation():
    rng = np.random.default_rng(4)
    As = [rng.standard_normal((2, 2)) for _ in range(2)]
    Bs = [rng.standard_normal((2, 2)) for _ in range(2)]
    outs = stpp_batch_multiply(3, 1, As, Bs)
    swapped = stpp_batch_multiply(3, 1, As[::-1], Bs[::-1])
    assert np.allclose(outs[0], swapped[1]) and np.allclose(outs[1], swapped[0])


def test_blocking_scheme_fields():
    s = BlockingScheme(4, 2)
    assert (s.q, s.k, s.n0) == (9, 4, 36)
    s2 = BlockingScheme.for_size(10)
    assert s2.N == 1 and s2.n0 >= 10


@pytest.mark.parametrize("m,N", [(3, 1), (3, 2), (4, 1)])
def test_blocked_matches_naive(m, N):
    n0 = (m - 1) ** N * 2**N
    rng = np.random.default_rng(10 * m + N)
    A = rng.standard_normal((n0, n0))
    B = rng.standard_normal((n0, n0))
    C = blocked_multiply(A, B, m, N)
    assert np.abs(C - A @ B).max() < 1e-8 * np.linalg.norm(A) * np.linalg.norm(B)


def test_blocked_identity_passthrough():
    rng = np.random.default_rng(11)
    B = rng.standard_normal((16, 16))
    assert np.abs(blocked_multiply(np.eye(16), B, 3, 2) - B).max() < 1e-9


def test_blocked_padding():
    rng = np.random.default_rng(12)
    A = rng.standard_normal((3, 3))
    B = rng.standard_normal((3, 3))
    C = blocked_multiply(A, B, 3, 1)
    assert C.shape == (3, 3)
    assert np.abs(C - A @ B).max() < 1e-9


def test_blocked_too_large_errors():
    with pytest.raises(ValueError):
        blocked_multiply(np.zeros((5, 5)), np.zeros((5, 5)), 3, 1)


def test_blocked_parallel_deterministic():
    rng = np.random.default_rng(13)
    A = rng.standard_normal((16, 16))
    B = rng.standard_normal((16, 16))
    seq = blocked_multiply(A, B, 3, 2, parallel=False)
    par = blocked_multiply(A, B, 3, 2, parallel=True)
    assert np.array_equal(seq, par)


def test_blocked_rect_multiply():
    rng = np.random.default_rng(14)
    X = rng.standard_normal((7, 11))
    Y = rng.standard_normal((11, 5))
    C = blocked_rect_multiply(X, Y, m=3, N=1)
    assert np.abs(C - X @ Y).max() < 1e-9


def test_exponent_calculator_values():
    rep = exponent_calculator(8)
    assert abs(rep.exponent - 2.89) < 0.005
    best = best_exponent()
    assert abs(best.m - 20) <= 1
    assert abs(best.exponent - 2.85) < 0.005


def test_exponent_limits_to_three():
    vals = [exponent_calculator(m).exponent for m in (30, 100, 1000, 10000)]
    assert all(x < y for x, y in zip(vals, vals[1:]))
    assert vals[-1] < 3.0


def test_exponent_rejects_small_m():
    with pytest.raises(ValueError):
        exponent_calculator(2)


def test_threshold_is_minimal_crossover():
    import math
    rep = threshold_calculator(10, 2.0)
    assert rep.N >= 1

    def sides(m, C, N):
        lhs = math.log(C) + 3 * N * math.log(m) + math.log(3 * N * math.log2(m))
        rhs = N * math.log(2) + 2 * N * math.log(m - 1) + math.log(2 * (m - 1) ** N - 1)
        return lhs, rhs

    lhs, rhs = sides(10, 2.0, rep.N)
    assert lhs < rhs
    if rep.N > 1:
        lhs, rhs = sides(10, 2.0, rep.N - 1)
        assert lhs >= rhs
    assert rep.n == 18 ** rep.N


def test_threshold_monotone_in_constant():
    assert threshold_calculator(10, 5.0).N >= threshold_calculator(10, 2.0).N
