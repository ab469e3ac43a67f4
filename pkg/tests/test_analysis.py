"""ATPQ counting, spectral closed forms, metrics and SVD baselines."""

import math

import numpy as np
import pytest

from convmm.analysis import (DISTRIBUTIONS, DistributionSpec, atpq_count,
                             atpq_count_naive, best_rank_r, c_ab_formula,
                             error_metrics, gamma_exponent, indicator_spectrum,
                             lower_bound_check, rank_diagnostics, s_delta,
                             t_delta, truncation_error_bound)
from convmm.constructions import IndexingTriplet, ap_triplet, vanilla_tpp, verify_tpp
from convmm.groups import AbelianGroup, cyclic


# ----------------------------------------------------------------------- atpq


def test_atpq_known_counts():
    assert atpq_count(ap_triplet(4, 2)).rho == 128
    assert atpq_count(vanilla_tpp(3, 3, 3)).rho == 27
    assert atpq_count(ap_triplet(8, 2)).rho == 2048 == 8**6 // 128


def test_atpq_matches_naive_enumeration():
    for t in (ap_triplet(3, 2), ap_triplet(4, 3), vanilla_tpp(2, 2, 3)):
        assert atpq_count(t).rho == atpq_count_naive(t)


def test_atpq_buckets_sum_to_rho():
    rep = atpq_count(ap_triplet(6, 2))
    assert rep.buckets.shape == (6, 6)
    assert int(rep.buckets.sum()) == rep.rho
    assert rep.collisions == rep.rho - 6**3


def test_atpq_rho_n3_iff_tpp():
    for t in (vanilla_tpp(2, 3, 4), ap_triplet(5, 5), ap_triplet(6, 3), ap_triplet(4, 2)):
        ns, nt, nu = t.sizes
        assert (atpq_count(t).rho == ns * nt * nu) == verify_tpp(t)


def test_atpq_size_cap():
    with pytest.raises(ValueError):
        atpq_count(vanilla_tpp(100, 2, 2))


def test_lower_bound_examples():
    assert lower_bound_check(ap_triplet(4, 2)) == 0
    assert lower_bound_check(vanilla_tpp(2, 2, 2)) == 0
    assert atpq_count(vanilla_tpp(2, 2, 2)).rho == 8


def test_lower_bound_random_triplets():
    n = 6
    g = cyclic(2 * n * n)
    rng = np.random.default_rng(0)
    for _ in range(20):
        S, T, U = (rng.choice(g.size, size=n, replace=False) for _ in range(3))
        t = IndexingTriplet(g, S, T, U)
        assert lower_bound_check(t) >= 0


# -------------------------------------------------------------- distributions


def test_distribution_moments():
    d = DISTRIBUTIONS["rademacher"]
    assert (d.mu, d.nu, d.sigma2) == (0.0, 1.0, 1.0)
    b = DISTRIBUTIONS["bernoulli01"]
    assert b.sigma2 == pytest.approx(0.25)
    fg = DISTRIBUTIONS["folded_gaussian"]
    assert fg.sigma2 == pytest.approx(1 - 2 / math.pi)


def test_distribution_sampling_statistics():
    rng = np.random.default_rng(1)
    for name, d in DISTRIBUTIONS.items():
        x = d.sample(rng, 20000)
        assert abs(x.mean() - d.mu) < 0.05, name
        assert abs((x**2).mean() - d.nu) < 0.05, name


def test_distribution_validation():
    with pytest.raises(ValueError):
        DistributionSpec("bad", mu=2.0, nu=1.0, p=1.0)   # nu < mu^2
    with pytest.raises(ValueError):
        DistributionSpec("const", mu=1.0, nu=1.0, p=1.0)  # zero variance


def test_gamma_exponent_positive():
    g = gamma_exponent(DISTRIBUTIONS["rademacher"], DISTRIBUTIONS["bernoulli01"])
    assert g > 0
    assert truncation_error_bound(101, 50, DISTRIBUTIONS["rademacher"],
                                  DISTRIBUTIONS["rademacher"]) > 0


# ------------------------------------------------------------- closed forms


def _indicator_grid(m, i):
    g = np.zeros((m, m, m))
    x = np.arange(1, m)
    if i == 1:
        g[np.repeat(x, m - 1), np.tile(x, m - 1), 0] = 1
    elif i == 2:
        g[0, np.repeat(x, m - 1), np.tile(x, m - 1)] = 1
    else:
        g[np.repeat(x, m - 1), 0, np.tile(x, m - 1)] = 1
    return g


def test_indicator_spectrum_examples():
    assert indicator_spectrum(3, 1, (0, 0, 2)) == pytest.approx(4 / 3**1.5)
    assert indicator_spectrum(3, 1, (0, 1, 0)) == pytest.approx(-2 / 3**1.5)
    assert indicator_spectrum(5, 2, (3, 1, 2)) == pytest.approx(1 / 5**1.5)


@pytest.mark.parametrize("m", [3, 5, 7])
def test_indicator_spectrum_matches_dft(m):
    for i in (1, 2, 3):
        ref = np.fft.fftn(_indicator_grid(m, i)) / m**1.5
        for xi in np.ndindex(m, m, m):
            assert abs(indicator_spectrum(m, i, xi) - ref[xi].real) < 1e-12
            assert abs(ref[xi].imag) < 1e-12


@pytest.mark.parametrize("m", [3, 5, 7])
def test_t_delta_matches_direct_sum(m):
    grid = _indicator_grid(m, 1) + _indicator_grid(m, 3)
    ref = np.fft.fftn(grid)  # sum over X1 u X3 of omega^{-x.delta}
    for delta in np.ndindex(m, m, m):
        # t_delta uses the +x.delta convention; conjugate symmetry of a real grid
        assert abs(t_delta(m, delta) - np.conj(ref[delta])) < 1e-10


def test_t_delta_examples():
    assert t_delta(5, (0, 0, 0)) == pytest.approx(32)
    assert abs(t_delta(5, (1, 2, 3))) <= 2 + 1e-12


@pytest.mark.parametrize("m", [3, 5, 6])
def test_s_delta_matches_brute_force(m):
    for r in range(m + 1):
        comp = np.zeros((m, m, m), dtype=bool)
        comp[r:, r:, r:] = True
        for delta in np.ndindex(m, m, m):
            shifted = np.roll(comp, shift=tuple(-d for d in delta), axis=(0, 1, 2))
            assert s_delta(m, r, delta) == int(np.count_nonzero(comp & shifted))


def test_s_delta_example():
    assert s_delta(6, 2, (0, 0, 0)) == 64


def test_c_ab_examples():
    assert c_ab_formula(DISTRIBUTIONS["rademacher"], "a", 5, (0, 0, 0)) == pytest.approx(0.256)
    for m in (5, 7):
        assert c_ab_formula(DISTRIBUTIONS["rademacher"], "a", m, (1, 2, 3)) == pytest.approx(2 / m**3)
    with pytest.raises(ValueError):
        c_ab_formula(DISTRIBUTIONS["rademacher"], "c", 5, (0, 0, 0))


# ----------------------------------------------------------- metrics and SVD


def test_error_metrics_trivia():
    rng = np.random.default_rng(2)
    A = rng.standard_normal((5, 5))
    B = rng.standard_normal((5, 5))
    AB = A @ B
    assert error_metrics(AB, AB, A, B).normalized_error == 0.0
    rep = error_metrics(np.zeros_like(AB), AB, A, B)
    expect = np.linalg.norm(AB) ** 2 / (np.linalg.norm(A) ** 2 * np.linalg.norm(B) ** 2)
    assert rep.normalized_error == pytest.approx(expect)


def test_error_metrics_hand_instance():
    A = np.array([[1.0, 0.0], [0.0, 1.0]])
    B = np.array([[2.0, 0.0], [0.0, 2.0]])
    C = np.array([[2.0, 1.0], [0.0, 2.0]])
    rep = error_metrics(C, A @ B, A, B)
    # |C - AB|_F^2 = 1; |A|_F^2 = 2, |B|_F^2 = 8
    assert rep.normalized_error == pytest.approx(1 / 16)
    assert rep.absolute_error == pytest.approx(1.0)
    assert rep.max_abs_entry == pytest.approx(1.0)


def test_rank_diagnostics():
    rep = rank_diagnostics(np.eye(5))
    assert rep.rank == 5 and np.allclose(rep.singular_values, 1.0)
    assert rep.nuclear_norm == pytest.approx(5.0)
    assert rep.sum_sq_singvals == pytest.approx(5.0)
    outer = np.outer(np.arange(1, 5.0), np.arange(1, 5.0))
    assert rank_diagnostics(outer).rank == 1


def test_best_rank_r():
    M = np.diag([3.0, 2.0, 1.0])
    assert np.allclose(best_rank_r(M, 2), np.diag([3.0, 2.0, 0.0]))
    assert np.array_equal(best_rank_r(M, 3), M)
    rng = np.random.default_rng(3)
    X = rng.standard_normal((50, 50))
    sv = np.linalg.svd(X, compute_uv=False)
    resid = np.linalg.norm(X - best_rank_r(X, 10))
    assert resid == pytest.approx(math.sqrt(float((sv[10:] ** 2).sum())), rel=1e-10)
