import math

import numpy as np
import pytest

import chamberwalk as cw
from chamberwalk.core import CapacityError
from chamberwalk.glauber import comparable_pairs, grid_edges


def test_grid_edges():
    assert set(grid_edges(2, 2)) == {(0, 1), (0, 2), (1, 3), (2, 3)}
    assert len(grid_edges(1, 4)) == 3


def test_ising_zero_beta_uniform():
    sys_ = cw.ising_system(2, 2, beta=0.0)
    _, pi = cw.stationary_distribution(sys_)
    assert np.allclose(pi, 1 / 16, atol=1e-14)


def test_ising_rejects_negative_beta_and_capacity():
    with pytest.raises(ValueError):
        cw.ising_system(2, 2, beta=-0.5)
    with pytest.raises(CapacityError):
        cw.ising_system(5, 5, beta=0.1)


def test_conditional_values():
    sys_ = cw.ising_system(1, 2, beta=0.0)
    p = cw.conditional_at_site(sys_, (1, 1), 0)
    assert np.allclose(p, [0.5, 0.5], atol=1e-12)

    sys1 = cw.ising_system(1, 2, beta=1.0)
    p = cw.conditional_at_site(sys1, (1, 1), 0)
    expect = math.e / (math.e + math.exp(-1))
    assert p[1] == pytest.approx(expect, abs=1e-12)
    assert p[1] == pytest.approx(0.8808, abs=1e-4)
    assert p.sum() == pytest.approx(1.0, abs=1e-12)


def test_product_conditional_ignores_rest():
    sys_ = cw.product_system(3, [0.7, 0.5, 0.2])
    for other in ((1, 1, 1), (1, -1, -1), (-1, -1, 1)):
        p = cw.conditional_at_site(sys_, other, 0)
        assert p[1] == pytest.approx(0.7, abs=1e-12)


def test_glauber_step_inverse_cdf_convention():
    sys_ = cw.ising_system(2, 2, beta=0.3)
    sigma = (1, -1, 1, -1)
    out = cw.glauber_step(sys_, sigma, 1, 0.0)
    assert out[1] == -1  # v=0 picks the minimum spin with positive mass
    assert out[0] == sigma[0] and out[2] == sigma[2]
    out_hi = cw.glauber_step(sys_, sigma, 1, 1.0 - 1e-12)
    assert out_hi[1] == 1


def test_glauber_step_beta_zero_ignores_neighbors():
    sys_ = cw.ising_system(2, 2, beta=0.0)
    for v in (0.2, 0.7):
        results = {
            cw.glauber_step(sys_, sigma, 0, v)[0]
            for sigma in sys_.configurations()
        }
        assert len(results) == 1


@pytest.mark.parametrize("shape,beta", [((2, 2), 0.0), ((2, 2), 0.3), ((2, 2), 1.0),
                                        ((1, 4), 0.3), ((1, 4), 1.0)])
def test_check_monotone_ising(shape, beta):
    sys_ = cw.ising_system(shape[0], shape[1], beta)
    ok, witness = cw.check_monotone(sys_)
    assert ok, witness


def test_check_monotone_product():
    ok, _ = cw.check_monotone(cw.product_system(3))
    assert ok


def test_check_monotone_rejects_antiferromagnet():
    def log_weight(sigma):
        return -1.0 * sigma[0] * sigma[1]

    sys_ = cw.MonotoneSystem(n_sites=2, spins=(-1, 1), log_weight=log_weight)
    ok, witness = cw.check_monotone(sys_)
    assert not ok
    sigma, tau, u = witness
    assert all(a <= b for a, b in zip(sigma, tau))


@pytest.mark.parametrize("shape,beta", [((2, 2), 0.0), ((2, 2), 0.3), ((2, 2), 1.0),
                                        ((1, 4), 0.0), ((1, 4), 0.3), ((1, 4), 1.0)])
def test_grand_coupling_preserves_order(shape, beta):
    sys_ = cw.ising_system(shape[0], shape[1], beta)
    configs = sys_.configurations()
    v_grid = (np.arange(64) + 0.5) / 64
    for sigma, tau in comparable_pairs(configs):
        for u in range(sys_.n_sites):
            for v in v_grid:
                a = cw.glauber_step(sys_, sigma, u, v)
                b = cw.glauber_step(sys_, tau, u, v)
                assert all(x <= y for x, y in zip(a, b))


def test_glauber_matrix_stochastic_and_stationary():
    for sys_ in (cw.ising_system(2, 2, 0.3), cw.ising_system(1, 4, 1.0)):
        _, pi, P = cw.glauber_matrix(sys_)
        assert np.allclose(P.sum(axis=1), 1.0, atol=1e-12)
        assert np.abs(pi @ P - pi).max() < 1e-10


def test_separation_t0_and_two_site_value():
    sys_ = cw.product_system(2)
    s0, _ = cw.glauber_separation_exact(sys_, 0)
    assert s0 == pytest.approx(1.0)
    # independent fair spins: s(t) = P(some site never picked)
    for t in (1, 2, 3, 5):
        s, ratio = cw.glauber_separation_exact(sys_, t)
        assert s == pytest.approx(cw.coupon_survival_uniform(2, t), abs=1e-12)
        assert s >= ratio - 1e-12
    s2, _ = cw.glauber_separation_exact(sys_, 2)
    assert s2 == pytest.approx(0.5, abs=1e-12)


def test_coupon_survival_values():
    assert cw.coupon_survival_uniform(2, 2) == pytest.approx(0.5)
    assert cw.coupon_survival_uniform(4, 0) == 1.0
    assert cw.coupon_survival_uniform(4, 3) == 1.0  # t < n
    v = cw.coupon_survival_uniform(9, 30)
    assert 0 < v < 1


def test_coupon_survival_matches_mc():
    rng = np.random.default_rng(12)
    n, t, trials = 9, 30, 100_000
    picks = rng.integers(0, n, size=(trials, t))
    p = np.mean([len(set(row)) < n for row in picks])
    exact = cw.coupon_survival_uniform(n, t)
    se = np.sqrt(exact * (1 - exact) / trials)
    assert abs(p - exact) < 4 * se


def test_separation_dominates_coupon_survival():
    for sys_ in (
        cw.ising_system(2, 2, 0.0),
        cw.ising_system(2, 2, 0.3),
        cw.ising_system(1, 4, 0.3),
    ):
        prof = cw.glauber_separation_profile(sys_, range(1, 41))
        for t in range(1, 41):
            assert prof[t][0] >= cw.coupon_survival_uniform(sys_.n_sites, t) - 1e-9


def test_coverage_conditioned_bound():
    # conditioned on all sites selected, the bottom state is not overweighted
    for sys_ in (cw.ising_system(2, 2, 0.3), cw.ising_system(1, 4, 0.3)):
        configs, piv = cw.stationary_distribution(sys_)
        idx = {c: i for i, c in enumerate(configs)}
        _, prof = cw.coverage_conditioned_profile(sys_, range(sys_.n_sites, 31))
        for t, (law, p_cov) in prof.items():
            assert law[idx[sys_.bottom]] <= piv[idx[sys_.bottom]] + 1e-9
            expect_cov = 1.0 - cw.coupon_survival_uniform(sys_.n_sites, t)
            assert p_cov == pytest.approx(expect_cov, abs=1e-10)


def test_monotone_lower_bounds_values():
    b = cw.monotone_lower_bounds(9, 1.0)
    assert b.sep_time == pytest.approx(9 * math.log(9) - 9, abs=1e-3)
    assert b.sep_time == pytest.approx(10.775, abs=1e-3)
    assert b.sep_bound == pytest.approx(1 - math.exp(-math.e), abs=1e-12)
    assert b.sep_bound == pytest.approx(0.93402, abs=1e-5)
    assert b.tv_bound == pytest.approx(b.sep_bound / 4, abs=1e-15)
    big = cw.monotone_lower_bounds(9, 20.0)
    assert big.sep_bound == pytest.approx(1.0)
    assert big.tv_bound == pytest.approx(0.25)
    with pytest.raises(ValueError):
        cw.monotone_lower_bounds(9, 0.0)
