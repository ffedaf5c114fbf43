import math

import numpy as np
import pytest

from ckmc.pole_zrp import (
    ZrpEnsemble, ZrpError, ZrpState, default_q_max, enumerate_states, exact_height_log_pmf,
    exact_height_pmf, exact_p2_expectation, p2_given_height, rate_C, rate_C_prime,
    rate_C_second, simulate_zrp, u_crit, zrp_moves,
)


@pytest.mark.parametrize("ell,beta", [(4, 1.5), (10, 2.0), (37, 1.2), (200, 1.5)])
def test_pmf_ratio_identity(ell, beta):
    lp = exact_height_log_pmf(ell, beta)
    q = np.arange(len(lp) - 1)
    expect = (-2 * beta + np.log((2 * q + ell) * (2 * q + ell - 1))
              - np.log((2 * q + 2) * (2 * q + 1)))
    assert np.allclose(np.diff(lp), expect, atol=1e-11, rtol=0)
    assert np.exp(lp).sum() == pytest.approx(1.0, abs=1e-12)


def test_small_window_ratio():
    pmf = exact_height_pmf(4, 1.7)
    assert pmf[1] / pmf[0] == pytest.approx(6 * math.exp(-3.4), rel=1e-13)


@pytest.mark.parametrize("ell", [40, 100, 400])
def test_mode_near_critical_height(ell):
    beta = 1.5
    qc = u_crit(beta) * ell
    mode = ZrpEnsemble(ell, beta).mode()
    assert abs(mode - qc) <= 0.05 * ell + 1


def test_q_max_too_small_raises():
    with pytest.raises(ZrpError):
        exact_height_pmf(20, 1.5, q_max=3)


def test_beta_below_summability_raises():
    with pytest.raises(ZrpError):
        exact_height_pmf(10, 0.6)


def test_default_q_max_tail():
    qm = default_q_max(20, 1.5)
    lp = exact_height_log_pmf(20, 1.5, q_max=2 * qm)
    assert np.exp(lp[qm + 1:]).sum() < 1e-14


def test_p2_given_height_values():
    assert p2_given_height(np.array([1, 3]), 10).tolist() == pytest.approx([2 / 10, 6 / 14])
    assert p2_given_height(np.array([0, 1, 5]), 2).tolist() == [1.0, 1.0, 1.0]
    assert p2_given_height(np.array([0]), 10).tolist() == [0.0]


def test_p2_by_enumeration():
    """Conditional law of p = 2 checked by counting unimodal windows."""
    for ell in (3, 4, 5):
        states = enumerate_states(ell, 4)
        for q in range(1, 4):
            at_q = [s for s in states if s.height == q]
            frac = np.mean([s.pole_width == 2 for s in at_q])
            assert frac == pytest.approx(2 * q / (2 * q + ell - 2))
            assert len(at_q) == math.comb(2 * q + ell - 2, 2 * q)


def test_p2_window_of_two_is_always_two():
    assert exact_p2_expectation(2, 1.5) == pytest.approx(1.0)


def test_p2_limit():
    vals = [exact_p2_expectation(ell, 1.5) for ell in (10, 20, 40, 80)]
    gaps = [abs(v - math.exp(-1.5)) for v in vals]
    assert all(a > b for a, b in zip(gaps, gaps[1:]))
    # approached from below; by ell = 80 the gap is at round-off level
    assert all(v < math.exp(-1.5) + 1e-15 for v in vals)
    assert gaps[-1] < 1e-13
    assert ZrpEnsemble(40, 1.5).p2_expectation() == pytest.approx(vals[2], rel=1e-14)


@pytest.mark.parametrize("beta", [1.2, 2.0, 3.0])
def test_rate_C_critical_point(beta):
    uc = u_crit(beta)
    assert abs(rate_C(uc, beta)) < 1e-12
    assert abs(rate_C_prime(uc, beta)) < 1e-12


def test_rate_C_derivatives():
    beta = 1.5
    for u in np.linspace(0.05, 5, 25):
        h = 1e-5 * u
        fd = (rate_C(u + h, beta) - rate_C(u - h, beta)) / (2 * h)
        assert fd == pytest.approx(rate_C_prime(u, beta), abs=1e-6)
    assert rate_C_second(1.0) == pytest.approx(2 / 3)
    with pytest.raises(ZrpError):
        rate_C(0.0, beta)


def test_ldp_shape():
    beta = 1.5
    uc = u_crit(beta)
    lp400 = exact_height_log_pmf(400, beta)
    lp200 = exact_height_log_pmf(200, beta)
    for u in (uc / 2, uc, 2 * uc):
        a = -lp400[int(u * 400)] / 400
        b = -lp200[int(u * 200)] / 200
        assert a == pytest.approx(rate_C(u, beta), abs=0.02)
        assert abs(a - b) < 0.02


def test_state_invariants():
    s = ZrpState.from_heights([0, 1, 2, 2, 1])
    assert s.height == 2 and s.pole_width == 2 and s.ell == 5
    assert sum(s.eta) == 0
    with pytest.raises(ZrpError):
        ZrpState((1, 0, 0))
    with pytest.raises(ZrpError):
        ZrpState.from_heights([0, 1, 0])


def test_detailed_balance_on_enumerated_states():
    beta = 1.5
    for ell in (2, 3, 5):
        states = set(enumerate_states(ell, 3))
        for s in states:
            for t, r in zrp_moves(s, beta):
                back = dict(zrp_moves(t, beta))
                assert s in back
                lhs = r * math.exp(-beta * s.log_weight_factor)
                rhs = back[s] * math.exp(-beta * t.log_weight_factor)
                assert lhs == pytest.approx(rhs, rel=1e-13)
                assert sum(t.eta) == 0


def test_moves_conserve_balance():
    s = ZrpState.from_heights([0, 1, 1, 0])
    for t, _ in zrp_moves(s, 2.0):
        pos = sum(e for e in t.eta if e > 0)
        assert pos == -sum(e for e in t.eta if e < 0)


def test_sampler_small_run():
    st = simulate_zrp(10, 1.5, 200_000, seed=3)
    exact = exact_height_pmf(10, 1.5)
    assert st.tv_distance(exact) < 0.05
    assert abs(st.p2_mean - exact_p2_expectation(10, 1.5)) < 5 * st.p2_stderr + 0.01
    assert st.cap_hit_fraction < 1e-6


def test_sampler_is_seeded():
    a = simulate_zrp(8, 1.5, 20_000, seed=5)
    b = simulate_zrp(8, 1.5, 20_000, seed=5)
    assert np.array_equal(a.pmf, b.pmf) and a.p2_mean == b.p2_mean
