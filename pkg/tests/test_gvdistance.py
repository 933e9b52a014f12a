import itertools
import math
from fractions import Fraction

import numpy as np
import pytest

from ldpclab import gvdistance as gv
from ldpclab.errors import (
    NonIntegralWeight,
    OutOfDomain,
    PreconditionViolated,
    StateSpaceTooLarge,
)


def test_hq_values():
    assert gv.hq(0.5, 2) == pytest.approx(1.0)
    assert gv.hq(0.0, 3) == 0.0
    assert gv.hq(2 / 3, 3) == pytest.approx(1.0)
    assert gv.hq(1.0, 2) == 0.0
    assert gv.hq(1.0, 4) == pytest.approx(math.log(3, 4))
    with pytest.raises(OutOfDomain):
        gv.hq(1.5, 2)


def test_hq_inverse():
    for q in (2, 3, 4, 7):
        for y in (0.01, 0.2, 0.5, 0.9, 0.999):
            x = gv.hq_inverse(y, q)
            assert gv.hq(x, q) == pytest.approx(y, abs=1e-10)
    assert gv.hq_inverse(0.5, 2) == pytest.approx(0.1100278644, abs=1e-9)


def test_zero_sum_probs_recurrence():
    r = gv.zero_sum_probs(2, 6)
    assert r == [1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0]
    r3 = gv.zero_sum_probs(3, 4)
    assert r3[2] == pytest.approx(0.5)
    assert r3[3] == pytest.approx(0.25)
    # closed form r_k = ((q-1)^k + (q-1)(-1)^k) / ((q-1)^k q) ... check q=5
    r5 = gv.zero_sum_probs(5, 8)
    for k in range(8 + 1):
        closed = (4 ** k + 4 * (-1) ** k) / (4 ** k * 5)
        assert r5[k] == pytest.approx(closed, abs=1e-12)


@pytest.mark.parametrize("q", [2, 3, 5])
@pytest.mark.parametrize("s", [2, 3, 4, 5, 6])
def test_zed_against_brute_convolution(q, s):
    for beta in (0.05, 0.2, (q - 1) / q):
        # distribution of one sample over F_q, convolved s times
        base = np.full(q, beta / (q - 1))
        base[0] = 1 - beta
        dist = np.zeros(q)
        dist[0] = 1.0
        for _ in range(s):
            nxt = np.zeros(q)
            for a in range(q):
                for b in range(q):
                    nxt[(a + b) % q] += dist[a] * base[b]
            dist = nxt
        # additive structure of F_q only matters through the zero count,
        # and for prime q the cyclic convolution is the field addition
        if q in (2, 3, 5):
            assert gv.zed(beta, q, s) == pytest.approx(dist[0], abs=1e-12)
        assert gv.zed(beta, q, s) == pytest.approx(gv.zed_mixture(beta, q, s), abs=1e-12)


def test_zed_triple_agreement_grid():
    for q in (2, 3, 4, 5):
        for s in range(2, 13):
            for beta in np.linspace(0.01, (q - 1) / q, 17):
                a = gv.zed(float(beta), q, s)
                b = gv.zed_mixture(float(beta), q, s)
                assert abs(a - b) < 1e-12


def test_psi_on_diagonal():
    for q, s in [(2, 3), (3, 5), (4, 7)]:
        for lam in (0.1, 0.3, (q - 1) / q):
            assert gv.psi(lam, lam, q, s) == pytest.approx(
                math.log(gv.zed(lam, q, s), q), abs=1e-12)


def test_lambda_of_beta():
    assert gv.lambda_of_beta(0.25, 2, 3) == pytest.approx(1 / 6, abs=1e-12)
    for q, s in [(2, 3), (2, 9), (3, 5), (4, 6)]:
        grid = np.linspace(1e-6, (q - 1) / q, 200)
        vals = [gv.lambda_of_beta(float(b), q, s) for b in grid]
        assert all(b2 > b1 for b1, b2 in zip(vals, vals[1:]))
        assert vals[0] < 1e-4
        assert vals[-1] == pytest.approx((q - 1) / q, abs=1e-12)


def test_phi_fixed_point_and_bounds():
    for q, s in [(2, 3), (2, 9), (3, 5)]:
        for lam in (0.05, 0.2, 0.4 * (q - 1) / q):
            val, beta = gv.phi(lam, q, s)
            assert gv.lambda_of_beta(beta, q, s) == pytest.approx(lam, abs=1e-9)
            assert val <= gv.psi(lam, lam, q, s) + 1e-12
            assert val >= -1 - 1e-12
        # endpoint
        end, beta_end = gv.phi((q - 1) / q, q, s)
        assert end == pytest.approx(-1.0, abs=1e-9)
        assert beta_end == pytest.approx((q - 1) / q, abs=1e-9)


def test_phi_matches_golden_section_minimization():
    inv = (math.sqrt(5) - 1) / 2
    for q, s in [(2, 5), (2, 9), (3, 5), (3, 9)]:
        for lam in np.linspace(0.02, (q - 1) / q - 0.02, 25):
            lam = float(lam)
            a, b = 1e-9, (q - 1) / q
            c, d = b - inv * (b - a), a + inv * (b - a)
            for _ in range(120):
                if gv.psi(lam, c, q, s) < gv.psi(lam, d, q, s):
                    b, d = d, c
                    c = b - inv * (b - a)
                else:
                    a, c = c, d
                    d = a + inv * (b - a)
            direct = gv.psi(lam, (a + b) / 2, q, s)
            assert gv.phi(lam, q, s)[0] == pytest.approx(direct, abs=1e-8)


def test_phi_rejects_weight_outside_domain():
    with pytest.raises(OutOfDomain):
        gv.phi(0.9, 2, 3)


def test_gv_params_validation():
    with pytest.raises(PreconditionViolated):
        gv.GvParams(2, 1, Fraction(1, 3), 0.1, 0.1)
    with pytest.raises(PreconditionViolated):
        gv.GvParams(2, 4, Fraction(1), 0.1, 0.1)
    with pytest.raises(PreconditionViolated):
        gv.GvParams(2, 4, Fraction(1, 3), 0.6, 0.1)
    with pytest.raises(PreconditionViolated):
        gv.GvParams(2, 4, Fraction(1, 3), 0.1, 0.99)
    p = gv.GvParams(2, 6, Fraction(1, 3), 0.11, 0.05)
    assert p.t == Fraction(4)
    assert p.certifiable()


def layer_prob_oracle(n, s, w, q):
    """Average over all placements of a block partition of the probability
    that every block's intersection with a fixed weight-w support can be
    scaled to sum to zero."""
    r = gv.zero_sum_probs(q, s)
    support = set(range(w))
    total = 0.0
    count = 0
    for perm in itertools.permutations(range(n)):
        p = 1.0
        for b in range(n // s):
            k = sum(1 for i in perm[b * s:(b + 1) * s] if i in support)
            p *= r[k]
        total += p
        count += 1
    return total / count


def test_p_lambda_exact_small_cases():
    params = gv.GvParams(2, 2, Fraction(1, 2), 0.2, 0.1)
    assert gv.p_lambda_exact(1.0, 4, params) == pytest.approx(0.0)
    assert gv.p_lambda_exact(0.25, 4, params) == -math.inf  # single nonzero
    params3 = gv.GvParams(2, 3, Fraction(1, 3), 0.2, 0.1)
    # n = 6, w = 2: hand count gives layer probability 8/20
    assert gv.p_lambda_exact(2 / 6, 6, params3) == pytest.approx(
        2 * math.log2(0.4), abs=1e-12)
    assert gv.p_lambda_exact(0.0, 6, params3) == pytest.approx(0.0)


@pytest.mark.parametrize("q,w", [(2, 2), (2, 4), (3, 3), (3, 2)])
def test_p_lambda_exact_vs_permutation_oracle(q, w):
    n, s = 6, 3
    params = gv.GvParams(q, s, Fraction(1, 3), 0.2, 0.1)
    got = gv.p_lambda_exact(w / n, n, params)
    oracle = layer_prob_oracle(n, s, w, q)
    if oracle == 0.0:
        assert got == -math.inf
    else:
        assert got == pytest.approx(float(params.t) * math.log(oracle, q), abs=1e-10)


def test_p_lambda_exact_guards():
    params = gv.GvParams(2, 3, Fraction(1, 3), 0.2, 0.1)
    with pytest.raises(PreconditionViolated):
        gv.p_lambda_exact(0.5, 8, params)
    with pytest.raises(NonIntegralWeight):
        gv.p_lambda_exact(0.35, 10, gv.GvParams(2, 2, Fraction(1, 2), 0.2, 0.1))
    big = gv.GvParams(2, 3, Fraction(1, 3), 0.2, 0.1)
    with pytest.raises(StateSpaceTooLarge):
        gv.p_lambda_exact(0.5, 3 * 100, big)


def test_p_lambda_bound_scales_linearly():
    params = gv.GvParams(2, 9, Fraction(1, 3), 0.11, 0.1)
    b1 = gv.p_lambda_bound(0.25, 36, params)
    b2 = gv.p_lambda_bound(0.25, 72, params)
    assert b2 == pytest.approx(2 * b1, rel=1e-12)
    assert b1 < 0


def test_failure_bound_behavior():
    params = gv.GvParams(2, 20, Fraction(2, 5), 0.11, 0.09)
    f1000 = gv.failure_bound(params, 1000)
    f2000 = gv.failure_bound(params, 2000)
    assert f2000 < f1000 < 1e-5
    assert f1000 == pytest.approx(1.1476605073558441e-10, rel=1e-9)
    # tiny delta keeps the bound tiny too
    small = gv.GvParams(2, 40, Fraction(1, 2), 0.02, 0.05)
    assert gv.failure_bound(small, 500) < 1e-3
    # uncertifiable rate is rejected
    with pytest.raises(PreconditionViolated):
        gv.failure_bound(gv.GvParams(2, 20, Fraction(9, 10), 0.11, 0.05), 100)


def test_s0_for_distance():
    s = gv.s0_for_distance(2, 0.11, 0.1)
    assert s == 28
    # harder target needs at least as much sparsity
    assert gv.s0_for_distance(2, 0.05, 0.1) >= s


def test_s0_main_and_smoothness():
    q, eps, rbar, b = 2, 0.1, 0.5, 3
    expect = math.ceil((b * math.log2(q) + math.log2(q / eps)) / gv.hq_inverse(1 - rbar, q))
    assert gv.s0_main(q, eps, rbar, b) == expect
    assert gv.s0_main(q, eps, 0.2, b) <= expect
    d = gv.s0_from_smoothness(3, 0.3, 2)
    assert d == math.ceil(2 / math.log(1 / (1 - 0.3 / (2 / 3)), 3))
    with pytest.raises(OutOfDomain):
        gv.s0_from_smoothness(2, 0.7, 2)


def test_certificate_outputs():
    cert = gv.certify_distance(2, 0.05, 0.1, Fraction(1, 3), 120, s=25)
    assert len(cert.rows) == 6
    alphas = [r[4] for r in cert.rows]
    assert all(a2 > a1 for a1, a2 in zip(alphas, alphas[1:]))
    csv = cert.to_csv()
    assert csv.splitlines()[0] == "lambda,beta_star,psi,phi,alpha"
    assert len(csv.splitlines()) == 7
    import json
    doc = json.loads(cert.to_json())
    assert doc["q"] == 2 and doc["s"] == 25 and len(doc["rows"]) == 6
    assert 0 <= doc["failure_probability"] <= 1
