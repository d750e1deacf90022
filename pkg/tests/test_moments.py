import math

import numpy as np
import pytest

from wsq import HorizonError, ParameterError, make_sequence, parse_spec, shift, tilde
from wsq import conditions as cond, moments
from wsq.sequences import ExplicitTable

ALL = ["gevrey:alpha=0.5", "gevrey:alpha=1", "gevrey:alpha=2", "qgevrey:q=2,sigma=2",
       "qgevrey:q=2,sigma=3", "power:tau=1,sigma=2", "power:tau=1,sigma=3", "qpp:q=2", "oscillating"]


def test_gevrey_mu0_bracket_and_quadrature():
    ker = moments.KernelSurrogate(parse_spec("gevrey:alpha=1"))
    mv = moments.moment_exact(ker, 0)
    mu0 = math.exp(mv.log_mu)
    assert 1.0 <= mu0 <= 2 + math.log(2)
    # independent oracle: scipy quad of h(1/x) = min_k k! x^-k over (0, inf)
    from scipy.integrate import quad

    def e(x):
        return math.exp(min(math.lgamma(k + 1) - k * math.log(x) for k in range(0, 200)))
    edges = [0.0] + [float(j) for j in range(1, 60)]
    total = sum(quad(e, a, b, epsabs=0, epsrel=1e-12)[0] for a, b in zip(edges, edges[1:]))
    total += quad(e, 59.0, math.inf, epsrel=1e-12)[0]
    assert mu0 == pytest.approx(total, rel=1e-8)


@pytest.mark.parametrize("spec", ALL)
def test_sandwich_all_families(spec):
    seq = parse_spec(spec)
    ker = moments.KernelSurrogate(seq)
    for p in range(min(40, seq.overflow_horizon - 4) + 1):
        u = moments.moment_upper_check(ker, p)
        assert u.ok, (spec, p, u)
        assert u.log_rel_mu >= -math.log(p + 1) - 1e-9


def test_upper_slack_gevrey2_positive():
    ker = moments.KernelSurrogate(parse_spec("gevrey:alpha=2"))
    assert all(moments.moment_upper_check(ker, p).slack > 0 for p in range(41))


def test_qpp_middle_segment_dominates():
    seq = parse_spec("qpp:q=2")
    ker = moments.KernelSurrogate(seq)
    for p in range(21):
        mv = moments.moment_exact(ker, p)
        s = seq.log_quotient(p + 1) - seq.log_quotient(p)
        assert mv.log_rel <= math.log(2 + s) + 1e-12
        assert mv.log_rel >= math.log(s) - 1e-12


def test_explicit_table_with_large_first_quotient():
    m0 = 1e6
    seq = make_sequence(ExplicitTable([math.log(m0)] + [math.log(m0) + 0.05 * (k + 1) ** 2
                                                        for k in range(60)]))
    mv = moments.moment_exact(moments.KernelSurrogate(seq), 0)
    # e = 1 on (0, m0] gives m0; the rest is at most m0 (1 + log(m_1/m_0))
    assert math.log(m0) <= mv.log_mu <= math.log(m0) + math.log(2.05)


@pytest.mark.parametrize("K", [0.5, 3.0])
def test_k_scaling(K):
    seq = parse_spec("qgevrey:q=2,sigma=2")
    for p in (0, 3, 9):
        a = moments.moment_exact(moments.KernelSurrogate(seq, K), p).log_mu
        b = moments.moment_exact(moments.KernelSurrogate(seq, 1.0), p).log_mu
        assert a == pytest.approx(b + (p + 1) * math.log(K), abs=1e-10)
        qa = moments.moment_quadrature_oracle(moments.KernelSurrogate(seq, K), p).log_mu
        assert qa == pytest.approx(a, abs=1e-8)


def test_horizon_and_parameter_errors():
    seq = parse_spec("qpp:q=2")
    ker = moments.KernelSurrogate(seq)
    with pytest.raises(HorizonError):
        moments.moment_exact(ker, seq.overflow_horizon - 1)
    with pytest.raises(ParameterError):
        moments.KernelSurrogate(seq, 0.0)
    with pytest.raises(ParameterError):
        moments.moment_upper_check(moments.KernelSurrogate(seq, 2.0), 1)


def test_tail_is_certified_and_small():
    ker = moments.KernelSurrogate(parse_spec("gevrey:alpha=0.5"))
    mv = moments.moment_exact(ker, 10)
    assert mv.certified
    assert mv.tail_bound - mv.log_mu <= math.log(1e-10)


def test_moment_table_matches_single_calls():
    seq = parse_spec("gevrey:alpha=1")
    tab = moments.moment_table(seq, 5)
    ker = moments.KernelSurrogate(seq)
    assert [m.log_mu for m in tab] == [moments.moment_exact(ker, p).log_mu for p in range(6)]


def test_classification_examples():
    g2 = moments.classify_target(parse_spec("gevrey:alpha=2"))
    assert g2.fits_LambdaM.holds and g2.fits_LambdaM_plus1.holds and g2.fits_LambdaM_tilde.holds
    assert g2.equivalent_M.holds and g2.target == "LambdaM"
    q3 = moments.classify_target(parse_spec("qgevrey:q=2,sigma=3"))
    assert q3.equivalent_M_plus1.holds and q3.fits_LambdaM.refuted and q3.target == "LambdaM+1"
    qpp = moments.classify_target(parse_spec("qpp:q=2"))
    assert qpp.equivalent_M_tilde.holds and qpp.fits_LambdaM_plus1.refuted and qpp.target == "LambdaM~"


@pytest.mark.parametrize("spec", ALL)
def test_classification_agrees_with_conditions(spec):
    tc = moments.classify_target(parse_spec(spec))
    assert tc.consistent, tc.notes


def test_sparse_sequence_extends_window():
    tc = moments.classify_target(parse_spec("oscillating"))
    assert tc.P > 40 and tc.consistent


@pytest.mark.parametrize("spec", ["qgevrey:q=2,sigma=2", "gevrey:alpha=1", "qpp:q=2"])
def test_tilde_relation_follows_sm(spec):
    seq = parse_spec(spec)
    sm = cond.check_sm(seq)
    if sm.holds:
        assert cond.equivalence(tilde(seq), shift(seq, 1)).holds
    else:
        assert cond.inclusion(tilde(seq), shift(seq, 1)).refuted


def test_series_reciprocal_cases():
    exp = moments.SeriesPoly(tuple(1 / math.factorial(k) for k in range(21)))
    r = moments.series_reciprocal(exp, 20)
    # rounding in the inputs 1/k! is amplified by up to 3^k
    for k in range(21):
        want = (-1) ** k / math.factorial(k)
        assert abs(r.coeff(k) - want) <= 64 * 2.0 ** -52 * 3.0 ** k * abs(want)
    const = moments.series_reciprocal(moments.SeriesPoly((4.0,)), 6)
    assert list(const.coeffs) == [0.25] + [0.0] * 6
    with pytest.raises(ParameterError):
        moments.series_reciprocal(moments.SeriesPoly((0.0, 1.0)), 3)


def test_series_reciprocal_random_convolution():
    rng = np.random.default_rng(4)
    for _ in range(50):
        g = rng.normal(size=21)
        g[0] = rng.choice([-1, 1]) * rng.uniform(0.5, 2.0)
        r = moments.series_reciprocal(moments.SeriesPoly(tuple(g)), 20)
        conv = np.convolve(g, np.array(r.coeffs))[:21]
        scale = np.convolve(np.abs(g), np.abs(np.array(r.coeffs)))[:21]
        want = np.zeros(21)
        want[0] = 1.0
        assert np.all(np.abs(conv - want) <= 1e-12 * np.maximum(scale, 1.0))


def test_inversion_binomial_identity():
    c = [1.0] + [0.0] * 12
    inv = moments.inversion_roundtrip(c, moments.SeriesPoly.from_derivatives([1.0] * 13))
    assert inv.b == pytest.approx([(-1.0) ** p for p in range(13)])
    assert inv.reconstructed == pytest.approx(c, abs=1e-12)
    inv = moments.inversion_roundtrip([3.0, -1.0, 2.0], moments.SeriesPoly((2.0,)))
    assert inv.b == [1.5, -0.5, 1.0] and inv.max_rel_error == 0.0


def test_derivative_roundtrip():
    s = moments.SeriesPoly.from_derivatives([2.0, 3.0, 8.0, 30.0])
    assert [s.derivative_at_zero(k) for k in range(5)] == pytest.approx([2.0, 3.0, 8.0, 30.0, 0.0])
