import math

import numpy as np
import pytest

from wsq import ParameterError
from wsq import conditions as cond, constructor as cons, indices


def base_seq():
    return cons.build_from_growth_control(cons.exp_pow(2.0), cons.factorial_nodes())


def test_first_quotients():
    seq = base_seq()
    assert seq.log_quotient(0) == 0.0
    assert seq.log_quotient(1) == 2.0
    for p in (2, 3, 4, 5):
        assert seq.log_quotient(p) == 4.0
    assert seq.log_quotient(6) == 64.0
    assert seq.log_quotient(23) == 64.0
    assert seq.log_quotient(24) == 2.0 ** 24


def test_output_is_weight_sequence():
    seq = base_seq()
    assert cond.check_lc(seq, 2 ** 14).holds
    q = seq.log_quotients(seq.overflow_horizon + 1)
    assert q[-1] > q[0]


def test_domination_on_random_points():
    g = cons.exp_pow(2.0)
    seq = base_seq()
    rng = np.random.default_rng(3)
    for p in rng.integers(0, seq.overflow_horizon, 500):
        assert seq.log_quotient(int(p)) <= g.log(int(p))
    assert cons.strictly_approaches(seq, g, cons.factorial_nodes(), seq.overflow_horizon)


def test_recursive_and_geometric_nodes():
    assert cons.recursive_nodes().upto(100) == [0, 1, 2, 5, 16, 65]
    assert cons.geometric_nodes(2.0).upto(40) == [0, 2, 4, 8, 16, 32]
    assert cons.explicit_nodes([0, 3, 7]).upto(20) == [0, 3, 7, 11, 15, 19]
    with pytest.raises(ParameterError):
        cons.explicit_nodes([1, 2])


def test_growth_control_validation():
    with pytest.raises(ParameterError):
        cons.custom_control([0.0, 1.0, 1.0]).validate(2)
    with pytest.raises(ParameterError):
        cons.custom_control([0.5, 1.0]).validate(1)
    with pytest.raises(ParameterError):
        cons.exp_pow(1.0)
    cons.control_product(cons.exp_pow(2.0), cons.poly_shift(1.0)).validate()


def test_prescribe_gamma_contracts():
    g, nodes = cons.exp_pow(2.0), cons.factorial_nodes()
    zero = cons.prescribe_gamma(g, nodes, 0.0)
    assert np.array_equal(zero.log_quotients(1000), base_seq().log_quotients(1000))
    m = cons.prescribe_gamma(g, nodes, 1.5)
    for pj in nodes.upto(m.overflow_horizon):
        want = g.log(pj) + 1.5 * math.log1p(pj)
        assert abs(m.log_quotient(pj) - want) <= 1e-12 * max(1.0, want)
    with pytest.raises(ParameterError):
        cons.prescribe_gamma(g, cons.geometric_nodes(2.0), 1.0)
    with pytest.raises(ParameterError):
        cons.prescribe_gamma(g, nodes, -1.0)


def test_gamma_additivity():
    g, nodes = cons.exp_pow(2.0), cons.factorial_nodes()
    base = indices.gamma_index(base_seq(), 2 ** 14)
    for beta in (1.0, 2.5):
        br = indices.gamma_index(cons.prescribe_gamma(g, nodes, beta), 2 ** 14)
        assert br.overlaps(base.shifted(beta), slack=indices.BISECT_TOL)


def test_divergent_ratio_breaks_almost_increasing():
    seq = base_seq()
    P = seq.overflow_horizon
    lp = np.log(np.arange(1, P + 2, dtype=float))
    for beta in (0.25, 1.0, 2.0):
        v = cond.check_almost_increasing(-beta * lp, base_steps=seq.log_steps(P + 1))
        assert v.refuted, beta
        # the violating pair spans one constant block ending before the next node
        assert v.counterexample["q"] > v.counterexample["p"]


def test_corollary_sm_not_dc():
    s0 = cons.corollary_sm_not_dc(0.0)
    v = cond.check_sm(s0)
    assert v.holds and 2.0 <= v.witness["H"] <= 2.2
    s1 = cons.corollary_sm_not_dc(1.0)
    v = cond.check_dc(s1)
    assert v.refuted and v.counterexample["p"] in cons.factorial_nodes().upto(s1.overflow_horizon)
    assert indices.gamma_index(s1, 2 ** 14).contains(1.0)


def test_corollary_not_sm():
    s0 = cons.corollary_not_sm(0.0)
    assert cond.check_sm(s0).refuted
    assert cond.check_lc(s0).holds
    assert indices.gamma_index(cons.corollary_not_sm(1.0)).contains(1.0)


def test_uniform_controls():
    yes = cons.uniform_controls(cons.exp_pow, cons.poly_shift, [(2.0, 2.5, 1.0), (3.0, 3.1, 4.0)])
    assert yes.status is cond.Status.HOLDS
    no = cons.uniform_controls(cons.poly_shift, cons.exp_pow, [(1.0, 3.0, 2.0)])
    assert no.status is cond.Status.REFUTED
    same = cons.uniform_controls(cons.exp_pow, cons.poly_shift, [(2.0, 2.0, 1.0)])
    assert same.status is cond.Status.REFUTED


def test_oscillating_diagnostics():
    rows = cons.oscillating_diagnostics(5)
    by_n = {r["n"]: r for r in rows}
    assert by_n[2]["root_at_node"] == pytest.approx(2.0)
    for n in (3, 4, 5):
        if n in by_n:
            assert by_n[n]["root_at_block_end"] == pytest.approx(n ** (1 / n), rel=1e-12)
    assert cond.check_sm(cons.oscillating_sm_example()).refuted
