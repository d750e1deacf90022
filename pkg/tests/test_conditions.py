import math

import numpy as np
import pytest

from wsq import hat, make_sequence, parse_spec, shift
from wsq import conditions as cond
from wsq.sequences import ExplicitTable

H, R, I = cond.Status.HOLDS, cond.Status.REFUTED, cond.Status.INCONCLUSIVE

FAMILIES = ["gevrey:alpha=0.5", "gevrey:alpha=1", "gevrey:alpha=3", "qgevrey:q=2,sigma=2",
            "qgevrey:q=2,sigma=3", "power:tau=1,sigma=2", "power:tau=1,sigma=3", "qpp:q=2"]


def table(values):
    return make_sequence(ExplicitTable(values))


def test_lc():
    assert cond.check_lc(parse_spec("gevrey:alpha=0.5"), 10_000).holds
    v = cond.check_lc(table([0.0, 1.0, 0.5]), 2)
    assert v.refuted and v.counterexample["p"] == 1
    for spec in FAMILIES:
        assert cond.check_lc(parse_spec(spec)).holds, spec


def test_sm():
    assert cond.check_sm(parse_spec("qgevrey:q=2,sigma=3")).holds
    assert cond.check_sm(parse_spec("qpp:q=2")).refuted
    assert cond.check_sm(parse_spec("oscillating")).refuted


def test_dc():
    assert cond.check_dc(parse_spec("gevrey:alpha=3")).holds
    v = cond.check_dc(parse_spec("qgevrey:q=2,sigma=2"))
    # log m_p = (2p+1) log 2, so the smallest grid H at or above q^2 = 4 works
    assert v.holds and 4.0 <= v.witness["H"] < 4.0 * 1.25
    assert cond.check_dc(parse_spec("qgevrey:q=2,sigma=3")).refuted


def test_mg():
    for a in (0.5, 1, 3):
        assert cond.check_mg(parse_spec(f"gevrey:alpha={a}")).holds
    v = cond.check_mg(parse_spec("qgevrey:q=2,sigma=2"))
    assert v.refuted and "q" in v.counterexample


def test_alg():
    v = cond.check_alg(parse_spec("gevrey:alpha=2"))
    assert v.holds and v.witness["C1"] == pytest.approx(1.0)
    assert cond.check_alg(table([10.0, -20.0, 0.0])).refuted


def test_series_conditions():
    g1 = parse_spec("gevrey:alpha=1")
    assert cond.check_nq(g1).holds
    assert cond.check_snq(g1).holds
    assert cond.check_nq(parse_spec("const:log_m=0")).refuted
    assert cond.check_snq(parse_spec("const:log_m=0")).refuted


def test_series_tail_oracle():
    # sum_{q >= 1} q^-2 has tail past n bounded by 1/(n-1)
    q = np.arange(1, 2001, dtype=float)
    t = cond.series_tail(-2 * np.log(q))
    assert t.status is H
    exact_tail = math.pi ** 2 / 6 - float(np.sum(1 / q ** 2))
    assert math.exp(t.log_tail) >= exact_tail
    assert math.exp(t.log_tail) <= 3 * exact_tail
    assert cond.series_tail(-np.log(q)).status is R


def test_almost_increasing_by_suffix_min():
    g2 = parse_spec("gevrey:alpha=2")
    for beta, want in ((1.5, H), (2.5, R)):
        P = 4096
        c = g2.log_quotients(P + 1) - beta * np.log(np.arange(1, P + 2))
        v = cond.check_almost_increasing(c)
        assert v.status is want, beta

        # oracle: log a = max_p (c_p - min_{q >= p} c_q) at P and 2P
        def log_a(n):
            cc = g2.log_quotients(n + 1) - beta * np.log(np.arange(1, n + 2))
            suffix_min = np.minimum.accumulate(cc[::-1])[::-1]
            return float(np.max(cc - suffix_min))
        if want is H:
            assert log_a(2 * P) == pytest.approx(log_a(P), abs=1e-9)
            assert math.log(v.witness["a"]) == pytest.approx(log_a(P), abs=1e-9)
        else:
            assert log_a(2 * P) - log_a(P) == pytest.approx((beta - 2) * math.log(2), rel=0.05)
    assert cond.check_almost_increasing(parse_spec("qpp:q=2").log_terms(140)).holds


def test_gamma_beta():
    g2 = parse_spec("gevrey:alpha=2")
    assert cond.check_gamma_beta(g2, 1.0).holds
    assert cond.check_gamma_beta(g2, 3.0).refuted
    # beta = gamma: sum 1/(q+1) diverges, recorded only
    assert cond.check_gamma_beta(g2, 2.0).status in (I, R)


def test_gamma_beta_constant_by_direct_summation():
    g2 = parse_spec("gevrey:alpha=2")
    v = cond.check_gamma_beta(g2, 1.0, 4096)
    # sup_p (p+1)^-1 (p+1)^2 sum_{q>=p} (q+1)^-2 tends to 1 from above
    q = np.arange(1, 400001, dtype=float)
    suffix = np.cumsum((1 / q ** 2)[::-1])[::-1]
    direct = float(np.max(q[:4097] * suffix[:4097]))
    assert v.witness["C"] == pytest.approx(direct, rel=1e-3)


def test_gamma_beta_monotone_in_beta():
    seq = parse_spec("gevrey:alpha=3")
    statuses = [cond.check_gamma_beta(seq, b).status for b in np.linspace(0.25, 5, 20)]
    seen_not_holds = False
    for s in statuses:
        if s is not H:
            seen_not_holds = True
        else:
            assert not seen_not_holds


def test_inclusion_and_equivalence():
    g1 = parse_spec("gevrey:alpha=1")
    v = cond.equivalence(g1, g1)
    assert v.holds and v.witness["forward"]["log_C"] == 0.0 and v.witness["forward"]["log_h"] == 0.0
    assert cond.equivalence(hat(g1), parse_spec("gevrey:alpha=2")).holds
    for spec, back in (("qgevrey:q=2,sigma=2", H), ("qgevrey:q=2,sigma=3", R)):
        seq = parse_spec(spec)
        assert cond.inclusion(seq, shift(seq, 1)).holds
        assert cond.inclusion(shift(seq, 1), seq).status is back


def test_equivalence_symmetric_and_transitive():
    a = parse_spec("qgevrey:q=2,sigma=2")
    b = shift(a, 1)
    c = parse_spec("qgevrey:q=2,sigma=2|tilde")
    ab, ba = cond.equivalence(a, b), cond.equivalence(b, a)
    assert ab.status is ba.status is H
    assert ab.witness["forward"] == ba.witness["backward"]
    bc, ac = cond.equivalence(b, c), cond.equivalence(a, c)
    assert bc.holds and ac.holds
    # witness constants compose multiplicatively
    for side in ("forward", "backward"):
        assert ac.witness[side]["log_C"] <= ab.witness[side]["log_C"] + bc.witness[side]["log_C"] + 1e-9
        assert ac.witness[side]["log_h"] <= ab.witness[side]["log_h"] + bc.witness[side]["log_h"] + 1e-9


def test_seq_norm():
    seq = parse_spec("qgevrey:q=2,sigma=3")
    L = seq.log_terms(200)
    assert cond.seq_norm(L, seq, 1.0).log_norm == 0.0
    p = np.arange(201)
    assert cond.seq_norm(L + p * math.log(2), seq, 2.0).log_norm == pytest.approx(0.0, abs=1e-9)
    shifted = seq.log_terms(201)[1:]
    norms = [cond.seq_norm(shifted, seq, 1.0, n).log_norm for n in (50, 100, 200)]
    assert norms[0] < norms[1] < norms[2]


@pytest.mark.parametrize("spec", FAMILIES[:6])
def test_witnesses_recheck(spec):
    seq = parse_spec(spec)
    rng = np.random.default_rng(0)
    for fn in (cond.check_sm, cond.check_dc):
        v = fn(seq, 2048)
        if v.holds:
            for p in rng.integers(0, v.P - 1, 64):
                assert cond.witness_holds_at(seq, v, int(p))
        elif v.refuted:
            ce = v.counterexample
            assert ce["lhs"] > ce["rhs"]


@pytest.mark.parametrize("spec", ["gevrey:alpha=1", "qgevrey:q=2,sigma=2", "qgevrey:q=2,sigma=3"])
def test_hat_preserves_conditions(spec):
    seq = parse_spec(spec)
    for fn in (cond.check_sm, cond.check_dc, cond.check_mg, cond.check_alg):
        if fn(seq, 1024).holds:
            assert fn(hat(seq), 1024).holds, fn.__name__


def test_lattice_on_families():
    for spec in FAMILIES:
        seq = parse_spec(spec)
        v = {n: f(seq, 1024).status for n, f in (("mg", cond.check_mg), ("dc", cond.check_dc),
                                                   ("sm", cond.check_sm), ("nq", cond.check_nq),
                                                   ("snq", cond.check_snq))}
        assert not (v["mg"] is H and v["dc"] is R)
        assert not (v["dc"] is H and v["sm"] is R)
        assert not (v["snq"] is H and v["nq"] is R)


def test_verdict_json_is_clean():
    js = cond.check_sm(parse_spec("qpp:q=2")).to_json()
    assert js["status"] == "refuted"
    assert all(not isinstance(v, float) or math.isfinite(v) for v in js["diagnostics"].values())
