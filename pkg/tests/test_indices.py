import math

import pytest

from wsq import PreconditionError, parse_spec, shift
from wsq import conditions as cond, constructor, indices

H = cond.Status.HOLDS


def test_gevrey_gamma():
    br = indices.gamma_index(parse_spec("gevrey:alpha=2"), 2 ** 14)
    assert br.contains(2.0) and br.width <= 0.3
    assert not br.infinite_flag


def test_gamma_infinite_for_qgevrey():
    assert indices.gamma_index(parse_spec("qgevrey:q=2,sigma=2")).infinite_flag


def test_piecewise_factorial_nodes_gamma_zero():
    seq = constructor.build_from_growth_control(constructor.exp_pow(2.0), constructor.factorial_nodes())
    br = indices.gamma_index(seq, 2 ** 14)
    assert br.lower == 0.0 and br.upper <= 0.2


def test_omega_values():
    br = indices.omega_index(parse_spec("gevrey:alpha=3"), 2 ** 14)
    assert br.contains(3.0) and br.width <= 0.2
    assert indices.omega_index(parse_spec("qpp:q=2")).infinite_flag


@pytest.mark.parametrize("spec", ["gevrey:alpha=0.5", "gevrey:alpha=1", "gevrey:alpha=3",
                                  "qgevrey:q=2,sigma=2", "power:tau=1,sigma=2", "oscillating"])
def test_gamma_below_omega(spec):
    seq = parse_spec(spec)
    g = indices.gamma_index(seq, permissive=True)
    o = indices.omega_index(seq, permissive=True)
    assert g.lower <= g.upper and o.lower <= o.upper
    assert g.lower <= o.upper + indices.BISECT_TOL


@pytest.mark.parametrize("spec,injective", [("gevrey:alpha=1", True), ("gevrey:alpha=2", True),
                                            ("gevrey:alpha=3", False),
                                            ("qgevrey:q=2,sigma=2", False)])
def test_injectivity(spec, injective):
    v = indices.injectivity_test(parse_spec(spec))
    assert v.status is (H if injective else cond.Status.REFUTED)


def test_surjectivity_criteria():
    assert indices.surjectivity_test(parse_spec("gevrey:alpha=3")).gamma_gt_2 is H
    assert indices.surjectivity_test(parse_spec("gevrey:alpha=1")).gamma_gt_2 is cond.Status.REFUTED
    assert indices.surjectivity_test(parse_spec("qgevrey:q=2,sigma=3")).gamma_gt_2 is H
    rep = indices.surjectivity_test(parse_spec("qpp:q=2"))
    assert rep.gamma_tilde_infinite is H and rep.never_bijective


@pytest.mark.parametrize("spec", ["gevrey:alpha=1", "gevrey:alpha=2.5", "qgevrey:q=2,sigma=2"])
def test_shift_preserves_gamma(spec):
    seq = parse_spec(spec)
    a = indices.gamma_index(seq, 4096)
    b = indices.gamma_index(shift(seq, 1), 4096)
    assert a.overlaps(b, slack=indices.BISECT_TOL)


@pytest.mark.parametrize("spec", ["gevrey:alpha=1", "gevrey:alpha=0.5", "qgevrey:q=2,sigma=2",
                                  "power:tau=1,sigma=2", "const:log_m=0"])
def test_gamma_positive_iff_snq(spec):
    seq = parse_spec(spec)
    g = indices.gamma_index(seq, permissive=True)
    snq = cond.check_snq(seq)
    assert (g.lower > 0) == snq.holds


def test_degenerate_input():
    const = parse_spec("const:log_m=0")
    with pytest.raises(PreconditionError):
        indices.gamma_index(const)
    g = indices.gamma_index(const, permissive=True)
    o = indices.omega_index(const, permissive=True)
    assert (g.lower, g.upper, o.lower, o.upper) == (0.0, 0.0, 0.0, 0.0)


def test_bracket_json():
    js = indices.gamma_index(parse_spec("qpp:q=2")).to_json()
    assert js["upper"] == "inf" and js["infinite"] is True
    assert math.isfinite(js["lower"])
