"""Bracketed estimates of the growth indices gamma(M) and omega(M).

gamma is bracketed by bisection on two criteria: almost-increasing
behaviour of m_p/(p+1)^mu and the summability condition (gamma_beta).
omega combines the trailing-window liminf of log m_p/log p with the series
characterization sup{mu : sum m_p^(-1/mu) < inf}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional

import numpy as np

from .conditions import (DEFAULT_P, ConditionVerdict, Status, check_almost_increasing,
                         check_gamma_beta, check_lc, series_tail)
from .sequences import PreconditionError, WeightSequence, tilde

INFINITE_CAP = 64.0
BISECT_TOL = 2.0 ** -6


@dataclass
class IndexBracket:
    index_id: str
    lower: float
    upper: float
    infinite_flag: bool
    P: int
    methods: List[dict] = field(default_factory=list)

    def contains(self, value: float, slack: float = 0.0) -> bool:
        return self.lower - slack <= value <= self.upper + slack

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def shifted(self, by: float) -> "IndexBracket":
        return IndexBracket(self.index_id, self.lower + by, self.upper + by, self.infinite_flag,
                            self.P, self.methods)

    def overlaps(self, other: "IndexBracket", slack: float = 0.0) -> bool:
        return self.lower - slack <= other.upper and other.lower - slack <= self.upper

    def to_json(self) -> dict:
        def f(v):
            return "inf" if v == math.inf else ("-inf" if v == -math.inf else v)
        return {"index": self.index_id, "lower": f(self.lower), "upper": f(self.upper),
                "infinite": self.infinite_flag, "P": self.P, "methods": self.methods}


def _weight_precondition(seq: WeightSequence, P: int, permissive: bool) -> Optional[str]:
    lc = check_lc(seq, P)
    if not lc.holds:
        problem = "input is not log-convex"
    else:
        q = seq.log_quotients(P + 1)
        problem = None if q[-1] > q[0] else "quotients do not increase"
    if problem and not permissive:
        raise PreconditionError(problem)
    return problem


def _bisect(pred: Callable[[float], bool], lo: float, hi: float, tol: float) -> tuple:
    """pred(lo) assumed True, pred(hi) assumed False."""
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if pred(mid):
            lo = mid
        else:
            hi = mid
    return lo, hi


def _ai_stable(steps: np.ndarray, lp: np.ndarray, mu: float) -> bool:
    return check_almost_increasing(-mu * lp, base_steps=steps).status is Status.HOLDS


def gamma_index(seq: WeightSequence, P: int = DEFAULT_P, cap: float = INFINITE_CAP,
                tol: float = BISECT_TOL, permissive: bool = False) -> IndexBracket:
    P = max(4, min(P, seq.overflow_horizon))
    problem = _weight_precondition(seq, P, permissive)
    if problem:
        return IndexBracket("gamma", 0.0, 0.0, False, P, [{"method": "degenerate", "note": problem}])
    steps = seq.log_steps(P + 1)
    lp = np.log(np.arange(1, P + 2, dtype=float))
    methods = []

    # almost increasing: stable below gamma, diverging above
    if _ai_stable(steps, lp, cap):
        ai = (cap, math.inf)
    elif not _ai_stable(steps, lp, 0.0):
        ai = (0.0, 0.0)
    else:
        ai = _bisect(lambda mu: _ai_stable(steps, lp, mu), 0.0, cap, tol)
    methods.append({"method": "almost_increasing_bisection", "lower": ai[0], "upper": ai[1]})

    # (gamma_beta): holds below gamma, refuted above
    def gb(beta: float) -> Status:
        return check_gamma_beta(seq, beta, P).status
    cap_status = gb(cap)
    if cap_status is Status.HOLDS:
        gbr = (cap, math.inf)
    else:
        lo, hi = 0.0, cap
        min_refuted = cap if cap_status is Status.REFUTED else math.inf
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            st = gb(mid)
            if st is Status.HOLDS:
                lo = mid
            else:
                hi = mid
                if st is Status.REFUTED:
                    min_refuted = min(min_refuted, mid)
        gbr = (lo, min_refuted)
    methods.append({"method": "gamma_beta_test", "lower": gbr[0], "upper": gbr[1]})

    lower, upper = max(ai[0], gbr[0]), min(ai[1], gbr[1])
    if lower > upper:
        if math.isinf(ai[1]) != math.isinf(gbr[1]):
            # a "holds" at the cap is provisional, an observed divergence is
            # not: keep the bracket whose upper end comes from a refutation
            lower, upper = min((ai, gbr), key=lambda b: b[1])
            note = "criteria disagree; refutation-backed bracket kept"
        else:
            lower, upper = min(ai[0], gbr[0]), max(ai[1], gbr[1])
            note = "criteria disagree; bracket widened"
        methods.append({"method": "conflict", "note": note})
    infinite = lower >= cap
    return IndexBracket("gamma", lower, upper, infinite, P, methods)


def _series_converges(q: np.ndarray, mu: float) -> Status:
    return series_tail(-q / mu).status


def omega_index(seq: WeightSequence, P: int = DEFAULT_P, cap: float = INFINITE_CAP,
                tol: float = BISECT_TOL, permissive: bool = False) -> IndexBracket:
    P = max(4, min(P, seq.overflow_horizon))
    problem = _weight_precondition(seq, P, permissive)
    if problem:
        return IndexBracket("omega", 0.0, 0.0, False, P, [{"method": "degenerate", "note": problem}])
    q = seq.log_quotients(P + 1)
    lo_idx = max(P // 2, 2)
    p = np.arange(lo_idx, P + 1, dtype=float)
    window = float(np.min(q[lo_idx:] / np.log(p)))
    methods = [{"method": "log_quotient_liminf", "value": window, "window": [lo_idx, P]}]

    if _series_converges(q, cap) is Status.HOLDS:
        ser = (cap, math.inf)
    else:
        conv_lo, _ = _bisect(lambda mu: _series_converges(q, mu) is Status.HOLDS, 0.0, cap, tol) \
            if _series_converges(q, tol) is Status.HOLDS else (0.0, tol)
        start = max(conv_lo, tol)
        if _series_converges(q, cap) is Status.REFUTED:
            _, div_hi = _bisect(lambda mu: _series_converges(q, mu) is not Status.REFUTED, start, cap, tol)
        else:
            div_hi = math.inf
        ser = (conv_lo, div_hi)
    methods.append({"method": "series_test", "lower": ser[0], "upper": ser[1]})
    lower = min(window, ser[0])
    upper = max(window, ser[1]) if math.isfinite(ser[1]) else math.inf
    if window >= cap and ser[0] >= cap:
        return IndexBracket("omega", cap, math.inf, True, P, methods)
    return IndexBracket("omega", lower, upper, False, P, methods)


def injectivity_test(seq: WeightSequence, P: int = DEFAULT_P) -> ConditionVerdict:
    """Injectivity criterion: sum m_p^(-1/2) diverges.

    status "holds" means the divergence is certified (injective), "refuted"
    means convergence is certified (not injective).
    """
    P = max(4, min(P, seq.overflow_horizon))
    q = seq.log_quotients(P + 1)
    t = series_tail(-q / 2.0)
    diag = {"series_exponent": t.exponent}
    if t.status is Status.REFUTED:
        return ConditionVerdict("injectivity", P, Status.HOLDS, {"series": "diverges"}, None, {},
                                {**diag, "omega_le_2": True})
    if t.status is Status.HOLDS:
        return ConditionVerdict("injectivity", P, Status.REFUTED, None,
                                {"series": "converges", "log_tail": t.log_tail}, {}, diag)
    return ConditionVerdict("injectivity", P, Status.INCONCLUSIVE, None, None, {}, diag)


@dataclass
class SurjectivityReport:
    gamma: IndexBracket
    gamma_tilde: Optional[IndexBracket]
    gamma_gt_2: Status
    gamma_tilde_infinite: Status
    never_bijective: bool = True

    def to_json(self) -> dict:
        return {"gamma": self.gamma.to_json(),
                "gamma_tilde": None if self.gamma_tilde is None else self.gamma_tilde.to_json(),
                "gamma_gt_2": self.gamma_gt_2.value,
                "gamma_tilde_infinite": self.gamma_tilde_infinite.value,
                "never_bijective": self.never_bijective}


def surjectivity_test(seq: WeightSequence, P: int = DEFAULT_P) -> SurjectivityReport:
    g = gamma_index(seq, P)
    if g.lower > 2:
        gt2 = Status.HOLDS
    elif g.upper < 2:
        gt2 = Status.REFUTED
    else:
        gt2 = Status.INCONCLUSIVE
    try:
        gt = gamma_index(tilde(seq), P)
    except PreconditionError:
        gt = None
    if gt is None:
        ti = Status.INCONCLUSIVE
    elif gt.infinite_flag:
        ti = Status.HOLDS
    elif math.isfinite(gt.upper) and gt.upper < INFINITE_CAP:
        ti = Status.REFUTED
    else:
        ti = Status.INCONCLUSIVE
    return SurjectivityReport(g, gt, gt2, ti)
