"""Associated functions h_M(t) = inf_p M_p t^p and omega_M(t) = -log h_M(1/t).

For a log-convex sequence the infimum is attained on explicit pieces:
h_M(t) = M_k t^k where k is the first index with m_k >= 1/t (k = 0 gives
h_M(t) = M_0 = 1 for t >= 1/m_0).  The piece is located by binary search on
the nondecreasing quotients.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .sequences import HorizonError, WeightSequence


@dataclass(frozen=True)
class AssocEval:
    t: float
    log_h: float
    segment: int  # p such that 1/m_{p+1} <= t < 1/m_p; -1 for t >= 1/m_0
    source: str = "piecewise"


def _first_quotient_at_least(seq: WeightSequence, u: float) -> Optional[int]:
    """Smallest k with log m_k >= u, or None if no such k below the horizon."""
    horizon = seq.overflow_horizon
    if seq.log_quotient(0) >= u:
        return 0
    lo, hi = 0, 1
    while True:
        if hi > horizon:
            hi = horizon
            if seq.log_quotient(hi) < u:
                return None
            break
        if seq.log_quotient(hi) >= u:
            break
        lo, hi = hi, hi * 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if seq.log_quotient(mid) >= u:
            hi = mid
        else:
            lo = mid
    return hi


def h_of(seq: WeightSequence, t: float) -> AssocEval:
    """log h_M(t) for a weight sequence, on half-open pieces [1/m_k, 1/m_{k-1})."""
    if not t > 0:
        raise ValueError("t must be positive")
    lt = math.log(t)
    k = _first_quotient_at_least(seq, -lt)
    if k is None:
        n = seq.overflow_horizon
        L = seq.log_terms(n)
        partial = float(np.min(L + np.arange(n + 1) * lt))
        raise HorizonError(n + 1, n, partial)
    return AssocEval(t, seq.log_term(k) + k * lt, k - 1)


def h_brute(seq: WeightSequence, t: float, pmax: int) -> AssocEval:
    """Direct minimum of log M_p + p log t over p <= pmax."""
    pmax = min(pmax, seq.overflow_horizon)
    L = seq.log_terms(pmax)
    v = L + np.arange(pmax + 1) * math.log(t)
    i = int(np.argmin(v))
    return AssocEval(t, float(v[i]), i - 1, "brute_inf")


def omega_of(seq: WeightSequence, t: float) -> float:
    """omega_M(t) = sup_p log(t^p / M_p) = -log h_M(1/t); omega_M(0) = 0."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    if t == 0:
        return 0.0
    return -h_of(seq, 1.0 / t).log_h


def omega_direct(seq: WeightSequence, t: float, pmax: int) -> float:
    if t == 0:
        return 0.0
    pmax = min(pmax, seq.overflow_horizon)
    L = seq.log_terms(pmax)
    return float(np.max(np.arange(pmax + 1) * math.log(t) - L))


@dataclass(frozen=True)
class Recovered:
    log_value: float
    log_argmax_t: float


def recover_term(seq: WeightSequence, p: int) -> Recovered:
    """sup_{t>0} t^p h_M(1/t), evaluated piece by piece.

    On the piece [m_j, m_{j+1}] the function is M_{j+1} t^(p-j-1): increasing
    for j < p-1, constant for j = p-1 and decreasing for j >= p, so only piece
    endpoints need to be compared.  Below m_0 it equals t^p.
    """
    if p + 1 > seq.overflow_horizon:
        raise HorizonError(p + 1, seq.overflow_horizon)
    q = seq.log_quotients(p + 2)
    base = seq.log_term(p)
    # each candidate is written as log M_p minus a nonnegative gap built from
    # quotient differences, which avoids cancelling huge log-terms
    cands = [base - float(np.sum(q[:p] - q[0]))]  # t = m_0, below which h = 1
    for j in range(p + 1):
        if j < p:
            gap = float(np.sum(q[j + 1:p] - q[j + 1]))  # t = m_{j+1}
        else:
            gap = float(np.sum(q[j] - q[p:j + 1]))  # t = m_j
        cands.append(base - gap)
    return Recovered(max(cands), float(q[p]))
