"""Moments of the kernel e(x) = h_M(K/x) and the related series algebra.

On [K m_j, K m_{j+1}) the kernel equals K^(j+1) M_{j+1} x^-(j+1), and e = M_0
below K m_0, so every moment is an explicit series.  Terms are kept
relative to M_{p+1}: for the fast families log M_{p+1} is so large that
absolute log values would swamp the comparisons of interest.

Only the real Stieltjes moments are computed.  The Laplace transform of e
has p-th derivative i^p mu_p at 0; that factor never enters the code.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from .assoc import h_brute
from .conditions import (ConditionVerdict, Status, check_dc, check_sm, equivalence_from_logs,
                         inclusion_from_logs, series_tail)
from .sequences import HorizonError, ParameterError, WeightSequence

DEFAULT_EPS = 1e-10
FIRST_CHUNK = 16


@dataclass(frozen=True)
class KernelSurrogate:
    seq: WeightSequence
    K: float = 1.0

    def __post_init__(self):
        if not self.K > 0:
            raise ParameterError("kernel scale K must be positive")

    def log_e(self, x: float, pmax: int = 512) -> float:
        """log h_M(K/x) by direct minimisation over p <= pmax."""
        if x <= 0:
            return self.seq.log_term(0)
        return h_brute(self.seq, self.K / x, pmax).log_h


@dataclass
class MomentValue:
    p: int
    log_mu: float
    terms_used: int
    tail_bound: float  # log of the bound on omitted mass
    method: str
    log_rel: float = math.nan  # log(mu_p / (K^(p+1) M_{p+1}))
    certified: bool = True

    def to_json(self) -> dict:
        return {"p": self.p, "log_mu": self.log_mu, "N": self.terms_used, "tail": self.tail_bound,
                "method": self.method, "log_rel": self.log_rel, "certified": self.certified}


def _logsumexp(v: np.ndarray) -> float:
    v = v[np.isfinite(v)]
    if v.size == 0:
        return -math.inf
    m = float(np.max(v))
    return m + math.log(float(np.sum(np.exp(v - m))))


def _log1mexp(x: np.ndarray) -> np.ndarray:
    """log(1 - exp(-x)) for x >= 0 (-inf at 0)."""
    with np.errstate(divide="ignore"):
        return np.log(-np.expm1(-x))


def _head_and_lower(s: np.ndarray, p: int) -> np.ndarray:
    """Relative log-terms for the head (index 0) and pieces j = 0..p-1 (index j+1).

    s[j] = log m_{j+1} - log m_j.  With E_j = sum_{i=j+1..p} (log m_i - log m_{j+1}),
    piece j contributes -E_j + log(1 - m_j^k/m_{j+1}^k) - log k with k = p - j,
    and the head contributes -E_{-1} - log(p+1).
    """
    out = np.empty(p + 1)
    E = 0.0  # E_{p-1} = 0
    for j in range(p - 1, -1, -1):
        k = p - j
        out[j + 1] = -E + float(_log1mexp(np.array(k * s[j]))) - math.log(k)
        E += k * s[j]  # E_{j-1} = E_j + (p - j) s_j
    out[0] = -E - math.log(p + 1)
    return out


def _upper_pieces(s: np.ndarray, p: int, N: int) -> tuple:
    """Relative log-terms of pieces j = p+1..N and the matching bounds exp(-G_j)/(j-p).

    G_j = sum_{i=p+1..j} (log m_j - log m_i), built by G_{j+1} = G_j + (j-p) s_j.
    """
    j = np.arange(p + 1, N + 1)
    k = (j - p).astype(float)
    inc = np.concatenate(([0.0], k[:-1] * s[p + 1:N]))
    G = np.cumsum(inc)
    bound = -G - np.log(k)
    terms = bound + _log1mexp(k * s[p + 1:N + 1])
    return terms, bound


def moment_exact(kernel: KernelSurrogate, p: int, eps_rel: float = DEFAULT_EPS) -> MomentValue:
    """mu_p(e) as the exact piecewise series with a geometric tail certificate."""
    seq = kernel.seq
    horizon = seq.overflow_horizon
    if p < 0:
        raise ParameterError("p must be >= 0")
    if p + 2 > horizon:
        raise HorizonError(p + 2, horizon)
    log_scale = (p + 1) * math.log(kernel.K) + seq.log_term(p + 1)
    N = min(p + FIRST_CHUNK, horizon - 1)
    while True:
        s = np.concatenate((seq.log_steps(N + 2), [0.0]))[: N + 1]
        low = _head_and_lower(s, p)
        mid = math.log(s[p]) if s[p] > 0 else -math.inf
        terms, bound = _upper_pieces(s, p, N)
        partial = _logsumexp(np.concatenate((low, [mid], terms)))
        tail = series_tail(bound) if bound.size >= 5 else None
        ok = tail is not None and tail.status is Status.HOLDS
        if ok and tail.log_tail <= partial + math.log(eps_rel):
            break
        if N >= horizon - 1:
            log_tail = tail.log_tail if ok else math.inf
            return MomentValue(p, log_scale + partial, N - p + 2, log_scale + log_tail, "exact_series",
                               partial, False)
        N = min(2 * N - p, horizon - 1)
    rel = float(np.logaddexp(partial, tail.log_tail))
    return MomentValue(p, log_scale + rel, N - p + 2, log_scale + tail.log_tail, "exact_series", rel)


def moment_quadrature_oracle(kernel: KernelSurrogate, p: int, J: int = 40,
                             pmax: int = 512) -> MomentValue:
    """Adaptive quadrature of x^p e(x) in the variable u = log x.

    The kernel is evaluated by direct minimisation of log M_k - k log(x/K),
    not through the piece formulas.  The range is [K m_0 e^-60/(p+1), K m_{p+J}];
    beyond it e(x) <= K^k M_k x^-k with k = p+J+1 gives an analytic tail.
    """
    from scipy.integrate import quad

    seq = kernel.seq
    if p > 24:
        raise ParameterError("the quadrature oracle is meant for p <= 24")
    top = min(p + J, seq.overflow_horizon - 2)
    pmax = min(pmax, seq.overflow_horizon)
    L = seq.log_terms(pmax)
    ks = np.arange(pmax + 1)
    ref = seq.log_term(p + 1)
    logK = math.log(kernel.K)

    def log_e(u: float) -> float:
        return float(np.min(L - ks * (u - logK)))

    def f(u: float) -> float:
        return math.exp((p + 1) * u + log_e(u) - ref - (p + 1) * logK)

    q = seq.log_quotients(top + 1)
    u_lo = logK + q[0] - 60.0 / (p + 1)
    u_hi = logK + q[top]
    brk = sorted(set(float(v) + logK for v in q if u_lo < v + logK < u_hi))
    edges = [u_lo] + brk + [u_hi]
    total = 0.0
    for a, b in zip(edges, edges[1:]):
        if b > a:
            val, _ = quad(f, a, b, epsabs=0.0, epsrel=1e-13, limit=200)
            total += val
    # below u_lo the kernel is at most M_0
    head = math.exp(L[0] + (p + 1) * (u_lo - logK) - ref - math.log(p + 1))
    k = top + 1
    tail = math.exp(L[k] + (p + 1 - k) * q[top] - math.log(k - p - 1) - ref) if k <= pmax else 0.0
    rel = math.log(total + head)
    return MomentValue(p, ref + (p + 1) * logK + rel, len(edges) - 1,
                       ref + (p + 1) * logK + math.log(tail + 1e-300), "quadrature_oracle", rel)


@dataclass
class UpperCheck:
    p: int
    log_rel_mu: float
    log_rel_upper: float  # log(M~_p / M_{p+1}) = log(2 + log(m_{p+1}/m_p))
    log_rel_lower: float  # max(log log(m_{p+1}/m_p), -log(p+1))
    slack: float
    ok: bool

    def to_json(self) -> dict:
        return dict(self.__dict__)


def moment_upper_check(kernel: KernelSurrogate, p: int, tol: float = 1e-9) -> UpperCheck:
    """Sandwich M_{p+1} max(log(m_{p+1}/m_p), 1/(p+1)) <= mu_p <= M~_p for K = 1."""
    if kernel.K != 1.0:
        raise ParameterError("the upper bound is stated for K = 1")
    mv = moment_exact(kernel, p)
    s = kernel.seq.log_quotient(p + 1) - kernel.seq.log_quotient(p)
    s = max(s, 0.0)
    upper = math.log(2.0 + s)
    lower = max(math.log(s) if s > 0 else -math.inf, -math.log(p + 1))
    ok = lower <= mv.log_rel + tol and mv.log_rel <= upper + tol
    return UpperCheck(p, mv.log_rel, upper, lower, upper - mv.log_rel, ok)


def moment_table(seq: WeightSequence, P: int, K: float = 1.0,
                 eps_rel: float = DEFAULT_EPS) -> List[MomentValue]:
    ker = KernelSurrogate(seq, K)
    return [moment_exact(ker, p, eps_rel) for p in range(P + 1)]


@dataclass
class TargetClassification:
    fits_LambdaM: ConditionVerdict
    fits_LambdaM_plus1: ConditionVerdict
    fits_LambdaM_tilde: ConditionVerdict
    equivalent_M: ConditionVerdict
    equivalent_M_plus1: ConditionVerdict
    equivalent_M_tilde: ConditionVerdict
    dc: Status
    sm: Status
    consistent: bool
    notes: List[str] = field(default_factory=list)
    P: int = 0

    @property
    def target(self) -> str:
        if self.fits_LambdaM.holds:
            return "LambdaM"
        if self.fits_LambdaM_plus1.holds:
            return "LambdaM+1"
        return "LambdaM~"

    def to_json(self) -> dict:
        return {"fits_LambdaM": self.fits_LambdaM.status.value,
                "fits_LambdaM_plus1": self.fits_LambdaM_plus1.status.value,
                "fits_LambdaM_tilde": self.fits_LambdaM_tilde.status.value,
                "equivalent_M": self.equivalent_M.status.value,
                "equivalent_M_plus1": self.equivalent_M_plus1.status.value,
                "equivalent_M_tilde": self.equivalent_M_tilde.status.value,
                "dc": self.dc.value, "sm": self.sm.value, "target": self.target,
                "consistent": self.consistent, "notes": self.notes, "P": self.P}


def _agree(fit: Status, cond: Status) -> bool:
    return fit is Status.INCONCLUSIVE or cond is Status.INCONCLUSIVE or fit is cond


def classify_target(seq: WeightSequence, P_mom: int = 40, P_cond: Optional[int] = None,
                    P_mom_max: int = 320) -> TargetClassification:
    """Place (mu_p(e)) relative to M, M_{+1} and M~, then cross-check with (dc) and (sm).

    All comparisons use log(mu_p / M_{p+1}) directly, so no large log-terms
    are ever subtracted.  When the moment verdicts disagree with the
    condition checkers, the moment window is doubled up to P_mom_max: a
    short window can sit inside one constant block of a sparse sequence.
    """
    Pc = P_cond if P_cond is not None else 2048
    dc = check_dc(seq, Pc).status
    sm = check_sm(seq, Pc).status
    P = min(P_mom, seq.overflow_horizon - 3)
    if P < 8:
        raise HorizonError(8, seq.overflow_horizon)
    ker = KernelSurrogate(seq)
    rel: List[float] = []
    history: List[str] = []
    while True:
        rel.extend(moment_exact(ker, p).log_rel for p in range(len(rel), P + 1))
        out = _place_moments(seq, np.array(rel), P, dc, sm)
        top = min(2 * P, P_mom_max, seq.overflow_horizon - 3)
        if out.consistent or top <= P:
            out.notes = history + out.notes
            return out
        history.append(f"window p <= {P} disagreed with the conditions; extended")
        P = top


def _place_moments(seq: WeightSequence, rel: np.ndarray, P: int, dc: Status, sm: Status
                   ) -> TargetClassification:
    q = seq.log_quotients(P + 2)
    s = np.maximum(seq.log_steps(P + 2), 0.0)
    zero = np.zeros(P + 1)
    vs_M = rel + q[: P + 1]  # log(mu_p / M_p)
    vs_tilde = np.log(2.0 + s[: P + 1])  # log(M~_p / M_{p+1})
    fit_M = inclusion_from_logs(vs_M, zero, P, "moments_in_LambdaM")
    fit_1 = inclusion_from_logs(rel, zero, P, "moments_in_LambdaM+1")
    fit_t = inclusion_from_logs(rel, vs_tilde, P, "moments_in_LambdaM~")
    eq_M = equivalence_from_logs(vs_M, zero, P)
    eq_1 = equivalence_from_logs(rel, zero, P)
    eq_t = equivalence_from_logs(rel, vs_tilde, P)
    notes = []
    if not _agree(fit_M.status, dc):
        notes.append(f"moments in LambdaM is {fit_M.status.value} but (dc) is {dc.value}")
    if not _agree(fit_1.status, sm):
        notes.append(f"moments in LambdaM+1 is {fit_1.status.value} but (sm) is {sm.value}")
    return TargetClassification(fit_M, fit_1, fit_t, eq_M, eq_1, eq_t, dc, sm, not notes, notes, P)


# ---------------------------------------------------------------------------
# formal power series


@dataclass(frozen=True)
class SeriesPoly:
    """Truncated power series sum_k coeffs[k] x^k."""

    coeffs: tuple

    @classmethod
    def from_derivatives(cls, derivs: Sequence[float]) -> "SeriesPoly":
        return cls(tuple(d / math.factorial(k) for k, d in enumerate(derivs)))

    def derivative_at_zero(self, k: int) -> float:
        return math.factorial(k) * self.coeffs[k] if k < len(self.coeffs) else 0.0

    def coeff(self, k: int):
        return self.coeffs[k] if k < len(self.coeffs) else 0.0

    def __len__(self) -> int:
        return len(self.coeffs)


def series_reciprocal(g: SeriesPoly, n: int) -> SeriesPoly:
    """First n+1 coefficients of 1/G, from sum_{j<=k} g_j r_{k-j} = [k = 0]."""
    if n < 0:
        raise ParameterError("n must be >= 0")
    g0 = g.coeff(0)
    if g0 == 0:
        raise ParameterError("G(0) must be nonzero")
    r = [1 / g0]
    for k in range(1, n + 1):
        acc = sum(g.coeff(j) * r[k - j] for j in range(1, min(k, len(g) - 1) + 1))
        r.append(-acc / g0)
    return SeriesPoly(tuple(r))


@dataclass
class Inversion:
    b: List[float]  # b_p = sum_j C(p,j) c_j (1/G)^(p-j)(0)
    reconstructed: List[float]  # sum_j C(p,j) b_j G^(p-j)(0)
    max_rel_error: float


def inversion_roundtrip(c: Sequence[float], G: SeriesPoly) -> Inversion:
    """Solve for b with sum_j C(p,j) b_j G^(p-j)(0) = c_p and verify it.

    Divided by p!, both binomial sums are Cauchy products of c_j/j! with the
    Taylor coefficients of 1/G and G, which is how they are evaluated here.
    """
    n = len(c) - 1
    if n < 0:
        return Inversion([], [], 0.0)
    R = series_reciprocal(G, n)
    cn = [c[j] / math.factorial(j) for j in range(n + 1)]
    bn = [sum(cn[j] * R.coeff(p - j) for j in range(p + 1)) for p in range(n + 1)]
    back, err = [], 0.0
    for p in range(n + 1):
        terms = [bn[j] * G.coeff(p - j) for j in range(p + 1)]
        v = sum(terms)
        scale = max(sum(abs(t) for t in terms), abs(cn[p]), 1e-300)
        err = max(err, abs(v - cn[p]) / scale)
        back.append(v * math.factorial(p))
    b = [bn[p] * math.factorial(p) for p in range(n + 1)]
    return Inversion(b, back, err)
