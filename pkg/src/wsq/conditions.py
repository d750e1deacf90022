"""Certificate-producing checkers for growth and regularity conditions.

Every checker works at a finite truncation P and returns a three-valued
:class:`ConditionVerdict`.  "holds" carries a witness verified for every
index up to P; "refuted" carries a counterexample that can be re-checked with
a single evaluation; anything else is "inconclusive".
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from .sequences import WeightSequence, log_term_difference

DEFAULT_P = 2048
H_GRID = tuple(1.05 * 1.25 ** k for k in range(41))
C_MAX = 1e12
LC_TOL = 1e-12
# growth of the required log-rate across the last doubling that counts as divergence
RATE_MARGIN = 0.1
# growth of log a per doubling that counts as a diverging almost-increasing constant
AI_MARGIN = 0.01
# below this informative length a divergence needs the rate record to double
MIN_INFORMATIVE = 16
STABLE_REL = 0.01
SERIES_MARGIN = 0.02


class Status(str, Enum):
    HOLDS = "holds"
    REFUTED = "refuted"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class SearchBounds:
    H_grid: tuple = H_GRID
    C_max: float = C_MAX

    @property
    def H_max(self) -> float:
        return self.H_grid[-1]

    def to_json(self) -> dict:
        return {"C_max": self.C_max, "H_min": self.H_grid[0], "H_max": self.H_max,
                "grid_size": len(self.H_grid)}


DEFAULT_BOUNDS = SearchBounds()


@dataclass
class ConditionVerdict:
    condition: str
    P: int
    status: Status
    witness: Optional[dict] = None
    counterexample: Optional[dict] = None
    bounds: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)

    @property
    def holds(self) -> bool:
        return self.status is Status.HOLDS

    @property
    def refuted(self) -> bool:
        return self.status is Status.REFUTED

    def to_json(self) -> dict:
        return {
            "condition": self.condition,
            "P": self.P,
            "status": self.status.value,
            "witness": _clean(self.witness),
            "counterexample": _clean(self.counterexample),
            "bounds": _clean(self.bounds),
            "diagnostics": _clean(self.diagnostics),
        }


def _clean(obj):
    if obj is None:
        return None
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        if math.isnan(v):
            return None
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, Enum):
        return obj.value
    return obj


def _clamp(seq: WeightSequence, P: int) -> int:
    return max(1, min(int(P), seq.overflow_horizon))


def _logsumexp(a: np.ndarray) -> float:
    if a.size == 0:
        return -math.inf
    m = float(np.max(a))
    if not math.isfinite(m):
        return m
    return m + math.log(float(np.sum(np.exp(a - m))))


def _suffix_logsumexp(a: np.ndarray) -> np.ndarray:
    """out[i] = log sum_{j>=i} exp(a[j])."""
    return np.logaddexp.accumulate(a[::-1])[::-1]


# ---------------------------------------------------------------------------
# linear-rate conditions: x_i <= log C0 + e_i log H


def _rate_check(name: str, P: int, x: np.ndarray, expo: np.ndarray, index: np.ndarray,
                bounds: SearchBounds, lhs_label: str) -> ConditionVerdict:
    """Witness search for x_i <= log C0 + e_i log H over the H grid.

    The minimal admissible grid H (C0 <= C_max) is computed on the full
    range and on the first half of the informative range, i.e. up to the
    last strict record of the rate x_i/e_i.  Refutation needs either grid
    exhaustion or witness drift between the two, together with a rate
    record that grew by at least RATE_MARGIN across that last doubling.
    """
    n = len(x)
    logC = math.log(bounds.C_max)
    logH = np.log(np.asarray(bounds.H_grid))
    with np.errstate(invalid="ignore"):
        slack = x[None, :] - expo[None, :] * logH[:, None]
    slack = np.where(np.isnan(slack), -np.inf, slack)
    need = np.maximum.accumulate(slack, axis=1)  # log C0(H) on prefixes

    def best(m: int) -> Optional[int]:
        if m <= 0:
            return 0
        ok = np.nonzero(need[:, m - 1] <= logC)[0]
        return int(ok[0]) if ok.size else None

    safe_e = np.where(expo > 0, expo, 1.0)
    rate = np.where(np.isfinite(x), x / safe_e, -np.inf)
    rec = np.maximum.accumulate(rate) if n else rate
    strict = [i for i in range(n) if np.isfinite(rate[i]) and (i == 0 or rate[i] > rec[i - 1])]
    n_eff = strict[-1] + 1 if strict else 0
    half = n_eff // 2
    R_full = float(rec[n_eff - 1]) if n_eff else -math.inf
    R_half = float(rec[half - 1]) if half else -math.inf
    diverging = n_eff >= 2 and R_full - R_half >= RATE_MARGIN
    if n_eff < MIN_INFORMATIVE:
        diverging = diverging and (R_half <= 0 or R_full >= 2 * R_half)
    k_full = best(n)
    k_half = best(half) if n_eff > 2 else k_full
    diag = {"rate_full": R_full, "rate_half": R_half, "informative_n": n_eff,
            "diverging": bool(diverging),
            "H_full": None if k_full is None else bounds.H_grid[k_full],
            "H_half": None if k_half is None else bounds.H_grid[k_half],
            "policy": "witness drift or exhaustion plus rate growth across the last doubling"}
    bj = bounds.to_json()

    def counterexample(k_ref: Optional[int]) -> dict:
        H_ref = bounds.H_grid[-1] if k_ref is None else bounds.H_grid[k_ref]
        s = x - expo * math.log(H_ref)
        i = int(np.argmax(np.where(np.isnan(s), -np.inf, s)))
        return {"p": int(index[i]), "lhs": float(x[i]),
                "rhs": logC + float(expo[i]) * math.log(H_ref),
                "scale": "log", "lhs_is": lhs_label, "H": H_ref, "C0": bounds.C_max}

    if k_full is None:
        if diverging:
            return ConditionVerdict(name, P, Status.REFUTED, None,
                                    counterexample(k_half if k_half is not None else None),
                                    bj, diag)
        return ConditionVerdict(name, P, Status.INCONCLUSIVE, None, None, bj, diag)
    H = bounds.H_grid[k_full]
    C0 = float(np.exp(need[k_full, n - 1])) if n else 0.0
    wit = {"C0": C0, "H": H}
    stable = k_half == k_full
    diag["stable"] = bool(stable)
    if not stable and diverging:
        return ConditionVerdict(name, P, Status.REFUTED, None, counterexample(k_half), bj, diag)
    return ConditionVerdict(name, P, Status.HOLDS, wit, None, bj, diag)


def check_lc(seq: WeightSequence, P: int = DEFAULT_P) -> ConditionVerdict:
    P = _clamp(seq, P)
    q = seq.log_quotients(P + 1)
    d = np.diff(q)
    tol = LC_TOL * np.maximum(1.0, np.abs(q[:-1]))
    bad = np.nonzero(d < -tol)[0]
    if bad.size:
        p = int(bad[0])
        return ConditionVerdict("lc", P, Status.REFUTED, None,
                                {"p": p, "lhs": float(q[p + 1]), "rhs": float(q[p]), "scale": "log",
                                 "lhs_is": "log m_{p+1}", "rhs_is": "log m_p"})
    seq.lc_verified_up_to = max(seq.lc_verified_up_to, P)
    return ConditionVerdict("lc", P, Status.HOLDS, {"monotone_up_to": P})


def check_sm(seq: WeightSequence, P: int = DEFAULT_P,
             bounds: SearchBounds = DEFAULT_BOUNDS) -> ConditionVerdict:
    """log(m_{p+1}/m_p) <= C0 H^(p+1), tested in log-log form."""
    P = _clamp(seq, P)
    q = seq.log_quotients(P + 1)
    delta = np.diff(q)
    with np.errstate(divide="ignore", invalid="ignore"):
        x = np.where(delta > 0, np.log(np.where(delta > 0, delta, 1.0)), -np.inf)
    expo = np.arange(1, P + 1, dtype=float)
    # log C0 + (p+1) log H bounds log delta; C0 here is a constant on delta itself
    return _rate_check("sm", P, x, expo, np.arange(P), bounds, "log delta_{p+1}")


def check_dc(seq: WeightSequence, P: int = DEFAULT_P,
             bounds: SearchBounds = DEFAULT_BOUNDS) -> ConditionVerdict:
    """log m_p <= log C0 + (p+1) log H."""
    P = _clamp(seq, P)
    x = seq.log_quotients(P)
    expo = np.arange(1, P + 1, dtype=float)
    return _rate_check("dc", P, x, expo, np.arange(P), bounds, "log m_p")


def _pair_extremes(L: np.ndarray, n_max: int, sign: int) -> tuple:
    """For each n <= n_max: max over p+q=n of sign*(L_n - L_p - L_q), with argmax p."""
    vals = np.empty(n_max + 1)
    arg = np.zeros(n_max + 1, dtype=int)
    for n in range(n_max + 1):
        p = np.arange(0, n // 2 + 1)
        v = sign * (L[n] - L[p] - L[n - p])
        i = int(np.argmax(v))
        vals[n] = v[i]
        arg[n] = p[i]
    return vals, arg


def check_mg(seq: WeightSequence, P: int = DEFAULT_P,
             bounds: SearchBounds = DEFAULT_BOUNDS) -> ConditionVerdict:
    """M_{p+q} <= C0 H^(p+q) M_p M_q over all pairs p+q <= P."""
    P = _clamp(seq, P)
    L = seq.log_terms(P)
    y, arg = _pair_extremes(L, P, 1)
    expo = np.arange(0, P + 1, dtype=float)
    v = _rate_check("mg", P, y, expo, np.arange(P + 1), bounds, "log M_{p+q} - log M_p - log M_q")
    if v.counterexample is not None:
        n = v.counterexample["p"]
        v.counterexample["p"], v.counterexample["q"] = int(arg[n]), int(n - arg[n])
    v.diagnostics["diagonal_prefilter_max"] = float(np.max(L[2 * np.arange(P // 2 + 1)]
                                                          - 2 * L[np.arange(P // 2 + 1)]))
    return v


def check_alg(seq: WeightSequence, P: int = DEFAULT_P,
              bounds: SearchBounds = DEFAULT_BOUNDS) -> ConditionVerdict:
    """M_p M_q <= C1^(p+q) M_{p+q}; witness C1 from the worst pair."""
    P = _clamp(seq, P)
    L = seq.log_terms(P)

    def c1(n_max: int) -> tuple:
        z, arg = _pair_extremes(L, n_max, -1)
        r = np.where(np.arange(n_max + 1) > 0, z / np.maximum(np.arange(n_max + 1), 1), -np.inf)
        i = int(np.argmax(r))
        return max(float(r[i]), 0.0), i, int(arg[i]), z
    logc, n, p, z = c1(P)
    logc_half = c1(P // 2)[0] if P >= 2 else logc
    diag = {"log_C1_half": logc_half}
    if logc > math.log(bounds.H_max):
        q = n - p
        return ConditionVerdict("alg", P, Status.REFUTED, None,
                                {"p": p, "q": q, "lhs": float(L[p] + L[q]),
                                 "rhs": float(L[n] + n * math.log(bounds.H_max)), "scale": "log"},
                                bounds.to_json(), diag)
    if logc - logc_half <= math.log1p(STABLE_REL):
        return ConditionVerdict("alg", P, Status.HOLDS, {"C1": math.exp(logc)},
                                None, bounds.to_json(), diag)
    return ConditionVerdict("alg", P, Status.INCONCLUSIVE, {"C1": math.exp(logc)},
                            None, bounds.to_json(), diag)


# ---------------------------------------------------------------------------
# series conditions


@dataclass
class SeriesTail:
    """Convergence verdict for sum_q exp(log_u[q]) beyond the truncation."""

    status: Status
    log_tail: float
    exponent: float
    log_tail_rel: float = math.inf  # log(tail / u_P)


def series_tail(log_u: np.ndarray, margin: float = SERIES_MARGIN) -> SeriesTail:
    """Bound sum_{q>P} exp(log_u[q]) from the trend on the trailing half [P/2, P].

    Two comparisons are tried.  p-series: with s_q = -log u_q / log(q+1),
    if s exceeds 1+margin on the window the tail is at most
    (P+1)^(1-s)/(s-1), where s is the last value when s is nondecreasing on
    the window and the window minimum otherwise.  Geometric: if the ratio
    u_{q+1}/u_q stays below 1 and is nonincreasing on the window, the tail is
    at most u_P r/(1-r).  The smaller bound is kept.  If s never exceeds 1 on the
    window and is not increasing, the terms dominate the harmonic series.
    """
    P = len(log_u) - 1
    lo = max(P // 2, 2)
    if P < 4 or lo >= P:
        return SeriesTail(Status.INCONCLUSIVE, math.inf, math.nan)
    q = np.arange(lo, P + 1, dtype=float)
    s = -log_u[lo:] / np.log(q + 1)
    smin, smax = float(np.min(s)), float(np.max(s))
    s_mono = bool(np.all(np.diff(s) >= -1e-12))
    rel = []  # bounds on log(tail / u_P)
    s_star = float(s[-1]) if s_mono else smin
    L = math.log(P + 1)
    if s_star > 1 + margin:
        rel.append((float(s[-1]) - s_star) * L + L - math.log(s_star - 1))
    lr = np.diff(log_u[lo:])
    if lr.size and np.all(np.isfinite(lr)) and float(np.max(lr)) < 0 and bool(np.all(np.diff(lr) <= 1e-12)):
        r_log = float(lr[-1])
        rel.append(r_log - math.log(-math.expm1(r_log)))
    if rel:
        b = min(rel)
        return SeriesTail(Status.HOLDS, float(log_u[P]) + b, smin, b)
    if smax <= 1 + 1e-12 and s[-1] <= s[0] + 1e-12:
        # terms dominate the harmonic series on the window
        return SeriesTail(Status.REFUTED, math.inf, smax)
    return SeriesTail(Status.INCONCLUSIVE, math.inf, smin)


def _series_verdict(name: str, P: int, log_u: np.ndarray, extra: Optional[dict] = None) -> ConditionVerdict:
    t = series_tail(log_u)
    total = float(np.logaddexp(_logsumexp(log_u), t.log_tail)) if t.status is Status.HOLDS else _logsumexp(log_u)
    diag = {"exponent": t.exponent, "log_partial_sum": _logsumexp(log_u), **(extra or {})}
    if t.status is Status.HOLDS:
        return ConditionVerdict(name, P, Status.HOLDS, {"log_sum_upper": total, "log_tail": t.log_tail},
                                None, {"margin": SERIES_MARGIN}, diag)
    if t.status is Status.REFUTED:
        lo = max(P // 2, 2)
        return ConditionVerdict(name, P, Status.REFUTED, None,
                                {"p": P, "lhs": float(log_u[P]), "rhs": -math.log(P + 1),
                                 "scale": "log", "lhs_is": "log term",
                                 "note": f"terms on [{lo},{P}] dominate a divergent p-series"},
                                {"margin": SERIES_MARGIN}, diag)
    return ConditionVerdict(name, P, Status.INCONCLUSIVE, None, None, {"margin": SERIES_MARGIN}, diag)


def check_nq(seq: WeightSequence, P: int = DEFAULT_P) -> ConditionVerdict:
    """sum 1/((p+1) m_p) < infinity."""
    P = _clamp(seq, P)
    q = seq.log_quotients(P + 1)
    log_u = -np.log(np.arange(1, P + 2, dtype=float)) - q
    return _series_verdict("nq", P, log_u)


def _suffix_ratio_constant(log_u: np.ndarray, log_weight: np.ndarray,
                           steps: Optional[np.ndarray] = None) -> tuple:
    """max_p of log(sum_{q>=p} u_q / u_p) + log_weight[p], with the certified tail.

    The suffix sums are formed relative to u_p from adjacent log-ratios, so
    terms of astronomically different size never meet in one logaddexp.
    """
    t = series_tail(log_u)
    if t.status is not Status.HOLDS:
        return t.status, math.inf, -1
    steps = (np.diff(log_u) if steps is None else steps[: len(log_u) - 1]).tolist()
    n = len(log_u)
    R = [0.0] * n
    R[-1] = float(np.logaddexp(0.0, t.log_tail_rel))
    for p in range(n - 2, -1, -1):
        R[p] = float(np.logaddexp(0.0, R[p + 1] + steps[p]))
    r = np.asarray(R) + log_weight
    i = int(np.argmax(r))
    return Status.HOLDS, float(r[i]), i


def _stability_verdict(name: str, P: int, logs: list, arg: int, series: Status,
                       witness_key: str, diag: dict) -> ConditionVerdict:
    """logs = [log C(P), log C(P/2), log C(P/4)] from successive truncations."""
    tol = math.log1p(STABLE_REL)
    diag = {**diag, "log_C_by_truncation": logs, "policy": "P-doubling stability within 1%"}
    if series is Status.REFUTED:
        return ConditionVerdict(name, P, Status.REFUTED, None,
                                {"p": P, "lhs": math.inf, "rhs": math.inf, "scale": "log",
                                 "note": "underlying series diverges"}, {}, diag)
    if series is not Status.HOLDS or not math.isfinite(logs[0]):
        return ConditionVerdict(name, P, Status.INCONCLUSIVE, None, None, {}, diag)
    if abs(logs[0] - logs[1]) <= tol:
        return ConditionVerdict(name, P, Status.HOLDS, {witness_key: math.exp(logs[0]), "argmax_p": arg},
                                None, {}, diag)
    if all(math.isfinite(v) for v in logs) and logs[0] - logs[1] > tol and logs[1] - logs[2] > tol:
        return ConditionVerdict(name, P, Status.REFUTED, None,
                                {"p": arg, "lhs": logs[0], "rhs": logs[1], "scale": "log",
                                 "note": "constant keeps growing under P-doubling"}, {}, diag)
    return ConditionVerdict(name, P, Status.INCONCLUSIVE, None, None, {}, diag)


def check_snq(seq: WeightSequence, P: int = DEFAULT_P) -> ConditionVerdict:
    """sum_{q>=p} 1/((q+1) m_q) <= C / m_p; C stabilized under P-doubling."""
    P = _clamp(seq, P)
    nq = check_nq(seq, P)
    q = seq.log_quotients(P + 1)
    lp = np.log(np.arange(1, P + 2, dtype=float))
    log_u = -lp - q
    logs, arg0 = [], -1
    for k in range(3):
        n = P >> k
        st, v, arg = _suffix_ratio_constant(log_u[: n + 1], -lp[: n + 1])
        logs.append(v if st is Status.HOLDS else math.inf)
        if k == 0:
            arg0 = arg
    series = nq.status if nq.status is not Status.HOLDS else Status.HOLDS
    return _stability_verdict("snq", P, logs, arg0, series, "C", {"nq": nq.status.value})


def check_gamma_beta(seq: WeightSequence, beta: float, P: int = DEFAULT_P) -> ConditionVerdict:
    """sum_{q>=p} m_q^(-1/beta) <= C (p+1) m_p^(-1/beta)."""
    if not beta > 0:
        raise ValueError("beta must be positive")
    P = _clamp(seq, P)
    q = seq.log_quotients(P + 1)
    log_u = -q / beta
    steps = -seq.log_steps(P + 1) / beta
    weight = -np.log(np.arange(1, P + 2, dtype=float))
    logs, arg0, series = [], -1, Status.INCONCLUSIVE
    for k in range(3):
        n = P >> k
        st, v, arg = _suffix_ratio_constant(log_u[: n + 1], weight[: n + 1], steps)
        if k == 0:
            arg0 = arg
            series = st if st is not Status.INCONCLUSIVE else series_tail(log_u).status
        logs.append(v if st is Status.HOLDS else math.inf)
    return _stability_verdict(f"gamma_beta({beta:g})", P, logs, arg0, series, "C", {"beta": beta})


def _drops(c_diff: Sequence[float]) -> tuple:
    """For c with c_diff[q-1] = c[q-1] - c[q]: F[q] = max_{p<=q} c_p - c_q and its argmax p.

    The forward scan F(q) = max(0, F(q-1) + c_{q-1} - c_q) touches only
    adjacent differences, so sequences with huge absolute values keep their
    small relative variation.
    """
    n = len(c_diff) + 1
    F, A = [0.0] * n, [0] * n
    for q in range(1, n):
        v = F[q - 1] + c_diff[q - 1]
        if v > 0:
            F[q], A[q] = v, A[q - 1]
        else:
            A[q] = q
    return F, A


def check_almost_increasing(log_values: Sequence[float],
                            base_steps: Optional[Sequence[float]] = None) -> ConditionVerdict:
    """c_p <= a c_q for all q >= p, via a prefix-maximum scan in log domain.

    The log-sequence is log_values plus a base given by its adjacent steps
    (base_{p+1} - base_p), so a large base such as log quotients never has
    to be materialized.  At finite length a always
    exists.  Divergence is judged on the largest drop ending in the trailing
    window (P/2, P] against the same quantity on (P/4, P/2]: growth above
    AI_MARGIN relative to the drop counts as divergence.
    """
    v = np.asarray(log_values, dtype=float)
    if v.size == 0:
        raise ValueError("need at least one value")
    d = v[:-1] - v[1:]
    if base_steps is not None:
        d = d - np.asarray(base_steps, dtype=float)
    F, A = _drops(d.tolist())
    P = v.size - 1
    j = max(range(P + 1), key=F.__getitem__)
    la = F[j]
    tail = max(F[P // 2 + 1:], default=0.0)
    tail_half = max(F[P // 4 + 1: P // 2 + 1], default=0.0)
    growth = tail - tail_half
    diag = {"log_a": la, "trailing_drop": tail, "trailing_drop_half": tail_half, "growth": growth,
            "policy": "trailing-window drop growing by more than 1% per doubling counts as divergence"}
    if P >= 4 and growth > max(1e-9, AI_MARGIN * abs(tail)):
        q = P // 2 + 1 + int(np.argmax(F[P // 2 + 1:]))
        return ConditionVerdict("almost_increasing", P, Status.REFUTED, {"a": math.exp(la)},
                                {"p": A[q], "q": q, "log_drop": F[q], "scale": "log"}, {}, diag)
    return ConditionVerdict("almost_increasing", P, Status.HOLDS, {"a": math.exp(la), "p": A[j], "q": j},
                            None, {}, diag)


# ---------------------------------------------------------------------------
# relations between sequences


def _log_terms_pair(M: WeightSequence, N: WeightSequence, P: int) -> tuple:
    P = max(1, min(P, M.overflow_horizon, N.overflow_horizon))
    return P, log_term_difference(M, N, P), np.zeros(P + 1)


def inclusion(M: WeightSequence, N: WeightSequence, P: int = DEFAULT_P) -> ConditionVerdict:
    """M subset N: M_p <= C h^p N_p."""
    P, a, b = _log_terms_pair(M, N, P)
    return inclusion_from_logs(a, b, P, "inclusion")


def _exp_or_inf(x: float) -> float:
    return math.exp(x) if x < 709.0 else math.inf


def inclusion_from_logs(a: np.ndarray, b: np.ndarray, P: int, name: str = "inclusion") -> ConditionVerdict:
    diff = np.asarray(a[: P + 1]) - np.asarray(b[: P + 1])
    p = np.arange(P + 1)
    d = diff / np.maximum(p, 1)

    def trail(n: int) -> float:
        lo = max(n // 2, 1)
        return float(np.max(d[lo: n + 1])) if n >= 1 else float(d[0])
    # a nonpositive rate is absorbed by h = 1
    s = [max(trail(P >> k), 0.0) for k in range(3)]
    tol = 1e-9 + STABLE_REL * max(1.0, abs(s[1]))
    diag = {"trailing_sup": s, "policy": "trailing-window sup stable under P-doubling"}
    if s[0] <= s[1] + tol:
        log_h = s[0]
        log_C = max(float(np.max(diff - p * log_h)), 0.0)
        return ConditionVerdict(name, P, Status.HOLDS, {"C": _exp_or_inf(log_C), "h": _exp_or_inf(log_h),
                                                        "log_C": log_C, "log_h": log_h}, None, {}, diag)
    if s[1] > s[2] + tol or P < 8:
        i = int(np.argmax(d[max(P // 2, 1):])) + max(P // 2, 1)
        return ConditionVerdict(name, P, Status.REFUTED, None,
                                {"p": i, "lhs": float(a[i]), "rhs": float(b[i] + i * max(s[1], 0.0)),
                                 "scale": "log", "note": "excess rate grows across doublings"},
                                {}, diag)
    return ConditionVerdict(name, P, Status.INCONCLUSIVE, None, None, {}, diag)


def equivalence(M: WeightSequence, N: WeightSequence, P: int = DEFAULT_P) -> ConditionVerdict:
    P, a, b = _log_terms_pair(M, N, P)
    return equivalence_from_logs(a, b, P)


def equivalence_from_logs(a: np.ndarray, b: np.ndarray, P: int) -> ConditionVerdict:
    fwd = inclusion_from_logs(a, b, P)
    bwd = inclusion_from_logs(b, a, P)
    if fwd.holds and bwd.holds:
        status = Status.HOLDS
    elif fwd.refuted or bwd.refuted:
        status = Status.REFUTED
    else:
        status = Status.INCONCLUSIVE
    wit = {"forward": fwd.witness, "backward": bwd.witness} if status is Status.HOLDS else None
    cex = None
    if status is Status.REFUTED:
        cex = {"direction": "forward" if fwd.refuted else "backward",
               **(fwd.counterexample if fwd.refuted else bwd.counterexample)}
    return ConditionVerdict("equivalence", P, status, wit, cex, {},
                            {"forward": fwd.status.value, "backward": bwd.status.value})


@dataclass
class SeqNormValue:
    log_norm: float
    P: int
    argmax: int


def seq_norm(log_abs_c: Sequence[float], M: WeightSequence, h: float, P: Optional[int] = None) -> SeqNormValue:
    """log of sup_p |c_p| / (h^p M_p)."""
    if not h > 0:
        raise ValueError("h must be positive")
    c = np.asarray(log_abs_c, dtype=float)
    P = len(c) - 1 if P is None else min(P, len(c) - 1)
    P = min(P, M.overflow_horizon)
    v = c[: P + 1] - np.arange(P + 1) * math.log(h) - M.log_terms(P)
    i = int(np.argmax(v))
    return SeqNormValue(float(v[i]), P, i)


def witness_holds_at(seq: WeightSequence, verdict: ConditionVerdict, p: int, tol: float = 1e-9) -> bool:
    """Re-evaluate the witnessed inequality of an sm/dc verdict at one index."""
    w = verdict.witness
    logC = math.log(w["C0"]) if w["C0"] > 0 else -math.inf
    if verdict.condition == "dc":
        lhs = seq.log_quotient(p)
    elif verdict.condition == "sm":
        d = seq.log_quotient(p + 1) - seq.log_quotient(p)
        if d <= 0:
            return True
        lhs = math.log(d)
    else:
        raise ValueError("re-check supports sm and dc")
    return lhs <= logC + (p + 1) * math.log(w["H"]) + tol * max(1.0, abs(lhs))
