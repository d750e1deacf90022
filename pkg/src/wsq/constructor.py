"""Weight sequences with prescribed behaviour built from growth control functions.

A growth control function g is strictly increasing with g(0) = 1 and
g -> infinity.  Given nodes 0 = p_0 < p_1 < ..., the builder sets
m_{p_j} = g(p_j) and keeps the quotient constant up to the next node.
Multiplying by a Gevrey sequence of order beta then prescribes gamma = beta
when the node ratios p_{j+1}/p_j are unbounded.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from .conditions import Status
from .sequences import (Gevrey, OscillatingSM, ParameterError, PiecewiseConstant, WeightSequence,
                        make_sequence, oscillating_nodes, product)


@dataclass(frozen=True)
class GrowthControl:
    """A growth control function, evaluated as log g(t)."""

    family: str
    params: Tuple[float, ...] = ()
    parts: Tuple["GrowthControl", ...] = ()
    table: Tuple[float, ...] = ()

    def log(self, t: float) -> float:
        f = self.family
        if f == "exp_pow":
            (H,) = self.params
            return 0.0 if t == 0 else _safe_pow(H, t)
        if f == "double_exp":
            (H,) = self.params
            if t == 0:
                return 0.0
            try:
                return math.exp(_safe_pow(H, t))
            except OverflowError:
                return math.inf
        if f == "poly_shift":
            (beta,) = self.params
            return beta * math.log1p(t)
        if f == "product":
            return self.parts[0].log(t) + self.parts[1].log(t)
        if f == "table":
            i = int(t)
            if i != t or not 0 <= i < len(self.table):
                raise ParameterError(f"custom table has no value at t={t}")
            return self.table[i]
        raise ParameterError(f"unknown growth control family {f!r}")

    def label(self) -> str:
        if self.family == "product":
            return f"{self.parts[0].label()}*{self.parts[1].label()}"
        if self.family == "table":
            return f"table[{len(self.table)}]"
        return f"{self.family}({','.join(f'{p:g}' for p in self.params)})"

    def validate(self, upto: int = 64) -> None:
        """Check log g(0) = 0 and strict increase on an integer grid."""
        if self.log(0) != 0.0:
            raise ParameterError("growth control must satisfy g(0) = 1")
        n = min(upto, len(self.table) - 1) if self.family == "table" else upto
        vals = [self.log(t) for t in range(n + 1)]
        finite = [v for v in vals if math.isfinite(v)]
        if any(b <= a for a, b in zip(finite, finite[1:])):
            raise ParameterError(f"{self.label()} is not strictly increasing on the grid")


def _safe_pow(H: float, t: float) -> float:
    try:
        return H ** t
    except OverflowError:
        return math.inf


def exp_pow(H: float) -> GrowthControl:
    if not H > 1:
        raise ParameterError("exp_pow needs H > 1")
    return GrowthControl("exp_pow", (H,))


def double_exp(H: float) -> GrowthControl:
    if not H > 1:
        raise ParameterError("double_exp needs H > 1")
    return GrowthControl("double_exp", (H,))


def poly_shift(beta: float) -> GrowthControl:
    if beta < 0:
        raise ParameterError("poly_shift needs beta >= 0")
    return GrowthControl("poly_shift", (beta,))


def control_product(a: GrowthControl, b: GrowthControl) -> GrowthControl:
    return GrowthControl("product", parts=(a, b))


def custom_control(log_values: Sequence[float]) -> GrowthControl:
    return GrowthControl("table", table=tuple(float(v) for v in log_values))


@dataclass(frozen=True)
class NodeSeq:
    """Strictly increasing integer nodes with p_0 = 0."""

    tag: str
    ratio: float = 0.0
    values: Tuple[int, ...] = ()
    _memo: dict = field(default_factory=dict, compare=False, repr=False, hash=False)

    def __post_init__(self):
        if self.tag == "explicit":
            v = self.values
            if not v or v[0] != 0 or any(b <= a for a, b in zip(v, v[1:])):
                raise ParameterError("explicit nodes must start at 0 and increase strictly")
        if self.tag == "geometric" and not self.ratio > 1:
            raise ParameterError("geometric nodes need ratio > 1")

    @property
    def divergent_ratio(self) -> Optional[bool]:
        """Whether sup p_{j+1}/p_j is infinite; None when only a finite list is known."""
        return {"factorial": True, "recursive": True, "geometric": False}.get(self.tag)

    def node(self, j: int) -> int:
        if j in self._memo:
            return self._memo[j]
        if self.tag == "factorial":
            # 0, then j! for j >= 1; 0! = 1! is listed once
            v = 0 if j == 0 else math.factorial(j)
        elif self.tag == "recursive":
            v = 0 if j == 0 else 1 + (j - 1) * self.node(j - 1)
        elif self.tag == "geometric":
            v = 0 if j == 0 else max(self.node(j - 1) + 1, int(math.floor(self.ratio ** j)))
        elif self.tag == "explicit":
            if j >= len(self.values):
                # beyond the list the last gap is repeated
                gap = self.values[-1] - self.values[-2] if len(self.values) > 1 else 1
                v = self.values[-1] + gap * (j - len(self.values) + 1)
            else:
                v = self.values[j]
        else:
            raise ParameterError(f"unknown node generator {self.tag!r}")
        self._memo[j] = v
        return v

    def upto(self, p: int) -> List[int]:
        out, j = [], 0
        while self.node(j) <= p:
            out.append(self.node(j))
            j += 1
        return out


def factorial_nodes() -> NodeSeq:
    return NodeSeq("factorial")


def recursive_nodes() -> NodeSeq:
    return NodeSeq("recursive")


def geometric_nodes(r: float) -> NodeSeq:
    return NodeSeq("geometric", ratio=r)


def explicit_nodes(values: Sequence[int]) -> NodeSeq:
    return NodeSeq("explicit", values=tuple(int(v) for v in values))


def build_from_growth_control(g: GrowthControl, nodes: NodeSeq) -> WeightSequence:
    g.validate()
    spec = PiecewiseConstant(g.log, nodes.node, label=f"piecewise[{g.label()};{nodes.tag}]")
    return make_sequence(spec)


def prescribe_gamma(g: GrowthControl, nodes: NodeSeq, beta: float) -> WeightSequence:
    """Piecewise-constant sequence for g times the Gevrey sequence of order beta."""
    if beta < 0:
        raise ParameterError("beta must be >= 0")
    if nodes.divergent_ratio is not True:
        raise ParameterError("node generator must have unbounded ratios p_{j+1}/p_j")
    base = build_from_growth_control(g, nodes)
    if beta == 0:
        return base
    out = product(base, make_sequence(Gevrey(beta)))
    out.name = f"{base.name}*gevrey({beta:g})"
    return out


def corollary_sm_not_dc(beta: float, H: float = 2.0) -> WeightSequence:
    """(sm) holds, (dc) fails, gamma = beta."""
    return prescribe_gamma(exp_pow(H), factorial_nodes(), beta)


def corollary_not_sm(beta: float, H: float = 2.0) -> WeightSequence:
    """(sm) fails, gamma = beta."""
    return prescribe_gamma(double_exp(H), factorial_nodes(), beta)


def dominated_by(seq: WeightSequence, g: GrowthControl, P: int, tol: float = 1e-12) -> bool:
    """m_p <= g(p) for all p <= P (log domain)."""
    P = min(P, seq.overflow_horizon)
    q = seq.log_quotients(P + 1)
    return all(q[p] <= g.log(p) + tol * max(1.0, abs(g.log(p))) for p in range(P + 1))


def strictly_approaches(seq: WeightSequence, g: GrowthControl, nodes: NodeSeq, P: int,
                        tol: float = 1e-12) -> bool:
    """Dominated by g with equality at every node p_j <= P."""
    P = min(P, seq.overflow_horizon)
    if not dominated_by(seq, g, P, tol):
        return False
    return all(abs(seq.log_quotient(p) - g.log(p)) <= tol * max(1.0, abs(g.log(p)))
               for p in nodes.upto(P))


@dataclass
class UniformControlVerdict:
    status: Status
    samples: List[dict]


def uniform_controls(gfam: Callable[[float], GrowthControl], hfam: Callable[[float], GrowthControl],
                     samples: Sequence[Tuple[float, float, float]], T: float = 64.0,
                     step: float = 0.25) -> UniformControlVerdict:
    """For each (l, l1, beta): A = sup_t log(g_l h_beta / g_l1), coarse vs refined grid.

    The refined grid halves the step and doubles the range; A is accepted
    when it is finite and does not grow under refinement.
    """
    out, status = [], Status.HOLDS

    def sup_log_ratio(l, l1, beta, t_max, dt):
        g, g1, h = gfam(l), gfam(l1), hfam(beta)
        best, lower_ok = -math.inf, True
        for t in np.arange(0.0, t_max + dt / 2, dt):
            lg, lh, lg1 = g.log(t), h.log(t), g1.log(t)
            if lh < -1e-12:
                lower_ok = False
            if math.isinf(lg1) and not math.isinf(lg + lh):
                continue
            # g_l and g_l1 first, so a small h is not lost next to huge g
            best = max(best, (lg - lg1) + lh)
        return best, lower_ok

    for l, l1, beta in samples:
        a, ok1 = sup_log_ratio(l, l1, beta, T, step)
        b, ok2 = sup_log_ratio(l, l1, beta, 2 * T, step / 2)
        grew = not math.isfinite(b) or b > a + 1e-9 + 0.01 * abs(a)
        st = Status.REFUTED if (grew or not (ok1 and ok2)) else Status.HOLDS
        if st is Status.REFUTED:
            status = Status.REFUTED
        out.append({"l": l, "l1": l1, "beta": beta, "log_A": a, "log_A_refined": b,
                    "status": st.value})
    return UniformControlVerdict(status, out)


def oscillating_sm_example() -> WeightSequence:
    """Quotients log m_p = n^(p_n) on [p_n, p_{n+1}-1] with p_1 = 1, p_{n+1} = 1 + n p_n."""
    return make_sequence(OscillatingSM())


def oscillating_diagnostics(n_max: int) -> List[dict]:
    """Root diagnostics at the start and end of each block, for n = 1..n_max."""
    seq = oscillating_sm_example()
    nodes = oscillating_nodes(10 ** 9)
    rows = []
    for n in range(1, n_max + 1):
        pn, pn1 = nodes[n - 1], nodes[n]
        if pn1 - 1 > seq.overflow_horizon:
            break
        start = math.exp(math.log(seq.log_quotient(pn)) / pn)
        end = math.exp(math.log(seq.log_quotient(pn1 - 1)) / (pn1 - 1))
        rows.append({"n": n, "p_n": pn, "root_at_node": start, "root_at_block_end": end})
    return rows
