"""Weight sequences in the log domain.

A sequence (M_p) is stored through its log-quotients log m_p, where
m_p = M_{p+1}/M_p, together with memoized prefix sums log M_p.  All families
that grow too fast for linear-scale floats are handled this way.

Every sequence has an overflow horizon: the largest index p for which the
quotient and the term are representable.  Requests past it raise
:class:`HorizonError`.
"""

from __future__ import annotations

import bisect
import csv
import math
import threading
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

MAX_INDEX = 1 << 22
_FLOAT_MAX = np.finfo(float).max


class WsqError(Exception):
    """Base class for library errors."""


class ParameterError(WsqError, ValueError):
    """Invalid family parameters or malformed input."""


class PreconditionError(WsqError):
    """An operation was applied outside its precondition."""


class HorizonError(WsqError):
    """Requested index lies beyond the overflow horizon."""

    def __init__(self, p: int, horizon: int, partial: Optional[float] = None):
        self.p = p
        self.horizon = horizon
        self.partial = partial
        msg = f"index {p} beyond overflow horizon {horizon}"
        if partial is not None:
            msg += f" (partial bound {partial:.6g})"
        super().__init__(msg)


def _pow_diff(p: float, sigma: float) -> float:
    # (p+1)^sigma - p^sigma without cancellation
    if p == 0:
        return 1.0
    try:
        return math.exp(sigma * math.log(p)) * math.expm1(sigma * math.log1p(1.0 / p))
    except OverflowError:
        return math.inf


def _self_pow(n: int) -> float:
    """n^n as a float, inf on overflow (0^0 = 1)."""
    if n == 0:
        return 1.0
    try:
        return math.exp(n * math.log(n))
    except OverflowError:
        return math.inf


# ---------------------------------------------------------------------------
# quotient rules


class QuotientSpec(ABC):
    """A rule p -> log m_p."""

    @abstractmethod
    def log_quotient(self, p: int) -> float: ...

    def log_quotients(self, start: int, stop: int) -> np.ndarray:
        return np.array([self.log_quotient(p) for p in range(start, stop)], dtype=float)

    def log_steps(self, start: int, stop: int) -> np.ndarray:
        """log m_{p+1} - log m_p for start <= p < stop.

        Composite specs add the steps of their parts, so small factors stay
        visible next to astronomically large ones.
        """
        return np.diff(self.log_quotients(start, stop + 1))

    def offset(self) -> float:
        """Additive constant so that the true log-term is offset + sum of quotients."""
        return 0.0

    def components(self) -> tuple:
        """(coefficient, leaf spec, index shift) triples whose weighted quotients add up to ours."""
        return ((1, self, 0),)

    def max_index(self) -> int:
        return MAX_INDEX

    def describe(self) -> str:
        return repr(self)


@dataclass(frozen=True)
class Gevrey(QuotientSpec):
    alpha: float

    def __post_init__(self):
        if not self.alpha > 0:
            raise ParameterError("gevrey needs alpha > 0")

    def log_quotient(self, p: int) -> float:
        return self.alpha * math.log(p + 1)

    def log_quotients(self, start: int, stop: int) -> np.ndarray:
        return self.alpha * np.log(np.arange(start + 1, stop + 1, dtype=float))

    def describe(self) -> str:
        return f"gevrey:alpha={self.alpha:g}"


@dataclass(frozen=True)
class LogPerturbedGevrey(QuotientSpec):
    """M_p = p!^alpha * prod_{j<=p} log(e+j)^beta."""

    alpha: float
    beta: float

    def __post_init__(self):
        if not self.alpha > 0:
            raise ParameterError("log-perturbed gevrey needs alpha > 0")

    def log_quotient(self, p: int) -> float:
        return self.alpha * math.log(p + 1) + self.beta * math.log(math.log(math.e + p + 1))

    def log_quotients(self, start: int, stop: int) -> np.ndarray:
        p = np.arange(start, stop, dtype=float)
        return self.alpha * np.log(p + 1) + self.beta * np.log(np.log(math.e + p + 1))

    def describe(self) -> str:
        return f"logpgevrey:alpha={self.alpha:g},beta={self.beta:g}"


@dataclass(frozen=True)
class QGevrey(QuotientSpec):
    """M_p = q^(p^sigma)."""

    q: float
    sigma: float

    def __post_init__(self):
        if not self.q > 1:
            raise ParameterError("qgevrey needs q > 1")
        if not self.sigma > 0:
            raise ParameterError("qgevrey needs sigma > 0")

    def log_quotient(self, p: int) -> float:
        return _pow_diff(p, self.sigma) * math.log(self.q)

    def log_quotients(self, start: int, stop: int) -> np.ndarray:
        p = np.arange(start, stop, dtype=float)
        with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
            lp = np.log(np.where(p > 0, p, 1.0))
            d = np.exp(self.sigma * lp) * np.expm1(self.sigma * np.log1p(1.0 / np.where(p > 0, p, 1.0)))
        d = np.where(p == 0, 1.0, d)
        return d * math.log(self.q)

    def describe(self) -> str:
        return f"qgevrey:q={self.q:g},sigma={self.sigma:g}"


@dataclass(frozen=True)
class PowerFamily(QuotientSpec):
    """M_p = p^(tau p^sigma) for p >= 2, with M_0 = M_1 = 1."""

    tau: float
    sigma: float

    def __post_init__(self):
        if not self.tau > 0:
            raise ParameterError("power family needs tau > 0")
        if not self.sigma > 1:
            raise ParameterError("power family needs sigma > 1")

    def _log_term(self, p: float) -> float:
        if p < 2:
            return 0.0
        return self.tau * p ** self.sigma * math.log(p)

    def log_quotient(self, p: int) -> float:
        if p == 0:
            return 0.0
        try:
            return self._log_term(p + 1) - self._log_term(p)
        except OverflowError:
            return math.inf

    def log_quotients(self, start: int, stop: int) -> np.ndarray:
        p = np.arange(start, stop, dtype=float)
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            nxt = self.tau * (p + 1) ** self.sigma * np.log(p + 1)
            cur = np.where(p >= 2, self.tau * p ** self.sigma * np.log(np.maximum(p, 1.0)), 0.0)
            out = np.where(p >= 1, nxt - cur, 0.0)
        return out

    def describe(self) -> str:
        return f"power:tau={self.tau:g},sigma={self.sigma:g}"


@dataclass(frozen=True)
class QPP(QuotientSpec):
    """M_p = q^(p^p), M_0 = 1."""

    q: float

    def __post_init__(self):
        if not self.q > 1:
            raise ParameterError("qpp needs q > 1")

    def log_quotient(self, p: int) -> float:
        a = _self_pow(p + 1)
        if p == 0:
            # M_1 = q^1, M_0 = 1
            return math.log(self.q)
        return (a - _self_pow(p)) * math.log(self.q)

    def describe(self) -> str:
        return f"qpp:q={self.q:g}"


def oscillating_nodes(limit: int) -> list:
    """Nodes 1, 2, 5, 16, ... with p_{n+1} = 1 + n p_n, up to the first node > limit."""
    nodes = [1]
    n = 1
    while nodes[-1] <= limit:
        nodes.append(1 + n * nodes[-1])
        n += 1
    return nodes


@dataclass(frozen=True)
class OscillatingSM(QuotientSpec):
    """log m_p = n^(p_n) on [p_n, p_{n+1}-1], m_0 = 1."""

    def log_quotient(self, p: int) -> float:
        if p == 0:
            return 0.0
        nodes = oscillating_nodes(p)
        n = max(i for i, pn in enumerate(nodes, start=1) if pn <= p)
        pn = nodes[n - 1]
        try:
            return float(n) ** pn
        except OverflowError:
            return math.inf

    def describe(self) -> str:
        return "oscillating"


@dataclass(frozen=True)
class Constant(QuotientSpec):
    """All quotients equal exp(value)."""

    value: float = 0.0

    def log_quotient(self, p: int) -> float:
        return self.value

    def log_quotients(self, start: int, stop: int) -> np.ndarray:
        return np.full(max(stop - start, 0), self.value)

    def describe(self) -> str:
        return f"const:log_m={self.value:g}"


@dataclass(frozen=True)
class ExplicitTable(QuotientSpec):
    values: Tuple[float, ...]

    def __init__(self, values: Sequence[float]):
        object.__setattr__(self, "values", tuple(float(v) for v in values))
        if not self.values:
            raise ParameterError("explicit table must be nonempty")
        if not all(math.isfinite(v) for v in self.values):
            raise ParameterError("explicit table entries must be finite")

    def log_quotient(self, p: int) -> float:
        return self.values[p]

    def log_quotients(self, start: int, stop: int) -> np.ndarray:
        return np.asarray(self.values[start:stop], dtype=float)

    def max_index(self) -> int:
        return len(self.values) - 1

    def describe(self) -> str:
        return f"table[{len(self.values)}]"


@dataclass(frozen=True)
class PiecewiseConstant(QuotientSpec):
    """m_p = g(p_j) for p_j <= p < p_{j+1}.

    ``log_g`` maps a node to log g(node); ``nodes`` is a callable j -> p_j
    returning strictly increasing integers with p_0 = 0.
    """

    log_g: Callable[[float], float]
    node: Callable[[int], int]
    label: str = "piecewise"
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    def nodes_upto(self, p: int) -> list:
        nodes = self._cache.setdefault("nodes", [self.node(0)])
        while nodes[-1] <= p:
            nodes.append(self.node(len(nodes)))
        return nodes

    def _node_at_or_below(self, p: int) -> int:
        nodes = self.nodes_upto(p)
        return nodes[bisect.bisect_right(nodes, p) - 1]

    def log_quotient(self, p: int) -> float:
        pj = self._node_at_or_below(p)
        try:
            return float(self.log_g(pj))
        except OverflowError:
            return math.inf

    def describe(self) -> str:
        return self.label


@dataclass(frozen=True)
class Product(QuotientSpec):
    a: QuotientSpec
    b: QuotientSpec

    def log_quotient(self, p: int) -> float:
        return self.a.log_quotient(p) + self.b.log_quotient(p)

    def log_quotients(self, start: int, stop: int) -> np.ndarray:
        return self.a.log_quotients(start, stop) + self.b.log_quotients(start, stop)

    def log_steps(self, start: int, stop: int) -> np.ndarray:
        return self.a.log_steps(start, stop) + self.b.log_steps(start, stop)

    def components(self) -> tuple:
        return self.a.components() + self.b.components()

    def offset(self) -> float:
        return self.a.offset() + self.b.offset()

    def max_index(self) -> int:
        return min(self.a.max_index(), self.b.max_index())

    def describe(self) -> str:
        return f"{self.a.describe()}|prod({self.b.describe()})"


@dataclass(frozen=True)
class Hat(QuotientSpec):
    base: QuotientSpec
    sign: int = 1

    def log_quotient(self, p: int) -> float:
        return self.base.log_quotient(p) + self.sign * math.log(p + 1)

    def log_quotients(self, start: int, stop: int) -> np.ndarray:
        return self.base.log_quotients(start, stop) + self.sign * np.log(
            np.arange(start + 1, stop + 1, dtype=float))

    def log_steps(self, start: int, stop: int) -> np.ndarray:
        p = np.arange(start, stop, dtype=float)
        return self.base.log_steps(start, stop) + self.sign * np.log1p(1.0 / (p + 1))

    def components(self) -> tuple:
        return self.base.components() + ((self.sign, Gevrey(1.0), 0),)

    def offset(self) -> float:
        return self.base.offset()

    def max_index(self) -> int:
        return self.base.max_index()

    def describe(self) -> str:
        return self.base.describe() + ("|hat" if self.sign > 0 else "|check")


@dataclass(frozen=True)
class Shift(QuotientSpec):
    """Quotients of (M_{p+k}); the offset log M_k is carried explicitly."""

    base: QuotientSpec
    k: int
    base_offset: float = 0.0

    def log_quotient(self, p: int) -> float:
        return self.base.log_quotient(p + self.k)

    def log_quotients(self, start: int, stop: int) -> np.ndarray:
        return self.base.log_quotients(start + self.k, stop + self.k)

    def log_steps(self, start: int, stop: int) -> np.ndarray:
        return self.base.log_steps(start + self.k, stop + self.k)

    def components(self) -> tuple:
        return tuple((c, leaf, sh + self.k) for c, leaf, sh in self.base.components())

    def offset(self) -> float:
        return self.base_offset

    def max_index(self) -> int:
        return self.base.max_index() - self.k

    def describe(self) -> str:
        return self.base.describe() + ("|shift1" if self.k == 1 else f"|shift{self.k}")


LC_TOL = 1e-12


def _tilde_factor(base: QuotientSpec, start: int, stop: int) -> np.ndarray:
    """log(2 + delta_{p+1}) for start <= p < stop, delta_{p+1} = log(m_{p+1}/m_p)."""
    d = base.log_steps(start, stop)
    q = base.log_quotients(start, stop)
    if np.any(d < -LC_TOL * np.maximum(1.0, np.abs(q))):
        p = start + int(np.argmax(d < -LC_TOL * np.maximum(1.0, np.abs(q))))
        raise PreconditionError(f"tilde needs a log-convex input; m_{p + 1} < m_{p}")
    return np.log(2.0 + np.maximum(d, 0.0))


@dataclass(frozen=True)
class TildeFactor(QuotientSpec):
    """Quotients of (2 + delta_{p+1})_p, the factor separating M~ from M_{+1}."""

    base: QuotientSpec

    def log_quotient(self, p: int) -> float:
        return float(self.log_quotients(p, p + 1)[0])

    def log_quotients(self, start: int, stop: int) -> np.ndarray:
        return np.diff(_tilde_factor(self.base, start, stop + 1))

    def max_index(self) -> int:
        return self.base.max_index() - 2


@dataclass(frozen=True)
class Tilde(QuotientSpec):
    """Quotients of M~_p = M_{p+1} (2 + log(m_{p+1}/m_p))."""

    base: QuotientSpec
    base_offset: float = 0.0

    def _delta(self, p: int) -> float:
        # log(m_{p+1}/m_p) for p >= 0
        d = self.base.log_quotient(p + 1) - self.base.log_quotient(p)
        if d < -LC_TOL * max(1.0, abs(self.base.log_quotient(p))):
            raise PreconditionError(f"tilde needs a log-convex input; m_{p + 1} < m_{p}")
        return max(d, 0.0)

    def log_quotient(self, p: int) -> float:
        return (self.base.log_quotient(p + 1) + math.log(2.0 + self._delta(p + 1))
                - math.log(2.0 + self._delta(p)))

    def log_steps(self, start: int, stop: int) -> np.ndarray:
        f = _tilde_factor(self.base, start, stop + 2)
        return self.base.log_steps(start + 1, stop + 1) + (f[2:] - 2 * f[1:-1] + f[:-2])

    def offset(self) -> float:
        return self.base_offset + self.base.log_quotient(0) + math.log(2.0 + self._delta(0))

    def max_index(self) -> int:
        return self.base.max_index() - 2

    def components(self) -> tuple:
        return tuple((c, leaf, sh + 1) for c, leaf, sh in self.base.components()) + \
            ((1, TildeFactor(self.base), 0),)

    def describe(self) -> str:
        return self.base.describe() + "|tilde"


# ---------------------------------------------------------------------------
# the sequence object


def _ok(v: float, p: int) -> bool:
    return math.isfinite(v) and abs(v) * (p + 1) < _FLOAT_MAX


def _find_horizon(spec: QuotientSpec) -> int:
    """Largest p with log m_p (and hence log M_{p+1}) representable.

    Tables are scanned entrywise.  Closed forms are probed at doubling
    indices and then bisected, which relies on overflow being persistent
    once it occurs (true for every built-in family).
    """
    cap = spec.max_index()
    if cap < 0:
        raise ParameterError("sequence has no valid indices")
    if isinstance(spec, ExplicitTable):
        return cap
    good = lambda p: _ok(spec.log_quotient(p), p)
    if not good(0):
        raise ParameterError("log m_0 is not representable")
    lo, step = 0, 1
    while True:
        hi = min(lo + step, cap)
        if hi == lo:
            return lo
        if not good(hi):
            break
        lo, step = hi, step * 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if good(mid):
            lo = mid
        else:
            hi = mid
    return lo


class WeightSequence:
    """A sequence with memoized log-quotients and log-terms.

    ``log_term(p)`` returns the true log M_p, including the additive offset
    carried by shifted and transformed sequences.
    """

    _CHUNK = 256

    def __init__(self, spec: QuotientSpec, name: Optional[str] = None):
        self.spec = spec
        self.name = name or spec.describe()
        self.overflow_horizon = _find_horizon(spec)
        self._offset = float(spec.offset())
        self._lock = threading.Lock()
        self._q = np.empty(0)
        self._sums = np.zeros(1)
        self.lc_verified_up_to = -1

    def __repr__(self) -> str:
        return f"WeightSequence({self.name}, horizon={self.overflow_horizon})"

    @property
    def offset(self) -> float:
        return self._offset

    def _extend(self, n: int) -> None:
        # make quotients 0..n-1 and sums 0..n available
        if n <= len(self._q):
            return
        with self._lock:
            have = len(self._q)
            if n <= have:
                return
            target = min(max(n, 2 * have, self._CHUNK), self.overflow_horizon + 1)
            fresh = np.asarray(self.spec.log_quotients(have, target), dtype=float)
            sums = np.cumsum(np.concatenate(([self._sums[-1]], fresh)))
            self._q = np.concatenate((self._q, fresh))
            self._sums = np.concatenate((self._sums, sums[1:]))

    def _guard(self, p: int) -> None:
        if p < 0:
            raise ValueError("negative index")
        if p > self.overflow_horizon:
            raise HorizonError(p, self.overflow_horizon)

    def log_quotient(self, p: int) -> float:
        self._guard(p)
        self._extend(p + 1)
        return float(self._q[p])

    def log_term(self, p: int) -> float:
        self._guard(p)
        self._extend(p)
        return float(self._offset + self._sums[p])

    def log_quotients(self, n: int) -> np.ndarray:
        """log m_0 .. log m_{n-1}."""
        if n > 0:
            self._guard(n - 1)
            self._extend(n)
        return self._q[:n].copy()

    def log_steps(self, n: int) -> np.ndarray:
        """log m_{p+1} - log m_p for p = 0..n-2, accumulated part by part."""
        if n - 1 > self.overflow_horizon:
            self._guard(n - 1)
        return self.spec.log_steps(0, max(n - 1, 0))

    def log_terms(self, n: int) -> np.ndarray:
        """log M_0 .. log M_n (n+1 values)."""
        self._guard(n)
        self._extend(n)
        return self._offset + self._sums[: n + 1]

    def quotient_table(self, n: int) -> np.ndarray:
        return self.log_quotients(n)


def _component_key(leaf: QuotientSpec, sh: int):
    try:
        hash(leaf)
        return (leaf, sh)
    except TypeError:
        return ("id", id(leaf), sh)


def log_term_difference(a: WeightSequence, b: WeightSequence, P: int) -> np.ndarray:
    """log A_p - log B_p for p = 0..P with shared factors cancelled exactly.

    Both sequences are split into leaf quotient rules; identical leaves at
    identical shifts drop out before anything is summed, so for instance
    M~ against M_{+1} only ever touches the factor (2 + delta_{p+1}).
    """
    coef, leaves = {}, {}
    for sign, seq in ((1, a), (-1, b)):
        for c, leaf, sh in seq.spec.components():
            key = _component_key(leaf, sh)
            coef[key] = coef.get(key, 0) + sign * c
            leaves[key] = (leaf, sh)
    resid = np.zeros(P)
    for key, c in coef.items():
        if c:
            leaf, sh = leaves[key]
            resid += c * np.asarray(leaf.log_quotients(sh, sh + P), dtype=float)
    return (a.offset - b.offset) + np.concatenate(([0.0], np.cumsum(resid)))


def make_sequence(spec: QuotientSpec, name: Optional[str] = None) -> WeightSequence:
    return WeightSequence(spec, name)


def log_term(seq: WeightSequence, p: int) -> float:
    return seq.log_term(p)


def hat(seq: WeightSequence) -> WeightSequence:
    return WeightSequence(Hat(seq.spec, 1))


def check(seq: WeightSequence) -> WeightSequence:
    spec = seq.spec
    if isinstance(spec, Hat) and spec.sign == 1:
        return WeightSequence(spec.base)
    return WeightSequence(Hat(spec, -1))


def shift(seq: WeightSequence, k: int = 1) -> WeightSequence:
    if k < 0:
        raise ParameterError("shift needs k >= 0")
    if k == 0:
        return seq
    return WeightSequence(Shift(seq.spec, k, seq.log_term(k)))


def tilde(seq: WeightSequence) -> WeightSequence:
    return WeightSequence(Tilde(seq.spec, seq.offset))


def tilde_log_term(seq: WeightSequence, p: int) -> float:
    """log M~_p = log M_{p+1} + log(2 + delta_{p+1}), evaluated directly."""
    d = seq.log_quotient(p + 1) - seq.log_quotient(p)
    if d < -LC_TOL * max(1.0, abs(seq.log_quotient(p))):
        raise PreconditionError(f"tilde needs a log-convex input; m_{p + 1} < m_{p}")
    return seq.log_term(p + 1) + math.log(2.0 + max(d, 0.0))


def product(a: WeightSequence, b: WeightSequence) -> WeightSequence:
    return WeightSequence(Product(a.spec, b.spec))


def constant_one() -> WeightSequence:
    """The sequence M_p = 1."""
    return WeightSequence(Constant(0.0))


def deltas(seq: WeightSequence, P: int) -> np.ndarray:
    """delta_0 = log m_0, delta_{p+1} = log(m_{p+1}/m_p), for p = 0..P."""
    out = np.empty(P + 1)
    out[0] = seq.log_quotient(0)
    out[1:] = seq.log_steps(P + 1)
    return out


def reconstruct_quotients(d: np.ndarray) -> np.ndarray:
    return np.cumsum(d)


def is_log_convex(seq: WeightSequence, P: int, tol: float = LC_TOL) -> bool:
    q = seq.log_quotients(P + 1)
    return bool(np.all(np.diff(q) >= -tol * np.maximum(1.0, np.abs(q[:-1]))))


# ---------------------------------------------------------------------------
# spec mini-language

_FAMILIES = {
    "gevrey": (Gevrey, ("alpha",)),
    "logpgevrey": (LogPerturbedGevrey, ("alpha", "beta")),
    "qgevrey": (QGevrey, ("q", "sigma")),
    "power": (PowerFamily, ("tau", "sigma")),
    "qpp": (QPP, ("q",)),
    "oscillating": (OscillatingSM, ()),
    "const": (Constant, ("log_m",)),
}


def _split_top(text: str, sep: str) -> list:
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise ParameterError(f"unbalanced parentheses in {text!r}")
        if ch == sep and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    if depth != 0:
        raise ParameterError(f"unbalanced parentheses in {text!r}")
    parts.append("".join(cur))
    return parts


def read_table(path: str) -> ExplicitTable:
    """Read a CSV with header ``p,log_m_p`` and contiguous rows from p=0."""
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise ParameterError(f"cannot read {path}: {exc}") from exc
    if not rows or [c.strip() for c in rows[0]] != ["p", "log_m_p"]:
        raise ParameterError(f"{path}: expected header 'p,log_m_p'")
    values = []
    for i, row in enumerate(r for r in rows[1:] if r):
        try:
            p, v = int(row[0]), float(row[1])
        except (ValueError, IndexError) as exc:
            raise ParameterError(f"{path}: bad row {row}") from exc
        if p != i:
            raise ParameterError(f"{path}: rows must be contiguous from p=0 (got {p} at {i})")
        values.append(v)
    return ExplicitTable(values)


def write_table(seq: WeightSequence, n: int, path: str) -> None:
    q = seq.log_quotients(n + 1)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["p", "log_m_p"])
        for p, v in enumerate(q):
            w.writerow([p, repr(float(v))])


def _parse_base(text: str) -> WeightSequence:
    text = text.strip()
    if text.startswith("file:"):
        path = text[5:]
        return WeightSequence(read_table(path), name=text)
    tag, _, args = text.partition(":")
    tag = tag.strip().lower()
    if tag not in _FAMILIES:
        raise ParameterError(f"unknown family {tag!r}")
    cls, names = _FAMILIES[tag]
    kw = {}
    for item in filter(None, (a.strip() for a in args.split(","))):
        key, eq, val = item.partition("=")
        if not eq or key.strip() not in names:
            raise ParameterError(f"bad parameter {item!r} for {tag}")
        try:
            kw[key.strip()] = float(val)
        except ValueError as exc:
            raise ParameterError(f"parameter {key} is not a number: {val!r}") from exc
    missing = [n for n in names if n not in kw]
    if missing:
        raise ParameterError(f"{tag} is missing {', '.join(missing)}")
    args_in_order = [kw[n] for n in names]
    return WeightSequence(cls(*args_in_order))


def parse_spec(text: str) -> WeightSequence:
    """Parse e.g. ``qgevrey:q=2,sigma=3|hat`` or ``gevrey:alpha=1|prod(qpp:q=2)``."""
    parts = _split_top(text, "|")
    seq = _parse_base(parts[0])
    for mod in parts[1:]:
        mod = mod.strip()
        if mod == "hat":
            seq = hat(seq)
        elif mod == "check":
            seq = check(seq)
        elif mod.startswith("shift"):
            k = mod[5:] or "1"
            if not k.isdigit():
                raise ParameterError(f"bad modifier {mod!r}")
            seq = shift(seq, int(k))
        elif mod == "tilde":
            seq = tilde(seq)
        elif mod.startswith("prod(") and mod.endswith(")"):
            seq = product(seq, parse_spec(mod[5:-1]))
        else:
            raise ParameterError(f"unknown modifier {mod!r}")
    seq.name = text.strip()
    return seq
