"""Command line front end: reports, moment-map verdicts and the worked-example table.

Exit codes: 0 ok, 1 example-table mismatch, 2 parse or usage error,
3 horizon error or a blocking inconclusive result.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional

from . import assoc, conditions as cond, constructor, indices, moments
from .sequences import (HorizonError, ParameterError, PreconditionError, WeightSequence, WsqError, hat,
                        parse_spec, shift, tilde, tilde_log_term, write_table)

SCHEMA = "wsq/1"
EXIT_OK, EXIT_MISMATCH, EXIT_USAGE, EXIT_BLOCKED = 0, 1, 2, 3
FALLBACK_PMAX = 2048


class LatticeViolation(WsqError):
    """Verdicts contradict a known implication between conditions."""


def default_pmax() -> int:
    raw = os.environ.get("WSQ_PMAX_DEFAULT")
    if raw is None:
        return FALLBACK_PMAX
    try:
        v = int(raw)
    except ValueError:
        raise ParameterError(f"WSQ_PMAX_DEFAULT must be an integer, got {raw!r}")
    if v < 8:
        raise ParameterError("WSQ_PMAX_DEFAULT must be at least 8")
    return v


CONDITIONS = {
    "lc": cond.check_lc, "sm": cond.check_sm, "dc": cond.check_dc, "mg": cond.check_mg,
    "alg": cond.check_alg, "nq": cond.check_nq, "snq": cond.check_snq,
}
# antecedent => consequent
IMPLICATIONS = [("mg", "dc"), ("dc", "sm"), ("mg", "sm"), ("snq", "nq")]


def lattice_violations(statuses: Dict[str, cond.Status]) -> List[str]:
    out = []
    for a, b in IMPLICATIONS:
        if statuses.get(a) is cond.Status.HOLDS and statuses.get(b) is cond.Status.REFUTED:
            out.append(f"({a}) holds but ({b}) is refuted")
    return out


def _jsonable(v):
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, cond.Status):
        return v.value
    return v


def dump(obj: dict) -> str:
    return json.dumps(_jsonable({"schema": SCHEMA, **obj}), sort_keys=True, indent=2)


@dataclass
class SequenceReport:
    spec: str
    P: int
    conditions: Dict[str, cond.ConditionVerdict]
    gamma: Optional[indices.IndexBracket]
    omega: Optional[indices.IndexBracket]
    gamma_tilde: Optional[indices.IndexBracket]
    injectivity: Optional[cond.ConditionVerdict]
    surjectivity: Optional[indices.SurjectivityReport]
    target: Optional[moments.TargetClassification]
    errors: Dict[str, str] = field(default_factory=dict)
    timings: Dict[str, float] = field(default_factory=dict)

    def status(self, name: str) -> cond.Status:
        return self.conditions[name].status

    def to_json(self, with_timings: bool = True) -> dict:
        out = {
            "spec": self.spec, "P": self.P,
            "conditions": {k: v.to_json() for k, v in self.conditions.items()},
            "gamma": self.gamma.to_json() if self.gamma else None,
            "omega": self.omega.to_json() if self.omega else None,
            "gamma_tilde": self.gamma_tilde.to_json() if self.gamma_tilde else None,
            "injectivity": self.injectivity.to_json() if self.injectivity else None,
            "surjectivity": self.surjectivity.to_json() if self.surjectivity else None,
            "target": self.target.to_json() if self.target else None,
            "errors": self.errors,
        }
        if with_timings:
            out["timings"] = self.timings
        return out


def _timed(timings: dict, key: str, fn, errors: dict):
    t0 = time.perf_counter()
    try:
        return fn()
    except (HorizonError, PreconditionError) as exc:
        errors[key] = f"{type(exc).__name__}: {exc}"
        return None
    finally:
        timings[key] = round(time.perf_counter() - t0, 4)


def classify(spec: str, P: Optional[int] = None, with_moments: bool = True) -> SequenceReport:
    seq = parse_spec(spec)
    P = min(P or default_pmax(), seq.overflow_horizon)
    timings, errors = {}, {}
    verdicts = {}
    for name, fn in CONDITIONS.items():
        v = _timed(timings, name, lambda fn=fn: fn(seq, P), errors)
        if v is not None:
            verdicts[name] = v
    bad = lattice_violations({k: v.status for k, v in verdicts.items()})
    if bad:
        raise LatticeViolation("; ".join(bad))
    g = _timed(timings, "gamma", lambda: indices.gamma_index(seq, P, permissive=True), errors)
    o = _timed(timings, "omega", lambda: indices.omega_index(seq, P, permissive=True), errors)
    gt = _timed(timings, "gamma_tilde", lambda: indices.gamma_index(tilde(seq), P, permissive=True), errors)
    inj = _timed(timings, "injectivity", lambda: indices.injectivity_test(seq, P), errors)
    sur = _timed(timings, "surjectivity", lambda: indices.surjectivity_test(seq, P), errors)
    tgt = None
    if with_moments:
        tgt = _timed(timings, "target", lambda: moments.classify_target(seq, 40, P), errors)
    return SequenceReport(spec, P, verdicts, g, o, gt, inj, sur, tgt, errors, timings)


# ---------------------------------------------------------------------------
# moment-map verdicts


def _conclusion(statement: str, status: cond.Status, gates: Dict[str, cond.Status]) -> dict:
    established = all(s is cond.Status.HOLDS for s in gates.values())
    return {"statement": statement, "status": status.value,
            "label": "established" if established else "conditional",
            "gates": {k: v.value for k, v in gates.items()}}


def verdict(spec: str, aux_spec: Optional[str] = None, P: Optional[int] = None) -> dict:
    """Which moment-map result applies and what it yields for this sequence."""
    seq = parse_spec(spec)
    P = min(P or default_pmax(), seq.overflow_horizon)
    lc = cond.check_lc(seq, P).status
    sm = cond.check_sm(seq, P).status
    dc = cond.check_dc(seq, P).status
    factorial = parse_spec("gevrey:alpha=1")
    gates: Dict[str, cond.Status] = {"M_weight_sequence": lc}
    if aux_spec:
        aux = parse_spec(aux_spec)
        gates["aux_nq"] = cond.check_nq(aux, P).status
        gates["aux_hat_lc"] = cond.check_lc(hat(aux), P).status
    else:
        gates["aux_nq"] = cond.Status.INCONCLUSIVE
        gates["aux_hat_lc"] = cond.Status.INCONCLUSIVE
    notes = ["gamma(M) <= omega(M): injectivity needs omega <= 2 and surjectivity gamma > 2, "
             "so the moment mapping is never bijective"]
    out = {"spec": spec, "aux_spec": aux_spec, "P": P, "sm": sm.value, "dc": dc.value}

    if sm is cond.Status.HOLDS:
        out["branch"] = "shifted"
        out["target"] = "LambdaM+1" if dc is not cond.Status.HOLDS else "LambdaM+1 = LambdaM"
        g = {**gates, "sm": sm, "factorials_in_M": cond.inclusion(factorial, seq, P).status}
        inj = indices.injectivity_test(seq, P)
        gam = indices.gamma_index(seq, P, permissive=True)
        surj = (cond.Status.HOLDS if gam.lower > 2 else
                cond.Status.REFUTED if gam.upper < 2 else cond.Status.INCONCLUSIVE)
        out["injective"] = _conclusion("criterion: sum m_p^(-1/2) diverges (injective into LambdaM+1)",
                                       inj.status, g)
        out["surjective"] = _conclusion("criterion: gamma(M) > 2 (surjective onto LambdaM+1)",
                                        surj, {**gates, "sm": sm})
        out["gamma"] = gam.to_json()
    elif sm is cond.Status.REFUTED:
        out["branch"] = "tilde"
        out["target"] = "LambdaM~"
        try:
            tseq = tilde(seq)
            t_lc = cond.check_lc(tseq, P).status
            tP = min(P, tseq.overflow_horizon)
            g = {**gates, "M~_weight_sequence": t_lc,
                 "factorials_in_M~": cond.inclusion(factorial, tseq, tP).status}
            inj = indices.injectivity_test(tseq, tP)
            gt = indices.gamma_index(tseq, tP, permissive=True)
            surj = cond.Status.HOLDS if gt.infinite_flag else cond.Status.INCONCLUSIVE
            out["injective"] = _conclusion("criterion: sum m~_p^(-1/2) diverges (injective into LambdaM~)",
                                           inj.status, g)
            out["surjective"] = _conclusion("criterion: gamma(M~) is infinite (surjective onto LambdaM~)", surj, {**gates, "M~_weight_sequence": t_lc})
            out["gamma_tilde"] = gt.to_json()
        except PreconditionError as exc:
            out["error"] = str(exc)
    else:
        out["branch"] = "undetermined"
        out["target"] = None
        notes.append("(sm) could not be decided at this truncation")
    out["notes"] = notes
    return out


# ---------------------------------------------------------------------------
# the worked examples

EXPECTED_ROWS = [
    ("gevrey:alpha=0.5", {"lc": "holds", "mg": "holds", "snq": "holds", "dc": "holds", "sm": "holds"}),
    ("gevrey:alpha=1", {"lc": "holds", "mg": "holds", "snq": "holds", "dc": "holds", "sm": "holds"}),
    ("gevrey:alpha=3", {"lc": "holds", "mg": "holds", "snq": "holds", "dc": "holds", "sm": "holds"}),
    ("qgevrey:q=2,sigma=2", {"lc": "holds", "mg": "refuted", "dc": "holds", "sm": "holds"}),
    ("qgevrey:q=2,sigma=3", {"lc": "holds", "dc": "refuted", "sm": "holds",
                             "gamma_infinite": True, "injective": "refuted"}),
    ("power:tau=1,sigma=2", {"lc": "holds", "dc": "refuted", "sm": "holds"}),
    ("power:tau=1,sigma=3", {"lc": "holds", "dc": "refuted", "sm": "holds",
                             "gamma_infinite": True, "injective": "refuted"}),
    ("qpp:q=2", {"lc": "holds", "sm": "refuted"}),
]


def paper_examples(P: Optional[int] = None) -> dict:
    P = P or default_pmax()
    rows, mismatches = [], []
    for spec, expected in EXPECTED_ROWS:
        seq = parse_spec(spec)
        Pi = min(P, seq.overflow_horizon)
        got = {}
        for name in expected:
            if name in CONDITIONS:
                got[name] = CONDITIONS[name](seq, Pi).status.value
            elif name == "gamma_infinite":
                got[name] = indices.gamma_index(seq, Pi).infinite_flag
            elif name == "injective":
                got[name] = indices.injectivity_test(seq, Pi).status.value
        cells = {k: {"expected": v, "got": got[k], "ok": got[k] == v} for k, v in expected.items()}
        for k, c in cells.items():
            if not c["ok"]:
                mismatches.append(f"{spec}: {k} expected {c['expected']} got {c['got']}")
        rows.append({"spec": spec, "P": Pi, "cells": cells})
    return {"rows": rows, "mismatches": mismatches, "ok": not mismatches}


def _mark(v) -> str:
    return {"holds": "Y", "refuted": "N", "inconclusive": "?", True: "Y", False: "N"}.get(v, str(v))


def render_example_table(result: dict) -> str:
    keys = ["lc", "mg", "snq", "dc", "sm", "gamma_infinite", "injective"]
    lines = [f"{'sequence':24s} " + " ".join(f"{k:>8s}" for k in keys)]
    for row in result["rows"]:
        cells = []
        for k in keys:
            c = row["cells"].get(k)
            cells.append(f"{'-':>8s}" if c is None else
                         f"{_mark(c['got']) + ('' if c['ok'] else '!'):>8s}")
        lines.append(f"{row['spec']:24s} " + " ".join(cells))
    lines.append("all cells match" if result["ok"] else "MISMATCH: " + "; ".join(result["mismatches"]))
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# argument parsing


def _parse_range(text: str) -> List[int]:
    try:
        if ".." in text:
            a, b = text.split("..", 1)
            lo, hi = int(a), int(b)
            if hi < lo:
                raise ValueError
            return list(range(lo, hi + 1))
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ParameterError(f"bad index range {text!r}; use A..B or a comma list")


def _parse_kv(text: str) -> tuple:
    tag, _, args = text.partition(":")
    kw = {}
    for item in filter(None, (a.strip() for a in args.split(","))):
        k, eq, v = item.partition("=")
        if not eq:
            raise ParameterError(f"expected key=value, got {item!r}")
        try:
            kw[k.strip()] = float(v)
        except ValueError:
            raise ParameterError(f"{k}: not a number: {v!r}")
    return tag.strip().lower().replace("_", "-"), kw


def parse_growth_control(text: str) -> constructor.GrowthControl:
    tag, kw = _parse_kv(text)
    try:
        if tag == "exp-pow":
            return constructor.exp_pow(kw["H"])
        if tag == "double-exp":
            return constructor.double_exp(kw["H"])
        if tag == "poly-shift":
            return constructor.poly_shift(kw["beta"])
    except KeyError as exc:
        raise ParameterError(f"{tag}: missing parameter {exc}")
    raise ParameterError(f"unknown growth control {tag!r}; use exp-pow, double-exp or poly-shift")


def parse_nodes(text: str) -> constructor.NodeSeq:
    tag, _, rest = text.partition(":")
    tag = tag.strip().lower()
    if tag == "factorial":
        return constructor.factorial_nodes()
    if tag == "recursive":
        return constructor.recursive_nodes()
    if tag == "geometric":
        _, kw = _parse_kv(text)
        if "r" not in kw:
            raise ParameterError("geometric nodes need r=...")
        return constructor.geometric_nodes(kw["r"])
    if tag == "explicit":
        try:
            return constructor.explicit_nodes([int(x) for x in rest.split(",") if x.strip()])
        except ValueError:
            raise ParameterError(f"bad explicit node list {rest!r}")
    raise ParameterError(f"unknown node generator {tag!r}")


def _emit(args, payload: dict, text: str) -> None:
    print(dump(payload) if args.json else text)


def _cmd_classify(args) -> int:
    rep = classify(args.seq, args.pmax)
    payload = rep.to_json(with_timings=not args.no_timings)
    if args.json:
        print(dump(payload))
    else:
        c = ", ".join(f"({k}) {_mark(v.status.value)}" for k, v in rep.conditions.items())
        print(f"{rep.spec}  P={rep.P}")
        print(f"  conditions: {c}")
        for name, br in (("gamma", rep.gamma), ("omega", rep.omega), ("gamma(M~)", rep.gamma_tilde)):
            if br is not None:
                print(f"  {name}: [{br.lower:.4g}, {br.upper:.4g}]" + ("  infinite" if br.infinite_flag else ""))
        if rep.injectivity:
            print(f"  injectivity criterion: {rep.injectivity.status.value}")
        if rep.target:
            print(f"  moment target: {rep.target.target}")
        for k, e in rep.errors.items():
            print(f"  {k}: {e}")
    return EXIT_OK


def _cmd_assoc(args) -> int:
    seq = parse_spec(args.seq)
    rows = []
    for raw in args.t.split(","):
        t = float(raw)
        ev = assoc.h_of(seq, t)
        rows.append({"t": t, "log_h": ev.log_h, "segment": ev.segment, "omega_at_inverse": -ev.log_h})
    rec = []
    if args.recover is not None:
        for p in _parse_range(args.recover):
            r = assoc.recover_term(seq, p)
            rec.append({"p": p, "log_recovered": r.log_value, "log_M_p": seq.log_term(p),
                        "log_argmax_t": r.log_argmax_t})
    text = "\n".join(f"t={r['t']:g}  log h={r['log_h']:.12g}  piece={r['segment']}" for r in rows)
    if rec:
        text += "\n" + "\n".join(f"p={r['p']}  recovered={r['log_recovered']:.12g}  log M_p={r['log_M_p']:.12g}"
                                 for r in rec)
    _emit(args, {"spec": args.seq, "h": rows, "recover": rec}, text)
    return EXIT_OK


def _cmd_moments(args) -> int:
    seq = parse_spec(args.seq)
    ker = moments.KernelSurrogate(seq, args.K)
    rows, blocked = [], False
    for p in _parse_range(args.p):
        mv = moments.moment_exact(ker, p, args.eps)
        s = max(seq.log_quotient(p + 1) - seq.log_quotient(p), 0.0)
        base = (p + 1) * math.log(args.K) + seq.log_term(p + 1)
        lower = base + max(math.log(s) if s > 0 else -math.inf, -math.log(p + 1))
        upper = (p + 1) * math.log(args.K) + tilde_log_term(seq, p)
        rows.append({"p": p, "log_mu": mv.log_mu, "lower_log": lower, "upper_log": upper,
                     "N": mv.terms_used, "tail": mv.tail_bound, "certified": mv.certified})
        blocked |= not mv.certified
    if args.out:
        with open(args.out, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["p", "log_mu"])
            for r in rows:
                w.writerow([r["p"], repr(r["log_mu"])])
    text = "\n".join(f"p={r['p']:3d}  log mu={r['log_mu']:.12g}  [{r['lower_log']:.6g}, {r['upper_log']:.6g}]"
                     f"  N={r['N']}" + ("" if r["certified"] else "  (tail not certified)") for r in rows)
    _emit(args, {"spec": args.seq, "K": args.K, "eps": args.eps, "moments": rows}, text)
    return EXIT_BLOCKED if blocked else EXIT_OK


def _cmd_construct(args) -> int:
    g = parse_growth_control(args.g)
    nodes = parse_nodes(args.nodes)
    if args.beta is None:
        seq = constructor.build_from_growth_control(g, nodes)
    else:
        seq = constructor.prescribe_gamma(g, nodes, args.beta)
    n = min(args.pmax, seq.overflow_horizon)
    if n < args.pmax:
        print(f"note: truncated at the overflow horizon p={n}", file=sys.stderr)
    if args.out:
        write_table(seq, n, args.out)
    lc = cond.check_lc(seq, n).status
    payload = {"name": seq.name, "pmax": n, "horizon": seq.overflow_horizon, "lc": lc.value,
               "out": args.out, "nodes": nodes.upto(n)}
    _emit(args, payload, f"{seq.name}: {n + 1} quotients, (lc) {lc.value}"
          + (f", written to {args.out}" if args.out else ""))
    return EXIT_OK


def _cmd_tilde(args) -> int:
    seq = parse_spec(args.seq)
    t = tilde(seq)
    P = min(args.pmax, t.overflow_horizon, seq.overflow_horizon - 1)
    plus1 = shift(seq, 1)
    if args.out:
        write_table(t, P, args.out)
    sm = cond.check_sm(seq, P).status
    fwd = cond.inclusion(plus1, t, P)
    bwd = cond.inclusion(t, plus1, P)
    eq = cond.equivalence(t, plus1, P)
    payload = {"spec": args.seq, "P": P, "sm": sm.value, "M+1_in_M~": fwd.status.value,
               "M~_in_M+1": bwd.status.value, "equivalent": eq.status.value,
               "witness": eq.witness, "out": args.out}
    _emit(args, payload, f"P={P}  (sm) {sm.value}  M+1 in M~: {fwd.status.value}  "
                         f"M~ in M+1: {bwd.status.value}  equivalent: {eq.status.value}")
    return EXIT_OK


def _cmd_verdict(args) -> int:
    out = verdict(args.seq, args.aux_seq, args.pmax)
    if args.json:
        print(dump(out))
    else:
        print(f"{out['spec']}: branch {out['branch']}, target {out['target']}")
        for key in ("injective", "surjective"):
            if key in out:
                c = out[key]
                print(f"  {key}: {c['status']} ({c['label']})  {c['statement']}")
        for n in out["notes"]:
            print(f"  note: {n}")
    return EXIT_OK if out["branch"] != "undetermined" else EXIT_BLOCKED


def _cmd_examples(args) -> int:
    t0 = time.perf_counter()
    res = paper_examples(args.pmax)
    res["seconds"] = round(time.perf_counter() - t0, 2)
    _emit(args, res, render_example_table(res))
    return EXIT_OK if res["ok"] else EXIT_MISMATCH


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="wsq", description="weight-sequence calculus")
    sub = ap.add_subparsers(dest="cmd", required=True)

    def add(name, fn, help_, seq=True):
        p = sub.add_parser(name, help=help_)
        if seq:
            p.add_argument("--seq", required=True, help="sequence spec, e.g. qgevrey:q=2,sigma=3|hat")
        p.add_argument("--pmax", type=int, default=None, help="truncation (default $WSQ_PMAX_DEFAULT or 2048)")
        p.add_argument("--json", action="store_true")
        p.set_defaults(fn=fn)
        return p

    p = add("classify", _cmd_classify, "conditions, indices and moment target")
    p.add_argument("--no-timings", action="store_true", help="omit timings for byte-stable JSON")
    p = add("assoc", _cmd_assoc, "associated function h_M")
    p.add_argument("--t", required=True, help="comma-separated positive t values")
    p.add_argument("--recover", default=None, help="indices A..B for sup_t t^p h_M(1/t)")
    p = add("moments", _cmd_moments, "moments of the kernel h_M(K/x)")
    p.add_argument("--p", default="0..40")
    p.add_argument("--eps", type=float, default=moments.DEFAULT_EPS)
    p.add_argument("--K", type=float, default=1.0)
    p.add_argument("--out", default=None, help="CSV with p,log_mu")
    p = add("construct", _cmd_construct, "sequence from a growth control function", seq=False)
    p.add_argument("--g", required=True, help="exp-pow:H=2, double-exp:H=2 or poly-shift:beta=1")
    p.add_argument("--nodes", default="factorial", help="factorial, recursive, geometric:r=2, explicit:0,1,4")
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--out", default=None, help="CSV with p,log_m_p")
    p = add("tilde", _cmd_tilde, "M~ table and its relation to M+1")
    p.add_argument("--out", default=None, help="CSV with p,log_m_p for M~")
    p = add("verdict", _cmd_verdict, "injectivity and surjectivity of the moment mapping")
    p.add_argument("--aux-seq", default=None, help="auxiliary sequence A for the Gelfand-Shilov setting")
    add("paper-examples", _cmd_examples, "reproduce the worked example table", seq=False)
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        if args.pmax is None:
            args.pmax = default_pmax()
        elif args.pmax < 8:
            raise ParameterError("--pmax must be at least 8")
        return args.fn(args)
    except (HorizonError, LatticeViolation) as exc:
        print(f"wsq: {exc}", file=sys.stderr)
        return EXIT_BLOCKED
    except (ParameterError, PreconditionError, ValueError) as exc:
        print(f"wsq: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
