"""``ricompact`` command line: classify, probe, norm, apply, domain, selftest.

Requests are JSON objects, given inline or as a file path with ``-i``.  A
``"schema"`` field is optional on input but must read ``ri-compact/1`` when
present; every JSON document written carries it.

Exit codes: 0 success, 2 schema error, 3 out_of_scope, 4 numerical budget
exhausted.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from typing import Optional

import numpy as np

from .classify import EmbeddingQuery, classify
from .isoperimetry import (DomainSpec, PhiSpec, check_compatible, l_phi, mazya_model_domain,
                           phi_regime)
from .kernelops import BACKEND, OperatorSpec, ProfileJ, apply
from .probes import GRID_ENV, ProbeConfig, probe_cutoff_domain, probe_cutoff_range
from .rinorm import SpaceSpec, associate_norm, norm, to_exact
from .stepfn import StepFunction

SCHEMA = "ri-compact/1"
EXIT_OK, EXIT_SCHEMA, EXIT_SCOPE, EXIT_BUDGET = 0, 2, 3, 4
CSV_COLUMNS = ("a", "lower_bound", "estimate", "citation")


class SchemaError(ValueError):
    pass


# --------------------------------------------------------------------------
# request parsing


def _load(src: str) -> dict:
    text = src
    if not src.lstrip().startswith(("{", "[")) and os.path.exists(src):
        with open(src, encoding="utf-8") as fh:
            text = fh.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"input: malformed JSON ({exc.msg} at line {exc.lineno})") from None
    if not isinstance(doc, dict):
        raise SchemaError("input: expected a JSON object")
    if doc.get("schema", SCHEMA) != SCHEMA:
        raise SchemaError(f"schema: expected {SCHEMA!r}, got {doc['schema']!r}")
    return doc


def _field(doc: dict, key: str, parse, prefix: str = ""):
    if key not in doc:
        raise SchemaError(f"{prefix}{key}: missing field")
    try:
        return parse(doc[key])
    except SchemaError:
        raise
    except (ValueError, TypeError, KeyError) as exc:
        raise SchemaError(f"{prefix}{key}.{exc}") from None


def _space(d) -> SpaceSpec:
    return SpaceSpec.from_dict(d)


def _step(d) -> StepFunction:
    if not isinstance(d, dict):
        raise ValueError("expected an object with breakpoints and values")
    return StepFunction.from_dict(d)


def parse_profile(d) -> ProfileJ:
    if not isinstance(d, dict):
        raise ValueError("expected an object")
    fam = d.get("family")
    if fam == "constant":
        return ProfileJ.constant(float(d.get("c", 1.0)))
    if fam == "power":
        if "gamma" not in d:
            raise ValueError("gamma: missing field")
        return ProfileJ.power(float(d["gamma"]), float(d.get("c", 1.0)))
    if fam == "slog":
        if "b" not in d:
            raise ValueError("b: missing field")
        return ProfileJ.slog(float(d["b"]), float(d.get("c", 1.0)))
    if fam == "l_phi":
        if "phi" not in d:
            raise ValueError("phi: missing field")
        return ProfileJ.l_phi(PhiSpec.from_dict(d["phi"]))
    raise ValueError(f"family: unknown profile family {fam!r}")


def parse_operator(d) -> OperatorSpec:
    if not isinstance(d, dict):
        raise ValueError("expected an object")
    kind = d.get("kind")
    if kind is None:
        raise ValueError("kind: missing field")
    order = d.get("j", d.get("m", d.get("order", 1)))
    if isinstance(order, bool) or not isinstance(order, int):
        raise ValueError("order: must be an integer")
    kw = {}
    for key, parse in (("J", parse_profile), ("I", parse_profile), ("phi", PhiSpec.from_dict)):
        if key in d:
            try:
                kw[key] = parse(d[key])
            except ValueError as exc:
                raise ValueError(f"{key}.{exc}") from None
    if "n" in d:
        kw["n"] = int(d["n"])
    if "alpha" in d:
        kw["alpha"] = float(to_exact(d["alpha"]))
    return OperatorSpec(kind, order, **kw)


# --------------------------------------------------------------------------
# commands; each returns (exit code, document)


def cmd_classify(doc: dict, args) -> tuple[int, dict]:
    try:
        q = EmbeddingQuery.from_dict(doc)
    except (ValueError, TypeError) as exc:
        raise SchemaError(str(exc)) from None
    v = classify(q)
    out = {"schema": SCHEMA, **v.to_dict()}
    return (EXIT_SCOPE if v.compact == "out_of_scope" else EXIT_OK), out


def cmd_probe(doc: dict, args) -> tuple[int, dict]:
    op = _field(doc, "op", parse_operator)
    X = _field(doc, "X", _space)
    Y = _field(doc, "Y", _space)
    mode = doc.get("mode", "domain")
    if mode not in ("domain", "range"):
        raise SchemaError("mode: must be 'domain' or 'range'")
    points = args.grid if args.grid is not None else doc.get("grid")
    seed = args.seed if args.seed is not None else doc.get("seed", 0)
    kw = {"seed": seed}
    if points is not None:
        kw["points"] = points
    if "budget" in doc:
        kw["budget"] = doc["budget"]
    try:
        kw = {k: int(v) for k, v in kw.items()}
        cfg = ProbeConfig(**kw)
    except (ValueError, TypeError) as exc:
        raise SchemaError(f"grid.{exc}") from None
    fn = probe_cutoff_domain if mode == "domain" else probe_cutoff_range
    try:
        curve = fn(X, Y, op, cfg)
    except ValueError as exc:
        raise SchemaError(str(exc)) from None
    out = {"schema": SCHEMA, "mode": mode, "op": op.to_dict(), "X": X.to_dict(), "Y": Y.to_dict(),
           "grid": cfg.points, "seed": cfg.seed, **curve.to_dict()}
    out["_curve"] = curve
    return (EXIT_BUDGET if bool(np.any(curve.exhausted)) else EXIT_OK), out


def cmd_norm(doc: dict, args) -> tuple[int, dict]:
    s = _field(doc, "space", _space)
    f = _field(doc, "f", _step)
    out = {"schema": SCHEMA, "space": s.to_dict(), "norm": norm(s, f).to_dict()}
    code = EXIT_OK
    if doc.get("associate", False):
        res = associate_norm(s, f, budget=int(doc.get("budget", 2000)),
                             seed=int(args.seed if args.seed is not None else doc.get("seed", 0)))
        out["associate"] = res.to_dict()
        if res.exhausted and res.exact is None:
            code = EXIT_BUDGET
    return code, out


def cmd_apply(doc: dict, args) -> tuple[int, dict]:
    op = _field(doc, "op", parse_operator)
    f = _field(doc, "f", _step)
    t = None
    if "t" in doc:
        try:
            t = np.asarray(doc["t"], dtype=float)
        except (TypeError, ValueError):
            raise SchemaError("t: expected a list of numbers") from None
    try:
        res = apply(op, f, t)
    except ValueError as exc:
        raise SchemaError(str(exc)) from None
    exact = op.kind not in ("R", "S") or int(op.order) == 1
    return EXIT_OK, {"schema": SCHEMA, "op": op.to_dict(), "t": res.t.tolist(),
                     "values": [v if math.isfinite(v) else "inf" for v in res.values.tolist()],
                     "exactness": "exact" if exact else "quadrature",
                     "nonincreasing": res.nonincreasing}


def cmd_domain(doc: dict, args) -> tuple[int, dict]:
    d = _field(doc, "domain", DomainSpec.from_dict)
    t = np.asarray(doc.get("t", np.geomspace(1e-6, 0.5, 13).tolist()), dtype=float)
    if np.any((t <= 0) | (t > 1)):
        raise SchemaError("t: points must lie in (0,1]")
    prof = d.profile()
    table = {"t": t.tolist(), "I": np.atleast_1d(prof(t)).tolist()}
    out = {"schema": SCHEMA, "domain": d.to_dict(), "profile": prof.J.to_dict(),
           "integral_finite": prof.integral_finite,
           "compatible": check_compatible(d, prof)}
    if d.kind == "product":
        table["L_phi"] = np.atleast_1d(l_phi(d.phi, t)).tolist()
        out["regime"] = str(phi_regime(d.phi))
    if d.kind in ("mazya_class", "mazya_model"):
        model = mazya_model_domain(d.alpha, d.n)
        r = np.linspace(0.0, min(model.L, 5.0), t.size)
        out["eta"] = {"r": r.tolist(), "eta": np.atleast_1d(model.eta(r)).tolist()}
    out["table"] = table
    return EXIT_OK, out


def cmd_selftest(doc: Optional[dict], args) -> tuple[int, dict]:
    from .checks import run_suite
    try:
        results = run_suite(args.suite)
    except ValueError as exc:
        raise SchemaError(str(exc)) from None
    return (EXIT_OK if all(r.passed for r in results) else 1), {
        "schema": SCHEMA, "backend": BACKEND,
        "results": [{"name": r.name, "passed": r.passed, "detail": r.detail,
                     "seconds": round(r.seconds, 3)} for r in results],
        "_lines": [r.line() for r in results],
    }


COMMANDS = {"classify": cmd_classify, "probe": cmd_probe, "norm": cmd_norm,
            "apply": cmd_apply, "domain": cmd_domain, "selftest": cmd_selftest}


# --------------------------------------------------------------------------
# output


def _probe_csv(curve) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for a, lo, est in curve.rows():
        w.writerow([repr(a), repr(lo), repr(est), curve.citation])
    return buf.getvalue()


def render(cmd: str, doc: dict, fmt: str) -> str:
    curve = doc.pop("_curve", None)
    lines = doc.pop("_lines", None)
    if fmt == "csv":
        if curve is None:
            raise SchemaError("format: csv output is only available for probe")
        return _probe_csv(curve)
    if cmd == "selftest" and fmt == "table":
        return "\n".join(lines) + "\n"
    return json.dumps(doc, indent=2) + "\n"


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ricompact", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        if name != "selftest":
            p.add_argument("-i", "--input", required=True, help="inline JSON or a path to a JSON file")
        p.add_argument("-o", "--output", help="output path (default stdout)")
        fmts = ["json", "csv"] if name == "probe" else (["table", "json"] if name == "selftest"
                                                        else ["json"])
        p.add_argument("--format", choices=fmts, default=None)
        p.add_argument("--seed", type=int, default=None)
        if name == "probe":
            p.add_argument("--grid", type=int, default=None,
                           help=f"number of cutoffs a (default ${GRID_ENV} or 64)")
        if name == "selftest":
            p.add_argument("--suite", default="all")
    return ap


def main(argv: Optional[list] = None) -> int:
    args = build_parser().parse_args(argv)
    if not hasattr(args, "grid"):
        args.grid = None
    fmt = args.format
    if fmt is None:
        fmt = "table" if args.command == "selftest" else (
            "csv" if args.command == "probe" and (args.output or "").endswith(".csv") else "json")
    try:
        doc = _load(args.input) if args.command != "selftest" else None
        code, out = COMMANDS[args.command](doc, args)
        text = render(args.command, out, fmt)
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except RuntimeError as exc:
        print(f"error: numerical budget exhausted: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
