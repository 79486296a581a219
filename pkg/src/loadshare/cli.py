"""Command-line front end.

Exit codes: 0 ok, 1 I/O, 2 validation, 3 convergence, 4 math precondition.
CSV bodies are deterministic; each output also gets a JSON run manifest,
written next to the output file or to stderr when writing to stdout.
"""

from __future__ import annotations

import argparse
import io
import json
import logging
import platform
import sys
import time
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .errors import LoadShareError, ParseError, ValidationError
from .funcmodel import MonotoneMap, map_from_dict
from .ingest import read_config, read_samples
from .koenigs import DEFAULT_GRID, DEFAULT_N_MAX, DEFAULT_TOL, koenigs_build
from .objective import build_objective
from .solver import SharingProblem, iterate_exponent, predict_pair_sharing, solve

log = logging.getLogger("loadshare")

_STD_ATTRS = set(vars(logging.LogRecord("", 0, "", 0, "", (), None))) | {"message", "asctime"}


class JsonLineFormatter(logging.Formatter):
    def format(self, record):
        doc = {"level": record.levelname.lower(), "event": getattr(record, "event", "log"),
               "message": record.getMessage()}
        for k, v in vars(record).items():
            if k not in _STD_ATTRS and k != "event":
                doc[k] = v
        return json.dumps(doc, sort_keys=True, default=str)


def _setup_logging(stream):
    handler = logging.StreamHandler(stream)
    handler.setFormatter(JsonLineFormatter())
    root = logging.getLogger("loadshare")
    root.handlers[:] = [handler]
    root.setLevel(logging.INFO)
    root.propagate = False


def fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _csv(header_doc, columns, rows) -> str:
    buf = io.StringIO()
    if header_doc is not None:
        buf.write("# " + json.dumps(header_doc, sort_keys=True) + "\n")
    buf.write(",".join(columns) + "\n")
    for row in rows:
        buf.write(",".join(fmt(v) for v in row) + "\n")
    return buf.getvalue()


def load_model(path) -> MonotoneMap:
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"model JSON: {exc.msg}", exc.lineno) from None
    if not isinstance(doc, dict):
        raise ValidationError("model document must be a JSON object")
    return map_from_dict(doc)


def _koenigs_from_args(h, args):
    return koenigs_build(h, grid_size=args.grid, tol=args.tol, n_max=args.n_max,
                         n_fixed=args.n_iter, order=args.order)


def _koenigs_params(args) -> dict:
    return {"tol": args.tol, "n_max": args.n_max, "grid_size": args.grid,
            "n_iter": args.n_iter, "order": args.order}


def cmd_fit(args):
    table = read_samples(args.samples)
    h = table.to_map()
    doc = h.to_dict()
    if table.units:
        doc["units"] = table.units
    body = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    return body, [args.samples], {"origin_injected": table.origin_injected,
                                  "duplicates_merged": table.duplicates_merged}


def cmd_koenigs(args):
    h = load_model(args.model)
    K = _koenigs_from_args(h, args)
    rows = [(x, s, K.n_used, K.sup_residual) for x, s in K.grid]
    head = {"n_used": K.n_used, "sup_residual": K.sup_residual, "multiplier": K.multiplier,
            "converged": K.converged}
    return _csv(head, ["x", "sigma", "n_used", "sup_residual"], rows), [args.model], _koenigs_params(args)


def cmd_objective(args):
    h = load_model(args.model)
    K = _koenigs_from_args(h, args)
    O = build_objective(K, args.rj, args.rk, args.ref_force)
    head = {"p": O.p, "c": O.c, "ref_force": O.ref_force, "n_used": K.n_used,
            "sup_residual": K.sup_residual}
    rows = zip(O.x.tolist(), O.j_prime(O.x).tolist(), O.j.tolist())
    params = _koenigs_params(args) | {"rj": args.rj, "rk": args.rk, "ref_force": args.ref_force}
    return _csv(head, ["x", "J_prime", "J"], rows), [args.model], params


def cmd_solve(args):
    cfg = read_config(args.config)
    h = load_model(args.model)
    K = koenigs_build(h, grid_size=cfg.grid_size, tol=cfg.tol, n_max=cfg.n_max)
    arms = cfg.arm_values
    O = build_objective(K, arms[cfg.j_index], arms[cfg.k_index], cfg.ref_force)
    rows = []
    failures = 0
    for M in cfg.moments().tolist():
        try:
            res = solve(SharingProblem(arms, M, O))
        except LoadShareError as exc:
            failures += 1
            log.warning("solve failed at M=%r: %s", M, exc,
                        extra={"event": "solve_failed", "moment": M, "error": type(exc).__name__})
            rows.append([M, None, *([None] * len(arms)), None, type(exc).__name__])
            continue
        rows.append([M, res.lam, *res.forces.tolist(), res.objective_value, "ok"])
    columns = ["M", "lambda", *(f"F_{n}" for n in cfg.names), "K", "status"]
    head = {"p": O.p, "c": O.c, "pair": list(cfg.pair), "arms": cfg.arms, "failures": failures}
    return _csv(head, columns, rows), [args.config, args.model], cfg.numeric()


def cmd_share(args):
    h = load_model(args.model)
    K = _koenigs_from_args(h, args)
    t = iterate_exponent(args.rm, args.rj, args.rk)
    xs = np.linspace(0.0, h.domain_max, args.points).tolist()
    pred = predict_pair_sharing(K, args.rm, args.rj, args.rk, xs)
    rows = [(x, y, "ok" if y is not None else "RangeError") for x, y in pred]
    head = {"t": t, "r_ratios": {"rm/rk": args.rm / args.rk, "rj/rk": args.rj / args.rk}}
    params = _koenigs_params(args) | {"rm": args.rm, "rj": args.rj, "rk": args.rk,
                                      "points": args.points}
    return _csv(head, ["F_k", "F_predicted", "status"], rows), [args.model], params


def cmd_verify(args):
    h = load_model(args.model)
    K = _koenigs_from_args(h, args)
    O = build_objective(K, args.rj, args.rk, args.ref_force, check=False)
    rep = O.schroder_residual(args.points)
    head = {"sup": rep.sup, "sup_relative": rep.sup_relative, "p": O.p,
            "n_used": K.n_used, "sup_residual": K.sup_residual}
    rows = zip(rep.x.tolist(), rep.residual.tolist(), rep.relative.tolist())
    params = _koenigs_params(args) | {"rj": args.rj, "rk": args.rk, "points": args.points}
    return _csv(head, ["x", "residual", "relative"], rows), [args.model], params


def _add_koenigs_flags(p):
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.add_argument("--n-max", type=int, default=DEFAULT_N_MAX)
    p.add_argument("--grid", type=int, default=DEFAULT_GRID)
    p.add_argument("--n-iter", type=int, default=None,
                   help="force exactly this many iterations")
    p.add_argument("--order", type=int, choices=(1, 3), default=3,
                   help="local chart order (1 = plain quotient)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="loadshare", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="fit a monotone map to force-force samples")
    p.add_argument("samples")
    p.add_argument("-o", "--out", required=True)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("koenigs", help="tabulate the Koenigs function")
    p.add_argument("model")
    _add_koenigs_flags(p)
    p.set_defaults(func=cmd_koenigs)

    p = sub.add_parser("objective", help="tabulate J' and J")
    p.add_argument("model")
    p.add_argument("--rj", type=float, required=True)
    p.add_argument("--rk", type=float, required=True)
    p.add_argument("--ref-force", type=float, default=1.0)
    _add_koenigs_flags(p)
    p.set_defaults(func=cmd_objective)

    p = sub.add_parser("solve", help="sweep the forward problem over moments")
    p.add_argument("config")
    p.add_argument("model")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("share", help="predict sharing for another pair")
    p.add_argument("model")
    p.add_argument("--rm", type=float, required=True)
    p.add_argument("--rj", type=float, required=True)
    p.add_argument("--rk", type=float, required=True)
    p.add_argument("--points", type=int, default=65)
    _add_koenigs_flags(p)
    p.set_defaults(func=cmd_share)

    p = sub.add_parser("verify", help="report the Schroder residual")
    p.add_argument("model")
    p.add_argument("--rj", type=float, required=True)
    p.add_argument("--rk", type=float, required=True)
    p.add_argument("--ref-force", type=float, default=1.0)
    p.add_argument("--points", type=int, default=64)
    _add_koenigs_flags(p)
    p.set_defaults(func=cmd_verify)

    for name in ("koenigs", "objective", "solve", "share", "verify"):
        sub.choices[name].add_argument("-o", "--out", default=None,
                                       help="output file (default: stdout)")
    return ap


def manifest(args, inputs, params, elapsed) -> dict:
    return {
        "subcommand": args.command,
        "inputs": [str(p) for p in inputs],
        "output": args.out,
        "parameters": params,
        "versions": {"loadshare": __version__, "python": platform.python_version(),
                     "numpy": np.__version__, "scipy": scipy.__version__},
        "elapsed_s": elapsed,
    }


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    _setup_logging(stderr)
    args = build_parser().parse_args(argv)
    t0 = time.perf_counter()
    try:
        body, inputs, params = args.func(args)
        man = manifest(args, inputs, params, time.perf_counter() - t0)
        if args.out:
            out = Path(args.out)
            out.write_text(body)
            Path(str(out) + ".manifest.json").write_text(json.dumps(man, indent=2, sort_keys=True) + "\n")
        else:
            stdout.write(body)
            log.info("run manifest", extra={"event": "manifest", "manifest": man})
    except LoadShareError as exc:
        log.error(str(exc), extra={"event": "error", "error": type(exc).__name__,
                                   "exit_code": exc.exit_code})
        return exc.exit_code
    except OSError as exc:
        log.error(str(exc), extra={"event": "error", "error": "IOError", "exit_code": 1})
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
