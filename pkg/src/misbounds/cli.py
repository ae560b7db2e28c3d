"""Command-line entry point.

Exit codes: 0 success, 2 usage error, 3 failed precondition or work budget,
4 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import os
import sys
from dataclasses import asdict, is_dataclass
from enum import Enum

import numpy as np

from . import bounds, graphs, moments, stationary
from .analytic import ModelParams, phi, psi

SCHEMA_VERSION = 1


class UsageError(Exception):
    pass


class PreconditionError(Exception):
    pass


def _num(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    v = float(v)
    if not math.isfinite(v):
        return "null"
    return "%.17g" % v


def _plain(obj):
    if is_dataclass(obj):
        return {k: _plain(v) for k, v in asdict(obj).items()}
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def dumps_json(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON with every float written to 17 significant digits."""
    obj = _plain(obj)
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if obj is None:
        return "null"
    if isinstance(obj, str):
        return '"' + obj.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(obj, (bool, int, float)):
        return _num(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        body = [f'{pad}"{k}": {dumps_json(v, indent, _level + 1)}' for k, v in obj.items()]
        return "{\n" + ",\n".join(body) + "\n" + end + "}"
    if not obj:
        return "[]"
    body = [pad + dumps_json(v, indent, _level + 1) for v in obj]
    return "[\n" + ",\n".join(body) + "\n" + end + "]"


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, Enum):
        return v.value
    if isinstance(v, str):
        return v
    return _num(v)


def dumps_csv(rows: list[dict], comments: list[str] = ()) -> str:
    buf = io.StringIO()
    if rows:
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(list(rows[0]))
        for r in rows:
            w.writerow([_cell(v) for v in r.values()])
    for line in comments:
        buf.write(f"# {line}\n")
    return buf.getvalue()


def _emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    with open(out, "w") as fh:
        fh.write(text)


def parse_grid(spec: str) -> np.ndarray:
    """``start:end:{log|lin}[:count]`` to an array of values."""
    parts = spec.split(":")
    if len(parts) not in (3, 4) or parts[2] not in ("log", "lin"):
        raise UsageError(f"malformed grid spec {spec!r}; expected start:end:{{log|lin}}[:count]")
    try:
        start, stop = float(parts[0]), float(parts[1])
        count = int(parts[3]) if len(parts) == 4 else None
    except ValueError:
        raise UsageError(f"malformed grid spec {spec!r}") from None
    if parts[2] == "log":
        if start <= 0 or stop <= 0:
            raise UsageError("log grids need positive endpoints")
        if count is None:
            count = int(round(abs(math.log10(stop / start)))) + 1
        if count < 1:
            raise UsageError("grid count must be positive")
        return np.logspace(math.log10(start), math.log10(stop), count)
    if count is None:
        count = 11
    if count < 1:
        raise UsageError("grid count must be positive")
    return np.linspace(start, stop, count)


# --- commands ------------------------------------------------------------


def cmd_bounds(args) -> str:
    try:
        if args.c is not None:
            report = bounds.bounds_for_degree(args.c, args.y, force=args.force)
        else:
            report = bounds.bounds_for_alpha(args.alpha, args.x, force=args.force)
    except bounds.ThresholdError as exc:
        raise PreconditionError(f"{exc} (use --force to evaluate anyway)") from None
    except ValueError as exc:
        raise PreconditionError(str(exc)) from None
    data = _plain(report)
    if args.format == "json":
        return dumps_json({"schema_version": SCHEMA_VERSION, "command": "bounds", **data}) + "\n"
    terms = data.pop("expansion_terms")
    for i, t in enumerate(terms, 1):
        data[f"expansion_term{i}"] = t
    return dumps_csv([data])


def overlap_profile(alpha: float, c: float, points: int):
    params = ModelParams.tuned(alpha, c)
    # alpha**2 is always inserted, even on top of a grid node, so the row count is fixed
    zeta = np.sort(np.append(np.linspace(0.0, alpha, points), alpha * alpha), kind="stable")
    return zeta, np.asarray(phi(params, zeta)), np.asarray(psi(params, zeta))


def cmd_phi_scan(args) -> str:
    if args.points < 2:
        raise UsageError("--points must be at least 2 (both endpoints are included)")
    try:
        zeta, ph, ps = overlap_profile(args.alpha, args.c, args.points)
    except ValueError as exc:
        raise PreconditionError(str(exc)) from None
    rows = [{"zeta": z, "phi": a, "psi": b} for z, a, b in zip(zeta, ph, ps)]
    if args.format == "json":
        i = int(np.argmax(ph))
        return dumps_json(
            {
                "schema_version": SCHEMA_VERSION,
                "command": "phi-scan",
                "alpha": args.alpha,
                "c": args.c,
                "argmax_zeta": zeta[i],
                "phi_max": ph[i],
                "rows": rows,
            }
        ) + "\n"
    return dumps_csv(rows)


def _certify_row(alpha: float, c: float, margin: float) -> dict:
    params = ModelParams.tuned(alpha, c)
    rep = stationary.stationary_report(params)
    cert = stationary.certify_global_max(params, margin=margin)
    row = _plain(rep)
    row.update(
        verdict=cert.verdict.value,
        phi_max=cert.phi_max,
        argmax_zeta=cert.argmax_zeta,
        second_peak_value=cert.second_peak_value,
    )
    return row


def cmd_certify(args) -> str:
    alphas = parse_grid(args.alpha_grid)
    if args.c_mode == "explicit" and args.c is None:
        raise UsageError("--c-mode explicit needs --c")
    rows = []
    failures = 0
    for a in alphas.tolist():
        try:
            c = args.c if args.c_mode == "explicit" else stationary.lemma_degree(a, args.c_mode, args.x)
            rows.append(_certify_row(a, c, args.margin))
        except (ValueError, ArithmeticError) as exc:
            failures += 1
            rows.append({"alpha": a, "status": f"failed: {exc}"})
    if rows and failures == len(rows):
        raise PreconditionError("every row failed: " + rows[0]["status"])
    if args.format == "json":
        return dumps_json(
            {
                "schema_version": SCHEMA_VERSION,
                "command": "certify",
                "c_mode": args.c_mode,
                "x": args.x,
                "rows": rows,
            }
        ) + "\n"
    keys: list[str] = []
    for r in rows:
        keys += [k for k in r if k not in keys]
    return dumps_csv([{k: r.get(k) for k in keys} for r in rows])


def cmd_moments(args) -> str:
    if not 0 <= args.k <= args.n or args.n < 1 or args.m < 0:
        raise UsageError("need n >= 1, m >= 0 and 0 <= k <= n")
    if not 0.0 <= args.mu <= 1.0:
        raise UsageError("--mu must lie in [0, 1]")
    try:
        report = moments.moment_report(
            args.n, args.m, args.k, args.mu, brute=args.brute, mc_trials=args.mc, seed=args.seed
        )
    except graphs.SizeError as exc:
        raise PreconditionError(f"work budget exceeded: {exc}") from None
    data = _plain(report)
    if args.format == "json":
        return dumps_json({"schema_version": SCHEMA_VERSION, "command": "moments", **data}) + "\n"
    return dumps_csv([data])


def cmd_simulate(args) -> str:
    if args.algo not in graphs.ALGORITHMS:
        raise UsageError(f"unknown --algo {args.algo!r}")
    if args.import_path:
        try:
            g = graphs.read_graph(args.import_path)
        except ValueError as exc:
            raise PreconditionError(str(exc)) from None
        solver = graphs._SOLVERS[args.algo]
        try:
            found = solver(g, args.seed)
        except graphs.SizeError as exc:
            raise PreconditionError(str(exc)) from None
        results = [graphs.SimResult(args.seed, g.n, g.m, args.algo, len(found), len(found) / g.n, 0.0)]
        c = 2.0 * g.m / g.n
    else:
        if args.n is None or args.c is None:
            raise UsageError("simulate needs --n and --c (or --import)")
        try:
            results = graphs.run_trials(args.n, args.c, args.trials, args.algo, args.seed)
        except graphs.SizeError as exc:
            raise PreconditionError(str(exc)) from None
        c = args.c
        if args.export:
            os.makedirs(args.export, exist_ok=True)
            m = int(round(c * args.n / 2))
            for r in results:
                graphs.write_graph(graphs.sample(args.n, m, r.seed), os.path.join(args.export, f"trial_{r.seed}.txt"))

    summary = graphs.summarize(results)
    if c >= 2.0:
        lo, hi = bounds.alpha_bounds(c, args.y, force=True)
        summary.update(alpha_upper=hi, alpha_lower=lo)
    rows = []
    for r in results:
        row = _plain(r)
        if not args.timing:
            row.pop("wall_time")
        rows.append(row)
    if args.format == "json":
        return dumps_json(
            {"schema_version": SCHEMA_VERSION, "command": "simulate", "trials": rows, "summary": summary}
        ) + "\n"
    return dumps_csv(rows, [f"{k}={_num(v)}" for k, v in summary.items()])


# --- parser --------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="misbounds", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("bounds", help="threshold bounds at a given degree or density")
    which = b.add_mutually_exclusive_group(required=True)
    which.add_argument("--c", type=float)
    which.add_argument("--alpha", type=float)
    b.add_argument("--x", type=float, default=bounds.DEFAULT_X)
    b.add_argument("--y", type=float, default=bounds.DEFAULT_Y)
    b.add_argument("--force", action="store_true", help="allow constants at or below their thresholds")
    b.add_argument("--format", choices=("json", "csv"), default="json")
    b.add_argument("--out")
    b.set_defaults(func=cmd_bounds)

    s = sub.add_parser("phi-scan", help="phi and psi over the overlap range")
    s.add_argument("--alpha", type=float, required=True)
    s.add_argument("--c", type=float, required=True)
    s.add_argument("--points", type=int, default=1001)
    s.add_argument("--format", choices=("csv", "json"), default="csv")
    s.add_argument("--out")
    s.set_defaults(func=cmd_phi_scan)

    c = sub.add_parser("certify", help="stationary points and global-max verdicts over an alpha grid")
    c.add_argument("--alpha-grid", required=True, help="start:end:{log|lin}[:count]")
    c.add_argument("--c-mode", choices=("lemma2", "lemma3", "lemma4", "explicit"), default="lemma4")
    c.add_argument("--c", type=float)
    c.add_argument("--x", type=float, default=bounds.DEFAULT_X)
    c.add_argument("--margin", type=float, default=1e-10)
    c.add_argument("--format", choices=("csv", "json"), default="csv")
    c.add_argument("--out")
    c.set_defaults(func=cmd_certify)

    m = sub.add_parser("moments", help="exact, brute-force and Monte Carlo moments")
    m.add_argument("--n", type=int, required=True)
    m.add_argument("--m", type=int, required=True)
    m.add_argument("--k", type=int, required=True)
    m.add_argument("--mu", type=float, required=True)
    m.add_argument("--brute", action="store_true")
    m.add_argument("--mc", type=int, default=0, metavar="TRIALS")
    m.add_argument("--seed", type=int, default=0)
    m.add_argument("--format", choices=("json", "csv"), default="json")
    m.add_argument("--out")
    m.set_defaults(func=cmd_moments)

    r = sub.add_parser("simulate", help="independent sets found on sampled graphs")
    r.add_argument("--n", type=int)
    r.add_argument("--c", type=float)
    r.add_argument("--trials", type=int, default=100)
    r.add_argument("--algo", default="karp-sipser", help="exact | karp-sipser | greedy-random")
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--y", type=float, default=bounds.DEFAULT_Y)
    r.add_argument("--timing", action="store_true", help="include wall time (breaks byte-reproducibility)")
    r.add_argument("--import", dest="import_path", metavar="PATH")
    r.add_argument("--export", metavar="DIR")
    r.add_argument("--format", choices=("json", "csv"), default="json")
    r.add_argument("--out")
    r.set_defaults(func=cmd_simulate)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        text = args.func(args)
        _emit(text, args.out)
    except UsageError as exc:
        parser.error(str(exc))
    except PreconditionError as exc:
        print(f"misbounds: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"misbounds: {exc}", file=sys.stderr)
        return 4
    return 0


if __name__ == "__main__":
    sys.exit(main())
