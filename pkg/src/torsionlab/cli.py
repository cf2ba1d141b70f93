"""Command-line entry point: ``python -m torsionlab <study> ...``.

Exit codes: 0 success, 1 a bound or study criterion failed, 2 solver
failure, 3 configuration error.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import logging
import math
import sys
from pathlib import Path

from .discretization import DiscretizationError
from .experiments import (
    ConfigError,
    StudyConfig,
    named_domain,
    run_bound_suite,
    run_convergence,
    run_perturbation_study,
    run_punched_study,
    run_table,
)
from .geometry import GeometryError
from .solvers import SolverError
from .wos import WosError, wos_torsional_rigidity

EXIT_OK, EXIT_FAIL, EXIT_SOLVER, EXIT_CONFIG = 0, 1, 2, 3


def _floats(text: str) -> list[float]:
    return [float(eval_dyadic(t)) for t in text.split(",") if t.strip()]


def eval_dyadic(token: str) -> float:
    """Parse '0.01', '2^-7' or '1/64'."""
    t = token.strip()
    if "^" in t:
        base, exp = t.split("^")
        return float(base) ** float(exp)
    if "/" in t:
        a, b = t.split("/")
        return float(a) / float(b)
    return float(t)


def _ints(text: str) -> list[int]:
    return [int(t) for t in text.split(",") if t.strip()]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="output file (.csv or .json); CSV to stdout if omitted")
    common.add_argument("--seed", type=int, default=None, help="64-bit RNG seed")
    common.add_argument("--tol", type=float, default=None, help="bound tolerance override")
    common.add_argument("--config", help="JSON file with StudyConfig fields")
    common.add_argument("--workers", type=int, default=None)
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="torsionlab", description="Torsion, eigenvalue and Polya-functional studies")
    sub = p.add_subparsers(dest="kind", required=True)

    t = sub.add_parser("table", parents=[common], help="F for the reference shapes")
    t.add_argument("--ladder", type=_floats)

    pu = sub.add_parser("punched", parents=[common], help="punched-cube sweep over N")
    pu.add_argument("--L", type=float)
    pu.add_argument("--N-list", dest="N_list", type=_ints)
    pu.add_argument("--dim", type=int)
    pu.add_argument("--ladder", type=_floats)

    pe = sub.add_parser("perturb", parents=[common], help="single small hole asymptotics")
    pe.add_argument("--domain")
    pe.add_argument("--x0", type=_floats)
    pe.add_argument("--deltas", type=_floats)

    c = sub.add_parser("converge", parents=[common], help="Richardson ladder for one quantity")
    c.add_argument("--domain")
    c.add_argument("--quantity", choices=["T", "lambda1", "F"])
    c.add_argument("--ladder", type=_floats)

    b = sub.add_parser("bounds", parents=[common], help="run every applicable bound on a corpus")
    b.add_argument("--corpus", choices=["convex", "punched", "3d", "all"])
    b.add_argument("--scale", type=float)
    b.add_argument("--corrupt-lambda", type=float, default=1.0, help=argparse.SUPPRESS)
    b.add_argument("--no-identities", action="store_true")
    b.add_argument("--only", type=lambda t: [x.strip() for x in t.split(",") if x.strip()], help="comma-separated corpus entry names")

    w = sub.add_parser("wos", parents=[common], help="walk-on-spheres torsional rigidity")
    w.add_argument("--domain")
    w.add_argument("--samples", dest="n_samples", type=int)
    return p


def make_config(args: argparse.Namespace) -> StudyConfig:
    data: dict = {}
    if args.config:
        try:
            data = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
    data["kind"] = args.kind
    names = {f.name for f in dataclasses.fields(StudyConfig)}
    for key, val in vars(args).items():
        if key in names and val is not None and key != "kind":
            data[key] = val
    return StudyConfig.from_dict(data)


def _fmt(v):
    if isinstance(v, float):
        return repr(v) if math.isfinite(v) else str(v)
    if v is None:
        return ""
    return v


def write_rows(rows: list[dict], out: str | None) -> None:
    if out and out.endswith(".json"):
        Path(out).write_text(json.dumps(rows, indent=2) + "\n")
        return
    keys: list[str] = []
    for r in rows:
        keys += [k for k in r if k not in keys]
    buf = io.StringIO()
    wr = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
    wr.writeheader()
    for r in rows:
        wr.writerow({k: _fmt(r.get(k)) for k in keys})
    if out:
        Path(out).write_text(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())


def _strictly_decreasing(xs) -> bool:
    return all(b < a for a, b in zip(xs, xs[1:]))


def run(cfg: StudyConfig, corrupt_lambda: float = 1.0, identities: bool = True) -> int:
    kind = cfg.kind
    status = EXIT_OK
    if kind == "table":
        rows = run_table(cfg)
        if any(r.get("error") for r in rows):
            status = EXIT_SOLVER
    elif kind == "punched":
        rows = run_punched_study(cfg.L, cfg.N_list, cfg.dim, cfg.ladder, cfg.cg_tol, cfg.eig_tol, cfg.workers)
        if any(r.get("error") for r in rows):
            status = EXIT_SOLVER
        elif not all(r["pass"] and r["polya"] for r in rows):
            status = EXIT_FAIL
    elif kind == "perturb":
        rows, fit = run_perturbation_study(cfg.domain or "square", cfg.x0 or (0.0, 0.0), cfg.deltas, cg_tol=cfg.cg_tol, eig_tol=cfg.eig_tol)
        if any(r.get("error") for r in rows):
            status = EXIT_SOLVER
        else:
            ok = _strictly_decreasing([r["rel_err_lambda"] for r in rows]) and _strictly_decreasing([r["rel_err_T"] for r in rows])
            status = EXIT_OK if ok else EXIT_FAIL
        rows = rows + [{"delta": "fit", **{k: v for k, v in dataclasses.asdict(fit).items()}}]
    elif kind == "converge":
        ladder = cfg.ladder or [2.0**-5, 2.0**-6, 2.0**-7]
        res = run_convergence(cfg.domain or "disc", cfg.quantity, ladder, cg_tol=cfg.cg_tol, eig_tol=cfg.eig_tol)
        rows = [{"h": h, "value": v} for h, v in zip(res.hs, res.values)]
        rows.append({"h": "extrapolated", "value": res.extrapolated, "order": res.order, "uncertainty": res.uncertainty, "declined": res.declined})
    elif kind == "bounds":
        reports, errors = run_bound_suite(cfg.corpus, cfg.tol, cfg.scale, corrupt_lambda, identities, workers=cfg.workers, only=cfg.only)
        rows = reports
        if errors:
            for e in errors:
                logging.error("%s", e)
            status = EXIT_SOLVER
        elif not all(r["pass"] for r in reports):
            status = EXIT_FAIL
        if cfg.out and cfg.out.endswith(".json") or not cfg.out:
            text = json.dumps(reports, indent=2) + "\n"
            if cfg.out:
                Path(cfg.out).write_text(text)
            else:
                sys.stdout.write(text)
            return status
    elif kind == "wos":
        dom = named_domain(cfg.domain or "disc")
        est = wos_torsional_rigidity(dom, cfg.n_samples, seed=cfg.seed)
        rows = [dataclasses.asdict(est)]
    else:  # pragma: no cover - validated by StudyConfig
        raise ConfigError(kind)
    write_rows(rows, cfg.out)
    return status


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = make_config(args)
        return run(cfg, getattr(args, "corrupt_lambda", 1.0), not getattr(args, "no_identities", False))
    except (ConfigError, GeometryError, TypeError) as exc:
        logging.error("configuration error: %s", exc)
        return EXIT_CONFIG
    except (SolverError, DiscretizationError, WosError) as exc:
        logging.error("solver failure: %s", exc)
        return EXIT_SOLVER


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
