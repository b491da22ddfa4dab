"""Command-line front end: ``hermite-cover {simulate, validate, replay}``.

Exit codes: 0 success, 1 failed validation check, 2 usage or parameter
error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

from . import __version__
from .errors import (
    CapacityError,
    ConfigError,
    DomainError,
    NumericalError,
    ParameterError,
    UnsupportedError,
    UsageError,
)
from .hermite_paths import ROUTES, SimConfig, _draw_atoms, replicate_rng, simulate

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERICAL = 0, 1, 2, 3
OUT_ENV = "HERMITE_COVER_OUT"
DEFAULT_OUT = "hermite_cover_out"

_USAGE_ERRORS = (ParameterError, ConfigError, UsageError, DomainError, UnsupportedError)
_NUMERICAL_ERRORS = (NumericalError, CapacityError, FloatingPointError)


def _default_out() -> str:
    return os.environ.get(OUT_ENV, DEFAULT_OUT)


def _write(path: Path, text: str) -> str:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    return str(path)


def _manifest(subcommand: str, params: dict, seed: int, outputs: list[str], elapsed: float) -> dict:
    return {
        "subcommand": subcommand,
        "params": params,
        "seed": seed,
        "version": __version__,
        "outputs": outputs,
        "elapsed_seconds": elapsed,
    }


def _write_manifest(out: Path, manifest: dict) -> None:
    _write(out / "manifest.json", json.dumps(manifest, indent=2, sort_keys=True) + "\n")


# ------------------------------------------------------------------ simulate

def _sim_params(args) -> dict:
    return {
        "beta": args.beta,
        "p": args.p,
        "route": args.route,
        "replicates": args.reps,
        "seed": args.seed,
        "eps": args.eps,
        "delta": args.delta,
        "M": args.atoms,
        "x_cut": args.xcut,
        "T": args.T,
        "kappa_mode": args.kappa_mode,
        "normalize": args.normalize,
        "dump_sets": args.dump_sets,
    }


def _dump_sets(cfg: SimConfig, out: Path) -> str:
    """Shifted uncovered sets and weights of replicate 0 (atoms route)."""
    sets, shifts, weights = _draw_atoms(cfg, replicate_rng(cfg.seed, 0))
    doc = {
        "replicate": 0,
        "window_end": cfg.T,
        "shifts": shifts.tolist(),
        "weights": weights.tolist(),
        "sets": [[[l, r] for l, r in s.intervals] for s in sets],
    }
    return _write(out / "sets.json", json.dumps(doc, sort_keys=True) + "\n")


def run_simulate(params: dict, out: Path, workers: int) -> dict:
    t0 = time.perf_counter()
    dump = params.get("dump_sets", False)
    cfg = SimConfig(**{k: v for k, v in params.items() if k != "dump_sets"})
    if dump and cfg.route != "atoms":
        raise UsageError("--dump-sets applies only to the atoms route")
    ens = simulate(cfg, workers=workers)
    outputs = [
        _write(out / "ensemble.csv", ens.to_csv()),
        _write(out / "ensemble.json", ens.to_json() + "\n"),
    ]
    if dump:
        outputs.append(_dump_sets(cfg, out))
    manifest = _manifest("simulate", params, cfg.seed, outputs, time.perf_counter() - t0)
    _write_manifest(out, manifest)
    return manifest


def cmd_simulate(args) -> int:
    out = Path(args.out or _default_out())
    run_simulate(_sim_params(args), out, args.workers)
    print(f"wrote {out / 'ensemble.csv'}")
    return EXIT_OK


# ------------------------------------------------------------------ validate

def run_validate(params: dict, out: Path, workers: int) -> tuple[dict, dict]:
    from .validation import run_suite

    t0 = time.perf_counter()
    report = run_suite(params["suite"], seed=params["seed"], quick=params["quick"], workers=workers)
    name = params["suite"].replace("-", "_")
    path = _write(out / f"validate_{name}.json", json.dumps(report, indent=2, sort_keys=True) + "\n")
    manifest = _manifest("validate", params, params["seed"], [path], time.perf_counter() - t0)
    _write_manifest(out, manifest)
    return report, manifest


def cmd_validate(args) -> int:
    out = Path(args.out or _default_out())
    params = {"suite": args.suite, "seed": args.seed, "quick": args.quick}
    report, _ = run_validate(params, out, args.workers)
    for c in report["checks"]:
        tag = "info" if c.get("informational") else ("PASS" if c["pass"] else "FAIL")
        print(f"[{tag}] {c['check']}: estimate={c['estimate']:.6g} target={c['target']}")
    print("all checks passed" if report["pass"] else "some checks FAILED")
    return EXIT_OK if report["pass"] else EXIT_FAIL


# -------------------------------------------------------------------- replay

def cmd_replay(args) -> int:
    manifest = json.loads(Path(args.manifest).read_text())
    sub = manifest.get("subcommand")
    params = manifest.get("params", {})
    if args.out:
        out = Path(args.out)
    else:
        outputs = manifest.get("outputs") or []
        out = Path(outputs[0]).parent if outputs else Path(_default_out())
    if sub == "simulate":
        run_simulate(params, out, args.workers)
        return EXIT_OK
    if sub == "validate":
        report, _ = run_validate(params, out, args.workers)
        return EXIT_OK if report["pass"] else EXIT_FAIL
    raise UsageError(f"manifest has unknown subcommand {sub!r}")


# -------------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hermite-cover", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", help=f"output directory (default ${OUT_ENV} or ./{DEFAULT_OUT})")
        p.add_argument("--workers", type=int, default=os.cpu_count() or 1,
                       help="worker processes (results do not depend on this)")

    s = sub.add_parser("simulate", help="simulate Hermite process paths")
    s.add_argument("--beta", type=float, required=True)
    s.add_argument("--p", type=int, required=True)
    s.add_argument("--route", choices=ROUTES, required=True)
    s.add_argument("--reps", type=int, required=True)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--eps", type=float, help="covering scale (chaos, atoms)")
    s.add_argument("--delta", type=float, help="grid step (chaos, timedomain)")
    s.add_argument("--atoms", type=int, help="atom count M (atoms)")
    s.add_argument("--xcut", type=float, help="left truncation X (timedomain; default automatic)")
    s.add_argument("--T", type=float, default=1.0, help="horizon")
    s.add_argument("--kappa-mode", choices=("asymptotic", "exact"), default="asymptotic")
    s.add_argument("--normalize", action="store_true", help="rescale so the sample Var Z(1) is exactly 1")
    s.add_argument("--dump-sets", action="store_true", help="also write replicate 0's atom sets (atoms route)")
    common(s)
    s.set_defaults(func=cmd_simulate)

    v = sub.add_parser("validate", help="run a validation suite")
    v.add_argument("--suite", choices=("covering", "moments", "covariance", "cross-route", "all"), required=True)
    v.add_argument("--quick", action="store_true", help="reduced sample sizes, widened budgets")
    v.add_argument("--seed", type=int, default=1)
    common(v)
    v.set_defaults(func=cmd_validate)

    r = sub.add_parser("replay", help="rerun the command recorded in a manifest")
    r.add_argument("manifest")
    common(r)
    r.set_defaults(func=cmd_replay)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    if getattr(args, "workers", 1) < 1:
        print("error: --workers must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except _USAGE_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except _NUMERICAL_ERRORS as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
