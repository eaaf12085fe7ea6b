"""Command-line interface: ``check``, ``campaign`` and ``oracle`` subcommands.

Exit codes: 0 no violation, 1 at least one Violated, 2 usage or
configuration error, 3 numerical failure (non-convergence) without a
violation.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from ._backend import BACKEND
from .campaign import CampaignConfig, load_config, replay, run_campaign
from .checks import REGISTRY, RunContext, get_check
from .commuting_means import log_mean
from .errors import ConfigError, HHVerifyError, NonConvergence
from .generators import trial_rng
from .linalg_core import LoewnerTolerance, Status, eig_hermitian, matrix_from_json

EXIT_OK, EXIT_VIOLATED, EXIT_USAGE, EXIT_NUMERICAL = 0, 1, 2, 3


def _read_json(path: str):
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, indent=2) + "\n")


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _str_list(text: str) -> list[str]:
    return [x.strip() for x in text.split(",") if x.strip()]


# ---------------------------------------------------------------------------
# check
# ---------------------------------------------------------------------------

_PARAM_FLAGS = ("alpha", "r", "nu", "f", "g", "m", "lambda_")


def _cmd_check(args) -> int:
    if args.check_id == "list":
        _emit({c: {"default": d.default, "description": d.description} for c, d in REGISTRY.items()})
        return EXIT_OK
    if args.replay:
        dossier = _read_json(args.replay)
        if dossier.get("check") != args.check_id:
            raise ConfigError(f"witness is for check {dossier.get('check')!r}, not {args.check_id!r}")
        v = replay(dossier)
        recorded = dossier.get("verdict", {})
        _emit({"check": args.check_id, "verdict": v.to_dict(),
               "recorded": {"status": recorded.get("status"), "margin": recorded.get("margin")},
               "reproduced": recorded.get("status") == v.status.value
               and recorded.get("margin") == v.margin})
        return EXIT_VIOLATED if v.status is Status.VIOLATED else EXIT_OK

    cdef = get_check(args.check_id)
    ctx = RunContext(LoewnerTolerance(args.rel, args.abs_floor))
    if args.file:
        obj = _read_json(args.file)
        inst = obj if "operands" in obj else {"operands": obj, "params": {}}
        inst.setdefault("params", {})
    else:
        inst = cdef.generate(trial_rng(args.seed, args.check_id, args.trial), args.dim, args.trial, ctx)
        inst = json.loads(json.dumps(inst))
    for flag in _PARAM_FLAGS:
        value = getattr(args, flag)
        if value is not None:
            inst["params"][flag.rstrip("_")] = value
    try:
        v = cdef.run(inst, ctx)
    except KeyError as exc:
        raise ConfigError(f"missing operand or parameter {exc}") from None
    out = {"check": args.check_id, "verdict": v.to_dict()}
    if args.show_instance:
        out["instance"] = inst
    _emit(out)
    return EXIT_VIOLATED if v.status is Status.VIOLATED else EXIT_OK


# ---------------------------------------------------------------------------
# campaign
# ---------------------------------------------------------------------------


def _cmd_campaign(args) -> int:
    cfg = load_config(args.config) if args.config else CampaignConfig()
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.dims is not None:
        overrides["dims"] = tuple(args.dims)
    if args.trials is not None:
        overrides["trials_per_check"] = args.trials
    if args.checks is not None:
        overrides["checks"] = tuple(args.checks)
    if overrides:
        cfg = CampaignConfig.from_json({**cfg.to_json(), **overrides})
    for path in (args.out, args.csv):
        if path:
            Path(path).parent.mkdir(parents=True, exist_ok=True)
    report = run_campaign(cfg, workers=args.workers)
    text = report.dumps()
    if args.out:
        Path(args.out).write_text(text + "\n")
    else:
        sys.stdout.write(text + "\n")
    if args.csv:
        Path(args.csv).write_text(report.csv())
    if report.witnesses:
        wdir = args.witness_dir or (Path(args.out).parent / "witnesses" if args.out else Path("witnesses"))
        report.write_witnesses(wdir)
        print(f"wrote {len(report.witnesses)} witness file(s) to {wdir}", file=sys.stderr)
    totals = report.to_json()["totals"]
    print(f"{totals['trials']} trials, {totals['violated']} violated, "
          f"{totals['inconclusive']} inconclusive, {report.duration_s:.1f} s", file=sys.stderr)
    return report.exit_code()


# ---------------------------------------------------------------------------
# oracle
# ---------------------------------------------------------------------------


def _cmd_oracle(args) -> int:
    if args.oracle == "logmean":
        a, b = args.a, args.b
        _emit({"a": a, "b": b, "geometric": float(np.sqrt(a * b)), "log_mean": log_mean(a, b),
               "arithmetic": 0.5 * (a + b)})
        return EXIT_OK
    h = matrix_from_json(_read_json(args.file))
    if np.linalg.norm(h - h.conj().T) > 1e-12 * max(1.0, float(np.linalg.norm(h))):
        raise ConfigError("matrix is not Hermitian")
    d = eig_hermitian(h)
    n = h.shape[0]
    _emit({
        "n": n,
        "eigenvalues": d.lam.tolist(),
        "reconstruction_residual": float(np.linalg.norm(d.reconstruct(d.lam) - h)),
        "unitarity_residual": float(np.linalg.norm(d.u @ d.u.conj().T - np.eye(n))),
        "backend": BACKEND,
    })
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hhverify", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="run one check instance and print its verdict as JSON")
    c.add_argument("check_id", help="check identifier, or 'list' to show all")
    c.add_argument("--file", help="operands JSON (bare operands or {operands, params})")
    c.add_argument("--replay", help="witness dossier to replay")
    c.add_argument("--alpha", type=float)
    c.add_argument("--r", type=float)
    c.add_argument("--nu", type=float)
    c.add_argument("--f", help="function name, e.g. exp or power:2")
    c.add_argument("--g", help="second function for closure checks")
    c.add_argument("--m", type=float, help="scalar multiple for closure_scalar_multiple")
    c.add_argument("--lambda", dest="lambda_", type=float, help="weight for hh_refinement")
    c.add_argument("--seed", type=int, default=0, help="seed for a generated instance")
    c.add_argument("--trial", type=int, default=0, help="trial index for a generated instance")
    c.add_argument("--dim", type=int, default=4, help="dimension for a generated instance")
    c.add_argument("--rel", type=float, default=LoewnerTolerance().rel)
    c.add_argument("--abs-floor", type=float, default=LoewnerTolerance().abs_floor)
    c.add_argument("--show-instance", action="store_true", help="include operands in the output")
    c.set_defaults(func=_cmd_check)

    p = sub.add_parser("campaign", help="run a seeded campaign over all checks")
    p.add_argument("--config", help="campaign config JSON")
    p.add_argument("--seed", type=int)
    p.add_argument("--dims", type=_int_list)
    p.add_argument("--trials", type=int)
    p.add_argument("--checks", type=_str_list)
    p.add_argument("--out", help="report JSON path (default: stdout)")
    p.add_argument("--csv", help="per-trial CSV path")
    p.add_argument("--witness-dir", help="directory for witness dossiers")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=_cmd_campaign)

    o = sub.add_parser("oracle", help="closed-form and diagnostic values")
    osub = o.add_subparsers(dest="oracle", required=True)
    lm = osub.add_parser("logmean", help="logarithmic mean with its geometric and arithmetic bounds")
    lm.add_argument("--a", type=float, required=True)
    lm.add_argument("--b", type=float, required=True)
    eg = osub.add_parser("eig", help="Jacobi eigenvalues of a Hermitian matrix file")
    eg.add_argument("--file", required=True)
    o.set_defaults(func=_cmd_oracle)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NonConvergence as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (HHVerifyError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
