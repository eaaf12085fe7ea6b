"""Seeded campaigns over the check registry: configuration, execution,
report and CSV emission, witness dossiers and replay."""

from __future__ import annotations

import csv
import io
import json
import math
import os
import statistics
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .checks import REGISTRY, RunContext, default_checks, get_check
from .commuting_means import QuadratureSpec
from .errors import ConfigError, NonConvergence, QuadratureFailure
from .functions import get_function
from .generators import trial_rng
from .linalg_core import LoewnerTolerance, Status, Verdict

SCHEMA_VERSION = 1
MAX_SEED = 2**64 - 1


@dataclass(frozen=True)
class CampaignConfig:
    seed: int = 0
    dims: tuple[int, ...] = (2, 4, 8)
    trials_per_check: int = 1000
    spectra_range: tuple[float, float] = (0.1, 10.0)
    function_set: tuple[str, ...] | None = None
    checks: tuple[str, ...] | None = None
    tolerance: LoewnerTolerance = LoewnerTolerance()
    quadrature: QuadratureSpec = QuadratureSpec()

    def __post_init__(self):
        if not (isinstance(self.seed, int) and 0 <= self.seed <= MAX_SEED):
            raise ConfigError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")
        if not self.dims or any(int(d) < 1 for d in self.dims):
            raise ConfigError("dims must be a nonempty list of positive integers")
        if int(self.trials_per_check) < 1:
            raise ConfigError("trials_per_check must be at least 1")
        lo, hi = self.spectra_range
        if not (0 < lo <= hi < math.inf):
            raise ConfigError(f"spectra_range must satisfy 0 < min <= max, got {self.spectra_range}")
        for c in self.checks or ():
            if c not in REGISTRY:
                raise ConfigError(f"unknown check {c!r}")
        for name in self.function_set or ():
            try:
                get_function(name)
            except KeyError as exc:
                raise ConfigError(str(exc)) from None

    @property
    def check_ids(self) -> list[str]:
        return list(self.checks) if self.checks else default_checks()

    def context(self) -> RunContext:
        return RunContext(self.tolerance, self.quadrature, tuple(self.spectra_range),
                          tuple(self.function_set) if self.function_set else None)

    def to_json(self) -> dict:
        return {
            "seed": self.seed,
            "dims": list(self.dims),
            "trials_per_check": self.trials_per_check,
            "spectra_range": list(self.spectra_range),
            "function_set": list(self.function_set) if self.function_set else None,
            "checks": self.check_ids,
            "tolerance": {"rel": self.tolerance.rel, "abs_floor": self.tolerance.abs_floor},
            "quadrature": self.quadrature.to_json(),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "CampaignConfig":
        known = {"seed", "dims", "trials_per_check", "trials", "spectra_range", "function_set",
                 "checks", "tolerance", "quadrature"}
        extra = set(obj) - known
        if extra:
            raise ConfigError(f"unknown config keys: {sorted(extra)}")
        kw: dict = {}
        try:
            if "seed" in obj:
                kw["seed"] = int(obj["seed"])
            if "dims" in obj:
                kw["dims"] = tuple(int(d) for d in obj["dims"])
            trials = obj.get("trials_per_check", obj.get("trials"))
            if trials is not None:
                kw["trials_per_check"] = int(trials)
            if "spectra_range" in obj:
                lo, hi = obj["spectra_range"]
                kw["spectra_range"] = (float(lo), float(hi))
            if obj.get("function_set"):
                kw["function_set"] = tuple(obj["function_set"])
            if obj.get("checks"):
                kw["checks"] = tuple(obj["checks"])
            if "tolerance" in obj:
                kw["tolerance"] = LoewnerTolerance(**obj["tolerance"])
            if "quadrature" in obj:
                kw["quadrature"] = QuadratureSpec(**obj["quadrature"])
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"invalid config: {exc}") from None
        return cls(**kw)


@dataclass(frozen=True)
class TrialResult:
    check: str
    trial: int
    dim: int
    status: Status
    margin: float
    normalized_margin: float
    cause: str | None = None


def _dossier(cfg: CampaignConfig, check: str, k: int, dim: int, inst: dict, v: Verdict) -> dict:
    verdict = v.to_dict()
    verdict.pop("witness", None)
    return {
        "schema_version": SCHEMA_VERSION,
        "check": check,
        "seed": cfg.seed,
        "trial": k,
        "dim": dim,
        "operands": inst["operands"],
        "params": inst["params"],
        "tolerance": {"rel": cfg.tolerance.rel, "abs_floor": cfg.tolerance.abs_floor},
        "quadrature": cfg.quadrature.to_json(),
        "verdict": verdict,
    }


def witness_name(check: str, k: int) -> str:
    return f"{check}__{k:06d}.json"


def run_trial(cfg: CampaignConfig, check: str, k: int) -> tuple[TrialResult, dict | None]:
    """Generate and run trial ``k`` of ``check``; returns the result and, if Violated, its dossier."""
    ctx = cfg.context()
    dim = int(cfg.dims[k % len(cfg.dims)])
    cdef = get_check(check)
    inst = cdef.generate(trial_rng(cfg.seed, check, k), dim, k, ctx)
    # round-trip through JSON so the run sees exactly what a witness would hold
    inst = json.loads(json.dumps(inst))
    try:
        v = cdef.run(inst, ctx)
    except (NonConvergence, QuadratureFailure) as exc:
        cause = f"{type(exc).__name__}: {exc}"
        return TrialResult(check, k, dim, Status.INCONCLUSIVE, math.nan, math.nan, cause), None
    cause = v.details.get("cause") if isinstance(v.details.get("cause"), str) else None
    if v.status is Status.INCONCLUSIVE and cause is None:
        cause = "tolerance_band: margin between -10 and -1 tolerance bands"
    res = TrialResult(check, k, dim, v.status, v.margin, v.normalized_margin, cause)
    if v.status is Status.VIOLATED:
        return res, _dossier(cfg, check, k, dim, inst, v)
    return res, None


def _run_chunk(args) -> tuple[list[TrialResult], dict]:
    cfg, check, start, stop = args
    results, witnesses = [], {}
    for k in range(start, stop):
        res, dossier = run_trial(cfg, check, k)
        results.append(res)
        if dossier is not None:
            witnesses[witness_name(check, k)] = dossier
    return results, witnesses


def _cause_kind(cause: str) -> str:
    return cause.split()[0].rstrip(":")


def _finite(xs):
    return [x for x in xs if math.isfinite(x)]


def _summary(results: list[TrialResult], refs: list[str]) -> dict:
    counts = {s: sum(r.status is s for r in results) for s in Status}
    margins = _finite(r.margin for r in results)
    norm = _finite(r.normalized_margin for r in results)
    return {
        "trials": len(results),
        "holds": counts[Status.HOLDS],
        "inconclusive": counts[Status.INCONCLUSIVE],
        "violated": counts[Status.VIOLATED],
        "skipped": counts[Status.SKIPPED],
        "nonconvergence": sum(1 for r in results if r.cause and r.cause.startswith("NonConvergence")),
        "min_margin": min(margins) if margins else None,
        "median_margin": statistics.median(margins) if margins else None,
        "min_normalized_margin": min(norm) if norm else None,
        "median_normalized_margin": statistics.median(norm) if norm else None,
        "inconclusive_causes": dict(sorted(Counter(_cause_kind(r.cause) for r in results
                                                   if r.cause).items())),
        "witness_refs": refs,
    }


@dataclass
class CampaignReport:
    config: CampaignConfig
    results: list[TrialResult]
    witnesses: dict[str, dict]
    duration_s: float = 0.0
    checks: dict[str, dict] = field(default_factory=dict)

    def __post_init__(self):
        by_check: dict[str, list[TrialResult]] = {c: [] for c in self.config.check_ids}
        for r in self.results:
            by_check[r.check].append(r)
        self.checks = {
            c: _summary(rs, sorted(w for w in self.witnesses if w.startswith(c + "__")))
            for c, rs in by_check.items()
        }

    @property
    def total_violated(self) -> int:
        return sum(s["violated"] for s in self.checks.values())

    @property
    def total_nonconvergence(self) -> int:
        return sum(s["nonconvergence"] for s in self.checks.values())

    def exit_code(self) -> int:
        if self.total_violated:
            return 1
        if self.total_nonconvergence:
            return 3
        return 0

    def to_json(self, include_timing: bool = True) -> dict:
        out = {
            "schema_version": SCHEMA_VERSION,
            "version": __version__,
            "config": self.config.to_json(),
            "checks": self.checks,
            "totals": {
                "trials": len(self.results),
                "violated": self.total_violated,
                "inconclusive": sum(s["inconclusive"] for s in self.checks.values()),
                "nonconvergence": self.total_nonconvergence,
            },
        }
        if include_timing:
            out["timing"] = {"wall_clock_s": self.duration_s}
        return out

    def dumps(self, include_timing: bool = True) -> str:
        return json.dumps(self.to_json(include_timing), indent=2)

    def csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["check", "dim", "seed_index", "min_margin", "verdict"])
        for r in self.results:
            w.writerow([r.check, r.dim, r.trial, repr(r.margin), r.status.value])
        return buf.getvalue()

    def write_witnesses(self, directory) -> list[Path]:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        paths = []
        for name, dossier in sorted(self.witnesses.items()):
            path = directory / name
            path.write_text(json.dumps(dossier, indent=2))
            paths.append(path)
        return paths


def _chunks(cfg: CampaignConfig, size: int):
    for check in cfg.check_ids:
        for start in range(0, cfg.trials_per_check, size):
            yield cfg, check, start, min(start + size, cfg.trials_per_check)


def run_campaign(cfg: CampaignConfig, workers: int = 1, chunk_size: int = 100) -> CampaignReport:
    """Run every configured check for ``trials_per_check`` trials.

    Trial ``k`` of a check uses dimension ``dims[k % len(dims)]`` and its own
    random stream, so the report does not depend on ``workers``.
    """
    t0 = time.perf_counter()
    tasks = list(_chunks(cfg, chunk_size))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_chunk, tasks))
    else:
        parts = [_run_chunk(t) for t in tasks]
    results: list[TrialResult] = []
    witnesses: dict[str, dict] = {}
    for res, wit in parts:
        results.extend(res)
        witnesses.update(wit)
    order = {c: i for i, c in enumerate(cfg.check_ids)}
    results.sort(key=lambda r: (order[r.check], r.trial))
    return CampaignReport(cfg, results, witnesses, time.perf_counter() - t0)


def replay(dossier: dict) -> Verdict:
    """Re-run a witness dossier with its recorded tolerance and quadrature."""
    try:
        check = dossier["check"]
        inst = {"operands": dossier["operands"], "params": dossier.get("params", {})}
        tol = LoewnerTolerance(**dossier.get("tolerance", {}))
        quad = QuadratureSpec(**dossier.get("quadrature", {}))
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"malformed witness: {exc}") from None
    return get_check(check).run(inst, RunContext(tol, quad))


def load_config(path) -> CampaignConfig:
    try:
        obj = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {os.fspath(path)}: {exc}") from None
    if not isinstance(obj, dict):
        raise ConfigError("config must be a JSON object")
    return CampaignConfig.from_json(obj)
