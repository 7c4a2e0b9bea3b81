"""Batch front door: run a command, collect its entries into a report and write it out."""

import argparse
import sys
from pathlib import Path
from typing import Any, Callable, Literal, Optional

import numpy as np
from dotenv import dotenv_values
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from hyperbench import config, constants, witness
from hyperbench.errors import HyperbenchError, SizeGuardError, UnsupportedNormError
from hyperbench.findim import (
    MultilinearMap,
    algebra_from_name,
    cocycle_bound_check,
    cocycle_space,
    commutant_hyperref_check,
    delta_n,
    derivation_defect_check,
    hyperref_ratio,
    lambda_check,
    load_cayley_table,
    local_unit_bound,
    regular_bimodule,
    strong_b_estimate,
)
from hyperbench.findim.algebras import cyclic_group_table
from hyperbench.reports import Report, ReportEntry, write_report

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_CONFIG = 2
EXIT_GUARD = 3
EXIT_ERROR = 4

IDENTITY_TOL = 1e-10
INCONCLUSIVE_RATE = 0.2
CHECK_SAMPLES = 10

DEFINITIONS = {
    "dist": "dist(T, S) = inf over S in S of ||T - S||, reported as a certified upper bound",
    "dist_r": "dist_r(T, S) = sup over unit tuples (a_1..a_n) of inf over S in S of ||T(a) - S(a)||, "
    "reported as a certified lower bound",
    "status": "pass: certified; fail: certified violation; inconclusive: brackets too wide to decide",
}


# Input Models
class WitnessCommand(BaseModel):
    model_config = ConfigDict(extra="forbid")

    epsilon: Optional[float] = None
    epsilons: Optional[list[float]] = None
    delta: Optional[float] = None
    delta_ratio: float = 0.01
    truncation: int = Field(default_factory=lambda: config.DEFAULT_TRUNCATION)
    grid: int = Field(default_factory=lambda: config.DEFAULT_GRID)
    alpha: Optional[float] = Field(default=None, ge=0)

    @field_validator("epsilons", mode="before")
    @classmethod
    def split_list(cls, v):
        if isinstance(v, str):
            return [float(t) for t in v.replace(",", " ").split()]
        return v

    @model_validator(mode="after")
    def one_grid(self):
        if self.epsilon is None and not self.epsilons:
            raise ValueError("give epsilon or epsilons")
        if self.epsilons and self.delta is not None:
            raise ValueError("delta goes with a single epsilon; use delta_ratio for a grid")
        return self


class ConstantsCommand(constants.ConstantInputs):
    model_config = ConfigDict(extra="forbid", frozen=True)


class FindimCommand(BaseModel):
    model_config = ConfigDict(extra="forbid")

    algebra: str = "ck:2"
    degree: int = Field(default=1, ge=1, le=3)
    samples: int = Field(default=100, ge=0)
    budget: int = Field(default_factory=lambda: config.DEFAULT_BUDGET, ge=1)
    restarts: int = Field(default_factory=lambda: config.DEFAULT_RESTARTS, ge=1)


class CvpCommand(BaseModel):
    model_config = ConfigDict(extra="forbid")

    group: str = "z:3"
    p: float = Field(default=2.0, gt=1.0)
    samples: int = Field(default=200, ge=0)
    budget: int = Field(default_factory=lambda: config.DEFAULT_BUDGET, ge=1)


class RunConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    command: Literal["witness", "constants", "findim", "cvp"]
    parameters: dict[str, Any] = {}
    seed: int = 0
    output_path: Optional[Path] = None
    format: Literal["json", "csv", "pdf"] = "json"

    def resolved_output(self) -> Path:
        if self.output_path is not None:
            return self.output_path
        return Path(config.REPORTS_DIR) / f"{self.command}_seed{self.seed}.{self.format}"


# --- command handlers -----------------------------------------------------------------


def _bound_entry(bound: constants.BoundValue) -> ReportEntry:
    return ReportEntry(
        name=bound.name, bound=bound.value, bracket_lo=bound.value, bracket_hi=bound.value, status="pass", formula=bound.formula
    )


def run_witness(params: WitnessCommand, cfg: RunConfig) -> Report:
    print("  → Verifying witness constructions...")
    if params.epsilons:
        reports = witness.verify_grid(params.epsilons, params.delta_ratio, params.truncation, params.grid)
    else:
        delta = params.delta if params.delta is not None else params.epsilon * params.delta_ratio
        reports = [
            witness.verify(
                witness.WitnessParams(epsilon=params.epsilon, delta=delta, truncation=params.truncation, grid=params.grid)
            )
        ]
    entries = [ReportEntry(**e.model_dump(exclude={"margin"})) for e in witness.to_report(reports)]
    details: dict[str, Any] = {
        "margins": {e.name: e.margin for rep in reports for e in rep.entries if e.margin is not None},
    }
    if params.alpha is not None:
        curve = witness.bound_curve(params.alpha)
        details["curve"] = curve.model_dump() | {"effective_bound": curve.effective_bound}
        entries.append(
            ReportEntry(
                name="optimised_bound",
                bound=curve.effective_bound,
                bracket_lo=curve.bound,
                bracket_hi=curve.bound,
                status="pass",
                formula=f"min(2*sqrt(3*B*alpha), 2) with B=12*pi*(1+sqrt(2)), alpha={params.alpha:g}",
                note="clamped at eps -> 3" if curve.clamped else None,
            )
        )
    print(f"  ✓ {len(entries)} entries over {len(reports)} parameter set(s)")
    return Report(command="witness", seed=cfg.seed, config=params.model_dump(), entries=entries, details=details)


def run_constants(params: ConstantsCommand, cfg: RunConfig) -> Report:
    print("  → Evaluating the constant pipeline...")
    bounds = params.pipeline()
    entries = [_bound_entry(b) for b in bounds]
    entries.append(_bound_entry(constants.cvp_bound()))
    print(f"  ✓ {len(entries)} bounds")
    return Report(command="constants", seed=cfg.seed, config=params.model_dump(), entries=entries)


def _max_deviation_entry(name: str, deviation: float, formula: str) -> ReportEntry:
    return ReportEntry(
        name=name,
        bound=IDENTITY_TOL,
        bracket_lo=deviation,
        bracket_hi=deviation,
        status="pass" if deviation <= IDENTITY_TOL else "fail",
        formula=formula,
    )


def _aggregate(statuses: list[str]) -> str:
    if "fail" in statuses:
        return "fail"
    if "inconclusive" in statuses:
        return "inconclusive"
    return "pass"


def run_findim(params: FindimCommand, cfg: RunConfig) -> Report:
    A = algebra_from_name(params.algebra)
    X = regular_bimodule(A)
    n = params.degree
    rng = np.random.default_rng(cfg.seed)
    entries: list[ReportEntry] = []
    details: dict[str, Any] = {"algebra": A.name, "dim": A.dim, "norm_kind": A.norm_kind}

    print(f"  → Checking the cochain complex of {A.name} (n={n})...")
    T = MultilinearMap.random(n, X.dim, A.dim, rng)
    square = delta_n(delta_n(T, A, X), A, X)
    entries.append(_max_deviation_entry("chain_complex", float(np.abs(square.tensor).max()), "delta^(n+1) delta^n T = 0"))
    entries.append(_max_deviation_entry("lambda_intertwining", lambda_check(T, A, X), "curry(delta T) = Delta(curry T)"))
    Z = cocycle_space(A, X, n)
    details["cocycle_dim"] = Z.dim
    M = local_unit_bound(A)
    details["local_unit_bound"] = M.model_dump()
    print(f"  ✓ dim Z^{n} = {Z.dim}, M = {M.value:g}{' (heuristic)' if M.heuristic else ''}")

    r = constants.cstar_group_constant()
    print("  → Estimating the strong-(B) constant...")
    try:
        estimate = strong_b_estimate(A, budget=params.budget, seed=cfg.seed, restarts=params.restarts)
        details["strong_b"] = estimate.model_dump()
        entries.append(
            ReportEntry(
                name="strong_b_lower",
                bound=r.value,
                bracket_lo=estimate.value,
                bracket_hi=None,
                status="pass" if estimate.value <= r.value else "fail",
                formula="r_hat <= " + r.formula,
            )
        )
        print(f"  ✓ r_hat = {estimate.value:.6g}")
    except UnsupportedNormError as e:
        entries.append(
            ReportEntry(name="strong_b_lower", bound=r.value, status="inconclusive", formula=r.formula, note=str(e))
        )
        print(f"  ✓ skipped: {e}")

    print(f"  → Sampling {params.samples} hyperreflexivity ratios...")
    ratios = hyperref_ratio(A, X, n, params.samples, seed=cfg.seed, budget=params.budget)
    rate = ratios.inconclusive / params.samples if params.samples else 0.0
    entries.append(
        ReportEntry(
            name="hyperref_ratio",
            bound=ratios.bound.value,
            bracket_lo=None,
            bracket_hi=ratios.max_ratio,
            status="pass" if ratios.max_ratio is not None and rate < INCONCLUSIVE_RATE else "inconclusive",
            formula="max dist_upper/dist_r_lower <= " + ratios.bound.formula,
            note=f"{len(ratios.conclusive)} conclusive, {ratios.inconclusive} inconclusive, {ratios.skipped} skipped",
        )
    )
    details["hyperref_samples"] = [s.model_dump() for s in ratios.samples]
    print(f"  ✓ max ratio {ratios.max_ratio}, {ratios.inconclusive} inconclusive")

    if A.unit is not None and A.norm_kind in ("sup", "group_l1"):
        print("  → Checking cocycle and derivation norm bounds...")
        checks = []
        for index in range(min(CHECK_SAMPLES, params.samples)):
            sample = MultilinearMap.random(n, X.dim, A.dim, rng)
            checks.append(cocycle_bound_check(sample, A, X, r.value, budget=params.budget, seed=cfg.seed + index))
            D = MultilinearMap.random(1, X.dim, A.dim, rng)
            checks.append(derivation_defect_check(D, A, X, r.value, budget=params.budget, seed=cfg.seed + index))
        if checks:
            details["norm_bound_checks"] = [c.model_dump() for c in checks]
            for name in ("cocycle_norm", "derivation_defect"):
                group = [c for c in checks if c.name == name]
                worst = max(group, key=lambda c: c.norm_upper / max(c.bound.value, 1e-300))
                entries.append(
                    ReportEntry(
                        name=name,
                        bound=worst.bound.value,
                        bracket_lo=worst.norm_lower,
                        bracket_hi=worst.norm_upper,
                        status=_aggregate([c.status for c in group]),
                        formula=worst.bound.formula,
                        note=f"worst of {len(group)} samples",
                    )
                )
            print(f"  ✓ {len(checks)} checks")

    return Report(
        command="findim", seed=cfg.seed, config=params.model_dump(), definitions=DEFINITIONS, entries=entries, details=details
    )


def _group_table(spec: str) -> np.ndarray:
    if spec.startswith("z:"):
        return cyclic_group_table(int(spec[2:]))
    return load_cayley_table(Path(spec))


def run_cvp(params: CvpCommand, cfg: RunConfig) -> Report:
    table = _group_table(params.group)
    print(f"  → Commutant of the regular representation of a group of order {table.shape[0]} on l^{params.p:g}...")
    result = commutant_hyperref_check(table, params.p, params.samples, seed=cfg.seed, budget=params.budget)
    rate = result.inconclusive / params.samples if params.samples else 0.0
    abelian = bool(np.all(table == table.T))
    entries = [
        ReportEntry(
            name="commutant_dim",
            bound=float(table.shape[0]) if abelian else None,
            bracket_lo=float(result.commutant_dim),
            bracket_hi=float(result.commutant_dim),
            status="fail" if abelian and result.commutant_dim != table.shape[0] else "pass",
            formula="dim ker of [pi(g), L] = 0 over generators; |G| for abelian G",
        ),
        ReportEntry(
            name="commutant_ratio",
            bound=result.bound.value,
            bracket_hi=result.max_ratio,
            status="pass" if result.max_ratio is not None and rate < INCONCLUSIVE_RATE else "inconclusive",
            formula="max dist_upper/dist_r_lower <= " + result.bound.formula,
            note=f"{len(result.conclusive)} conclusive, {result.inconclusive} inconclusive",
        ),
        ReportEntry(
            name="zero_product_step",
            bound=1.0,
            bracket_hi=result.pair_max_ratio,
            status=result.pair_status,
            formula="||pi(a) T pi(b) x|| <= alpha ||pi||^2 ||x|| ||a|| ||b|| for ab = 0",
            note=f"{result.pair_checks} checks, {result.pair_violations} violations",
        ),
        ReportEntry(
            name="derivation_norm",
            bound=1.0,
            bracket_hi=result.derivation_max_ratio,
            status="pass" if result.derivation_inconclusive == 0 else "inconclusive",
            formula="||delta_T|| / (C alpha ||pi||^2 K^2) <= 1",
        ),
        ReportEntry(
            name="reflexivity",
            status="pass" if result.reflexive else "fail",
            formula="dist_r(L) = 0 implies dist(L) = 0 on commutant members",
            note=f"{len(result.membership)} members",
        ),
    ]
    print(f"  ✓ commutant dim {result.commutant_dim}, max ratio {result.max_ratio}")
    return Report(
        command="cvp",
        seed=cfg.seed,
        config=params.model_dump(),
        definitions=DEFINITIONS,
        entries=entries,
        details={"samples": [s.model_dump() for s in result.samples]},
    )


COMMANDS: dict[str, tuple[type[BaseModel], Callable[[Any, RunConfig], Report]]] = {
    "witness": (WitnessCommand, run_witness),
    "constants": (ConstantsCommand, run_constants),
    "findim": (FindimCommand, run_findim),
    "cvp": (CvpCommand, run_cvp),
}


def execute(cfg: RunConfig) -> dict:
    """Run one command and write its report.

    Returns:
        dict: ``{"status": "success", "report": Report, "path": Path}`` or
        ``{"status": "error", "message": str, "exit_code": int}``; anything unexpected exits with 4.
    """
    model, handler = COMMANDS[cfg.command]
    try:
        params = model(**cfg.parameters)
        report = handler(params, cfg)
        report = report.model_copy(update={"config": {**report.config, "seed": cfg.seed, "format": cfg.format}})
        path = write_report(report, cfg.resolved_output(), cfg.format)
    except ValidationError as e:
        return {"status": "error", "message": str(e), "exit_code": EXIT_CONFIG}
    except SizeGuardError as e:
        return {"status": "error", "message": str(e), "exit_code": EXIT_GUARD}
    except (HyperbenchError, ValueError, OSError) as e:
        return {"status": "error", "message": str(e), "exit_code": EXIT_CONFIG}
    except Exception as e:
        return {"status": "error", "message": f"{type(e).__name__}: {e}", "exit_code": EXIT_ERROR}
    return {"status": "success", "report": report, "path": path}


def run(cfg: RunConfig) -> int:
    print("\n" + "=" * 50)
    print(f"  hyperbench {cfg.command} (seed {cfg.seed})")
    print("=" * 50 + "\n")
    result = execute(cfg)
    if result["status"] == "error":
        print(f"❌ Error: {result['message']}")
        return result["exit_code"]
    report = result["report"]
    print(f"\n  ✓ Report written to {result['path']}")
    print(f"  {report.count('pass')} pass, {report.count('fail')} fail, {report.count('inconclusive')} inconclusive\n")
    return EXIT_FAIL if report.status == "fail" else EXIT_OK


# --- argument parsing ---------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hyperbench", description=__doc__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--output", type=Path, default=None)
    common.add_argument("--format", choices=["json", "csv", "pdf"], default=None)
    common.add_argument("--config", type=Path, default=None, help="flat key = value file")
    sub = parser.add_subparsers(dest="command", required=True)

    w = sub.add_parser("witness", parents=[common], help="verify the witness construction")
    w.add_argument("--epsilon", type=float)
    w.add_argument("--epsilons", type=str, help="comma separated grid")
    w.add_argument("--delta", type=float)
    w.add_argument("--delta-ratio", dest="delta_ratio", type=float)
    w.add_argument("--truncation", type=int)
    w.add_argument("--grid", type=int)
    w.add_argument("--alpha", type=float)

    c = sub.add_parser("constants", parents=[common], help="evaluate the constant pipeline")
    for name, kind in (("alpha", float), ("gamma", float), ("r", float), ("M", float), ("C", float), ("K", float), ("n", int)):
        c.add_argument(f"--{name}", type=kind)
    c.add_argument("--pi-norm", dest="pi_norm", type=float)

    f = sub.add_parser("findim", parents=[common], help="finite-dimensional experiments")
    f.add_argument("--algebra", type=str)
    f.add_argument("--degree", type=int)
    f.add_argument("--samples", type=int)
    f.add_argument("--budget", type=int)
    f.add_argument("--restarts", type=int)

    v = sub.add_parser("cvp", parents=[common], help="commutant of a regular representation")
    v.add_argument("--group", type=str, help="z:<k> or a Cayley-table file")
    v.add_argument("--p", type=float)
    v.add_argument("--samples", type=int)
    v.add_argument("--budget", type=int)
    return parser


RUN_KEYS = {"seed", "output", "format", "config", "command"}


def config_from_args(args: argparse.Namespace) -> RunConfig:
    """Merge a config file (if any) with the flags; flags win."""
    values: dict[str, Any] = {}
    if args.config is not None:
        if not args.config.exists():
            raise FileNotFoundError(f"config file not found: {args.config}")
        values.update({k: v for k, v in dotenv_values(args.config).items() if v is not None})
    values.update({k: v for k, v in vars(args).items() if v is not None and k not in ("config", "command")})
    parameters = {k: v for k, v in values.items() if k not in RUN_KEYS}
    return RunConfig(
        command=args.command,
        parameters=parameters,
        seed=values.get("seed", 0),
        output_path=values.get("output"),
        format=values.get("format", "json"),
    )


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
    except (ValidationError, FileNotFoundError) as e:
        print(f"❌ Error: {e}")
        return EXIT_CONFIG
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
