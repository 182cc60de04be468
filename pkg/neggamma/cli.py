"""
Command line interface.

    python -m neggamma plan    --method {1|2} --m M --n N --rho RHO [--mode exact|nearest]
    python -m neggamma bounds  --method {1|2} --m M --n N
    python -m neggamma table
    python -m neggamma sample  [--method {1|2}] (--plan-file PATH | --m M --n N --rho RHO)
                               --count N [--seed S] [--stream K] [--rate L]
                               [--format csv|jsonl] [--bivariate inv|ar]
    python -m neggamma verify  (same plan options) --count N [--seed S]
    python -m neggamma density --alpha0 A --y1-max Y --y2-max Y --step H

Data goes to stdout, diagnostics to stderr. Exit codes: 0 success,
1 usage / I/O / internal error, 2 infeasible or out-of-domain parameters,
3 verification gates failed.
"""

import sys
import json
import asyncio
import logging
import argparse
from pathlib import Path
from typing import Literal

import pandas as pd
from pydantic import BaseModel, ConfigDict, ValidationError

from . import config
from .density import density_grid
from .errors import DomainError, Infeasible, NegGammaError, NotRepresentable
from .model import PlanM1, PlanM2, TargetSpec
from .planner import Method, SolveMode, feasibility, reference_table, solve_m1, solve_m2
from .samplers import BivariateUniformMethod, sample_sharded
from .verification import run_verification

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INFEASIBLE = 2
EXIT_GATES_FAILED = 3

# Tolerance when checking a plan file's rho_theoretical against the formula
_RHO_CHECK = 1e-12

_BIVARIATE = {
    "inv": BivariateUniformMethod.CONDITIONAL_INVERSION,
    "ar": BivariateUniformMethod.ACCEPTANCE_REJECTION,
}


class UsageError(Exception):
    pass


class PlanDocument(BaseModel):
    """Serialized plan; the field names are frozen and unknown fields rejected."""

    model_config = ConfigDict(extra="forbid")

    method: Literal[1, 2]
    r: int
    s: int
    alpha0: float
    theta: float | None = None
    rate: float = 1.0
    rho_target: float | None = None
    rho_theoretical: float
    swapped: bool = False

    @classmethod
    def from_plan(
        cls,
        plan: PlanM1 | PlanM2,
        rho_target: float | None = None,
        swapped: bool = False,
    ) -> "PlanDocument":
        return cls(
            method=plan.method,
            r=plan.r,
            s=plan.s,
            alpha0=plan.alpha0,
            theta=getattr(plan, "theta", None),
            rate=plan.rate,
            rho_target=rho_target,
            rho_theoretical=plan.rho_theoretical,
            swapped=swapped,
        )

    def to_plan(self) -> PlanM1 | PlanM2:
        fields = {"r": self.r, "s": self.s, "alpha0": self.alpha0, "rate": self.rate}
        if self.method == 1:
            if self.theta is not None:
                raise ValueError("method 1 plans carry no theta")
            plan = PlanM1(**fields)
        else:
            if self.theta is None:
                raise ValueError("method 2 plans need theta")
            plan = PlanM2(theta=self.theta, **fields)
        if abs(plan.rho_theoretical - self.rho_theoretical) > _RHO_CHECK:
            raise ValueError(
                f"rho_theoretical={self.rho_theoretical} does not match the plan "
                f"({plan.rho_theoretical})"
            )
        return plan

    def dump(self) -> dict:
        return self.model_dump(exclude={"theta"} if self.theta is None else set())


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}\n{self.format_usage()}")


# ---------------------------------------------------------------------------
# Output helpers
# ---------------------------------------------------------------------------

def _write_json(payload: dict) -> None:
    sys.stdout.write(json.dumps(payload, indent=2) + "\n")


def _write_csv(frame: pd.DataFrame, float_format: str) -> None:
    frame.to_csv(sys.stdout, index=False, float_format=float_format, lineterminator="\n")


def _write_jsonl(y1, y2) -> None:
    lines = (
        json.dumps({"y1": a, "y2": b}, separators=(",", ":"))
        for a, b in zip(y1.tolist(), y2.tolist())
    )
    sys.stdout.write("".join(line + "\n" for line in lines))


# ---------------------------------------------------------------------------
# Plan resolution
# ---------------------------------------------------------------------------

def _solve(method: int, m: float, n: float, rho: float, mode: str) -> PlanDocument:
    spec = TargetSpec.normalized(m, n, rho)
    if spec.swapped:
        logger.info(f"Swapped shapes to m={spec.m}, n={spec.n}; output columns are unswapped")
    if Method(method) is Method.M1:
        plan = solve_m1(spec, mode)
    else:
        plan = solve_m2(spec)
    return PlanDocument.from_plan(plan, rho_target=rho, swapped=spec.swapped)


def _read_plan_file(path: str) -> PlanDocument:
    text = sys.stdin.read() if path == "-" else Path(path).read_text()
    return PlanDocument.model_validate_json(text)


def _with_rate(document: PlanDocument, rate: float | None) -> PlanDocument:
    if rate is None:
        return document
    if not rate > 0:
        raise DomainError(f"rate must be positive, got {rate}")
    return document.model_copy(update={"rate": rate})


def _resolve_plan(args) -> PlanDocument:
    if args.plan_file is not None:
        document = _read_plan_file(args.plan_file)
        if args.method is not None and args.method != document.method:
            raise UsageError(
                f"--method {args.method} contradicts the plan file (method {document.method})"
            )
    else:
        given = {"--method": args.method, "--m": args.m, "--n": args.n, "--rho": args.rho}
        missing = [flag for flag, value in given.items() if value is None]
        if missing:
            raise UsageError(f"{args.command}: missing {', '.join(missing)} (or pass --plan-file)")
        document = _solve(args.method, args.m, args.n, args.rho, args.mode)
    return _with_rate(document, args.rate)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def _cmd_plan(args) -> int:
    document = _with_rate(_solve(args.method, args.m, args.n, args.rho, args.mode), args.rate)
    _write_json(document.dump())
    return EXIT_OK


def _cmd_bounds(args) -> int:
    m, n = sorted((args.m, args.n))
    report = feasibility(args.method, m, n)
    _write_json(report.model_dump(mode="json"))
    return EXIT_OK


def _cmd_table(args) -> int:
    frame = pd.DataFrame([row.model_dump() for row in reference_table()])
    _write_csv(frame, "%.4f")
    return EXIT_OK


def _cmd_sample(args) -> int:
    document = _resolve_plan(args)
    plan = document.to_plan()
    y1, y2 = asyncio.run(
        sample_sharded(
            plan,
            args.count,
            args.seed,
            stream_id=args.stream,
            bivariate=_BIVARIATE[args.bivariate],
        )
    )
    if document.swapped:
        y1, y2 = y2, y1
    if args.format == "jsonl":
        _write_jsonl(y1, y2)
    else:
        _write_csv(pd.DataFrame({"y1": y1, "y2": y2}), "%.17g")
    return EXIT_OK


def _cmd_verify(args) -> int:
    document = _resolve_plan(args)
    plan = document.to_plan()
    report = asyncio.run(
        run_verification(
            plan,
            args.count,
            args.seed,
            stream_id=args.stream,
            bivariate=_BIVARIATE[args.bivariate],
            plan_document=document.dump(),
        )
    )
    _write_json(report.document())
    for failure in report.failures:
        sys.stderr.write(f"gate failed: {failure}\n")
    return EXIT_OK if report.passed else EXIT_GATES_FAILED


def _cmd_density(args) -> int:
    frame = density_grid(args.alpha0, args.y1_max, args.y2_max, args.step)
    _write_csv(frame, "%.17g")
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def _u64(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError(f"{text} is not an unsigned 64-bit integer")
    return value


def _count(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("count must be >= 0")
    return value


def _add_target(parser: argparse.ArgumentParser, required: bool) -> None:
    parser.add_argument("--method", type=int, choices=(1, 2), required=required)
    parser.add_argument("--m", type=float, required=required, help="shape of Y1")
    parser.add_argument("--n", type=float, required=required, help="shape of Y2")
    parser.add_argument("--rho", type=float, required=required, help="target correlation (< 0)")
    parser.add_argument("--mode", choices=[mode.value for mode in SolveMode], default=SolveMode.EXACT.value)
    parser.add_argument("--rate", type=float, default=None, help="rate of both marginals (default 1)")


def _add_sampling(parser: argparse.ArgumentParser) -> None:
    _add_target(parser, required=False)
    parser.add_argument("--plan-file", default=None, help="plan JSON path, or - for stdin")
    parser.add_argument("--count", type=_count, required=True)
    parser.add_argument("--seed", type=_u64, default=None)
    parser.add_argument("--stream", type=_u64, default=0)
    parser.add_argument("--bivariate", choices=sorted(_BIVARIATE), default="inv")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="neggamma", description="Negatively correlated gamma pairs")
    parser.add_argument("-v", "--verbose", action="store_true", help="log at INFO level")
    commands = parser.add_subparsers(dest="command", required=True)

    plan = commands.add_parser("plan", help="solve for a sampling plan")
    _add_target(plan, required=True)
    plan.set_defaults(handler=_cmd_plan)

    bounds = commands.add_parser("bounds", help="attainable correlation range")
    bounds.add_argument("--method", type=int, choices=(1, 2), required=True)
    bounds.add_argument("--m", type=float, required=True)
    bounds.add_argument("--n", type=float, required=True)
    bounds.set_defaults(handler=_cmd_bounds)

    table = commands.add_parser("table", help="reference Method 1 table as CSV")
    table.set_defaults(handler=_cmd_table)

    sample = commands.add_parser("sample", help="draw correlated pairs")
    _add_sampling(sample)
    sample.add_argument("--format", choices=("csv", "jsonl"), default="csv")
    sample.set_defaults(handler=_cmd_sample)

    verify = commands.add_parser("verify", help="Monte Carlo check of a plan")
    _add_sampling(verify)
    verify.set_defaults(handler=_cmd_verify)

    density = commands.add_parser("density", help="r = s = 1 joint density grid as CSV")
    density.add_argument("--alpha0", type=float, required=True)
    density.add_argument("--y1-max", type=float, required=True)
    density.add_argument("--y2-max", type=float, required=True)
    density.add_argument("--step", type=float, required=True)
    density.set_defaults(handler=_cmd_density)

    return parser


def dispatch(argv: list[str]) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        logging.basicConfig(
            level="INFO" if args.verbose else config.log_level(),
            stream=sys.stderr,
            format="%(levelname)s %(name)s: %(message)s",
        )
        if getattr(args, "seed", 0) is None:
            args.seed = config.default_seed()
        return args.handler(args)
    except SystemExit as exc:
        # --help
        return exc.code if isinstance(exc.code, int) else EXIT_OK
    except UsageError as exc:
        sys.stderr.write(f"{exc}\n")
        return EXIT_ERROR
    except (Infeasible, NotRepresentable, DomainError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INFEASIBLE
    except (ValidationError, ValueError, OSError, NegGammaError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_ERROR
    except Exception as exc:
        logger.exception("Unexpected failure")
        sys.stderr.write(f"internal error: {exc}\n")
        return EXIT_ERROR


def main() -> None:
    sys.exit(dispatch(sys.argv[1:]))
