"""Command-line entry point: parse a JSON config, dispatch to the library, emit reports.

Exit codes: 0 all checks pass, 1 verification or numerical failure, 2 usage or config error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field

from .adjoint import adjoint_summary
from .errors import InvalidInputError, LatticeError
from .fixtures import LAMBDA, SIGMA_TILDE, TAU_TILDE
from .hypeq import EquationSpec, lambda_n, rodrigues_check, rodrigues_eval
from .lattice import LatticeSpec, _complex_from_json, lattice_table
from .report import VerificationReport
from .solutions.sums import SolutionForm, lambda_for_root, make_solution, solve_on_grid
from .suites import SUITES, SuiteContext, run_suites

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
DEFAULT_LATTICE = {"kind": "quadratic", "c": [[1.0, 0.0], [1.0, 0.0], [1.0, 0.0]]}
DEFAULT_EQUATION = {
    "sigma_tilde": [[c, 0.0] for c in SIGMA_TILDE],
    "tau_tilde": [[c, 0.0] for c in TAU_TILDE],
    "lambda": [LAMBDA, 0.0],
}
CSV_HEADER = ["z_re", "z_im", "y_re", "y_im", "residual"]


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    lattice: LatticeSpec
    equation: dict
    params: dict = field(default_factory=dict)
    suites: list[str] = field(default_factory=lambda: list(SUITES))
    tolerances: dict[str, float] = field(default_factory=dict)
    seed: int = 0
    faults: dict = field(default_factory=dict)

    def equation_spec(self, lam: complex | None = None) -> EquationSpec:
        d = dict(self.equation)
        if lam is not None:
            d["lambda"] = [lam.real, lam.imag]
        elif d.get("lambda") == "root":
            raise UsageError('lambda "root" is only meaningful for the solve command')
        return EquationSpec.from_dict(d, self.lattice)


def load_config(path: str | None) -> RunConfig:
    raw: dict = {}
    if path is not None:
        try:
            with open(path, encoding="utf-8") as fh:
                raw = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise UsageError("config must be a JSON object")
    known = {"lattice", "equation", "params", "suites", "tolerances", "seed", "fault_injection"}
    extra = sorted(set(raw) - known)
    if extra:
        raise UsageError(f"unknown config keys {extra}")
    lat = LatticeSpec.from_dict(raw.get("lattice", DEFAULT_LATTICE))
    suites = raw.get("suites", list(SUITES))
    if not isinstance(suites, list) or not all(isinstance(s, str) for s in suites):
        raise UsageError("suites must be a list of names")
    tols = raw.get("tolerances", {})
    if not isinstance(tols, dict):
        raise UsageError("tolerances must map check ids to numbers")
    for k, v in tols.items():
        if not isinstance(v, (int, float)) or not v > 0 or not math.isfinite(v):
            raise UsageError(f"tolerance for {k} must be a positive number")
    seed = raw.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool):
        raise UsageError("seed must be an integer")
    faults = raw.get("fault_injection", {})
    if not isinstance(faults, dict) or sorted(set(faults) - {"tau_star_scale"}):
        raise UsageError("fault_injection supports only tau_star_scale")
    params = raw.get("params", {})
    if not isinstance(params, dict):
        raise UsageError("params must be an object")
    return RunConfig(lat, raw.get("equation", DEFAULT_EQUATION), params, suites, dict(tols), seed, dict(faults))


def parse_grid(text: str) -> tuple[complex, int]:
    try:
        z0, count = text.split(":")
        z0, count = complex(z0.replace(" ", "")), int(count)
    except ValueError as exc:
        raise UsageError(f"grid must look like z0:count, got {text!r}") from exc
    if count < 0:
        raise UsageError("grid count must be nonnegative")
    return z0, count


def _param(args, cfg: RunConfig, name: str, default=None):
    v = getattr(args, name, None)
    if v is None:
        v = cfg.params.get(name, default)
    return v


def _fault_scale(cfg: RunConfig):
    v = cfg.faults.get("tau_star_scale")
    return None if v is None else _complex_from_json(v)


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _dump(data) -> str:
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def _finish_report(rep: VerificationReport, cfg: RunConfig, tol: float | None) -> VerificationReport:
    return rep.with_tolerances(cfg.tolerances, tol)


def cmd_verify(args, cfg: RunConfig) -> int:
    suites = args.suite or cfg.suites
    unknown = [s for s in suites if s not in SUITES]
    if unknown:
        raise UsageError(f"unknown suite(s) {unknown}; available: {sorted(SUITES)}")
    seed = cfg.seed if args.seed is None else args.seed
    faults = {}
    if _fault_scale(cfg) is not None:
        faults["tau_star_scale"] = _fault_scale(cfg)
    ctx = SuiteContext(
        cfg.equation_spec(),
        nu=float(_param(args, cfg, "nu", 0.8)),
        mu=float(_param(args, cfg, "mu", 2.0)),
        seed=seed,
        faults=faults,
    )
    rep = _finish_report(run_suites(suites, ctx), cfg, args.tol)
    data = rep.to_dict()
    data["suites"] = list(suites)
    data["seed"] = seed
    _emit(_dump(data), args.out)
    print(f"{len(rep.entries) - len(rep.failures())}/{len(rep.entries)} checks passed", file=sys.stderr)
    for e in rep.failures():
        print(f"FAIL {e.check_id}: {e.max_residual:.3e} > {e.tolerance:.1e} {e.notes}", file=sys.stderr)
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_adjoint(args, cfg: RunConfig) -> int:
    nu = float(_param(args, cfg, "nu", 0.0))
    mu = float(_param(args, cfg, "mu", 0.0))
    data, rep = adjoint_summary(cfg.equation_spec(), nu, mu, tau_scale=_fault_scale(cfg))
    rep = _finish_report(rep, cfg, args.tol)
    data["checks"] = rep.to_dict()["entries"]
    data["pass"] = rep.passed
    _emit(_dump(data), args.out)
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_solve(args, cfg: RunConfig) -> int:
    form = _param(args, cfg, "form")
    if form is None:
        raise UsageError("solve needs --form")
    try:
        form = SolutionForm(form)
    except ValueError as exc:
        raise UsageError(f"unknown form {form!r}; choose from {[f.value for f in SolutionForm]}") from exc
    nu = _param(args, cfg, "nu")
    a, b = _param(args, cfg, "a"), _param(args, cfg, "b")
    if nu is None or a is None or b is None:
        raise UsageError("solve needs --nu, --a and --b")
    mu = _param(args, cfg, "mu")
    nu = float(nu)
    mu = None if mu is None else float(mu)
    z0, count = parse_grid(_param(args, cfg, "grid", "0:0"))
    eq_dict = cfg.equation
    if eq_dict.get("lambda") == "root":
        base = cfg.equation_spec(0j)
        eq = base.with_lambda(lambda_for_root(base, form, nu, mu))
    else:
        eq = cfg.equation_spec()
    spec = make_solution(eq, form, nu, mu, _complex_from_json(a), _complex_from_json(b), z_anchor=z0)
    rows = solve_on_grid(spec, eq, [z0 + k for k in range(count)])
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for z, y, r in rows:
        w.writerow([repr(z.real), repr(z.imag), repr(y.real), repr(y.imag), repr(r)])
    _emit(buf.getvalue(), args.out)
    tol = 1e-7 if args.tol is None else args.tol
    bad = [r for _, _, r in rows if not r <= tol]
    if bad:
        print(f"{len(bad)} grid points exceed residual tolerance {tol:.1e}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def cmd_rodrigues(args, cfg: RunConfig) -> int:
    n = _param(args, cfg, "n")
    if n is None or int(n) != n:
        raise UsageError("rodrigues needs an integer --n")
    n = int(n)
    z0, count = parse_grid(_param(args, cfg, "grid", "0.37:10"))
    eq = cfg.equation_spec(0j) if cfg.equation.get("lambda") == "root" else cfg.equation_spec()
    zs = [z0 + k for k in range(count)]
    lam = lambda_n(eq, n)
    vals = rodrigues_eval(eq, n, zs) if zs else []
    rep = VerificationReport()
    if count >= n + 2:
        rep = rodrigues_check(eq, n, zs)
    rep = _finish_report(rep, cfg, args.tol)
    data = {
        "n": n,
        "lambda_n": [lam.real, lam.imag],
        "values": [[z.real, z.imag, complex(v).real, complex(v).imag] for z, v in zip(zs, vals)],
        "checks": rep.to_dict()["entries"],
        "pass": rep.passed,
    }
    _emit(_dump(data), args.out)
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_lattice_info(args, cfg: RunConfig) -> int:
    nu = float(_param(args, cfg, "nu", 0.0))
    z0, count = parse_grid(_param(args, cfg, "grid", "0:5"))
    _emit(_dump(lattice_table(cfg.lattice, nu, [z0 + k for k in range(count)])), args.out)
    return EXIT_OK


COMMANDS = {
    "verify": cmd_verify,
    "adjoint": cmd_adjoint,
    "solve": cmd_solve,
    "rodrigues": cmd_rodrigues,
    "lattice-info": cmd_lattice_info,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nulattice", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration")
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--seed", type=int, help="random seed (overrides the config)")
    common.add_argument("--tol", type=float, help="tolerance applied to every check")
    sub = parser.add_subparsers(dest="command", required=True)
    v = sub.add_parser("verify", parents=[common], help="run verification suites")
    v.add_argument("--suite", action="append", help=f"suite to run, repeatable; one of {sorted(SUITES)}")
    v.add_argument("--nu", type=float)
    v.add_argument("--mu", type=float)
    a = sub.add_parser("adjoint", parents=[common], help="adjoint coefficients and checks")
    a.add_argument("--nu", type=float)
    a.add_argument("--mu", type=float)
    s = sub.add_parser("solve", parents=[common], help="evaluate a sum solution on a grid (CSV)")
    s.add_argument("--form", choices=[f.value for f in SolutionForm])
    s.add_argument("--nu", type=float)
    s.add_argument("--mu", type=float)
    s.add_argument("--a", type=float)
    s.add_argument("--b", type=float)
    s.add_argument("--grid", help="z0:count")
    r = sub.add_parser("rodrigues", parents=[common], help="Rodrigues polynomial values and checks")
    r.add_argument("--n", type=int)
    r.add_argument("--grid", help="z0:count")
    li = sub.add_parser("lattice-info", parents=[common], help="lattice values and constants")
    li.add_argument("--nu", type=float)
    li.add_argument("--grid", help="z0:count")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.tol is not None and not (args.tol > 0 and math.isfinite(args.tol)):
        print("error: --tol must be positive", file=sys.stderr)
        return EXIT_USAGE
    try:
        cfg = load_config(args.config)
        return COMMANDS[args.command](args, cfg)
    except (UsageError, InvalidInputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (LatticeError, ArithmeticError) as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
