"""Command-line harness: solve runs, sigma sweeps, problem verification.

Exit codes: 0 success / critical point, 1 usage or config error, 2 iteration
cap reached, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from .diagnostics import run_diagnostics
from .direction import solve_exact
from .objective import MultiObjective
from .oracle import (
    GridSpec,
    brute_force_direction,
    check_gradient_characterization,
    check_weak_pareto_local,
    sample_quasiconvex,
)
from .problems import ProblemDescriptor, UnknownProblemError, get_problem, list_problems
from .solver import (
    TERMINATION_CRITICAL,
    TERMINATION_MAX_ITER,
    IterationRecord,
    RunReport,
    SolverConfig,
    is_critical,
    run,
)

__all__ = ["main", "ConfigError", "write_trajectory_csv", "read_trajectory_csv", "load_run"]

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_MAX_ITER = 2
EXIT_FAILURE = 3


class ConfigError(ValueError):
    pass


def _fmt(value: float) -> str:
    return f"{float(value):.17g}"


# ---------------------------------------------------------------------------
# inline expression problems
#
# Grammar: + - * / ^ (right associative), unary minus, parentheses, numeric
# literals, variables x1..xn.  Compiled to nested closures; derivatives come
# from the finite-difference fallback of the objective module.

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>\d+\.\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?|\d+(?:[eE][+-]?\d+)?)"
    r"|(?P<var>x\d+)"
    r"|(?P<op>[-+*/^()]))"
)


class _ExprParser:
    def __init__(self, text: str):
        self.text = text
        self.tokens: list[tuple[str, str, int]] = []
        pos = 0
        while pos < len(text):
            m = _TOKEN_RE.match(text, pos)
            if m is None or m.end() == pos:
                if text[pos:].strip() == "":
                    break
                raise ConfigError(f"column {pos + 1}: unexpected character {text[pos]!r}")
            kind = m.lastgroup
            self.tokens.append((kind, m.group(kind), m.start(kind)))
            pos = m.end()
        self.i = 0
        self.max_var = 0

    def _peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None, len(self.text))

    def _take(self):
        tok = self._peek()
        self.i += 1
        return tok

    def parse(self) -> Callable[[np.ndarray], float]:
        fn = self._expr()
        kind, val, col = self._peek()
        if kind is not None:
            raise ConfigError(f"column {col + 1}: unexpected token {val!r}")
        return fn

    def _expr(self):
        fn = self._term()
        while True:
            kind, val, _ = self._peek()
            if kind == "op" and val in "+-":
                self._take()
                rhs = self._term()
                lhs = fn
                fn = (lambda l, r: lambda x: l(x) + r(x))(lhs, rhs) if val == "+" else (
                    lambda l, r: lambda x: l(x) - r(x)
                )(lhs, rhs)
            else:
                return fn

    def _term(self):
        fn = self._unary()
        while True:
            kind, val, _ = self._peek()
            if kind == "op" and val in "*/":
                self._take()
                rhs = self._unary()
                lhs = fn
                fn = (lambda l, r: lambda x: l(x) * r(x))(lhs, rhs) if val == "*" else (
                    lambda l, r: lambda x: l(x) / r(x)
                )(lhs, rhs)
            else:
                return fn

    def _unary(self):
        kind, val, _ = self._peek()
        if kind == "op" and val == "-":
            self._take()
            inner = self._unary()
            return lambda x: -inner(x)
        return self._power()

    def _power(self):
        base = self._atom()
        kind, val, _ = self._peek()
        if kind == "op" and val == "^":
            self._take()
            exp = self._unary()  # right associative, binds tighter than unary on the left
            return lambda x: base(x) ** exp(x)
        return base

    def _atom(self):
        kind, val, col = self._take()
        if kind == "num":
            c = float(val)
            return lambda x: c
        if kind == "var":
            idx = int(val[1:])
            if idx < 1:
                raise ConfigError(f"column {col + 1}: variable indices start at x1")
            self.max_var = max(self.max_var, idx)
            return lambda x: x[idx - 1]
        if kind == "op" and val == "(":
            fn = self._expr()
            kind, val, col = self._take()
            if val != ")":
                raise ConfigError(f"column {col + 1}: expected ')'")
            return fn
        raise ConfigError(f"column {col + 1}: expected a number, variable, or '('")


def parse_expression(text: str) -> tuple[Callable[[np.ndarray], float], int]:
    """Compile one criterion expression; returns (callable, max variable index)."""
    parser = _ExprParser(text)
    fn = parser.parse()
    if parser.max_var == 0 and not parser.tokens:
        raise ConfigError("empty expression")
    return fn, parser.max_var


def build_inline_problem(exprs: list[str], n: int | None = None) -> MultiObjective:
    fns = []
    max_var = 0
    for i, text in enumerate(exprs, start=1):
        try:
            fn, mv = parse_expression(text)
        except ConfigError as exc:
            raise ConfigError(f"f{i}: {exc}") from None
        fns.append(fn)
        max_var = max(max_var, mv)
    dim = n if n is not None else max_var
    if dim < 1:
        raise ConfigError("inline problem uses no variables; give n explicitly")
    if max_var > dim:
        raise ConfigError(f"expression references x{max_var} but n = {dim}")

    def f(x):
        return np.array([float(fn(x)) for fn in fns])

    return MultiObjective(n=dim, m=len(fns), f=f, jac=None, name="inline")


# ---------------------------------------------------------------------------
# config files: flat "key = value" lines, '#' comments, unknown keys rejected

_SCALAR_KEYS = {"problem", "x0", "beta", "sigma", "eps_critical", "max_iter", "output", "n"}
_F_KEY_RE = re.compile(r"^f(\d+)$")


def parse_config_file(path: str | Path) -> dict[str, str]:
    entries: dict[str, str] = {}
    text = Path(path).read_text()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key or not value:
            raise ConfigError(f"line {lineno}: empty key or value")
        if key not in _SCALAR_KEYS and not _F_KEY_RE.match(key):
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in entries:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        entries[key] = value
    f_indices = sorted(int(_F_KEY_RE.match(k).group(1)) for k in entries if _F_KEY_RE.match(k))
    if f_indices and f_indices != list(range(1, len(f_indices) + 1)):
        raise ConfigError("criterion keys must be contiguous starting at f1")
    if f_indices and "problem" in entries:
        raise ConfigError("give either a problem name or inline criteria, not both")
    return entries


def _parse_vector(text: str, what: str) -> np.ndarray:
    try:
        return np.array([float(part) for part in text.split(",") if part.strip() != ""])
    except ValueError:
        raise ConfigError(f"could not parse {what} from {text!r}") from None


def _parse_float(text: str, what: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"could not parse {what} from {text!r}") from None


def _parse_int(text: str, what: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise ConfigError(f"could not parse {what} from {text!r}") from None


@dataclass
class RunSettings:
    problem: MultiObjective
    problem_name: str
    descriptor: ProblemDescriptor | None
    x0: np.ndarray
    cfg: SolverConfig
    out_prefix: str


def _resolve_settings(args) -> RunSettings:
    entries: dict[str, str] = {}
    if args.config:
        entries = parse_config_file(args.config)
    if args.problem is not None:
        if any(_F_KEY_RE.match(k) for k in entries):
            raise ConfigError("--problem conflicts with inline criteria in the config file")
        entries["problem"] = args.problem
    if args.x0 is not None:
        entries["x0"] = args.x0
    if args.beta is not None:
        entries["beta"] = str(args.beta)
    if args.sigma is not None:
        entries["sigma"] = str(args.sigma)
    if args.eps is not None:
        entries["eps_critical"] = str(args.eps)
    if args.max_iter is not None:
        entries["max_iter"] = str(args.max_iter)
    if args.out is not None:
        entries["output"] = args.out

    f_keys = sorted(
        (k for k in entries if _F_KEY_RE.match(k)),
        key=lambda k: int(_F_KEY_RE.match(k).group(1)),
    )
    descriptor = None
    if f_keys:
        n = _parse_int(entries["n"], "n") if "n" in entries else None
        problem = build_inline_problem([entries[k] for k in f_keys], n)
        name = "inline"
    elif "problem" in entries:
        try:
            descriptor = get_problem(entries["problem"])
        except UnknownProblemError as exc:
            raise ConfigError(str(exc)) from None
        problem = descriptor.problem
        name = descriptor.name
    else:
        raise ConfigError("no problem given: use --problem, or a config with a problem or f1..fm")

    if "x0" in entries:
        x0 = _parse_vector(entries["x0"], "x0")
    elif descriptor is not None:
        x0 = descriptor.recommended_x0
    else:
        raise ConfigError("inline problems require x0")
    if x0.size != problem.n:
        raise ConfigError(f"x0 has length {x0.size}, problem expects {problem.n}")

    try:
        cfg = SolverConfig(
            beta=_parse_float(entries.get("beta", "0.5"), "beta"),
            sigma=_parse_float(entries.get("sigma", "0"), "sigma"),
            eps_critical=_parse_float(entries.get("eps_critical", "1e-8"), "eps_critical"),
            max_iter=_parse_int(entries.get("max_iter", "10000"), "max_iter"),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    out_prefix = entries.get("output", "run")
    return RunSettings(problem, name, descriptor, x0, cfg, out_prefix)


# ---------------------------------------------------------------------------
# trajectory and report serialization

def write_trajectory_csv(path: str | Path, report: RunReport, n: int, m: int) -> None:
    """One row per visited point, floats at 17 significant digits so every
    double round-trips exactly.  The terminal row has t = 0 and j = -1.
    Direction components come last so a re-parsed trajectory replays
    through the diagnostics unchanged."""
    header = (
        ["k", "t", "j", "alpha_upper", "alpha_lower", "norm_v"]
        + [f"x_{i + 1}" for i in range(n)]
        + [f"F_{i + 1}" for i in range(m)]
        + [f"v_{i + 1}" for i in range(n)]
    )
    lines = [",".join(header)]
    for r in report.records:
        row = [str(r.k), _fmt(r.t), str(r.j), _fmt(r.alpha_upper), _fmt(r.alpha_lower),
               _fmt(float(np.linalg.norm(r.v)))]
        row += [_fmt(val) for val in r.x]
        row += [_fmt(val) for val in r.Fx]
        row += [_fmt(val) for val in r.v]
        lines.append(",".join(row))
    Path(path).write_text("\n".join(lines) + "\n")


def read_trajectory_csv(path: str | Path) -> list[IterationRecord]:
    """Rebuild iteration records from a trajectory CSV (inverse of the
    writer up to fields the CSV does not carry: certification flags and
    inner iteration counts default to True/0)."""
    lines = Path(path).read_text().splitlines()
    if not lines:
        raise ConfigError(f"{path}: empty trajectory file")
    header = lines[0].split(",")
    col = {name: i for i, name in enumerate(header)}
    n = sum(1 for name in header if re.fullmatch(r"x_\d+", name))
    m = sum(1 for name in header if re.fullmatch(r"F_\d+", name))
    records = []
    for line in lines[1:]:
        parts = line.split(",")
        x = np.array([float(parts[col[f"x_{i + 1}"]]) for i in range(n)])
        Fx = np.array([float(parts[col[f"F_{i + 1}"]]) for i in range(m)])
        v = np.array([float(parts[col[f"v_{i + 1}"]]) for i in range(n)])
        records.append(
            IterationRecord(
                k=int(parts[col["k"]]),
                x=x,
                Fx=Fx,
                v=v,
                t=float(parts[col["t"]]),
                alpha_upper=float(parts[col["alpha_upper"]]),
                alpha_lower=float(parts[col["alpha_lower"]]),
                j=int(parts[col["j"]]),
                sigma_certified=True,
                inner_iterations=0,
            )
        )
    return records


def load_run(prefix: str | Path) -> tuple[RunReport, dict]:
    """Reload a solve's outputs: (report rebuilt from CSV + JSON, report JSON)."""
    records = read_trajectory_csv(f"{prefix}.trajectory.csv")
    doc = json.loads(Path(f"{prefix}.report.json").read_text())
    report = RunReport(
        records=tuple(records),
        termination=doc["termination"],
        final_x=records[-1].x,
        final_alpha=doc["final_alpha"],
    )
    return report, doc


def _report_document(settings: RunSettings, report: RunReport, summary) -> dict:
    return {
        "schema": "paretodescent.run/1",
        "config": {
            "problem": settings.problem_name,
            "x0": [float(val) for val in settings.x0],
            "beta": settings.cfg.beta,
            "sigma": settings.cfg.sigma,
            "eps_critical": settings.cfg.eps_critical,
            "max_iter": settings.cfg.max_iter,
            "output": settings.out_prefix,
        },
        "termination": report.termination,
        "iterations": report.iterations,
        "total_inner_iterations": report.total_inner_iterations,
        "final_x": [float(val) for val in report.final_x],
        "final_F": [float(val) for val in report.records[-1].Fx],
        "final_alpha": report.final_alpha,
        "diagnostics": summary.to_dict(),
    }


def _termination_exit(termination: str) -> int:
    if termination == TERMINATION_CRITICAL:
        return EXIT_OK
    if termination == TERMINATION_MAX_ITER:
        return EXIT_MAX_ITER
    return EXIT_FAILURE


def cmd_solve(args) -> int:
    settings = _resolve_settings(args)
    report = run(settings.problem, settings.x0, settings.cfg)
    summary = run_diagnostics(settings.problem, report, settings.cfg.sigma)
    prefix = Path(settings.out_prefix)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    write_trajectory_csv(
        f"{settings.out_prefix}.trajectory.csv", report, settings.problem.n, settings.problem.m
    )
    doc = _report_document(settings, report, summary)
    Path(f"{settings.out_prefix}.report.json").write_text(json.dumps(doc, indent=2) + "\n")
    print(
        f"{settings.problem_name}: {report.termination} after {report.iterations} step(s), "
        f"final alpha {_fmt(report.final_alpha)} -> {settings.out_prefix}.{{trajectory.csv,report.json}}"
    )
    return _termination_exit(report.termination)


def cmd_sweep(args) -> int:
    settings = _resolve_settings(args)
    sigmas = [float(part) for part in args.sigmas.split(",") if part.strip() != ""]
    if not sigmas:
        raise ConfigError("no sigma values given")
    for s in sigmas:
        if not 0.0 <= s < 1.0:
            raise ConfigError(f"sigma must lie in [0, 1), got {s}")
    rows = []
    worst = EXIT_OK
    for s in sigmas:
        cfg = SolverConfig(
            beta=settings.cfg.beta,
            sigma=s,
            eps_critical=settings.cfg.eps_critical,
            max_iter=settings.cfg.max_iter,
        )
        report = run(settings.problem, settings.x0, cfg)
        rows.append(
            (s, report.iterations, report.total_inner_iterations,
             report.final_alpha, report.termination)
        )
        worst = max(worst, _termination_exit(report.termination))
    prefix = Path(settings.out_prefix)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    lines = ["sigma,iterations,total_inner_iterations,final_alpha,termination"]
    for s, iters, inner, alpha, term in rows:
        lines.append(f"{_fmt(s)},{iters},{inner},{_fmt(alpha)},{term}")
    Path(f"{settings.out_prefix}.sweep.csv").write_text("\n".join(lines) + "\n")
    for line in lines:
        print(line)
    return worst


def _verify_checks(desc: ProblemDescriptor, seed: int) -> list[dict]:
    problem = desc.problem
    rng = np.random.default_rng(seed)
    checks: list[dict] = []

    def add(name: str, ok: bool, detail: str) -> None:
        checks.append({"name": name, "ok": bool(ok), "detail": detail})

    if desc.convexity_class == "none":
        add("convexity_class", True, "class 'none': samplers skipped")
    else:
        qc = sample_quasiconvex(problem, 1000, seed, desc.box)
        add("quasiconvex_segments", qc.ok, f"{qc.violations} violation(s) in {qc.trials} trials")
        gc = check_gradient_characterization(problem, 1000, seed + 1, desc.box)
        add(
            "gradient_characterization",
            gc.ok,
            f"{gc.violations} violation(s) in {gc.checked} dominated pairs",
        )
        if desc.convexity_class == "pseudo-convex":
            ok = True
            for _ in range(10):
                x_crit = desc.sample_critical(rng)
                ok = ok and check_weak_pareto_local(problem, x_crit, 0.5, 1000, seed + 2)
            add("critical_points_weak_pareto", ok, "sampled critical points undominated locally")

    cfg = SolverConfig()
    on_ok = 0
    for _ in range(50):
        flag, _alpha = is_critical(problem.jacobian(desc.sample_critical(rng)), cfg)
        on_ok += int(flag)
    add("critical_set_members", on_ok == 50, f"{on_ok}/50 sampled members report critical")
    off = [desc.sample_noncritical(rng) for _ in range(50)]
    off = [x for x in off if x is not None]
    if off:
        off_ok = 0
        for x in off:
            flag, _alpha = is_critical(problem.jacobian(x), cfg)
            off_ok += int(not flag)
        add(
            "noncritical_points",
            off_ok == len(off),
            f"{off_ok}/{len(off)} off-set points report non-critical",
        )
    else:
        add("noncritical_points", True, "critical set covers the box; off-set check vacuous")

    worst_gap = 0.0
    for _ in range(20):
        x = rng.uniform(desc.box[0], desc.box[1], size=problem.n)
        J = problem.jacobian(x)
        res = solve_exact(J)
        _w, _v, alpha = brute_force_direction(J, GridSpec())
        scale = max(1.0, float(np.sum(J * J)))
        worst_gap = max(worst_gap, abs(res.alpha_upper - alpha) / scale)
    add(
        "subproblem_agreement",
        worst_gap <= 1e-4,
        f"worst |alpha - grid alpha| / max(1, ||J||^2) = {worst_gap:.3e}",
    )
    return checks


def cmd_verify(args) -> int:
    try:
        desc = get_problem(args.problem)
    except UnknownProblemError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    checks = _verify_checks(desc, args.seed)
    all_ok = all(c["ok"] for c in checks)
    doc = {
        "schema": "paretodescent.verify/1",
        "problem": desc.name,
        "convexity_class": desc.convexity_class,
        "seed": args.seed,
        "checks": checks,
        "all_ok": all_ok,
    }
    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        Path(f"{args.out}.verify.json").write_text(json.dumps(doc, indent=2) + "\n")
    for c in checks:
        print(f"[{'PASS' if c['ok'] else 'FAIL'}] {c['name']}: {c['detail']}")
    print(f"{desc.name}: {'all checks passed' if all_ok else 'checks FAILED'}")
    return EXIT_OK if all_ok else EXIT_FAILURE


def _add_common_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--problem", help=f"builtin problem name ({', '.join(list_problems())})")
    sub.add_argument("--config", help="flat key = value config file")
    sub.add_argument("--x0", help="start point, comma separated: 'v1,v2,...'")
    sub.add_argument("--beta", type=float, help="Armijo slope fraction in (0, 1)")
    sub.add_argument("--sigma", type=float, help="direction inexactness in [0, 1)")
    sub.add_argument("--eps", type=float, help="criticality tolerance on |alpha|")
    sub.add_argument("--max-iter", type=int, dest="max_iter", help="outer iteration cap")
    sub.add_argument("--out", help="output path prefix")
    sub.add_argument("--seed", type=int, default=0, help="seed for sampling checks")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="paretodescent",
        description="Multiobjective steepest descent with inexact direction certificates.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p_solve = subs.add_parser("solve", help="run one descent and write trajectory + report")
    _add_common_flags(p_solve)
    p_solve.set_defaults(func=cmd_solve)

    p_sweep = subs.add_parser("sweep", help="solve once per sigma and tabulate")
    _add_common_flags(p_sweep)
    p_sweep.add_argument("--sigmas", required=True, help="comma-separated sigma values")
    p_sweep.set_defaults(func=cmd_sweep)

    p_verify = subs.add_parser("verify", help="validate a builtin problem's declared structure")
    p_verify.add_argument("--problem", required=True)
    p_verify.add_argument("--seed", type=int, default=0)
    p_verify.add_argument("--out", help="output path prefix for the JSON report")
    p_verify.set_defaults(func=cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
