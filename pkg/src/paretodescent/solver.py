"""Outer loop: criticality test, inexact direction, Armijo step, update."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .direction import (
    STATUS_MAX_INNER,
    DirectionResult,
    SubproblemConfig,
    solve_exact,
    solve_sigma_approx,
)
from .linesearch import LineSearchError, armijo_step
from .objective import MultiObjective, as_point

__all__ = [
    "SolverConfig",
    "IterationRecord",
    "RunReport",
    "SubproblemError",
    "run",
    "is_critical",
    "TERMINATION_CRITICAL",
    "TERMINATION_MAX_ITER",
    "TERMINATION_LINESEARCH",
    "TERMINATION_SUBPROBLEM",
]

TERMINATION_CRITICAL = "critical_point"
TERMINATION_MAX_ITER = "max_iter"
TERMINATION_LINESEARCH = "linesearch_failure"
TERMINATION_SUBPROBLEM = "subproblem_failure"


class SubproblemError(RuntimeError):
    """The dual direction solver failed to certify within its iteration cap."""


@dataclass(frozen=True)
class SolverConfig:
    beta: float = 0.5
    sigma: float = 0.0
    eps_critical: float = 1e-8
    max_iter: int = 10_000
    max_j: int = 60
    subproblem: SubproblemConfig = field(default_factory=SubproblemConfig)

    def __post_init__(self) -> None:
        if not 0.0 < self.beta < 1.0:
            raise ValueError(f"beta must lie in (0, 1), got {self.beta}")
        if not 0.0 <= self.sigma < 1.0:
            raise ValueError(f"sigma must lie in [0, 1), got {self.sigma}")
        if self.eps_critical <= 0.0:
            raise ValueError("eps_critical must be positive")
        if self.max_iter < 1 or self.max_j < 0:
            raise ValueError("max_iter must be >= 1 and max_j >= 0")


@dataclass(frozen=True)
class IterationRecord:
    """One visited point.  Stepped records have t = 2**-j > 0 and satisfy
    x_next = x + t*v exactly; the terminal record has t = 0 and j = -1."""

    k: int
    x: np.ndarray
    Fx: np.ndarray
    v: np.ndarray
    t: float
    alpha_upper: float
    alpha_lower: float
    j: int
    sigma_certified: bool
    inner_iterations: int


@dataclass(frozen=True)
class RunReport:
    records: tuple[IterationRecord, ...]
    termination: str
    final_x: np.ndarray
    final_alpha: float

    @property
    def iterations(self) -> int:
        """Number of descent steps taken."""
        return len(self.records) - 1

    @property
    def total_inner_iterations(self) -> int:
        return sum(r.inner_iterations for r in self.records)

    @property
    def stepped_records(self) -> tuple[IterationRecord, ...]:
        return tuple(r for r in self.records if r.t > 0.0)


def _terminal_record(k: int, x, Fx, res: DirectionResult) -> IterationRecord:
    return IterationRecord(
        k=k,
        x=x,
        Fx=Fx,
        v=res.v,
        t=0.0,
        alpha_upper=res.alpha_upper,
        alpha_lower=res.alpha_lower,
        j=-1,
        sigma_certified=res.sigma_certified,
        inner_iterations=res.inner_iterations,
    )


def run(problem: MultiObjective, x0, cfg: SolverConfig | None = None) -> RunReport:
    """Descend from ``x0`` until a certified critical point or a cap.

    Each iteration solves the direction subproblem at x^k (the subproblem
    inherits the solver's eps_critical so its criticality certificate and
    the outer stop test agree), takes the largest dyadic Armijo step, and
    sets x^{k+1} = x^k + t_k * v^k.  Failures terminate the run with a
    status in the report; they are never raised.

    The record list always ends with a terminal record (t = 0) for the last
    visited point, so a run that starts at a critical point has exactly one
    record.  A run is deterministic: identical inputs reproduce the
    trajectory bit for bit.
    """
    cfg = cfg if cfg is not None else SolverConfig()
    x = as_point(x0, problem.n)
    sub = replace(cfg.subproblem, eps_critical=cfg.eps_critical)
    records: list[IterationRecord] = []
    k = 0
    while True:
        Fx = problem.evaluate(x)
        J = problem.jacobian(x)
        res = solve_sigma_approx(J, cfg.sigma, sub)
        if res.critical:
            records.append(_terminal_record(k, x, Fx, res))
            termination = TERMINATION_CRITICAL
            break
        if not res.sigma_certified:
            records.append(_terminal_record(k, x, Fx, res))
            termination = TERMINATION_SUBPROBLEM
            break
        if k >= cfg.max_iter:
            records.append(_terminal_record(k, x, Fx, res))
            termination = TERMINATION_MAX_ITER
            break
        Jv = J @ res.v
        try:
            st = armijo_step(problem, x, Fx, res.v, Jv, cfg.beta, cfg.max_j)
        except LineSearchError:
            records.append(_terminal_record(k, x, Fx, res))
            termination = TERMINATION_LINESEARCH
            break
        records.append(
            IterationRecord(
                k=k,
                x=x,
                Fx=Fx,
                v=res.v,
                t=st.t,
                alpha_upper=res.alpha_upper,
                alpha_lower=res.alpha_lower,
                j=st.j,
                sigma_certified=res.sigma_certified,
                inner_iterations=res.inner_iterations,
            )
        )
        x = x + st.t * res.v
        k += 1
    final = records[-1]
    return RunReport(
        records=tuple(records),
        termination=termination,
        final_x=final.x,
        final_alpha=final.alpha_upper,
    )


def is_critical(J, cfg: SolverConfig | None = None) -> tuple[bool, float]:
    """Pareto-criticality test via an exact direction solve.

    Returns (flag, alpha) where flag is true iff the solve's alpha_upper is
    >= -eps_critical; alpha is that upper estimate, reported exactly as 0.0
    when the subproblem certified criticality.  Raises ``SubproblemError``
    if the dual solver exhausts its iteration cap uncertified.
    """
    cfg = cfg if cfg is not None else SolverConfig()
    sub = replace(cfg.subproblem, eps_critical=cfg.eps_critical)
    res = solve_exact(J, sub)
    if res.status == STATUS_MAX_INNER:
        raise SubproblemError(
            f"direction subproblem did not certify within {sub.max_inner} iterations"
        )
    return res.alpha_upper >= -cfg.eps_critical, res.alpha_upper
