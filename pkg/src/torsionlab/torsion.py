"""Torsion function, torsional rigidity, the distribution function of the
torsion function and the two integrated level-set inequalities built on it."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bounds import BoundReport, default_tol, the4_constant
from .constants import ball_volume
from .discretization import BoundaryMode, DiscretizationError, GridProblem
from .solvers import SolveReport, cg_solve


@dataclass(frozen=True)
class TorsionResult:
    v: np.ndarray = field(repr=False)
    T: float
    M: float
    int_v2: float
    grid: GridProblem = field(repr=False)
    report: SolveReport | None = field(default=None, repr=False)

    @property
    def dim(self) -> int:
        return self.grid.dim


def solve_torsion(grid: GridProblem, rel_tol: float = 1e-10) -> TorsionResult:
    """Solve -Delta_h v = 1 on a Dirichlet grid."""
    if grid.mode is not BoundaryMode.DIRICHLET:
        raise DiscretizationError("torsion needs a Dirichlet grid")
    if grid.n == 0:
        raise DiscretizationError("empty grid")
    v, report = cg_solve(grid.operator(), np.ones(grid.n), rel_tol=rel_tol)
    return TorsionResult(
        v=v,
        T=grid.integrate(v),
        M=float(v.max()),
        int_v2=grid.integrate(v * v),
        grid=grid,
        report=report,
    )


@dataclass(frozen=True)
class DistributionFunction:
    theta: np.ndarray  # ascending, theta[0] = 0, theta[-1] = M
    mu: np.ndarray  # |{v > theta}|
    dim: int

    @property
    def M(self) -> float:
        return float(self.theta[-1])

    def integral(self) -> float:
        """int_0^M mu dtheta (trapezoid); approximates T."""
        return float(np.trapezoid(self.mu, self.theta))

    def second_moment(self) -> float:
        """int_0^M 2 theta mu dtheta (trapezoid); approximates int v^2."""
        return float(np.trapezoid(2 * self.theta * self.mu, self.theta))


def distribution(result: TorsionResult, n_theta: int = 256) -> DistributionFunction:
    """mu(theta) = h^m #{nodes: v > theta} on a uniform theta grid over [0, M]."""
    if n_theta < 16:
        raise ValueError("n_theta must be at least 16")
    theta = np.linspace(0.0, result.M, n_theta)
    return DistributionFunction(theta, mu_at(result, theta).astype(float), result.dim)


def mu_at(result: TorsionResult, theta) -> np.ndarray:
    """|{v_h > theta}| at arbitrary theta values."""
    v = np.sort(result.v)
    count = v.size - np.searchsorted(v, np.asarray(theta, dtype=float), side="right")
    return count * result.grid.cell_volume


def levelset_envelope(theta: np.ndarray, measure: float, m: int) -> np.ndarray:
    """(|Omega|^{2/m} - 2 m omega_m^{2/m} theta)_+^{m/2}."""
    base = measure ** (2 / m) - 2 * m * ball_volume(m) ** (2 / m) * np.asarray(theta)
    return np.clip(base, 0.0, None) ** (m / 2)


def check_levelset_bound(dist: DistributionFunction, measure: float, tol: float | None = None) -> BoundReport:
    """mu(theta) <= envelope(theta) at every sampled theta; reports the worst sample.

    The default tolerance is 1% of |Omega|, the bound's magnitude at theta = 0.
    """
    env = levelset_envelope(dist.theta, measure, dist.dim)
    margins = env - dist.mu
    i = int(np.argmin(margins))
    tol = default_tol(measure) if tol is None else tol
    return BoundReport(
        "a9: mu(theta) <= (|Omega|^(2/m) - 2m omega^(2/m) theta)_+^(m/2)",
        dist.mu[i],
        env[i],
        tol,
        notes=f"worst at theta={dist.theta[i]:.6g} of {len(dist.theta)} samples; lhs computed, rhs closed form",
    )


def q_functional(dist: DistributionFunction, measure: float) -> float:
    """(int mu)^2 - 2 (int theta mu) |Omega| over [0, M]."""
    a = dist.integral()
    b = float(np.trapezoid(dist.theta * dist.mu, dist.theta))
    return a * a - 2 * b * measure


def check_q_functional(result: TorsionResult, dist: DistributionFunction, measure: float, tol: float | None = None) -> BoundReport:
    """Q(M) <= -C |Omega|^{1-2/m} (int v^2)^2 / int v, and the equivalent normalised form."""
    m = result.dim
    C = the4_constant(m)
    Q = q_functional(dist, measure)
    rhs = -C * measure ** (1 - 2 / m) * result.int_v2**2 / result.T
    final_lhs = result.T**2 / (result.int_v2 * measure) - 1
    final_rhs = -C * result.T / measure ** (1 + 2 / m)
    final = BoundReport(
        "a15 (final form): T^2/(int v^2 |Omega|) - 1 <= -C T/|Omega|^(1+2/m)",
        final_lhs,
        final_rhs,
        default_tol(final_rhs) if tol is None else tol,
        notes="both sides computed",
    )
    return BoundReport(
        "a15: Q(M) <= -C |Omega|^(1-2/m) (int v^2)^2/int v",
        Q,
        rhs,
        default_tol(rhs) if tol is None else tol,
        notes="lhs by trapezoid over theta; rhs from grid quadrature",
        parts=[final],
    )
