"""Dirichlet eigenvalues, the mixed eigenvalue of a cube minus a centred ball
(Neumann outside, Dirichlet on the ball), and the eigen-expansion checks for
torsion and heat content."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bounds import BoundReport, default_tol
from .discretization import BoundaryMode, DiscretizationError, GridProblem, rasterize
from .geometry import ball, box
from .solvers import MAX_PAIRS, EigenPair, lowest_eigenpairs


class HoleUnresolved(DiscretizationError):
    pass


def _positive(grid: GridProblem, pair: EigenPair) -> EigenPair:
    if grid.integrate(pair.vector) < 0:
        pair.vector = -pair.vector
    return pair


def eigenpairs(grid: GridProblem, k: int = 1, rel_tol: float = 1e-10, **kwargs) -> list[EigenPair]:
    """Lowest k eigenpairs of -Delta_h, normalised in the grid inner product."""
    pairs = lowest_eigenpairs(grid.operator(), k, grid.n, rel_tol=rel_tol, inner=grid.inner, **kwargs)
    return [_positive(grid, p) for p in pairs]


def lambda1(grid: GridProblem, rel_tol: float = 1e-10) -> EigenPair:
    """Lowest Dirichlet eigenpair, with the eigenfunction positive on average."""
    if grid.mode is not BoundaryMode.DIRICHLET:
        raise DiscretizationError("lambda1 needs a Dirichlet grid")
    return eigenpairs(grid, 1, rel_tol)[0]


# --- mixed problem ------------------------------------------------------------------


@dataclass
class MixedEigenResult:
    mu1: float
    phi: np.ndarray = field(repr=False)  # on the computed grid, unit norm there
    q: float  # (int |phi|)^2 for the unit-norm eigenfunction on the full cube
    L: float
    delta: float
    dim: int
    h: float
    grid: GridProblem = field(repr=False)
    symmetric: bool = True


def default_mixed_h(L: float, delta: float) -> float:
    """Largest h <= delta/2 with L/2 an integer multiple of h."""
    k = math.ceil((L / 2) / (delta / 2) - 1e-9)
    return (L / 2) / k


def mu1_mixed(L: float, delta: float, h: float | None = None, m: int = 2, symmetric: bool = True, rel_tol: float = 1e-10) -> MixedEigenResult:
    """Lowest eigenvalue on (-L/2, L/2)^m minus the closed ball B(0; delta),
    Neumann on the cube faces and Dirichlet on the ball.

    With ``symmetric`` only the positive orthant [0, L/2]^m is discretised,
    with Neumann conditions on the cut faces; the ground state is invariant
    under the reflections, so mu_1 is unchanged and q = 2^m (int_orthant phi)^2
    for phi of unit norm on the orthant.  delta = 0 means no hole.
    """
    if not (L > 0) or not (0 <= delta < L / 2):
        raise ValueError("need L > 0 and 0 <= delta < L/2")
    if h is None:
        h = default_mixed_h(L, delta) if delta > 0 else L / 32
    if delta > 0 and h > delta / 2 * (1 + 1e-9):
        raise HoleUnresolved(f"hole unresolved: h={h:g} > delta/2={delta / 2:g}")
    if symmetric:
        cell = box(*([L / 2] * m), center=[L / 4] * m)
    else:
        cell = box(*([L] * m))
    domain = cell.difference(ball(delta, m)) if delta > 0 else cell
    grid = rasterize(domain, h, BoundaryMode.NEUMANN_OUTER)
    if delta > 0:
        full_nodes = int(np.prod(grid.shape))
        if grid.n == full_nodes:
            raise HoleUnresolved("hole unresolved: no lattice node lies in the ball")

    op = grid.operator()
    guess = np.ones(grid.n)
    pair = lowest_eigenpairs(op, 1, grid.n, rel_tol=rel_tol, inner=grid.inner, guess=guess, shift=1e-8 / L**2)[0]
    pair = _positive(grid, pair)
    mu1 = max(pair.value, 0.0)
    l1 = grid.integrate(np.abs(pair.vector))
    q = (2**m if symmetric else 1) * l1 * l1
    return MixedEigenResult(mu1, pair.vector, q, L, delta, m, h, grid, symmetric)


def lemma1_bracket(mixed: MixedEigenResult, L: float | None = None, m: int | None = None, tol: float | None = None) -> BoundReport:
    """L^m (1 - (4 m L^2 mu_1/(3e))^{1/2})_+ <= q <= L^m."""
    L = mixed.L if L is None else L
    m = mixed.dim if m is None else m
    full = L**m
    lower = max(full * (1 - math.sqrt(4 * m * L**2 * mixed.mu1 / (3 * math.e))), 0.0)
    tol = default_tol(full) if tol is None else tol
    lo_rep = BoundReport("e252 lower: L^m (1 - sqrt(4 m L^2 mu1/(3e)))_+ <= q", lower, mixed.q, tol, notes=f"mu1={mixed.mu1:.6g}")
    return BoundReport("e252 upper: q <= L^m", mixed.q, full, tol, notes="Cauchy-Schwarz side", parts=[lo_rep])


# --- eigen-expansion checks ------------------------------------------------------------


@dataclass
class EigenSum:
    values: list[float]
    integrals: list[float]  # int phi_j
    partials: list[float]  # S_j
    report: BoundReport  # T >= (int phi_1)^2 / lambda_1


def _pairs(grid, k, pairs):
    if not 1 <= k <= MAX_PAIRS:
        raise ValueError(f"k must be in [1, {MAX_PAIRS}]")
    if pairs is None:
        pairs = eigenpairs(grid, k)
    if len(pairs) < k:
        raise ValueError("not enough eigenpairs supplied")
    return pairs[:k]


def eigensum_partials(grid: GridProblem, torsion_T: float, k: int, pairs: list[EigenPair] | None = None) -> EigenSum:
    """S_j = sum_{i<=j} (int phi_i)^2 / lambda_i for j = 1..k."""
    pairs = _pairs(grid, k, pairs)
    integrals = [grid.integrate(p.vector) for p in pairs]
    terms = [c * c / p.value for c, p in zip(integrals, pairs)]
    partials = list(np.cumsum(terms))
    rep = BoundReport(
        "e23: (int phi_1)^2/lambda_1 <= T",
        partials[0],
        torsion_T,
        default_tol(torsion_T),
        notes="both sides computed on the same grid",
    )
    return EigenSum([p.value for p in pairs], integrals, [float(s) for s in partials], rep)


def heat_content_bound(grid: GridProblem, k: int, t_samples, measure: float | None = None, pairs: list[EigenPair] | None = None) -> BoundReport:
    """sum_{j<=k} e^{-t lambda_j} (int phi_j)^2 <= e^{-t lambda_1} |Omega| at each t; worst sample reported."""
    pairs = _pairs(grid, k, pairs)
    measure = grid.discrete_measure if measure is None else measure
    lam = np.array([p.value for p in pairs])
    c2 = np.array([grid.integrate(p.vector) ** 2 for p in pairs])
    ts = np.atleast_1d(np.asarray(t_samples, dtype=float))
    if np.any(ts < 0):
        raise ValueError("t must be nonnegative")
    # scale both sides by e^{t lambda_1} so large t stays representable
    lhs = np.array([np.sum(np.exp(-t * (lam - lam[0])) * c2) for t in ts])
    margins = measure - lhs
    i = int(np.argmin(margins))
    return BoundReport(
        "e20: H_k(t) e^(t lambda1) <= |Omega|",
        lhs[i],
        measure,
        default_tol(measure),
        notes=f"worst at t={ts[i]:.6g}, k={k}; both sides scaled by e^(t lambda1)",
    )
