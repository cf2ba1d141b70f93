"""Torsional rigidity, Dirichlet eigenvalues and the Polya functional
F = T lambda_1 / |Omega| on finite-difference grids, with explicit bounds as
checkable reports and a walk-on-spheres cross-check."""

from .bounds import BoundReport, compute_F
from .constants import Constants
from .discretization import BoundaryMode, GridProblem, rasterize
from .geometry import Domain, PunchedBoxSpec, ball, box, ellipse, equilateral_triangle, half_disc, punched_box, rectangle
from .spectrum import lambda1, mu1_mixed
from .torsion import distribution, solve_torsion
from .wos import wos_torsional_rigidity

__version__ = "0.1.0"

__all__ = [
    "BoundReport",
    "BoundaryMode",
    "Constants",
    "Domain",
    "GridProblem",
    "PunchedBoxSpec",
    "ball",
    "box",
    "compute_F",
    "distribution",
    "ellipse",
    "equilateral_triangle",
    "half_disc",
    "lambda1",
    "mu1_mixed",
    "punched_box",
    "rasterize",
    "rectangle",
    "solve_torsion",
    "wos_torsional_rigidity",
]
