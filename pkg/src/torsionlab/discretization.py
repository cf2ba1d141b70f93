"""Rasterise a domain onto a uniform lattice and apply the matrix-free
(2m+1)-point negative Laplacian.

Lattice nodes sit at integer multiples of ``h`` so that grids for nested
domains coincide.  Dirichlet conditions are imposed by node masking
(staircase boundary).  In the mixed mode the unknowns are all nodes of the
closed outer box outside the obstacle; a ghost node across a box face takes
the mirrored value, and face nodes carry trapezoid weights so the operator is
self-adjoint in the weighted inner product ``h^m sum w_i u_i v_i``.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field

import numba
import numpy as np

from .geometry import BOUNDARY_EPS, Domain


class DiscretizationError(ValueError):
    pass


class BoundaryMode(enum.Enum):
    DIRICHLET = "dirichlet"
    NEUMANN_OUTER = "neumann_outer"  # Neumann on the outer box, Dirichlet on the obstacle


_ids = itertools.count()


@dataclass(frozen=True, eq=False)
class GridProblem:
    domain: Domain = field(repr=False)
    h: float
    mode: BoundaryMode
    origin: np.ndarray = field(repr=False)  # coordinates of lattice node (0, ..., 0)
    shape: tuple[int, ...]
    index: np.ndarray = field(repr=False)  # lattice -> unknown index, -1 if not an unknown
    coords: np.ndarray = field(repr=False)  # (n, m) lattice indices of unknowns
    neighbors: np.ndarray = field(repr=False)  # (2m, n) int32; value n means a Dirichlet zero
    weights: np.ndarray = field(repr=False)  # quadrature weights (1 away from Neumann faces)
    uid: int = field(default_factory=lambda: next(_ids))

    @property
    def dim(self) -> int:
        return self.domain.dim

    @property
    def n(self) -> int:
        return self.coords.shape[0]

    @property
    def cell_volume(self) -> float:
        return self.h**self.dim

    @property
    def points(self) -> np.ndarray:
        return self.origin + self.coords * self.h

    @property
    def discrete_measure(self) -> float:
        return self.cell_volume * float(self.weights.sum())

    def integrate(self, values: np.ndarray) -> float:
        return self.cell_volume * float(np.dot(self.weights, values))

    def inner(self, u: np.ndarray, v: np.ndarray) -> float:
        return self.cell_volume * float(np.dot(self.weights * u, v))

    def field(self, values) -> "ScalarField":
        return ScalarField(np.asarray(values, dtype=float), self)

    def sample(self, fn) -> "ScalarField":
        """Evaluate fn(points) at the unknowns."""
        return self.field(fn(self.points))

    def node_at(self, x) -> int:
        """Unknown index of the lattice node nearest to x (raises if not an unknown)."""
        k = np.rint((np.asarray(x, dtype=float) - self.origin) / self.h).astype(int)
        if np.any(k < 0) or np.any(k >= self.shape):
            raise DiscretizationError("point outside lattice")
        i = int(self.index[tuple(k)])
        if i < 0:
            raise DiscretizationError("nearest node is not an unknown")
        return i

    def lattice_array(self, values: np.ndarray, fill: float = 0.0) -> np.ndarray:
        out = np.full(self.shape, fill, dtype=float)
        out[tuple(self.coords.T)] = values
        return out

    def operator(self):
        """Callable u -> -Delta_h u on raw unknown vectors."""
        nbr = self.neighbors
        scale = 1.0 / self.h**2
        diag = 2.0 * self.dim

        def apply(u, out=None):
            if out is None:
                out = np.empty_like(u)
            _stencil(u, nbr, diag, scale, out)
            return out

        return apply


@dataclass(frozen=True, eq=False)
class ScalarField:
    values: np.ndarray
    grid: GridProblem = field(repr=False)

    def __post_init__(self):
        if self.values.shape != (self.grid.n,):
            raise DiscretizationError(f"field has shape {self.values.shape}, grid has {self.grid.n} unknowns")
        if not np.all(np.isfinite(self.values)):
            raise DiscretizationError("field has non-finite entries")


@numba.njit(cache=True)
def _stencil(u, nbr, diag, scale, out):
    n = u.shape[0]
    for i in range(n):
        s = diag * u[i]
        for j in range(nbr.shape[0]):
            k = nbr[j, i]
            if k < n:
                s -= u[k]
        out[i] = s * scale


def _lattice_range(lo, hi, h):
    kmin = np.floor(np.asarray(lo) / h - 1e-9).astype(int) - 1
    kmax = np.ceil(np.asarray(hi) / h + 1e-9).astype(int) + 1
    return kmin, kmax


def _aligned(v: float, h: float) -> bool:
    r = v / h
    return abs(r - round(r)) < 1e-9


def rasterize(domain: Domain, h: float, mode: BoundaryMode = BoundaryMode.DIRICHLET) -> GridProblem:
    """Discretise ``domain`` with spacing ``h``."""
    if not h > 0:
        raise DiscretizationError("h must be positive")
    mode = BoundaryMode(mode)
    m = domain.dim
    if mode is BoundaryMode.DIRICHLET:
        kmin, kmax = _lattice_range(domain.lo, domain.hi, h)
    else:
        outer = domain.outer if domain.outer is not None else domain
        if outer.support is None or outer.spec is None or outer.spec.get("kind") != "box":
            raise DiscretizationError("mixed mode needs a box as the outer domain")
        if not all(_aligned(v, h) for v in (*outer.lo, *outer.hi)):
            raise DiscretizationError("box faces must lie on lattice nodes in mixed mode")
        kmin = np.rint(np.asarray(outer.lo) / h).astype(int)
        kmax = np.rint(np.asarray(outer.hi) / h).astype(int)
    shape = tuple(int(v) for v in kmax - kmin + 1)
    origin = kmin * h
    axes = [origin[i] + np.arange(shape[i]) * h for i in range(m)]
    grids = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=1)

    if mode is BoundaryMode.DIRICHLET:
        member = domain.contains(pts)
    else:
        obstacle = domain.obstacle
        member = np.ones(len(pts), dtype=bool) if obstacle is None else obstacle.signed_distance(pts) > BOUNDARY_EPS
    member = member.reshape(shape)
    n = int(member.sum())
    if n == 0:
        raise DiscretizationError("empty discretization")

    index = np.full(shape, -1, dtype=np.int64)
    index[member] = np.arange(n)
    coords = np.argwhere(member)

    nbr = np.empty((2 * m, n), dtype=np.int32)
    weights = np.ones(n)
    for ax in range(m):
        for side, step in enumerate((-1, 1)):
            c = coords.copy()
            c[:, ax] += step
            if mode is BoundaryMode.NEUMANN_OUTER:
                # ghost across the face mirrors the node on the other side
                c[:, ax] = np.where(c[:, ax] < 0, 1, c[:, ax])
                c[:, ax] = np.where(c[:, ax] >= shape[ax], shape[ax] - 2, c[:, ax])
            inside = np.all((c >= 0) & (c < np.asarray(shape)), axis=1)
            vals = np.full(n, n, dtype=np.int64)
            vals[inside] = index[tuple(c[inside].T)]
            vals[vals < 0] = n
            nbr[2 * ax + side] = vals
        if mode is BoundaryMode.NEUMANN_OUTER:
            on_face = (coords[:, ax] == 0) | (coords[:, ax] == shape[ax] - 1)
            weights[on_face] *= 0.5

    return GridProblem(
        domain=domain,
        h=float(h),
        mode=mode,
        origin=origin,
        shape=shape,
        index=index,
        coords=coords,
        neighbors=nbr,
        weights=weights,
    )


def apply_laplacian(grid: GridProblem, field: ScalarField) -> ScalarField:
    """-Delta_h applied to ``field``."""
    if field.grid is not grid:
        raise DiscretizationError("field does not belong to this grid")
    return ScalarField(grid.operator()(field.values), grid)
