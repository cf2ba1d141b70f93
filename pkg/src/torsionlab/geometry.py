"""Implicit domains: primitives, boolean difference, the punched-cube family,
measure/perimeter estimates and planar convex metrics (width, projection, Lambda).

A domain is an open set described by a vectorised signed distance function
(negative inside).  Points are arrays of shape ``(n, m)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .constants import ball_volume, bessel_zero

# nodes closer than this to the boundary are treated as exterior (open-set convention)
BOUNDARY_EPS = 1e-12

SDF = Callable[[np.ndarray], np.ndarray]


class GeometryError(ValueError):
    pass


@dataclass(frozen=True)
class ExactData:
    """Closed-form values known for a shape (any may be None)."""

    measure: float | None = None
    perimeter: float | None = None
    torsion: float | None = None
    lambda1: float | None = None

    @property
    def F(self) -> float | None:
        if None in (self.measure, self.torsion, self.lambda1):
            return None
        return self.torsion * self.lambda1 / self.measure

    def scaled(self, alpha: float, m: int) -> "ExactData":
        def sc(v, p):
            return None if v is None else v * alpha**p

        return ExactData(
            measure=sc(self.measure, m),
            perimeter=sc(self.perimeter, m - 1),
            torsion=sc(self.torsion, m + 2),
            lambda1=sc(self.lambda1, -2),
        )


@dataclass(frozen=True)
class Domain:
    dim: int
    sdf: SDF = field(repr=False)
    lo: tuple[float, ...]
    hi: tuple[float, ...]
    name: str = "domain"
    exact: ExactData = ExactData()
    support: Callable[[np.ndarray], np.ndarray] | None = field(default=None, repr=False)
    # set for A minus B, so mixed boundary conditions can tell the outer box from the holes
    outer: "Domain | None" = field(default=None, repr=False)
    obstacle: "Domain | None" = field(default=None, repr=False)
    spec: dict | None = field(default=None, repr=False, compare=False)

    def signed_distance(self, x) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=float))
        return self.sdf(x)

    def contains(self, x) -> np.ndarray:
        return self.signed_distance(x) < -BOUNDARY_EPS

    @property
    def diameter_bound(self) -> float:
        return float(np.linalg.norm(np.subtract(self.hi, self.lo)))

    def scaled(self, alpha: float) -> "Domain":
        """The homothetic image alpha * Omega (about the origin)."""
        if alpha <= 0:
            raise GeometryError("scale factor must be positive")
        sdf = self.sdf
        sup = self.support
        spec = None if self.spec is None else {**self.spec, "scale": alpha * self.spec.get("scale", 1.0)}
        return Domain(
            dim=self.dim,
            sdf=lambda x: alpha * sdf(x / alpha),
            lo=tuple(alpha * v for v in self.lo),
            hi=tuple(alpha * v for v in self.hi),
            name=f"{alpha:g}*{self.name}",
            exact=self.exact.scaled(alpha, self.dim),
            support=None if sup is None else (lambda u: alpha * sup(u)),
            outer=None if self.outer is None else self.outer.scaled(alpha),
            obstacle=None if self.obstacle is None else self.obstacle.scaled(alpha),
            spec=spec,
        )

    def difference(self, other: "Domain", name: str | None = None, exact: ExactData | None = None) -> "Domain":
        """self minus the closure of other.

        max(d_A, -d_B) is exact inside A when B sits strictly inside A; in
        general it is a lower bound on the true distance, which keeps it
        1-Lipschitz and sign-correct.
        """
        if other.dim != self.dim:
            raise GeometryError("dimension mismatch")
        da, db = self.sdf, other.sdf
        spec = None
        if self.spec is not None and other.spec is not None:
            spec = {**self.spec, "ops": list(self.spec.get("ops", [])) + [{"difference": other.spec}]}
        return Domain(
            dim=self.dim,
            sdf=lambda x: np.maximum(da(x), -db(x)),
            lo=self.lo,
            hi=self.hi,
            name=name or f"{self.name}-{other.name}",
            exact=exact or ExactData(),
            support=None,
            outer=self,
            obstacle=other,
            spec=spec,
        )


# --- primitives ---------------------------------------------------------------


def _check_positive(*vals):
    for v in vals:
        if not (v > 0 and math.isfinite(v)):
            raise GeometryError(f"dimension parameters must be positive, got {v}")


def rectangle_torsion(a: float, b: float, terms: int = 50) -> float:
    """Torsional rigidity of an a-by-b rectangle (single tanh series)."""
    long, short = max(a, b), min(a, b)
    s = sum(math.tanh(n * math.pi * long / (2 * short)) / n**5 for n in range(1, 2 * terms, 2))
    return long * short**3 / 12.0 * (1.0 - 192.0 / math.pi**5 * (short / long) * s)


def box(*sides: float, center=None) -> Domain:
    """Axis-aligned box with the given side lengths, centred at the origin by default."""
    _check_positive(*sides)
    m = len(sides)
    if m < 2:
        raise GeometryError("box needs at least two sides")
    half = np.asarray(sides, dtype=float) / 2
    c = np.zeros(m) if center is None else np.asarray(center, dtype=float)

    def sdf(x):
        q = np.abs(x - c) - half
        outside = np.linalg.norm(np.maximum(q, 0.0), axis=-1)
        inside = np.minimum(q.max(axis=-1), 0.0)
        return outside + inside

    def support(u):
        return u @ c + np.abs(u) @ half

    measure = float(np.prod(sides))
    if m == 2:
        perim = 2.0 * (sides[0] + sides[1])
        torsion = rectangle_torsion(*sides)
    else:
        perim = float(sum(measure / s for s in sides) * 2) if m == 3 else None
        torsion = None
    lam = math.pi**2 * sum(1.0 / s**2 for s in sides)
    return Domain(
        dim=m,
        sdf=sdf,
        lo=tuple(c - half),
        hi=tuple(c + half),
        name="box(" + ",".join(f"{s:g}" for s in sides) + ")",
        exact=ExactData(measure=measure, perimeter=perim, torsion=torsion, lambda1=lam),
        support=support,
        spec={"kind": "box", "params": list(sides), **({} if center is None else {"center": list(c)})},
    )


def rectangle(a: float, b: float) -> Domain:
    return box(a, b)


def ball(radius: float, dim: int = 2, center=None) -> Domain:
    _check_positive(radius)
    c = np.zeros(dim) if center is None else np.asarray(center, dtype=float)

    def sdf(x):
        return np.linalg.norm(x - c, axis=-1) - radius

    def support(u):
        return u @ c + radius * np.linalg.norm(u, axis=-1)

    omega = ball_volume(dim)
    exact = ExactData(
        measure=omega * radius**dim,
        perimeter=dim * omega * radius ** (dim - 1),
        torsion=omega * radius ** (dim + 2) / (dim * (dim + 2)),
        lambda1=(bessel_zero(0) ** 2 if dim == 2 else math.pi**2 if dim == 3 else None),
    )
    if exact.lambda1 is not None:
        exact = replace(exact, lambda1=exact.lambda1 / radius**2)
    return Domain(
        dim=dim,
        sdf=sdf,
        lo=tuple(c - radius),
        hi=tuple(c + radius),
        name=f"ball({radius:g})",
        exact=exact,
        support=support,
        spec={"kind": "ball", "params": [radius], "dim": dim, **({} if center is None else {"center": list(c)})},
    )


def ellipsoid(*semi_axes: float) -> Domain:
    """Ellipse/ellipsoid centred at the origin.

    The distance used is (|x/a| - 1) * min(a): 1-Lipschitz, exact sign, and a
    lower bound on the true distance to the boundary.
    """
    _check_positive(*semi_axes)
    a = np.asarray(semi_axes, dtype=float)
    m = len(a)
    amin = a.min()

    def sdf(x):
        return (np.linalg.norm(x / a, axis=-1) - 1.0) * amin

    def support(u):
        return np.linalg.norm(u * a, axis=-1)

    omega = ball_volume(m)
    prod = float(np.prod(a))
    inv = float(np.sum(1.0 / a**2))
    perim = None
    if m == 2:
        # complete elliptic integral by the periodic trapezoid rule (spectrally accurate)
        t = np.linspace(0, 2 * np.pi, 4097)[:-1]
        perim = float(np.mean(np.hypot(a[0] * np.sin(t), a[1] * np.cos(t))) * 2 * np.pi)
    return Domain(
        dim=m,
        sdf=sdf,
        lo=tuple(-a),
        hi=tuple(a),
        name="ellipsoid(" + ",".join(f"{s:g}" for s in a) + ")",
        exact=ExactData(measure=omega * prod, perimeter=perim, torsion=omega / (m + 2) * prod / inv),
        support=support,
        spec={"kind": "ellipsoid", "params": list(semi_axes)},
    )


ellipse = ellipsoid


def convex_polygon(vertices, name: str = "polygon", exact: ExactData | None = None, spec=None) -> Domain:
    """Convex polygon with exact signed distance (vertices counter-clockwise)."""
    v = np.asarray(vertices, dtype=float)
    e = np.roll(v, -1, axis=0) - v
    normals = np.stack([e[:, 1], -e[:, 0]], axis=1)
    normals /= np.linalg.norm(normals, axis=1, keepdims=True)
    offsets = np.einsum("ij,ij->i", normals, v)

    def sdf(x):
        # signed: max over edge half-planes inside; exact segment distance outside
        plane = x @ normals.T - offsets
        inside = plane.max(axis=-1)
        d2 = np.full(x.shape[0], np.inf)
        for p, ed in zip(v, e):
            w = x - p
            t = np.clip((w @ ed) / (ed @ ed), 0.0, 1.0)
            d2 = np.minimum(d2, np.sum((w - t[:, None] * ed) ** 2, axis=-1))
        return np.where(inside < 0, inside, np.sqrt(d2))

    def support(u):
        return (u @ v.T).max(axis=-1)

    return Domain(
        dim=2,
        sdf=sdf,
        lo=tuple(v.min(axis=0)),
        hi=tuple(v.max(axis=0)),
        name=name,
        exact=exact or ExactData(),
        support=support,
        spec=spec,
    )


def equilateral_triangle(a: float) -> Domain:
    """Equilateral triangle of side a with centroid at the origin and one side horizontal."""
    _check_positive(a)
    r_in = a / (2 * math.sqrt(3))
    verts = [(-a / 2, -r_in), (a / 2, -r_in), (0.0, 2 * r_in)]
    exact = ExactData(
        measure=math.sqrt(3) * a**2 / 4,
        perimeter=3 * a,
        torsion=math.sqrt(3) * a**4 / 320,
        lambda1=16 * math.pi**2 / (3 * a**2),
    )
    return convex_polygon(verts, name=f"triangle({a:g})", exact=exact, spec={"kind": "equilateral_triangle", "params": [a]})


def half_disc(a: float) -> Domain:
    """{|x| < a, x_2 > 0}."""
    _check_positive(a)

    def sdf(x):
        return np.maximum(np.linalg.norm(x, axis=-1) - a, -x[:, 1])

    def support(u):
        # support of the half disc: the arc where u_2 >= 0, else the better diameter endpoint
        n = np.linalg.norm(u, axis=-1)
        return np.where(u[:, 1] >= 0, a * n, a * np.abs(u[:, 0]))

    j11 = bessel_zero(1)
    exact = ExactData(
        measure=math.pi * a**2 / 2,
        perimeter=math.pi * a + 2 * a,
        torsion=(math.pi / 8 - 1 / math.pi) * a**4,
        lambda1=j11**2 / a**2,
    )
    return Domain(
        dim=2,
        sdf=sdf,
        lo=(-a, 0.0),
        hi=(a, a),
        name=f"half_disc({a:g})",
        exact=exact,
        support=support,
        spec={"kind": "half_disc", "params": [a]},
    )


def make_primitive(kind: str, *params: float, dim: int = 2) -> Domain:
    kind = kind.lower()
    if kind in ("box", "square", "cube", "rectangle"):
        if kind == "square":
            return box(params[0], params[0])
        if kind == "cube":
            return box(params[0], params[0], params[0])
        return box(*params)
    if kind in ("ball", "disc", "disk"):
        return ball(params[0], dim=2 if kind != "ball" else dim)
    if kind in ("ellipse", "ellipsoid"):
        return ellipsoid(*params)
    if kind in ("equilateral_triangle", "triangle"):
        return equilateral_triangle(params[0])
    if kind in ("half_disc", "half_disk"):
        return half_disc(params[0])
    raise GeometryError(f"unknown primitive kind {kind!r}")


# --- punched cube ---------------------------------------------------------------


@dataclass(frozen=True)
class PunchedBoxSpec:
    L: float
    N: int
    delta: float
    dim: int = 2

    def __post_init__(self):
        if not (self.L > 0):
            raise GeometryError("L must be positive")
        if int(self.N) != self.N or self.N < 1:
            raise GeometryError("N must be a positive integer")
        if not (0 < self.delta < self.L / (2 * self.N)):
            raise GeometryError(f"need 0 < delta < L/(2N) = {self.L / (2 * self.N):g}, got delta={self.delta:g}")
        if self.dim < 2:
            raise GeometryError("dim must be >= 2")

    @property
    def exact_measure(self) -> float:
        return self.L**self.dim - self.N**self.dim * ball_volume(self.dim) * self.delta**self.dim

    def cell_centres(self) -> np.ndarray:
        c1 = -self.L / 2 + (np.arange(self.N) + 0.5) * self.L / self.N
        grids = np.meshgrid(*([c1] * self.dim), indexing="ij")
        return np.stack([g.ravel() for g in grids], axis=1)


def hole_array(spec: PunchedBoxSpec) -> Domain:
    """Union of the N^m closed balls, with distance to the nearest centre found by rounding."""
    L, N, d, m = spec.L, spec.N, spec.delta, spec.dim
    cell = L / N

    def sdf(x):
        idx = np.clip(np.floor((x + L / 2) / cell), 0, N - 1)
        nearest = -L / 2 + (idx + 0.5) * cell
        return np.linalg.norm(x - nearest, axis=-1) - d

    omega = ball_volume(m)
    return Domain(
        dim=m,
        sdf=sdf,
        lo=(-L / 2,) * m,
        hi=(L / 2,) * m,
        name=f"holes(N={N},delta={d:g})",
        exact=ExactData(measure=N**m * omega * d**m, perimeter=N**m * m * omega * d ** (m - 1)),
    )


def punched_box(spec: PunchedBoxSpec) -> Domain:
    """Open cube (-L/2, L/2)^m minus N^m closed balls of radius delta at the cell centres."""
    cube = box(*([spec.L] * spec.dim))
    holes = hole_array(spec)
    exact = ExactData(
        measure=spec.exact_measure,
        perimeter=cube.exact.perimeter + holes.exact.perimeter if cube.exact.perimeter is not None else None,
    )
    out = cube.difference(holes, name=f"punched_box(L={spec.L:g},N={spec.N},delta={spec.delta:g},m={spec.dim})", exact=exact)
    return replace(out, spec={"kind": "punched_box", "L": spec.L, "N": spec.N, "delta": spec.delta, "dim": spec.dim})


def punch_hole(domain: Domain, center, radius: float) -> Domain:
    """Omega minus the closed ball B(center; radius)."""
    center = np.asarray(center, dtype=float)
    hole = ball(radius, dim=domain.dim, center=center)
    if domain.signed_distance(center)[0] >= -radius:
        raise GeometryError("hole must lie strictly inside the domain")
    exact = ExactData(
        measure=None if domain.exact.measure is None else domain.exact.measure - hole.exact.measure,
        perimeter=None if domain.exact.perimeter is None else domain.exact.perimeter + hole.exact.perimeter,
    )
    return domain.difference(hole, exact=exact)


# --- JSON domain specs -----------------------------------------------------------


def from_spec(spec: dict) -> Domain:
    """Build a domain from its JSON description.

    ``{"kind": "ball", "params": [1], "dim": 2, "ops": [{"difference": {...}}]}``
    or ``{"kind": "punched_box", "L": 1, "N": 4, "delta": 0.05}``.
    """
    kind = spec.get("kind")
    if kind == "punched_box":
        dom = punched_box(PunchedBoxSpec(spec["L"], int(spec["N"]), spec["delta"], int(spec.get("dim", 2))))
    else:
        params = spec.get("params", [])
        if kind == "box":
            dom = box(*params, center=spec.get("center"))
        elif kind == "ball":
            dom = ball(params[0], dim=int(spec.get("dim", 2)), center=spec.get("center"))
        elif kind is None:
            raise GeometryError("domain spec needs a 'kind'")
        else:
            dom = make_primitive(kind, *params, dim=int(spec.get("dim", 2)))
    for op in spec.get("ops", []):
        if "difference" not in op:
            raise GeometryError(f"unsupported op {op!r}")
        dom = dom.difference(from_spec(op["difference"]))
    if "scale" in spec:
        dom = dom.scaled(float(spec["scale"]))
    return dom


# --- measurements ------------------------------------------------------------------


def _lattice(lo, hi, h, pad=0.0):
    lo = np.asarray(lo, dtype=float) - pad
    hi = np.asarray(hi, dtype=float) + pad
    counts = np.maximum(np.ceil((hi - lo) / h).astype(int), 1)
    axes = [lo[i] + (np.arange(counts[i]) + 0.5) * h for i in range(len(lo))]
    return axes


def _grid_points(axes):
    grids = np.meshgrid(*axes, indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1)


def measure(domain: Domain, resolution: float, refine: int = 4) -> float:
    """Volume by cell counting: cells whose centre distance exceeds the half
    diagonal are classified whole; boundary cells are split ``refine`` times per axis."""
    if not resolution > 0:
        raise GeometryError("resolution must be positive")
    m = domain.dim
    axes = _lattice(domain.lo, domain.hi, resolution)
    half_diag = 0.5 * resolution * math.sqrt(m)
    sub = (np.arange(refine) + 0.5) / refine - 0.5
    offsets = _grid_points([sub * resolution] * m)
    inside = 0
    boundary = 0
    # chunk along the first axis to bound memory
    chunk = max(1, int(2_000_000 // max(1, np.prod([len(a) for a in axes[1:]]))))
    for start in range(0, len(axes[0]), chunk):
        pts = _grid_points([axes[0][start : start + chunk]] + axes[1:])
        d = domain.sdf(pts)
        inside += int(np.count_nonzero(d < -half_diag))
        bnd = pts[np.abs(d) <= half_diag]
        if len(bnd):
            for k in range(0, len(bnd), 50_000):
                sp = (bnd[k : k + 50_000, None, :] + offsets[None]).reshape(-1, m)
                boundary += int(np.count_nonzero(domain.sdf(sp) < 0))
    return inside * resolution**m + boundary * (resolution / refine) ** m


def perimeter(domain: Domain, resolution: float) -> float:
    """Perimeter (boundary area in 3-D) from a mollified coarea integral:
    integral of delta_eps(d) |grad d| over a grid, eps = 2 * resolution."""
    if not resolution > 0:
        raise GeometryError("resolution must be positive")
    m = domain.dim
    eps = 2.0 * resolution
    q = resolution / 2
    axes = _lattice(domain.lo, domain.hi, q, pad=4 * eps + q)  # lower-bound distances widen the band
    total = 0.0
    chunk = max(1, int(2_000_000 // max(1, np.prod([len(a) for a in axes[1:]]))))
    step = q / 4
    for start in range(0, len(axes[0]), chunk):
        pts = _grid_points([axes[0][start : start + chunk]] + axes[1:])
        d = domain.sdf(pts)
        band = np.abs(d) < eps
        if not band.any():
            continue
        p, db = pts[band], d[band]
        grad2 = np.zeros(len(p))
        for i in range(m):
            e = np.zeros(m)
            e[i] = step
            grad2 += ((domain.sdf(p + e) - domain.sdf(p - e)) / (2 * step)) ** 2
        kern = (1.0 + np.cos(np.pi * db / eps)) / (2.0 * eps)
        total += float(np.sum(kern * np.sqrt(grad2)))
    return total * q**m


# --- planar convex metrics -----------------------------------------------------------


@dataclass(frozen=True)
class ConvexMetrics:
    width: float
    projection: float  # |E|, length of the projection onto the minimising line
    Lambda: float  # first Dirichlet eigenvalue of E: pi^2/|E|^2
    direction: float  # angle of the width direction (radians)


def _support_function(domain: Domain) -> Callable[[np.ndarray], np.ndarray]:
    if domain.support is not None:
        return domain.support
    res = domain.diameter_bound / 600
    pts = _grid_points(_lattice(domain.lo, domain.hi, res))
    pts = pts[domain.contains(pts)]
    if len(pts) == 0:
        raise GeometryError("empty domain")
    try:
        from scipy.spatial import ConvexHull

        pts = pts[ConvexHull(pts).vertices]
    except Exception:  # degenerate hull; use all points
        pass
    return lambda u: (u @ pts.T).max(axis=-1)


def _support_polygon_area(h_fun, n: int = 2048) -> float:
    theta = np.linspace(0, 2 * np.pi, n, endpoint=False)
    u = np.stack([np.cos(theta), np.sin(theta)], axis=1)
    hv = h_fun(u)
    # vertex i = intersection of support lines i and i+1
    u2, h2 = np.roll(u, -1, axis=0), np.roll(hv, -1)
    det = u[:, 0] * u2[:, 1] - u[:, 1] * u2[:, 0]
    x = (hv * u2[:, 1] - h2 * u[:, 1]) / det
    y = (u[:, 0] * h2 - u2[:, 0] * hv) / det
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def convex_metrics(domain: Domain, n_dirs: int = 512, angle_tol: float = 1e-8, check_convex: bool = True) -> ConvexMetrics:
    """Minimal width by a direction sweep plus golden-section refinement."""
    if domain.dim != 2:
        raise GeometryError("convex_metrics is implemented for m = 2")
    h_fun = _support_function(domain)
    if check_convex:
        hull_area = _support_polygon_area(h_fun)
        area = domain.exact.measure if domain.exact.measure is not None else measure(domain, domain.diameter_bound / 1024)
        if hull_area > area * (1 + 2e-3):
            raise GeometryError(f"domain is not convex (hull area {hull_area:.6g} > measure {area:.6g})")

    def width(theta):
        theta = np.atleast_1d(theta)
        u = np.stack([np.cos(theta), np.sin(theta)], axis=1)
        return h_fun(u) + h_fun(-u)

    thetas = np.linspace(0, np.pi, n_dirs, endpoint=False)
    w = width(thetas)
    i = int(np.argmin(w))
    step = np.pi / n_dirs
    a, b = thetas[i] - step, thetas[i] + step
    g = (math.sqrt(5) - 1) / 2
    c, d = b - g * (b - a), a + g * (b - a)
    fc, fd = width(c)[0], width(d)[0]
    while b - a > angle_tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - g * (b - a)
            fc = width(c)[0]
        else:
            a, c, fc = c, d, fd
            d = a + g * (b - a)
            fd = width(d)[0]
    cands = [(w[i], thetas[i]), (fc, c), (fd, d)]
    wmin, theta = min(cands)
    perp = theta + np.pi / 2
    proj = float(width(perp)[0])
    return ConvexMetrics(width=float(wmin), projection=proj, Lambda=math.pi**2 / proj**2, direction=float(theta))
