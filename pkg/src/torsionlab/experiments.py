"""Studies: shape table, punched-cube sweep, single-hole perturbation,
grid-convergence harness and the full bound suite."""

from __future__ import annotations

import dataclasses
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from . import bounds as B
from .constants import bessel_zero
from .discretization import rasterize
from .geometry import (
    Domain,
    PunchedBoxSpec,
    ball,
    box,
    convex_metrics,
    ellipse,
    equilateral_triangle,
    from_spec,
    half_disc,
    measure as domain_measure,
    perimeter as domain_perimeter,
    punch_hole,
    punched_box,
    rectangle,
)
from .spectrum import eigensum_partials, heat_content_bound, eigenpairs, lambda1, mu1_mixed
from .torsion import check_levelset_bound, check_q_functional, distribution, solve_torsion

log = logging.getLogger(__name__)


class ConfigError(ValueError):
    pass


STUDIES = ("table", "punched", "perturb", "converge", "bounds", "wos")
LADDER_2D = (2.0**-5, 2.0**-6, 2.0**-7)
LADDER_3D = (2.0**-4, 2.0**-5)


@dataclass
class StudyConfig:
    kind: str
    domain: Any = None  # name ("disc", "rectangle:1:10", ...) or JSON spec dict
    ladder: list[float] | None = None
    cg_tol: float = 1e-10
    eig_tol: float = 1e-10
    n_samples: int = 100_000
    out: str | None = None
    seed: int = 0
    tol: float | None = None  # bound tolerance override
    L: float = 1.0
    N_list: list[int] = field(default_factory=lambda: [1, 2, 4, 8])
    dim: int = 2
    x0: list[float] | None = None
    deltas: list[float] | None = None
    quantity: str = "F"
    corpus: str = "convex"
    scale: float = 1.0
    workers: int = 1
    only: list[str] | None = None  # bound suite: restrict the corpus to these entry names

    def __post_init__(self):
        self.validate()

    def validate(self):
        if self.kind not in STUDIES:
            raise ConfigError(f"unknown study {self.kind!r}")
        if self.ladder is not None:
            lad = [float(h) for h in self.ladder]
            if any(h <= 0 for h in lad) or any(b >= a for a, b in zip(lad, lad[1:])):
                raise ConfigError("grid ladder must be positive and strictly decreasing")
            if self.kind in ("converge", "table") and len(lad) < 2:
                raise ConfigError("Richardson needs at least 2 rungs")
            self.ladder = lad
        if self.dim not in (2, 3):
            raise ConfigError("dim must be 2 or 3")
        if self.kind == "punched":
            if not self.N_list or any(int(n) != n or n < 1 for n in self.N_list) or any(b <= a for a, b in zip(self.N_list, self.N_list[1:])):
                raise ConfigError("N list must be ascending positive integers")
        if self.kind == "perturb" and self.deltas is not None:
            if any(b >= a for a, b in zip(self.deltas, self.deltas[1:])) or any(d <= 0 for d in self.deltas):
                raise ConfigError("delta list must be positive and decreasing")
        if self.kind == "converge" and self.quantity not in ("T", "lambda1", "F"):
            raise ConfigError("quantity must be T, lambda1 or F")
        if not (self.scale > 0):
            raise ConfigError("scale must be positive")
        if self.n_samples < 1:
            raise ConfigError("n_samples must be positive")

    @classmethod
    def from_dict(cls, d: dict) -> "StudyConfig":
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - names
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)


# --- domains by name ---------------------------------------------------------------


def named_domain(ref) -> Domain:
    """Resolve "disc", "square", "half_disc", "triangle[:a]", "rectangle:a:b",
    "ellipse:a:b", "ball3", "cube", "punched:L:N:delta[:m]" or a JSON spec."""
    if isinstance(ref, Domain):
        return ref
    if isinstance(ref, dict):
        return from_spec(ref)
    if not isinstance(ref, str):
        raise ConfigError(f"cannot resolve domain {ref!r}")
    name, *args = ref.split(":")
    try:
        vals = [float(a) for a in args]
    except ValueError as exc:
        raise ConfigError(f"bad domain parameters in {ref!r}") from exc
    if name == "disc":
        return ball(vals[0] if vals else 1.0, 2)
    if name == "square":
        return box(*([vals[0] if vals else 1.0] * 2))
    if name == "half_disc":
        return half_disc(vals[0] if vals else 1.0)
    if name == "triangle":
        return equilateral_triangle(vals[0] if vals else 1.0)
    if name == "rectangle" and len(vals) == 2:
        return rectangle(*vals)
    if name == "ellipse" and len(vals) == 2:
        return ellipse(*vals)
    if name == "ball3":
        return ball(vals[0] if vals else 1.0, 3)
    if name == "cube":
        return box(*([vals[0] if vals else 1.0] * 3))
    if name == "punched" and len(vals) in (3, 4):
        return punched_box(PunchedBoxSpec(vals[0], int(vals[1]), vals[2], int(vals[3]) if len(vals) == 4 else 2))
    raise ConfigError(f"unknown domain {ref!r}")


def grid_aligned(domain: Domain) -> bool:
    """True for boxes, whose faces fall on lattice nodes for dyadic h."""
    return domain.spec is not None and domain.spec.get("kind") == "box" and domain.obstacle is None


def domain_measure_of(domain: Domain, resolution: float | None = None) -> float:
    if domain.exact.measure is not None:
        return domain.exact.measure
    return domain_measure(domain, resolution or domain.diameter_bound / 1024)


def domain_perimeter_of(domain: Domain) -> float:
    if domain.exact.perimeter is not None:
        return domain.exact.perimeter
    return domain_perimeter(domain, domain.diameter_bound / 1024)


# --- Richardson ----------------------------------------------------------------------


@dataclass
class RichardsonResult:
    hs: list[float]
    values: list[float]
    extrapolated: float
    order: float | None  # fitted p (3+ rungs only)
    uncertainty: float
    assumed_order: float
    declined: bool = False


def richardson(hs, values, p: float = 1.0) -> RichardsonResult:
    """Extrapolate v(h) = v0 + C h^p.  With 3+ rungs p is fitted from the last
    three values; a non-monotone ladder declines extrapolation."""
    hs = [float(h) for h in hs]
    vals = [float(v) for v in values]
    if len(hs) < 2 or len(hs) != len(vals):
        raise ValueError("need at least 2 (h, value) pairs")
    diffs = np.diff(vals)
    if not (np.all(diffs > 0) or np.all(diffs < 0)):
        return RichardsonResult(hs, vals, vals[-1], None, abs(vals[-1] - vals[-2]), p, declined=True)
    order = None
    if len(hs) >= 3:
        r1, r2 = hs[-3] / hs[-2], hs[-2] / hs[-1]
        d1, d2 = vals[-2] - vals[-3], vals[-1] - vals[-2]
        if abs(r1 - r2) > 1e-9 * r1:
            raise ValueError("fitting p needs a geometric ladder")
        order = math.log(d1 / d2) / math.log(r1)
        p = order
    r = hs[-2] / hs[-1]
    # keep the correction within twice the last step
    p_eff = max(p, math.log(1.5) / math.log(r))
    delta = vals[-1] - vals[-2]
    extra = vals[-1] + delta / (r**p_eff - 1)
    return RichardsonResult(hs, vals, extra, order, abs(extra - vals[-1]), p)


@dataclass
class GridSolve:
    h: float
    T: float
    lambda1: float
    int_v2: float
    M: float
    n: int
    F: float


def solve_at(domain: Domain, h: float, measure: float, cg_tol: float = 1e-10, eig_tol: float = 1e-10) -> GridSolve:
    g = rasterize(domain, h)
    tr = solve_torsion(g, cg_tol)
    lam = lambda1(g, eig_tol).value
    return GridSolve(h, tr.T, lam, tr.int_v2, tr.M, g.n, B.compute_F(tr.T, lam, measure))


def run_convergence(domain, quantity: str = "F", ladder=LADDER_2D, p: float | None = None, cg_tol=1e-10, eig_tol=1e-10) -> RichardsonResult:
    domain = named_domain(domain)
    if len(ladder) < 2:
        raise ConfigError("Richardson needs at least 2 rungs")
    meas = domain_measure_of(domain)
    sols = [solve_at(domain, h, meas, cg_tol, eig_tol) for h in ladder]
    key = {"T": "T", "lambda1": "lambda1", "F": "F"}[quantity]
    if p is None:
        p = 2.0 if grid_aligned(domain) else 1.0
    return richardson(ladder, [getattr(s, key) for s in sols], p)


# --- shape table -------------------------------------------------------------------------


def table_shapes() -> list[tuple[str, Domain, float | None, float | None]]:
    """(label, domain, closed-form F if published, independent reference)."""
    j0, j1 = bessel_zero(0), bessel_zero(1)
    return [
        ("rectangle(1,10)", rectangle(1.0, 10.0), None, rectangle(1.0, 10.0).exact.F),
        ("disc", ball(1.0, 2), j0**2 / 8, None),
        ("half_disc", half_disc(1.0), (0.25 - 2 / math.pi**2) * j1**2, None),
        ("equilateral_triangle", equilateral_triangle(2.0), math.pi**2 / 15, None),
        ("square", box(1.0, 1.0), None, box(1.0, 1.0).exact.F),
    ]


def _table_row(label, domain, F_exact, F_ref, ladder, cg_tol, eig_tol):
    meas = domain_measure_of(domain)
    p = 2.0 if grid_aligned(domain) else 1.0
    try:
        sols = [solve_at(domain, h, meas, cg_tol, eig_tol) for h in ladder]
    except Exception as exc:  # recorded per row
        return {"shape": label, "error": f"{type(exc).__name__}: {exc}"}
    rF = richardson(ladder, [s.F for s in sols], p)
    rT = richardson(ladder, [s.T for s in sols], p)
    rL = richardson(ladder, [s.lambda1 for s in sols], p)
    return {
        "shape": label,
        "T": rT.extrapolated,
        "lambda1": rL.extrapolated,
        "measure": meas,
        "F": rF.extrapolated,
        "F_exact": F_exact,
        "rel_err": None if F_exact is None else (rF.extrapolated - F_exact) / F_exact,
        "F_reference": F_ref,
        "F_finest": sols[-1].F,
        "p_assumed": p,
        "error": None,
    }


def _pool_map(fn, jobs, workers):
    if workers <= 1:
        return [fn(*j) for j in jobs]
    with ProcessPoolExecutor(workers) as ex:
        futs = [ex.submit(fn, *j) for j in jobs]
        return [f.result() for f in futs]


def run_table(config: StudyConfig | None = None) -> list[dict]:
    config = config or StudyConfig("table")
    ladder = config.ladder or [2.0**-6, 2.0**-7]
    jobs = [(label, dom.scaled(config.scale) if config.scale != 1 else dom, fe, fr, [h * config.scale for h in ladder], config.cg_tol, config.eig_tol) for label, dom, fe, fr in table_shapes()]
    return _pool_map(_table_row, jobs, config.workers)


# --- punched cube ---------------------------------------------------------------------------


def punched_delta(L: float, N: int, m: int) -> tuple[float, float]:
    """(theta, delta) from the theta rule.

    m = 2: the maximiser of the planar theta-form, capped so that the cell hole
    stays below a sixth of the cell (where the log bracket holds).  At desk
    scale the cap is always active.  m >= 3: theta = (log N)^{3/4} / N^{1/2}
    with delta = (L/N) theta^{2/(m-2)}, capped below the cell half-width.
    """
    if m == 2:
        delta_max = 0.99 * L / (6 * N)
        theta_cap = B.theta_m2(L, N, delta_max)
        theta = B.optimal_theta_m2(N, theta_cap)
        return theta, min(B.delta_from_theta_m2(L, N, theta), delta_max)
    theta = math.log(N) ** 0.75 / math.sqrt(N)
    delta = (L / N) * theta ** (2 / (m - 2))
    if delta <= 0:
        raise ConfigError(f"theta rule gives no hole for N={N}")
    return theta, min(delta, 0.45 * L / N)


def _ladder_for_hole(ladder, delta):
    """Scale the ladder so its coarsest rung resolves the hole (h <= delta/2)."""
    s = min(1.0, (delta / 2) / ladder[0])
    return [h * s for h in ladder]


def _punched_row(L, N, m, ladder, cg_tol, eig_tol):
    theta, delta = punched_delta(L, N, m)
    row: dict[str, Any] = {"N": N, "theta": theta, "delta": delta}
    try:
        spec = PunchedBoxSpec(L, N, delta, m)
        dom = punched_box(spec)
        lad = _ladder_for_hole(ladder, delta)
        sols = [solve_at(dom, h, spec.exact_measure, cg_tol, eig_tol) for h in lad]
        rF = richardson(lad, [s.F for s in sols], 1.0)
        cell = mu1_mixed(L / N, delta, m=m)
        F = rF.extrapolated
        rep = B.check_punched_lower_bound(F, L, N, delta, cell.mu1, m)
        theta_form = rep.parts[0].lhs if rep.parts else None
        row.update(
            mu1_cell=cell.mu1,
            F=F,
            F_finest=sols[-1].F,
            h_finest=lad[-1],
            e42_bound=rep.lhs,
            theta_form=theta_form,
            polya=sols[-1].F <= 1 and F <= 1,
            **{"pass": rep.passed},
            error=None,
        )
    except Exception as exc:
        row.update(error=f"{type(exc).__name__}: {exc}", **{"pass": False})
    return row


def run_punched_study(L: float = 1.0, N_list=(1, 2, 4, 8), m: int = 2, ladder=None, cg_tol=1e-10, eig_tol=1e-10, workers: int = 1) -> list[dict]:
    N_list = list(N_list)
    if any(b <= a for a, b in zip(N_list, N_list[1:])):
        raise ConfigError("N list must be ascending")
    ladder = list(ladder or ([2.0**-6, 2.0**-7] if m == 2 else list(LADDER_3D)))
    jobs = [(L, N, m, ladder, cg_tol, eig_tol) for N in N_list]
    rows = _pool_map(_punched_row, jobs, workers)
    return sorted(rows, key=lambda r: r["N"])


# --- single-hole perturbation -----------------------------------------------------------------


@dataclass
class PerturbationFit:
    slope_lambda: float
    shift_lambda: float
    slope_T: float
    shift_T: float
    target_lambda: float
    target_T: float

    @property
    def rel_err_lambda(self) -> float:
        return abs(self.slope_lambda - self.target_lambda) / self.target_lambda

    @property
    def rel_err_T(self) -> float:
        return abs(self.slope_T - self.target_T) / self.target_T


def fit_log_pole(deltas, increments) -> tuple[float, float]:
    """Fit increment = a / (log(1/delta) - c); returns (a, c).

    The remainder beyond the leading a / log(1/delta) term is a series in
    1/log(1/delta) with geometric structure; absorbing it in the shift c
    keeps the fit to two parameters.
    """
    x = -np.log(np.asarray(deltas, dtype=float))
    y = 1.0 / np.asarray(increments, dtype=float)
    A = np.vstack([x, np.ones_like(x)]).T
    s, t = np.linalg.lstsq(A, y, rcond=None)[0]
    return 1.0 / s, -t / s


def run_perturbation_study(domain="square", x0=(0.0, 0.0), deltas=None, h_factor: float = 0.5, cg_tol=1e-10, eig_tol=1e-10) -> tuple[list[dict], PerturbationFit]:
    """Punch B(x0; delta) out of a planar domain and compare lambda_1 and T with
    the leading-order logarithmic asymptotics; each row uses h = h_factor * delta
    for both the punched and the unpunched domain."""
    base = named_domain(domain)
    if base.dim != 2:
        raise ConfigError("perturbation study is planar")
    deltas = list(deltas or [2.0**-k for k in (4, 5, 6, 7)])
    if any(b >= a for a, b in zip(deltas, deltas[1:])):
        raise ConfigError("delta list must be decreasing")
    x0 = np.asarray(x0, dtype=float)
    if not base.contains(x0)[0]:
        raise ConfigError("x0 must be interior")
    rows = []
    for d in deltas:
        h = h_factor * d
        row: dict[str, Any] = {"delta": d, "h": h}
        try:
            g0 = rasterize(base, h)
            t0 = solve_torsion(g0, cg_tol)
            e0 = lambda1(g0, eig_tol)
            i = g0.node_at(x0)
            phi2 = float(e0.vector[i] ** 2)  # unit discrete L2 norm
            v0 = float(t0.v[i])
            gd = rasterize(punch_hole(base, x0, d), h)
            td = solve_torsion(gd, cg_tol)
            ed = lambda1(gd, eig_tol)
            lg = -math.log(d)
            lam_asym = e0.value + 2 * math.pi * phi2 / lg
            T_asym = t0.T - 2 * math.pi * v0**2 / lg
            row.update(
                lambda1=ed.value,
                lambda1_base=e0.value,
                lambda1_asym=lam_asym,
                T=td.T,
                T_base=t0.T,
                T_asym=T_asym,
                rel_err_lambda=abs(lam_asym - ed.value) / ed.value,
                rel_err_T=abs(T_asym - td.T) / td.T,
                phi2_x0=phi2,
                v_x0=v0,
                error=None,
            )
        except Exception as exc:
            row.update(error=f"{type(exc).__name__}: {exc}")
        rows.append(row)
    good = [r for r in rows if r["error"] is None]
    if len(good) >= 2:
        a_l, c_l = fit_log_pole([r["delta"] for r in good], [r["lambda1"] - r["lambda1_base"] for r in good])
        a_t, c_t = fit_log_pole([r["delta"] for r in good], [r["T_base"] - r["T"] for r in good])
        finest = good[-1]
        fit = PerturbationFit(a_l, c_l, a_t, c_t, 2 * math.pi * finest["phi2_x0"], 2 * math.pi * finest["v_x0"] ** 2)
    else:
        fit = PerturbationFit(math.nan, math.nan, math.nan, math.nan, math.nan, math.nan)
    return rows, fit


# --- bound suite --------------------------------------------------------------------------------


@dataclass
class CorpusEntry:
    name: str
    domain: Domain
    ladder: list[float]
    convex: bool = False
    semi_axes: tuple[float, ...] | None = None
    punched: PunchedBoxSpec | None = None
    identity_h: float | None = None  # grid for the level-set checks, if finer than the ladder


def default_corpus(kind: str = "convex", scale: float = 1.0) -> list[CorpusEntry]:
    lad2 = [2.0**-6, 2.0**-7]
    entries: list[CorpusEntry] = []
    if kind in ("convex", "all"):
        entries += [
            CorpusEntry("disc", ball(1.0, 2), lad2, convex=True),
            CorpusEntry("square", box(1.0, 1.0), lad2, convex=True),
            CorpusEntry("rectangle(1,4)", rectangle(1.0, 4.0), lad2, convex=True),
            CorpusEntry("rectangle(1,10)", rectangle(1.0, 10.0), [2.0**-5, 2.0**-6], convex=True),
            CorpusEntry("equilateral_triangle", equilateral_triangle(2.0), lad2, convex=True),
            CorpusEntry("half_disc", half_disc(1.0), lad2, convex=True),
            CorpusEntry("ellipse(2,1)", ellipse(2.0, 1.0), [2.0**-5, 2.0**-6], convex=True, semi_axes=(2.0, 1.0)),
        ]
    if kind in ("punched", "all"):
        for N, d in ((2, 0.1), (4, 0.05), (8, 0.02)):
            spec = PunchedBoxSpec(1.0, N, d, 2)
            entries.append(CorpusEntry(f"punched(1,{N},{d:g})", punched_box(spec), [2.0**-7, 2.0**-8], punched=spec))
    if kind in ("3d", "all"):
        entries += [
            CorpusEntry("ball3", ball(1.0, 3), list(LADDER_3D), convex=True, semi_axes=(1.0, 1.0, 1.0), identity_h=2.0**-7),
            CorpusEntry("cube", box(1.0, 1.0, 1.0), list(LADDER_3D), convex=True),
        ]
    if not entries:
        raise ConfigError(f"unknown corpus {kind!r}")
    if scale != 1.0:
        entries = [
            dataclasses.replace(
                e,
                domain=e.domain.scaled(scale),
                ladder=[h * scale for h in e.ladder],
                semi_axes=None if e.semi_axes is None else tuple(a * scale for a in e.semi_axes),
                identity_h=None if e.identity_h is None else e.identity_h * scale,
                punched=None if e.punched is None else PunchedBoxSpec(e.punched.L * scale, e.punched.N, e.punched.delta * scale, e.punched.dim),
            )
            for e in entries
        ]
    return entries


def _identity_reports(tr, grid, measure, k_modes: int, modal=None) -> list[B.BoundReport]:
    """Level-set and layer-cake checks on (tr, grid); the eigen-expansion checks
    on ``modal = (torsion, grid)`` if given (a coarser grid keeps them cheap)."""
    dist = distribution(tr, 256)
    levelset = check_levelset_bound(dist, measure)
    levelset.notes += f"; grid h={grid.h:g}"
    lc1 = abs(dist.integral() - tr.T) / tr.T
    lc2 = abs(dist.second_moment() - tr.int_v2) / tr.int_v2
    reps = [
        B.BoundReport("layer-cake: |int mu - T|/T <= 0.005", lc1, 0.005, 0.0, notes="trapezoid, 256 samples"),
        B.BoundReport("layer-cake: |int 2 theta mu - int v^2|/int v^2 <= 0.005", lc2, 0.005, 0.0, notes="trapezoid, 256 samples"),
        levelset,
        check_q_functional(tr, dist, measure),
    ]
    if k_modes > 0:
        tr, grid = modal or (tr, grid)
        pairs = eigenpairs(grid, k_modes)
        es = eigensum_partials(grid, tr.T, k_modes, pairs)
        steps = np.diff(es.partials)
        reps.append(es.report)
        reps.append(B.BoundReport("e23: S_j nondecreasing (min increment >= 0)", 0.0, float(steps.min()) if steps.size else 0.0, 1e-12 * tr.T))
        reps.append(B.BoundReport("e23: S_k <= T (1 + 1e-3)", es.partials[-1], tr.T * (1 + 1e-3), 0.0, notes=f"k={k_modes}, h={grid.h:g}"))
        lam1 = pairs[0].value
        ts = [0.0, 0.1 / lam1, 1.0 / lam1, 10.0 / lam1]
        reps.append(heat_content_bound(grid, k_modes, ts, measure, pairs))
    return reps


def evaluate_entry(entry: CorpusEntry, tol: float | None = None, corrupt_lambda: float = 1.0, identities: bool = True, k_modes: int = 4) -> list[B.BoundReport]:
    """All applicable checks for one corpus domain."""
    dom = entry.domain
    m = dom.dim
    meas = domain_measure_of(dom)
    p = 2.0 if grid_aligned(dom) else 1.0
    grids, sols, trs = [], [], []
    for h in entry.ladder:
        g = rasterize(dom, h)
        tr = solve_torsion(g)
        lam = lambda1(g).value
        grids.append(g)
        trs.append(tr)
        sols.append((tr.T, lam))
    T = richardson(entry.ladder, [s[0] for s in sols], p).extrapolated
    lam = richardson(entry.ladder, [s[1] for s in sols], p).extrapolated * corrupt_lambda
    F = B.compute_F(T, lam, meas)
    tr, g = trs[-1], grids[-1]
    lam_h = sols[-1][1] * corrupt_lambda
    reps = [
        B.check_polya(F, tol=tol),
        B.check_theorem_the4(F, T, meas, m, lambda1=lam, tol=tol),
        B.check_rayleigh_torsion(tr, lam_h, tol=tol),
    ]
    if entry.convex:
        per = domain_perimeter_of(dom)
        reps.append(B.check_convex_lower(F, m, per, meas, T, lam, tol=tol))
        if m == 2:
            metrics = convex_metrics(dom)
            reps.append(B.check_convex_upper_the3(F, metrics, T, meas, lam, tol=tol))
        if entry.semi_axes is not None:
            reps.append(B.check_ellipsoid_bounds(T, lam, meas, entry.semi_axes, tol=tol))
    if entry.punched is not None:
        s = entry.punched
        cell = mu1_mixed(s.L / s.N, s.delta, m=s.dim)
        reps.append(B.check_punched_lower_bound(F, s.L, s.N, s.delta, cell.mu1, s.dim, tol=tol))
    if identities:
        if entry.identity_h is not None and entry.identity_h != entry.ladder[-1]:
            g = rasterize(dom, entry.identity_h)
            tr = solve_torsion(g)
        reps.extend(_identity_reports(tr, g, meas, k_modes, (trs[0], grids[0])))
    for top in reps:
        for r in top.flatten():
            r.notes = f"[{entry.name}] {r.notes}".strip()
    return reps


def _suite_entry(entry, tol, corrupt_lambda, identities, k_modes):
    try:
        return [r.to_dict() for rep in evaluate_entry(entry, tol, corrupt_lambda, identities, k_modes) for r in rep.flatten()], None
    except Exception as exc:
        return [], f"{entry.name}: {type(exc).__name__}: {exc}"


def run_bound_suite(
    corpus="convex",
    tol: float | None = None,
    scale: float = 1.0,
    corrupt_lambda: float = 1.0,
    identities: bool = True,
    k_modes: int = 4,
    workers: int = 1,
    only=None,
) -> tuple[list[dict], list[str]]:
    """Flat list of report dicts plus per-domain error messages."""
    entries = corpus if isinstance(corpus, list) else default_corpus(corpus, scale)
    if only:
        known = {e.name for e in entries}
        missing = set(only) - known
        if missing:
            raise ConfigError(f"not in corpus: {sorted(missing)}; have {sorted(known)}")
        entries = [e for e in entries if e.name in set(only)]
    jobs = [(e, tol, corrupt_lambda, identities, k_modes) for e in entries]
    results = _pool_map(_suite_entry, jobs, workers)
    reports, errors = [], []
    for reps, err in results:
        reports.extend(reps)
        if err:
            errors.append(err)
    return reports, errors
