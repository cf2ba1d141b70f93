"""Inequalities relating T, lambda_1, |Omega| and the Polya functional, as
checkable reports.

Every check is phrased as ``lhs <= rhs``; ``margin = rhs - lhs`` and a report
passes when ``margin >= -tol``.  Default tolerances follow the provenance of
the sides: 1% of the bound for solver-fed values, 1e-10 for closed forms.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .constants import Constants, ball_volume, bessel_zero, heat_kernel_constant, newtonian_capacity_unit_ball, boundary_layer_constant

SOLVER_RTOL = 1e-2
EXACT_RTOL = 1e-10


def default_tol(bound: float, computed: bool = True) -> float:
    return (SOLVER_RTOL if computed else EXACT_RTOL) * max(abs(bound), 1e-300 if computed else 1.0)


@dataclass
class BoundReport:
    name: str
    lhs: float
    rhs: float
    tol: float = 0.0
    notes: str = ""
    parts: list["BoundReport"] = field(default_factory=list)

    def __post_init__(self):
        self.lhs = float(self.lhs)
        self.rhs = float(self.rhs)
        if not (math.isfinite(self.lhs) and math.isfinite(self.rhs)):
            raise ValueError(f"{self.name}: non-finite side ({self.lhs}, {self.rhs})")

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs

    @property
    def own_pass(self) -> bool:
        return self.margin >= -self.tol

    @property
    def passed(self) -> bool:
        return self.own_pass and all(p.passed for p in self.parts)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "margin": self.margin,
            "pass": self.own_pass,
            "tol": self.tol,
            "notes": self.notes,
        }

    def flatten(self) -> list["BoundReport"]:
        out = [self]
        for p in self.parts:
            out.extend(p.flatten())
        return out

    def to_json(self) -> str:
        return json.dumps([r.to_dict() for r in self.flatten()])

    def line(self) -> str:
        flag = "PASS" if self.own_pass else "FAIL"
        return f"[{flag}] {self.name}: {self.lhs:.6g} <= {self.rhs:.6g} (margin {self.margin:+.3e}, tol {self.tol:.1e})"


def _report(name, lhs, rhs, computed=True, tol=None, notes="", parts=None):
    if tol is None:
        tol = default_tol(rhs if abs(rhs) > 0 else lhs, computed)
    return BoundReport(name, lhs, rhs, tol, notes, parts or [])


# --- the functional itself ------------------------------------------------------


def compute_F(T: float, lambda1: float, measure: float) -> float:
    """Polya functional T * lambda_1 / |Omega|."""
    for name, v in (("T", T), ("lambda1", lambda1), ("measure", measure)):
        if not (v > 0 and math.isfinite(v)):
            raise ValueError(f"{name} must be positive, got {v}")
    return T * lambda1 / measure


def check_polya(F: float, computed: bool = True, tol: float | None = None) -> BoundReport:
    return _report("polya: F <= 1", F, 1.0, computed, tol, notes="lhs computed" if computed else "lhs closed form")


def the4_constant(m: int) -> float:
    """2 m omega_m^{2/m} / (m + 2); equals pi for m = 2."""
    return 2 * m * ball_volume(m) ** (2 / m) / (m + 2)


def check_theorem_the4(F: float, T: float, measure: float, m: int, lambda1: float | None = None, computed: bool = True, tol: float | None = None) -> BoundReport:
    """F <= 1 - C_m T / |Omega|^{1+2/m}; for m = 2 also F <= 1 - pi/(lambda_1 |Omega| + pi)."""
    rhs = 1.0 - the4_constant(m) * T / measure ** (1 + 2 / m)
    parts = []
    if m == 2 and lambda1 is not None:
        parts.append(
            _report("the4 (m=2 eigenvalue form): F <= 1 - pi/(lambda1 |Omega| + pi)", F, 1.0 - math.pi / (lambda1 * measure + math.pi), computed, tol)
        )
    return _report("the4: F <= 1 - C_m T/|Omega|^(1+2/m)", F, rhs, computed, tol, parts=parts)


def check_rayleigh_torsion(torsion, lambda1: float, computed: bool = True, tol: float | None = None) -> BoundReport:
    """lambda_1 <= int v / int v^2 (torsion function as a Rayleigh test function)."""
    return _report("rayleigh: lambda1 <= int v / int v^2", lambda1, torsion.T / torsion.int_v2, computed, tol)


# --- convex domains -----------------------------------------------------------------


def convex_lower_constant(m: int) -> float:
    return math.pi**2 / (4 * m ** (m + 2) * (m + 2))


def check_convex_lower(
    F: float,
    m: int,
    perimeter: float | None = None,
    measure: float | None = None,
    T: float | None = None,
    lambda1: float | None = None,
    computed: bool = True,
    tol: float | None = None,
) -> BoundReport:
    """Lower bounds for convex sets; the caller asserts convexity."""
    parts = []
    if m == 2:
        parts.append(_report("convex (m=2): F >= pi^2/48", math.pi**2 / 48, F, computed, tol))
        if perimeter is not None and measure is not None and lambda1 is not None:
            parts.append(_report("k4: lambda1 >= pi^2 Per^2/(16 |Omega|^2)", math.pi**2 * perimeter**2 / (16 * measure**2), lambda1, computed, tol))
    if perimeter is not None and measure is not None and T is not None:
        parts.append(_report("k5: T >= |Omega|^3/(3 Per^2)", measure**3 / (3 * perimeter**2), T, computed, tol))
    return _report("convex: F >= pi^2/(4 m^(m+2) (m+2))", convex_lower_constant(m), F, computed, tol, parts=parts)


def ellipsoid_torsion(semi_axes) -> float:
    m = len(semi_axes)
    inv = sum(1.0 / a**2 for a in semi_axes)
    return ball_volume(m) / (m + 2) / inv * math.prod(semi_axes)


def check_ellipsoid_bounds(T: float, lambda1: float, measure: float, semi_axes, computed: bool = True, tol: float | None = None) -> BoundReport:
    """For an ellipsoid (its own maximal inscribed ellipsoid): T equals the closed
    form, |Omega| <= omega_m m^m prod a_i and lambda_1 >= pi^2/(4 m^2) sum a_i^-2."""
    m = len(semi_axes)
    t_exact = ellipsoid_torsion(semi_axes)
    inv = sum(1.0 / a**2 for a in semi_axes)
    tol_T = tol if tol is not None else default_tol(t_exact, computed)
    parts = [
        _report("k1 (equality): T <= closed form", T, t_exact, computed, tol_T),
        _report("k1 (equality): closed form <= T", t_exact, T, computed, tol_T),
        _report("k2: |Omega| <= omega_m m^m prod a_i", measure, ball_volume(m) * m**m * math.prod(semi_axes), computed, tol),
    ]
    return _report("k3: lambda1 >= pi^2/(4 m^2) sum a_i^-2", math.pi**2 / (4 * m**2) * inv, lambda1, computed, tol, parts=parts)


def the3_factor(c: float) -> float:
    """1 + 3c/2 + 3c^2/4 + c^3/8 = (1 + c/2)^3."""
    return 1 + 1.5 * c + 0.75 * c**2 + c**3 / 8


def the3_c(width: float, Lambda: float) -> float:
    return (32 * width**2 * Lambda / math.pi**2) ** (1 / 3)


def c8_bound(ratio: float) -> float:
    """1 - pi/(pi + 9 j01^2) * (w/|E|)."""
    j = bessel_zero(0)
    return 1 - math.pi / (math.pi + 9 * j**2) * ratio


def c27_bound(ratio: float) -> float:
    """pi^2/12 + (2^{-4/3} + 2^{-2/3} + 1/3) pi^2 (w/|E|)^{2/3}."""
    return math.pi**2 / 12 + (2 ** (-4 / 3) + 2 ** (-2 / 3) + 1 / 3) * math.pi**2 * ratio ** (2 / 3)


def the3_crossover() -> float:
    """w/|E| at which the two planar bounds cross (bisection)."""
    lo, hi = 1e-9, 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if c27_bound(mid) < c8_bound(mid):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def check_convex_upper_the3(
    F: float,
    metrics,
    T: float | None = None,
    measure: float | None = None,
    lambda1: float | None = None,
    computed: bool = True,
    tol: float | None = None,
) -> BoundReport:
    """Upper bounds for planar convex sets in terms of width w, projection |E| and Lambda."""
    w, E, Lam = metrics.width, metrics.projection, metrics.Lambda
    c = the3_c(w, Lam)
    ratio = w / E
    parts = [
        _report("c26: c <= 32^(1/3)", c, 32 ** (1 / 3), computed=False, tol=1e-9),
        _report("a3: F <= 1 - 1/11560", F, 1 - 1 / 11560, computed, tol),
        _report("c8: F <= 1 - pi (w/|E|)/(pi + 9 j01^2)", F, c8_bound(ratio), computed, tol),
        _report("c27: F <= pi^2/12 + K pi^2 (w/|E|)^(2/3)", F, c27_bound(ratio), computed, tol),
    ]
    if T is not None and measure is not None:
        parts.append(_report("c6: T/|Omega| <= w^2/12", T / measure, w**2 / 12, computed, tol))
    if lambda1 is not None:
        parts.append(_report("c2: lambda1 <= (pi^2/w^2)(1+3c/2+3c^2/4+c^3/8)", lambda1, math.pi**2 / w**2 * the3_factor(c), computed, tol))
    return _report(
        "a2: F <= (pi^2/12)(1+3c/2+3c^2/4+c^3/8)",
        F,
        math.pi**2 / 12 * the3_factor(c),
        computed,
        tol,
        notes=f"c={c:.6g}, w={w:.6g}, |E|={E:.6g}",
        parts=parts,
    )


# --- mixed eigenvalue brackets --------------------------------------------------------


def capacity_bracket(L: float, delta: float, m: int = 3) -> tuple[float, float | None]:
    """[k_m cap/L^m, 2 pi m cap/L^m] for K = closed ball of radius delta; the upper
    end is None unless cap <= L^{m-2}/16."""
    cap = newtonian_capacity_unit_ball(m) * delta ** (m - 2)
    lower = heat_kernel_constant(m) * cap / L**m
    upper = 2 * math.pi * m * cap / L**m if cap <= L ** (m - 2) / 16 * (1 + 1e-12) else None
    return lower, upper


def check_capacity_bracket(mu1: float, L: float, delta: float, m: int = 3, computed: bool = True, tol: float | None = None) -> BoundReport:
    if m < 3:
        raise ValueError("capacity bracket needs m >= 3")
    lower, upper = capacity_bracket(L, delta, m)
    parts = []
    if upper is not None:
        parts.append(_report("e45c: mu1 <= 2 pi m cap(K)/L^m", mu1, upper, computed, tol))
    note = f"k_{m}={heat_kernel_constant(m):.6g}; upper branch {'on' if upper is not None else 'off (cap > L^(m-2)/16)'}"
    return _report("e45a: k_m cap(K)/L^m <= mu1", lower, mu1, computed, tol, notes=note, parts=parts)


def log_bracket(L: float, delta: float) -> tuple[float, float]:
    if not (0 < delta < L / 6):
        raise ValueError("log bracket needs 0 < delta < L/6")
    lg = math.log(L / (2 * delta))
    return 1 / (100 * L**2 * lg), 8 * math.pi / ((4 - math.pi) * L**2 * lg)


def check_log_bracket(mu1: float, L: float, delta: float, computed: bool = True, tol: float | None = None) -> BoundReport:
    lower, upper = log_bracket(L, delta)
    upper_rep = _report("f14 upper: mu1 <= 8 pi/((4-pi) L^2 log(L/2delta))", mu1, upper, computed, tol)
    return _report("f14 lower: 1/(100 L^2 log(L/2delta)) <= mu1", lower, mu1, computed, tol, parts=[upper_rep])


# --- punched cube lower bound ----------------------------------------------------------


def punched_lower_bound(mu1_cell: float, L: float, N: int, m: int) -> float:
    """Right side of the punched-cube lower bound with horizon log N / mu1."""
    s = boundary_layer_constant(m)
    return (
        1
        - math.sqrt(4 * m * L**2 * mu1_cell / (3 * math.e * N**2))
        - 1 / N
        - s * math.log(N) ** 1.5 / (L * math.sqrt(mu1_cell))
    )


def punched_theta_bound_m2(theta: float, N: int) -> float:
    """The planar theta-form: 1 - 1/N - (32/(3e(4-pi)))^{1/2} theta - 300 s_2 (log N)^{3/2}/(pi N theta)."""
    s2 = boundary_layer_constant(2)
    return 1 - 1 / N - math.sqrt(32 / (3 * math.e * (4 - math.pi))) * theta - 300 * s2 * math.log(N) ** 1.5 / (math.pi * N * theta)


def punched_theta_bound(theta: float, N: int, m: int) -> float:
    """The m >= 3 theta-form with theta = (N delta / L)^{(m-2)/2}."""
    if m < 3:
        raise ValueError("use punched_theta_bound_m2 for m = 2")
    kap = newtonian_capacity_unit_ball(m)
    k = heat_kernel_constant(m)
    s = boundary_layer_constant(m)
    return 1 - 1 / N - math.sqrt(8 * math.pi * m**2 * kap / (3 * math.e)) * theta - s / math.sqrt(k * kap) * math.log(N) ** 1.5 / (N * theta)


def theta_m2(L: float, N: int, delta: float) -> float:
    return math.log(L / (2 * N * delta)) ** -0.5


def delta_from_theta_m2(L: float, N: int, theta: float) -> float:
    return L / (2 * N) * math.exp(-1 / theta**2)


def optimal_theta_m2(N: int, theta_max: float | None = None) -> float:
    """Maximiser of the planar theta-form, clamped to the range where the log
    bracket applies (cell hole radius below a sixth of the cell)."""
    if theta_max is None:
        theta_max = math.log(3) ** -0.5
    if N == 1:
        return theta_max
    a = math.sqrt(32 / (3 * math.e * (4 - math.pi)))
    b = 300 * boundary_layer_constant(2) * math.log(N) ** 1.5 / (math.pi * N)
    return min(math.sqrt(b / a), theta_max)


def check_punched_lower_bound(F: float, L: float, N: int, delta: float, mu1_cell: float, m: int = 2, computed: bool = True, tol: float | None = None) -> BoundReport:
    """F >= explicit punched-cube bound from the single-cell mixed eigenvalue."""
    bound = punched_lower_bound(mu1_cell, L, N, m)
    parts = []
    if m == 2 and delta < L / (2 * N):
        th = theta_m2(L, N, delta)
        parts.append(_report("e426: F >= theta-form (m=2)", punched_theta_bound_m2(th, N), F, computed, tol, notes=f"theta={th:.6g}"))
    elif m >= 3:
        th = (N * delta / L) ** ((m - 2) / 2)
        parts.append(_report("e421: F >= theta-form", punched_theta_bound(th, N, m), F, computed, tol, notes=f"theta={th:.6g}"))
    return _report("e42: F >= 1 - sqrt(4mL^2mu/(3eN^2)) - 1/N - s_m (log N)^1.5/(L mu^0.5)", bound, F, computed, tol, notes=f"mu1_cell={mu1_cell:.6g}", parts=parts)


__all__ = [
    "BoundReport",
    "Constants",
    "compute_F",
    "check_polya",
    "check_theorem_the4",
    "check_rayleigh_torsion",
    "check_convex_lower",
    "check_ellipsoid_bounds",
    "check_convex_upper_the3",
    "check_capacity_bracket",
    "check_log_bracket",
    "check_punched_lower_bound",
]
