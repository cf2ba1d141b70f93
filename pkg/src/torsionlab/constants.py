"""Dimension-dependent constants and the two Bessel zeros used throughout.

Everything here is computed locally (no table lookup): the Gamma function at
half-integers, Bessel zeros by bisection on power series, and the heat-kernel
integral ``k_m`` by adaptive Simpson quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache


def gamma_half_integer(x: float) -> float:
    """Gamma(x) for x a positive integer or half-integer."""
    two_x = round(2 * x)
    if two_x <= 0 or abs(2 * x - two_x) > 1e-12:
        raise ValueError(f"gamma_half_integer needs a positive (half-)integer, got {x}")
    if two_x % 2 == 0:
        return float(math.factorial(two_x // 2 - 1))
    # Gamma(n + 1/2) = (2n)! sqrt(pi) / (4^n n!)
    n = (two_x - 1) // 2
    return math.factorial(2 * n) * math.sqrt(math.pi) / (4**n * math.factorial(n))


def ball_volume(m: int) -> float:
    """Lebesgue measure of the unit ball in R^m."""
    if m == 1:
        return 2.0
    if m == 2:
        return math.pi
    if m == 3:
        return 4.0 * math.pi / 3.0
    return math.pi ** (m / 2) / gamma_half_integer(m / 2 + 1)


def newtonian_capacity_unit_ball(m: int) -> float:
    """kappa_m = 4 pi^{m/2} / Gamma((m-2)/2); defined for m >= 3."""
    if m < 3:
        raise ValueError("Newtonian capacity is defined for m >= 3")
    return 4.0 * math.pi ** (m / 2) / gamma_half_integer((m - 2) / 2)


def boundary_layer_constant(m: int) -> float:
    """s_m = 2^{(m+7)/2} m sqrt(pi) / 3."""
    return 2.0 ** ((m + 7) / 2) * m * math.sqrt(math.pi) / 3.0


# --- Bessel functions and zeros -------------------------------------------------


def bessel_j(n: int, x: float, terms: int = 60) -> float:
    """J_n(x) from its power series; accurate for moderate |x| (< ~20)."""
    half = 0.5 * x
    term = half**n / math.factorial(n)
    total = term
    sq = -half * half
    for k in range(1, terms):
        term *= sq / (k * (k + n))
        total += term
        if abs(term) < 1e-18 * max(abs(total), 1e-300):
            break
    return total


def _bisect(f, a: float, b: float, tol: float) -> float:
    fa = f(a)
    if fa * f(b) > 0:
        raise ValueError("root not bracketed")
    while b - a > tol:
        c = 0.5 * (a + b)
        fc = f(c)
        if fa * fc <= 0:
            b = c
        else:
            a, fa = c, fc
    return 0.5 * (a + b)


@lru_cache(maxsize=None)
def bessel_zero(n: int, tol: float = 1e-13) -> float:
    """First positive zero of J_n for n in {0, 1}, found by bisection."""
    brackets = {0: (2.0, 3.0), 1: (3.5, 4.2)}
    if n not in brackets:
        raise ValueError("only j_{0,1} and j_{1,1} are supported")
    a, b = brackets[n]
    return _bisect(lambda x: bessel_j(n, x), a, b, tol)


# --- heat kernel constant k_m ----------------------------------------------------


def adaptive_simpson(f, a: float, b: float, tol: float = 1e-10, max_depth: int = 50) -> float:
    """Adaptive Simpson quadrature with Richardson correction."""

    def simpson(fa, fm, fb, a, b):
        return (b - a) / 6.0 * (fa + 4.0 * fm + fb)

    def recurse(a, b, fa, fm, fb, whole, tol, depth):
        m = 0.5 * (a + b)
        lm, rm = 0.5 * (a + m), 0.5 * (m + b)
        flm, frm = f(lm), f(rm)
        left = simpson(fa, flm, fm, a, m)
        right = simpson(fm, frm, fb, m, b)
        delta = left + right - whole
        if depth <= 0 or abs(delta) <= 15.0 * tol:
            return left + right + delta / 15.0
        return recurse(a, m, fa, flm, fm, left, tol / 2, depth - 1) + recurse(
            m, b, fm, frm, fb, right, tol / 2, depth - 1
        )

    fa, fb = f(a), f(b)
    fm = f(0.5 * (a + b))
    return recurse(a, b, fa, fm, fb, simpson(fa, fm, fb, a, b), tol, max_depth)


@lru_cache(maxsize=None)
def heat_kernel_constant(m: int, tol: float = 1e-13) -> float:
    """k_m = int_0^1 (4 pi s)^{-m/2} exp(-m/(4s)) ds.

    Integrated in u = -log s so the flat essential singularity at s = 0 is
    spread over a long, smooth tail; u is truncated where exp(-m e^u / 4)
    underflows.
    """

    def integrand(u: float) -> float:
        s = math.exp(-u)
        return (4.0 * math.pi * s) ** (-m / 2) * math.exp(-m / (4.0 * s)) * s

    u_max = math.log(4.0 * 750.0 / m)  # exp(-m/(4s)) < 1e-320 beyond this
    # split so the adaptive rule sees the peak
    cuts = [0.0, 0.5, 1.0, 2.0, 3.0, u_max]
    return sum(adaptive_simpson(integrand, a, b, tol) for a, b in zip(cuts[:-1], cuts[1:]))


@dataclass(frozen=True)
class Constants:
    """Bundle of the m-dependent constants."""

    m: int
    omega: float
    kappa: float | None
    k: float | None
    s: float
    j01: float
    j11: float

    @classmethod
    def for_dimension(cls, m: int) -> "Constants":
        if m < 2:
            raise ValueError("dimension must be >= 2")
        return cls(
            m=m,
            omega=ball_volume(m),
            kappa=newtonian_capacity_unit_ball(m) if m >= 3 else None,
            k=heat_kernel_constant(m) if m >= 3 else None,
            s=boundary_layer_constant(m),
            j01=bessel_zero(0),
            j11=bessel_zero(1),
        )
