import math

import numpy as np
import pytest

from torsionlab.bounds import check_log_bracket
from torsionlab.constants import bessel_zero
from torsionlab.discretization import BoundaryMode, DiscretizationError, rasterize
from torsionlab.experiments import richardson
from torsionlab.geometry import ball, box, half_disc
from torsionlab.spectrum import (
    HoleUnresolved,
    eigenpairs,
    eigensum_partials,
    heat_content_bound,
    lambda1,
    lemma1_bracket,
    mu1_mixed,
)
from torsionlab.torsion import solve_torsion

J01, J11 = bessel_zero(0), bessel_zero(1)


def test_square_lambda1():
    lam = lambda1(rasterize(box(1.0, 1.0), 1 / 128)).value
    assert lam == pytest.approx(2 * math.pi**2, rel=2e-3)


def test_disc_lambda1_extrapolated():
    hs = [2.0**-5, 2.0**-6, 2.0**-7]
    vals = [lambda1(rasterize(ball(1.0, 2), h)).value for h in hs]
    assert richardson(hs, vals).extrapolated == pytest.approx(J01**2, rel=5e-3)


def test_half_disc_lambda1():
    lam = lambda1(rasterize(half_disc(1.0), 1 / 128)).value
    assert J11**2 == pytest.approx(14.682, abs=1e-3)
    assert lam == pytest.approx(J11**2, rel=1e-2)


def test_lambda1_needs_dirichlet_grid():
    with pytest.raises(DiscretizationError):
        lambda1(rasterize(box(1.0, 1.0), 1 / 8, BoundaryMode.NEUMANN_OUTER))


def test_eigenfunction_sign_normalised():
    g = rasterize(box(1.0, 2.0), 1 / 16)
    for p in eigenpairs(g, 3):
        assert g.integrate(p.vector) >= 0
    assert np.all(eigenpairs(g, 1)[0].vector > 0)


# --- mixed problem -------------------------------------------------------------


def test_mixed_empty_hole():
    r = mu1_mixed(1.0, 0.0)
    assert abs(r.mu1) < 1e-8
    assert np.ptp(r.phi) < 1e-6 * np.abs(r.phi).max()
    assert r.q == pytest.approx(1.0, rel=1e-10)
    rep = lemma1_bracket(r)
    assert rep.passed and rep.lhs == pytest.approx(rep.rhs)


def test_mixed_small_hole_inside_log_bracket():
    r = mu1_mixed(1.0, 0.01)
    lo, hi = 1 / (100 * math.log(50)), 8 * math.pi / ((4 - math.pi) * math.log(50))
    assert (lo, hi) == pytest.approx((0.002557, 7.483), abs=2e-3)  # printed truncated
    assert lo <= r.mu1 <= hi
    assert check_log_bracket(r.mu1, 1.0, 0.01).passed
    assert lemma1_bracket(r).passed
    assert r.q <= 1.0


@pytest.mark.parametrize("delta", [0.05, 0.1])
def test_mixed_brackets_hold(delta):
    r = mu1_mixed(1.0, delta)
    assert check_log_bracket(r.mu1, 1.0, delta).passed
    assert lemma1_bracket(r).passed


def test_mixed_monotone_in_delta():
    h = 1 / 64
    vals = [mu1_mixed(1.0, d, h=h).mu1 for d in (0.05, 0.1, 0.2, 0.25)]
    assert all(b > a for a, b in zip(vals, vals[1:]))


def test_mixed_scaling():
    a = mu1_mixed(1.0, 0.05, h=1 / 64)
    b = mu1_mixed(2.0, 0.1, h=1 / 32)
    assert b.mu1 == pytest.approx(a.mu1 / 4, rel=1e-8)
    assert b.q == pytest.approx(4 * a.q, rel=1e-8)


def test_orthant_reduction_matches_full_cell():
    a = mu1_mixed(1.0, 0.1, h=1 / 32)
    b = mu1_mixed(1.0, 0.1, h=1 / 32, symmetric=False)
    assert a.mu1 == pytest.approx(b.mu1, rel=1e-8)
    assert a.q == pytest.approx(b.q, rel=1e-8)


def test_dirichlet_cube_dominates_mixed():
    lam = lambda1(rasterize(box(1.0, 1.0), 1 / 64)).value
    for d in (0.05, 0.2):
        assert mu1_mixed(1.0, d, h=1 / 64).mu1 <= lam


def test_mixed_errors():
    with pytest.raises(HoleUnresolved, match="hole unresolved"):
        mu1_mixed(1.0, 0.01, h=1 / 32)
    with pytest.raises(ValueError):
        mu1_mixed(1.0, 0.6)


# --- eigen expansions -------------------------------------------------------------


@pytest.fixture(scope="module")
def square():
    g = rasterize(box(1.0, 1.0, center=(0.5, 0.5)), 1 / 64)
    return g, solve_torsion(g).T, eigenpairs(g, 8)


def test_square_first_partial_sum(square):
    g, T, pairs = square
    s = eigensum_partials(g, T, 1, pairs)
    # phi_1 = 2 sin(pi x) sin(pi y): int phi_1 = 8/pi^2, S_1 = (64/pi^4)/(2 pi^2)
    assert s.integrals[0] == pytest.approx(8 / math.pi**2, rel=1e-3)
    assert s.partials[0] == pytest.approx(32 / math.pi**6, rel=2e-3)
    assert T == pytest.approx(0.0351393, rel=1e-3)
    assert s.report.passed


def test_square_partial_sums(square):
    g, T, pairs = square
    s = eigensum_partials(g, T, 8, pairs)
    assert all(b >= a for a, b in zip(s.partials, s.partials[1:]))
    assert s.partials[-1] <= T * (1 + 1e-3)
    # modes (1,2), (2,1), (2,2), (2,3), (3,2) integrate to 0
    zero = [abs(c) < 1e-5 for c in s.integrals]  # eigen residual level
    assert sum(zero) == 5


def test_square_parseval_partial(square):
    g, T, pairs = square
    tot = sum(g.integrate(p.vector) ** 2 for p in pairs)
    expect = 64 / math.pi**4 * (1 + 2 / 9)
    assert expect == pytest.approx(0.803, abs=1e-3)
    assert 0.98 * expect <= tot <= 1.0


def test_disc_first_mode_fraction():
    g = rasterize(ball(1.0, 2), 1 / 64)
    T = solve_torsion(g).T
    s = eigensum_partials(g, T, 1)
    # int phi_1 = 2 sqrt(pi)/j01, so S_1/T = 32/j01^4
    assert s.partials[0] / T == pytest.approx(32 / J01**4, rel=5e-3)


def test_heat_content(square):
    g, T, pairs = square
    lam1 = pairs[0].value
    rep = heat_content_bound(g, 8, [0.0, 0.1, 1 / lam1, 1e3 / lam1], measure=1.0, pairs=pairs)
    assert rep.passed
    big = heat_content_bound(g, 8, [1e6], measure=1.0, pairs=pairs)
    assert big.lhs == pytest.approx(64 / math.pi**4, rel=2e-3)
    with pytest.raises(ValueError):
        heat_content_bound(g, 8, [-1.0], pairs=pairs)


def test_heat_content_disc():
    g = rasterize(ball(1.0, 2), 1 / 32)
    rep = heat_content_bound(g, 4, [0.1], measure=math.pi)
    assert rep.passed and rep.margin > 0


def test_k_limits(square):
    g, T, pairs = square
    with pytest.raises(ValueError):
        eigensum_partials(g, T, 13)
    with pytest.raises(ValueError):
        eigensum_partials(g, T, 9, pairs)
