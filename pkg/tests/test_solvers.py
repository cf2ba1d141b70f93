import math

import numpy as np
import pytest
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from torsionlab.discretization import BoundaryMode, rasterize
from torsionlab.geometry import ball, box, equilateral_triangle
from torsionlab.solvers import MAX_PAIRS, NonConvergence, SolverError, cg_solve, lowest_eigenpairs


def sparse_matrix(g):
    n = g.n
    rows, cols, vals = [np.arange(n)], [np.arange(n)], [np.full(n, 2.0 * g.dim)]
    for j in range(g.neighbors.shape[0]):
        nb = g.neighbors[j]
        keep = nb < n
        rows.append(np.arange(n)[keep])
        cols.append(nb[keep])
        vals.append(-np.ones(keep.sum()))
    A = sp.coo_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(n, n)).tocsr()
    return A / g.h**2


def test_sparse_oracle_matches_operator(rng):
    g = rasterize(ball(1.0, 2), 1 / 16)
    u = rng.standard_normal(g.n)
    assert np.allclose(sparse_matrix(g) @ u, g.operator()(u))


def test_cg_matches_direct_solve():
    g = rasterize(equilateral_triangle(1.0), 1 / 64)
    b = np.ones(g.n)
    x, rep = cg_solve(g.operator(), b, rel_tol=1e-12)
    ref = spla.spsolve(sparse_matrix(g).tocsc(), b)
    assert np.allclose(x, ref, rtol=1e-9, atol=1e-14)
    assert rep.converged


def test_cg_residual_monotone_and_tolerance():
    g = rasterize(ball(1.0, 2), 1 / 64)
    x, rep = cg_solve(g.operator(), np.ones(g.n), rel_tol=1e-10, keep_history=True)
    assert rep.monotone
    assert rep.residual <= 1e-10 * math.sqrt(g.n)
    true_res = np.linalg.norm(np.ones(g.n) - g.operator()(x))
    assert true_res <= 2e-10 * math.sqrt(g.n)
    assert rep.history[-1] == pytest.approx(rep.residual)


def test_cg_zero_rhs_and_warm_start():
    g = rasterize(box(1.0, 1.0), 1 / 16)
    x, rep = cg_solve(g.operator(), np.zeros(g.n))
    assert rep.iterations == 0 and not x.any()
    x1, _ = cg_solve(g.operator(), np.ones(g.n), rel_tol=1e-12)
    _, rep2 = cg_solve(g.operator(), np.ones(g.n), rel_tol=1e-10, x0=x1)
    assert rep2.iterations <= 1


def test_cg_failures():
    g = rasterize(box(1.0, 1.0), 1 / 64)
    with pytest.raises(NonConvergence):
        cg_solve(g.operator(), np.ones(g.n), max_iter=3)
    with pytest.raises(SolverError):
        cg_solve(lambda u: -u, np.ones(4))


def test_eigenpairs_match_dense_solver():
    g = rasterize(ball(1.0, 2), 1 / 8)
    ref = np.linalg.eigvalsh(sparse_matrix(g).toarray())[:6]
    pairs = lowest_eigenpairs(g.operator(), 6, g.n, inner=g.inner)
    vals = [p.value for p in pairs]
    assert np.allclose(vals, ref, rtol=1e-8)
    # disc has double eigenvalues; they are flagged
    assert pairs[1].near_degenerate and pairs[2].near_degenerate
    for i, p in enumerate(pairs):
        assert g.inner(p.vector, p.vector) == pytest.approx(1.0)
        for q in pairs[:i]:
            assert abs(g.inner(p.vector, q.vector)) < 1e-6


def test_eigen_residual_and_history():
    g = rasterize(box(1.0, 1.0), 1 / 32)
    p = lowest_eigenpairs(g.operator(), 1, g.n, inner=g.inner)[0]
    r = g.operator()(p.vector) - p.value * p.vector
    assert math.sqrt(g.inner(r, r)) == pytest.approx(p.residual, rel=1e-6, abs=1e-9)
    assert p.value == pytest.approx(8 * 32**2 * math.sin(math.pi / 64) ** 2, rel=1e-10)
    assert all(b <= a * (1 + 1e-12) for a, b in zip(p.history, p.history[1:]))


def test_weighted_inner_product_problem():
    # Neumann square: eigenvalues 0, pi^2 (discrete), first pair constant
    g = rasterize(box(1.0, 1.0), 1 / 16, BoundaryMode.NEUMANN_OUTER)
    pairs = lowest_eigenpairs(g.operator(), 2, g.n, inner=g.inner, shift=1e-6)
    assert abs(pairs[0].value) < 1e-8
    assert pairs[1].value == pytest.approx(4 * 16**2 * math.sin(math.pi / 32) ** 2, rel=1e-8)


def test_plain_inverse_iteration_agrees_with_accelerated():
    g = rasterize(box(1.0, 3.0), 1 / 16)
    a = lowest_eigenpairs(g.operator(), 1, g.n, inner=g.inner)[0]
    b = lowest_eigenpairs(g.operator(), 1, g.n, inner=g.inner, accelerate=False)[0]
    assert a.value == pytest.approx(b.value, rel=1e-9)
    assert a.iterations <= b.iterations


def test_eigen_argument_checks():
    g = rasterize(box(1.0, 1.0), 1 / 8)
    with pytest.raises(ValueError):
        lowest_eigenpairs(g.operator(), MAX_PAIRS + 1, g.n)
    with pytest.raises(NonConvergence):
        lowest_eigenpairs(g.operator(), 1, g.n, max_outer=1, rel_tol=1e-16, res_tol=1e-16)
