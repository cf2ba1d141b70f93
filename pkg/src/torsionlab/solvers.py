"""Conjugate gradients and deflated inverse iteration on matrix-free operators.

Operators are callables ``A(u) -> A u`` on flat arrays.  Both solvers accept an
``inner`` product so that operators self-adjoint only in a weighted inner
product (the mixed Neumann grids) are handled without change.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

log = logging.getLogger(__name__)

Operator = Callable[[np.ndarray], np.ndarray]
Inner = Callable[[np.ndarray, np.ndarray], float]

MAX_PAIRS = 12


class SolverError(RuntimeError):
    pass


class NonConvergence(SolverError):
    pass


def _dot(u, v):
    return float(np.dot(u, v))


@dataclass
class SolveReport:
    iterations: int
    residual: float  # final ||A x - b||
    tolerance: float  # absolute threshold used: rel_tol * ||b||
    history: list[float] = field(default_factory=list, repr=False)

    @property
    def converged(self) -> bool:
        return self.residual <= self.tolerance

    @property
    def monotone(self) -> bool:
        """False if the residual ever rose by more than 10x rounding noise."""
        h = self.history
        if len(h) < 2:
            return True
        noise = 10 * np.finfo(float).eps * h[0]
        return all(b <= a + noise for a, b in zip(h, h[1:]))


def cg_solve(
    operator: Operator,
    rhs: np.ndarray,
    rel_tol: float = 1e-10,
    inner: Inner | None = None,
    x0: np.ndarray | None = None,
    max_iter: int | None = None,
    keep_history: bool = False,
    smoothing: bool = True,
) -> tuple[np.ndarray, SolveReport]:
    """Solve A x = b for self-adjoint positive definite A; stops at ||r|| <= rel_tol ||b||.

    With ``smoothing`` the returned iterate is the minimal-residual smoothing
    of the CG sequence, whose residual norm never increases (plain CG residuals
    oscillate).
    """
    inner = inner or _dot
    b = np.asarray(rhs, dtype=float)
    n = b.shape[0]
    max_iter = max_iter if max_iter is not None else 10 * n
    bnorm = math.sqrt(inner(b, b))
    tol = rel_tol * bnorm
    if bnorm == 0.0:
        return np.zeros_like(b), SolveReport(0, 0.0, 0.0)
    if x0 is None:
        x = np.zeros_like(b)
        r = b.copy()
    else:
        x = np.array(x0, dtype=float)
        r = b - operator(x)
    p = r.copy()
    rr = inner(r, r)
    if smoothing:
        xs, rs = x.copy(), r.copy()
        rsrs = rr
    res = math.sqrt(rr)
    history = [res] if keep_history else []
    it = 0
    while res > tol:
        if it >= max_iter:
            raise NonConvergence(f"CG did not reach {rel_tol:g} in {max_iter} iterations (residual {res:.3e})")
        ap = operator(p)
        pap = inner(p, ap)
        if pap <= 0:
            raise SolverError("operator is not positive definite")
        alpha = rr / pap
        x += alpha * p
        r -= alpha * ap
        rr_new = inner(r, r)
        p *= rr_new / rr
        p += r
        rr = rr_new
        it += 1
        if smoothing:
            d = r - rs
            dd = inner(d, d)
            if dd > 0:
                eta = -inner(rs, d) / dd
                rs += eta * d
                xs += eta * (x - xs)
                rsrs = inner(rs, rs)
            res = math.sqrt(rsrs)
        else:
            res = math.sqrt(rr)
        if keep_history:
            history.append(res)
    if smoothing:
        x = xs
    return x, SolveReport(it, res, tol, history)


@dataclass
class EigenPair:
    value: float
    vector: np.ndarray = field(repr=False)  # normalised: inner(v, v) = 1
    residual: float  # ||A v - value v||
    iterations: int = 0
    near_degenerate: bool = False
    history: list[float] = field(default_factory=list, repr=False)  # Rayleigh quotients


def _orthogonalize(x, basis, inner):
    for _ in range(2):
        for q in basis:
            x -= inner(x, q) * q
    return x


def _ritz_lowest(vectors, operator, inner) -> np.ndarray:
    """Lowest Ritz vector of the span of ``vectors`` (None entries skipped)."""
    q: list[np.ndarray] = []
    for v in vectors:
        if v is None:
            continue
        w = v.copy()
        for _ in range(2):
            for b in q:
                w -= inner(w, b) * b
        nrm = math.sqrt(inner(w, w))
        if nrm > 1e-8 * math.sqrt(inner(v, v)):
            q.append(w / nrm)
    aq = [operator(b) for b in q]
    H = np.array([[inner(a, b) for b in q] for a in aq])
    H = 0.5 * (H + H.T)
    _, vecs = np.linalg.eigh(H)
    c = vecs[:, 0]
    out = sum(ci * b for ci, b in zip(c, q))
    return out / math.sqrt(inner(out, out))


def lowest_eigenpairs(
    operator: Operator,
    k: int,
    n: int,
    rel_tol: float = 1e-10,
    inner: Inner | None = None,
    guess: np.ndarray | None = None,
    shift: float = 0.0,
    res_tol: float | None = None,
    inner_tol: float = 1e-9,
    max_outer: int = 3000,
    seed: int = 12345,
    accelerate: bool = True,
) -> list[EigenPair]:
    """Lowest ``k`` eigenpairs by inverse iteration with Gram-Schmidt deflation.

    Each outer step solves (A + shift) y = x by CG, warm-started from x / lambda.
    With ``accelerate`` the next iterate is the lowest Ritz vector of
    span{y, x, x_prev} instead of y alone; this keeps the Rayleigh quotient
    monotone and cuts the step count sharply when lambda_1/lambda_2 is close to 1.
    A pair is accepted when the Rayleigh quotient changes by at most
    ``rel_tol`` (relative) and the residual is at most ``res_tol * lambda``
    (default sqrt(rel_tol)).
    """
    if not 1 <= k <= MAX_PAIRS:
        raise ValueError(f"k must be in [1, {MAX_PAIRS}]")
    inner = inner or _dot
    res_tol = math.sqrt(rel_tol) if res_tol is None else res_tol
    rng = np.random.default_rng(seed)

    def shifted(u):
        out = operator(u)
        if shift:
            out += shift * u
        return out

    def normalize(x):
        return x / math.sqrt(inner(x, x))

    # residual floor for eigenvalues at (numerical) zero
    probe = normalize(rng.standard_normal(n))
    floor = 1e-11 * math.sqrt(inner(operator(probe), operator(probe)))

    pairs: list[EigenPair] = []
    basis: list[np.ndarray] = []
    for j in range(k):
        x = np.array(guess, dtype=float) if (j == 0 and guess is not None) else rng.standard_normal(n)
        x = normalize(_orthogonalize(x, basis, inner))
        ax = operator(x)
        lam = inner(ax, x)
        history = [lam]
        prev = None
        for it in range(1, max_outer + 1):
            x0 = x / (lam + shift) if lam + shift > 0 else None
            y, _ = cg_solve(shifted, x, rel_tol=inner_tol, inner=inner, x0=x0, smoothing=False)
            y = normalize(_orthogonalize(y, basis, inner))
            if accelerate:
                x_new = _ritz_lowest([y, x, prev], operator, inner)
                prev = x
                x = x_new
            else:
                x = y
            ax = operator(x)
            lam_new = inner(ax, x)
            r = ax - lam_new * x
            res = math.sqrt(inner(r, r))
            history.append(lam_new)
            done = abs(lam_new - lam) <= rel_tol * abs(lam_new) + floor and res <= res_tol * abs(lam_new) + floor
            lam = lam_new
            if done:
                break
        else:
            raise NonConvergence(f"inverse iteration for pair {j} did not converge in {max_outer} steps")
        log.debug("pair %d: lambda=%.12g after %d steps, residual %.2e", j, lam, it, res)
        pairs.append(EigenPair(lam, x, res, it, history=history))
        basis.append(x)

    pairs.sort(key=lambda p: p.value)
    scale = abs(pairs[0].value) + floor
    for a, b in zip(pairs, pairs[1:]):
        if abs(b.value - a.value) < 1e-6 * scale:
            a.near_degenerate = b.near_degenerate = True
    return pairs
