"""Walk-on-spheres estimates of the torsion function and torsional rigidity.

With generator Delta the mean exit time from x solves -Delta v = 1, v = 0 on
the boundary.  A jump to the sphere of radius d around the current point
contributes the mean exit time from that ball, d^2 / (2m), and the walk stops
inside the eps-shell of the boundary (where v = O(eps)).

Randomness: a Philox counter-based generator keyed by the 64-bit seed; block
``b`` of samples uses the stream ``Philox(key=seed).jumped(b)``, so results
do not depend on how blocks are scheduled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import Domain, measure as domain_measure

MAX_JUMPS = 1_000_000
BLOCK = 4096


class WosError(RuntimeError):
    pass


@dataclass(frozen=True)
class WosEstimate:
    mean: float
    stderr: float
    n: int
    eps: float
    sample_mean: float = math.nan  # mean of the v samples
    measure: float = math.nan


def default_eps(domain: Domain) -> float:
    return 1e-4 * domain.diameter_bound


def _stream(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=int(seed) & (2**64 - 1)).jumped(block))


def _unit_vectors(rng: np.random.Generator, n: int, m: int) -> np.ndarray:
    g = rng.standard_normal((n, m))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def _walk(domain: Domain, x: np.ndarray, eps: float, rng: np.random.Generator) -> np.ndarray:
    """Vectorised walks from the rows of x; returns the accumulated d^2/(2m)."""
    x = np.array(x, dtype=float)
    n, m = x.shape
    total = np.zeros(n)
    active = np.arange(n)
    for _ in range(MAX_JUMPS):
        d = -domain.signed_distance(x[active])
        live = d >= eps
        active, d = active[live], d[live]
        if active.size == 0:
            return total
        total[active] += d * d / (2 * m)
        x[active] += d[:, None] * _unit_vectors(rng, active.size, m)
    raise WosError(f"walk-on-spheres exceeded {MAX_JUMPS} jumps")


def wos_exit_time(domain: Domain, start, eps: float | None = None, seed: int = 0) -> float:
    """One sample of the exit time from ``start``."""
    start = np.asarray(start, dtype=float).reshape(1, domain.dim)
    if not domain.contains(start)[0]:
        raise ValueError("start point must lie inside the domain")
    eps = default_eps(domain) if eps is None else eps
    if not eps > 0:
        raise ValueError("eps must be positive")
    return float(_walk(domain, start, eps, _stream(seed, 0))[0])


def wos_mean(domain: Domain, start, n_samples: int, eps: float | None = None, seed: int = 0) -> WosEstimate:
    """Mean exit time from a fixed start point over n_samples walks."""
    start = np.asarray(start, dtype=float).reshape(1, domain.dim)
    if not domain.contains(start)[0]:
        raise ValueError("start point must lie inside the domain")
    eps = default_eps(domain) if eps is None else eps
    samples = []
    for b, lo in enumerate(range(0, n_samples, BLOCK)):
        k = min(BLOCK, n_samples - lo)
        samples.append(_walk(domain, np.repeat(start, k, axis=0), eps, _stream(seed, b)))
    s = np.concatenate(samples)
    mean = math.fsum(s) / s.size
    return WosEstimate(mean, float(s.std(ddof=1) / math.sqrt(s.size)), s.size, eps, mean)


def _uniform_points(domain: Domain, k: int, rng: np.random.Generator) -> np.ndarray:
    lo, hi = np.asarray(domain.lo), np.asarray(domain.hi)
    out, have, drawn = [], 0, 0
    while have < k:
        batch = max(2 * (k - have), 256)
        pts = lo + (hi - lo) * rng.random((batch, domain.dim))
        drawn += batch
        inside = pts[domain.contains(pts)]
        out.append(inside)
        have += len(inside)
        if drawn >= 10_000 and have / drawn < 1e-3:
            raise WosError("rejection acceptance below 1e-3; bounding box too loose")
    return np.concatenate(out)[:k]


def wos_torsional_rigidity(
    domain: Domain,
    n_samples: int = 100_000,
    eps: float | None = None,
    seed: int = 0,
    measure: float | None = None,
    measure_resolution: float | None = None,
) -> WosEstimate:
    """T = |Omega| * mean of v at uniform points of Omega."""
    if n_samples < 1000:
        raise ValueError("n_samples must be at least 1000")
    eps = default_eps(domain) if eps is None else eps
    if not eps > 0:
        raise ValueError("eps must be positive")
    if measure is None:
        res = measure_resolution or domain.diameter_bound / 512
        measure = domain_measure(domain, res)
    samples = []
    for b, lo in enumerate(range(0, n_samples, BLOCK)):
        k = min(BLOCK, n_samples - lo)
        rng = _stream(seed, b)
        samples.append(_walk(domain, _uniform_points(domain, k, rng), eps, rng))
    s = np.concatenate(samples)
    mean = math.fsum(s) / s.size
    se = float(s.std(ddof=1) / math.sqrt(s.size))
    return WosEstimate(measure * mean, measure * se, s.size, eps, mean, measure)
