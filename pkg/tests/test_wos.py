import math
from dataclasses import replace

import pytest

from torsionlab.geometry import PunchedBoxSpec, ball, box, punched_box
from torsionlab.wos import WosError, wos_exit_time, wos_mean, wos_torsional_rigidity


def _close(a, b, k=3.0):
    return abs(a.mean - b.mean) <= k * math.hypot(a.stderr, b.stderr)


def test_center_of_disc_single_jump():
    # first jump has radius 1, lands on the boundary
    assert wos_exit_time(ball(1.0, 2), [0.0, 0.0], seed=5) == pytest.approx(0.25)


def test_start_inside_shell_gives_zero():
    assert wos_exit_time(ball(1.0, 2), [0.99999, 0.0], eps=1e-4) == 0.0


def test_mean_exit_time_off_center():
    e = wos_mean(ball(1.0, 2), [0.5, 0.0], 100_000, seed=2)
    assert abs(e.mean - 0.1875) <= 3 * e.stderr
    assert e.n == 100_000


def test_disc_rigidity():
    e = wos_torsional_rigidity(ball(1.0, 2), 100_000, seed=3)
    assert abs(e.mean - math.pi / 8) <= 3 * e.stderr
    assert e.stderr > 0 and e.n == 100_000


def test_stderr_definition():
    e = wos_mean(ball(1.0, 3), [0.2, 0.1, 0.0], 5000, seed=9)
    # exact v = (1 - r^2)/6 in 3-D
    assert abs(e.mean - (1 - 0.05) / 6) <= 4 * e.stderr
    assert e.eps > 0


def test_seed_determinism():
    d = punched_box(PunchedBoxSpec(1.0, 2, 0.1))
    a = wos_torsional_rigidity(d, 5000, seed=11)
    b = wos_torsional_rigidity(d, 5000, seed=11)
    c = wos_torsional_rigidity(d, 5000, seed=12)
    assert a == b
    assert a.mean != c.mean


def test_blocks_are_independent_of_total_count():
    # the first block's stream is the same whatever n is, so a longer run extends a shorter one
    a = wos_mean(ball(1.0, 2), [0.3, 0.0], 4096, seed=4)
    b = wos_mean(ball(1.0, 2), [0.3, 0.0], 8192, seed=4)
    assert a.mean != b.mean
    assert abs(a.mean - b.mean) < 5 * a.stderr


def test_eps_bias_below_noise():
    d = box(1.0, 1.0)
    a = wos_torsional_rigidity(d, 40_000, seed=1, measure=1.0)
    b = wos_torsional_rigidity(d, 40_000, eps=a.eps / 10, seed=2, measure=1.0)
    assert _close(a, b)


def test_scaling():
    d = box(1.0, 1.0)
    a = wos_torsional_rigidity(d, 40_000, seed=1, measure=1.0)
    b = wos_torsional_rigidity(d.scaled(2.0), 40_000, seed=2, measure=4.0)
    assert abs(b.mean - 16 * a.mean) <= 3 * math.hypot(b.stderr, 16 * a.stderr)


def test_errors():
    with pytest.raises(ValueError):
        wos_torsional_rigidity(ball(1.0, 2), 999)
    with pytest.raises(ValueError):
        wos_exit_time(ball(1.0, 2), [2.0, 0.0])
    with pytest.raises(ValueError):
        wos_torsional_rigidity(ball(1.0, 2), 1000, eps=0.0)
    # declared bounding box far larger than the set: acceptance ~8e-5
    loose = replace(ball(0.01, 2), lo=(-1.0, -1.0), hi=(1.0, 1.0))
    with pytest.raises(WosError):
        wos_torsional_rigidity(loose, 1000)
