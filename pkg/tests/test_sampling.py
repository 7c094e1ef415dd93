import math
from fractions import Fraction

import numpy as np
import pytest

from latcover import linalg as la
from latcover.bodies import LpBall, PolytopeBody
from latcover.sampling import (LogconcaveDensity, MomentEstimate, RngState,
                               estimate_moments, hit_and_run_sample,
                               uniform_density)
from latcover.errors import DegenerateCovariance


def cube(n, half=1):
    rows, rhs = [], []
    for i in range(n):
        e = [0] * n
        e[i] = 1
        rows.append(tuple(e))
        rows.append(tuple(-x for x in e))
        rhs += [half, half]
    return PolytopeBody(la.mat(rows), la.vec(rhs))


def test_uniform_cube_means_centered():
    pts = hit_and_run_sample(uniform_density(cube(3)), RngState(1),
                             burn_in=500, count=4000, thinning=3)
    arr = np.array(pts)
    assert np.all(np.abs(arr.mean(axis=0)) < 0.05)
    assert np.all(np.abs(arr) <= 1 + 1e-6)


def test_uniform_disk_mean_radius_sq():
    pts = hit_and_run_sample(uniform_density(LpBall(2, 2)), RngState(2),
                             burn_in=500, count=4000, thinning=3)
    arr = np.array(pts)
    r2 = (arr ** 2).sum(axis=1).mean()
    assert abs(r2 - 0.5) < 0.05  # E||X||^2 = n/(n+2) = 1/2


def test_exponential_tilt_pushes_mean():
    density = LogconcaveDensity(body=cube(2), reweight=(10.0, 0.0))
    pts = hit_and_run_sample(density, RngState(3), burn_in=500, count=3000, thinning=3)
    arr = np.array(pts)
    # 1-D marginal mean is coth(10) - 1/10 ~ 0.9
    assert arr[:, 0].mean() > 0.7


def test_determinism_bit_exact():
    density = uniform_density(LpBall(2, 2))
    a = hit_and_run_sample(density, RngState(7), burn_in=50, count=20)
    b = hit_and_run_sample(density, RngState(7), burn_in=50, count=20)
    assert a == b
    c = hit_and_run_sample(density, RngState(8), burn_in=50, count=20)
    assert a != c


def test_moments_uniform_square():
    est = estimate_moments(uniform_density(cube(2)), RngState(4), eps=0.1,
                           burn_in=500, thinning=3)
    cov = est.covariance_matrix()
    assert abs(cov[0, 0] - 1 / 3) < 0.05
    assert abs(cov[1, 1] - 1 / 3) < 0.05
    assert abs(cov[0, 1]) < 0.05


def test_moments_uniform_disk():
    est = estimate_moments(uniform_density(LpBall(2, 2)), RngState(5), eps=0.1,
                           burn_in=500, thinning=3)
    cov = est.covariance_matrix()
    assert abs(cov[0, 0] - 0.25) < 0.05
    assert abs(cov[1, 1] - 0.25) < 0.05


def test_moments_symmetric_body_mean_small():
    est = estimate_moments(uniform_density(LpBall(2, 1)), RngState(6), eps=0.1,
                           burn_in=500, thinning=3)
    scale = math.sqrt(max(est.covariance_matrix().diagonal()))
    assert np.linalg.norm(est.mean) < 0.3 * scale


def test_degenerate_covariance_detected():
    est = MomentEstimate(mean=(0.0, 0.0),
                         second_moment=((1.0, 1.0), (1.0, 1.0)),
                         relative_error=0.1, sample_count=10)
    with pytest.raises(DegenerateCovariance):
        est.inverse_covariance_rational()


def test_rng_spawn_independent():
    r = RngState(11)
    s1 = r.spawn(1)
    s2 = r.spawn(2)
    assert s1.seed != s2.seed
    assert s1.normal(3).tolist() != s2.normal(3).tolist()


def test_logconcave_density_validates_dimension():
    with pytest.raises(ValueError):
        LogconcaveDensity(body=LpBall(2, 2), reweight=(1.0,))


def test_moments_eps_validation():
    with pytest.raises(ValueError):
        estimate_moments(uniform_density(LpBall(2, 2)), RngState(1), eps=2.0)
