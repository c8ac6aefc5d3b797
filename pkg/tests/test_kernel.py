"""Pointwise kernel values, contraction identities, and cell averages."""

import math

import numpy as np
import pytest

from landau.errors import GammaOutOfRange, SingularPoint
from landau.kernel import (KernelParams, cell_averaged_kernel,
                           contraction_identities, kernel_c, kernel_divergence,
                           kernel_matrix)


def test_params_reject_gamma_outside_range():
    for bad in (-2.0, 0.0, 0.5, -3.0):
        with pytest.raises(GammaOutOfRange):
            KernelParams(bad, 2)
    with pytest.raises(ValueError):
        KernelParams(-1.0, 4)


def test_matrix_is_projection_times_power():
    p = KernelParams(-1.0, 3)
    z = np.array([1.0, 2.0, -2.0])  # |z| = 3
    a = kernel_matrix(z, p)
    r = 3.0
    expected = (np.eye(3) - np.outer(z, z) / r ** 2) * r ** (p.gamma + 2.0)
    assert np.allclose(a, expected, rtol=1e-14)
    # a z = 0: projection annihilates its own direction
    assert np.max(np.abs(a @ z)) < 1e-14
    # symmetric positive semidefinite
    assert np.allclose(a, a.T)
    assert np.min(np.linalg.eigvalsh(a)) > -1e-15


def test_matrix_vanishes_at_origin():
    p = KernelParams(-0.5, 2)
    a = kernel_matrix(np.zeros(2), p)
    assert np.all(a == 0.0)


def test_divergence_matches_finite_difference_of_matrix():
    rng = np.random.default_rng(3)
    h = 1e-6
    for d in (2, 3):
        for gamma in (-0.5, -1.0, -1.5):
            p = KernelParams(gamma, d)
            for _ in range(20):
                z = rng.normal(size=d)
                if np.linalg.norm(z) < 0.5:
                    z = z + 1.0
                b = kernel_divergence(z, p)
                fd = np.zeros(d)
                for j in range(d):
                    e = np.zeros(d)
                    e[j] = h
                    fd += (kernel_matrix(z + e, p)[:, j]
                           - kernel_matrix(z - e, p)[:, j]) / (2.0 * h)
                assert np.allclose(fd, b, rtol=1e-6, atol=1e-8)


def test_c_matches_finite_difference_of_divergence():
    rng = np.random.default_rng(4)
    h = 1e-5
    for d in (2, 3):
        for gamma in (-0.5, -1.3):
            p = KernelParams(gamma, d)
            for _ in range(20):
                z = rng.normal(size=d) * 2.0
                if np.linalg.norm(z) < 1.0:
                    z = z + 2.0
                c = kernel_c(z, p)
                fd = 0.0
                for i in range(d):
                    e = np.zeros(d)
                    e[i] = h
                    fd += (kernel_divergence(z + e, p)[i]
                           - kernel_divergence(z - e, p)[i]) / (2.0 * h)
                assert abs(fd - c) < 1e-6 * max(abs(c), 1.0)


def test_c_reduces_to_classical_constant_at_d3():
    for gamma in (-0.3, -1.0, -1.7):
        p = KernelParams(gamma, 3)
        z = np.array([0.6, -0.2, 1.1])
        r = np.linalg.norm(z)
        expected = -2.0 * (gamma + 3.0) * r ** gamma
        assert math.isclose(kernel_c(z, p), expected, rel_tol=1e-13)


def test_singular_points_raise():
    p = KernelParams(-1.0, 2)
    with pytest.raises(SingularPoint):
        kernel_divergence(np.zeros(2), p)
    with pytest.raises(SingularPoint):
        kernel_c(np.zeros(2), p)


def test_contraction_identities_random():
    rng = np.random.default_rng(11)
    for _ in range(200):
        d = int(rng.integers(2, 4))
        gamma = float(rng.uniform(-1.99, -0.01))
        p = KernelParams(gamma, d)
        v = rng.normal(size=d) * 3.0
        vs = rng.normal(size=d) * 3.0
        if np.linalg.norm(v - vs) < 1e-8:
            continue
        out = contraction_identities(v, vs, p)
        z = np.linalg.norm(v - vs)
        amp = z ** p.gamma
        # normalize by the natural magnitude of the terms, not the expected
        # value, which can vanish by cancellation when v and vs align
        scale = amp * z * np.linalg.norm(v) * (np.linalg.norm(v) + np.linalg.norm(vs))
        assert np.max(np.abs(out["a_dot_v"] - out["a_dot_v_expected"])) <= 1e-12 * scale
        scale2 = amp * z ** 2 * np.linalg.norm(v) ** 2
        assert abs(out["a_vv"] - out["a_vv_expected"]) <= 1e-12 * scale2
        assert out["pythagorean_ok"]


def test_cell_average_far_cell_is_midpoint():
    p = KernelParams(-1.0, 2)
    center = np.array([3.0, 1.0])
    avg = cell_averaged_kernel(center, 0.1, p, "matrix")
    assert np.allclose(avg, kernel_matrix(center, p))


def test_cell_average_origin_frozen_anchor():
    # cell average of |z|^-1 over the square of side h centered at the origin
    # is (4/h) ln(1 + sqrt(2)); c = -(d-1)(d+gamma)|z|^gamma = -|z|^-1 at
    # gamma = -1, d = 2.
    p = KernelParams(-1.0, 2)
    h = 0.25
    avg = cell_averaged_kernel(np.zeros(2), h, p, "c")
    exact = -(4.0 / h) * math.log(1.0 + math.sqrt(2.0))
    assert math.isclose(avg, exact, rel_tol=1e-8)


def test_cell_average_origin_divergence_is_odd():
    # b is odd under z -> -z, so its average over a centered cell vanishes.
    p = KernelParams(-0.5, 2)
    avg = cell_averaged_kernel(np.zeros(2), 0.2, p, "divergence")
    assert np.max(np.abs(avg)) < 1e-10


def test_cell_average_near_singular_cell_quadrature():
    # off-origin cell touching the singularity: check against a dense
    # midpoint reference on a refined subgrid
    p = KernelParams(-1.2, 2)
    center = np.array([0.1, 0.0])
    spacing = 0.2
    avg = cell_averaged_kernel(center, spacing, p, "matrix")
    n = 400
    u = center[0] - 0.5 * spacing + (np.arange(n) + 0.5) * (spacing / n)
    w = center[1] - 0.5 * spacing + (np.arange(n) + 0.5) * (spacing / n)
    zz = np.stack(np.meshgrid(u, w, indexing="ij"), axis=-1).reshape(-1, 2)
    ref = np.mean(kernel_matrix(zz, p), axis=0)
    assert np.allclose(avg, ref, rtol=2e-3, atol=1e-4)


def test_cell_average_matrix_trace_positive_at_origin_cell():
    p = KernelParams(-1.5, 2)
    avg = cell_averaged_kernel(np.zeros(2), 0.3, p, "matrix")
    assert np.trace(avg) > 0.0
    assert np.min(np.linalg.eigvalsh(avg)) >= 0.0
