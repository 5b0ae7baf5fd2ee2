"""Backend kernels: numba and numpy paths must agree with reference solvers."""

import numpy as np
import pytest
from scipy.signal import convolve as scipy_convolve

from logcone import _kernels
from logcone._backend import USE_NUMBA

from oracles import brute_force_conv, eigh_oracle

rng = np.random.default_rng(7)


@pytest.mark.parametrize("shape_a,shape_b", [
    ((9,), (5,)),
    ((8, 6), (3, 7)),
    ((4, 5, 3), (3, 2, 4)),
])
def test_conv_numpy_matches_scipy_direct(shape_a, shape_b):
    a = rng.random(shape_a)
    b = rng.random(shape_b)
    got = _kernels.conv_full_numpy(a, b)
    ref = scipy_convolve(a, b, method="direct")
    assert np.allclose(got, ref, rtol=0, atol=1e-13)


def test_conv_numpy_matches_brute_force():
    a = rng.random((4, 3))
    b = rng.random((2, 5))
    assert np.allclose(_kernels.conv_full_numpy(a, b), brute_force_conv(a, b),
                       rtol=0, atol=1e-14)


def test_conv_skips_zero_cells():
    a = np.zeros((6, 6))
    a[2, 3] = 2.0
    b = rng.random((4, 4))
    out = _kernels.conv_full_numpy(a, b)
    assert np.allclose(out[2:6, 3:7], 2.0 * b)
    out[2:6, 3:7] = 0.0
    assert np.all(out == 0.0)


@pytest.mark.skipif(not USE_NUMBA, reason="numba backend disabled")
@pytest.mark.parametrize("shape_a,shape_b", [
    ((9,), (5,)),
    ((8, 6), (3, 7)),
    ((4, 5, 3), (3, 2, 4)),
])
def test_conv_njit_matches_numpy(shape_a, shape_b):
    a = rng.random(shape_a)
    b = rng.random(shape_b)
    got = _kernels.conv_full_njit(a, b)
    ref = _kernels.conv_full_numpy(a, b)
    assert np.allclose(got, ref, rtol=1e-15, atol=1e-300)


@pytest.mark.parametrize("d", [1, 2, 3, 5, 8, 12])
def test_jacobi_numpy_matches_eigh(d):
    A = rng.standard_normal((d, d))
    A = (A + A.T) / 2.0
    w, V, converged = _kernels.jacobi_sweeps_numpy(A.copy())
    assert converged
    order = np.argsort(w)
    w = w[order]
    V = V[:, order]
    w_ref, _ = eigh_oracle(A)
    assert np.allclose(w, w_ref, rtol=0, atol=1e-10)
    assert np.abs(V.T @ V - np.eye(d)).max() < 1e-10
    assert np.abs(A @ V - V * w[None, :]).max() < 1e-9 * max(1.0, np.abs(A).max())


@pytest.mark.skipif(not USE_NUMBA, reason="numba backend disabled")
@pytest.mark.parametrize("d", [2, 5, 8])
def test_jacobi_njit_matches_numpy(d):
    A = rng.standard_normal((d, d))
    A = (A + A.T) / 2.0
    w1, V1, c1 = _kernels.jacobi_sweeps_njit(A.copy())
    w2, V2, c2 = _kernels.jacobi_sweeps_numpy(A.copy())
    assert c1 and c2
    # identical rotation schedule: results agree to the bit
    assert np.array_equal(np.sort(w1), np.sort(w2))


def test_jacobi_diagonal_is_exact():
    w, V, converged = _kernels.jacobi_sweeps_numpy(np.diag([3.0, 1.0, 2.0]))
    assert converged
    assert np.array_equal(np.sort(w), [1.0, 2.0, 3.0])
    assert np.array_equal(np.abs(V), np.eye(3))
