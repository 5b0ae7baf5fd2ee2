"""Hot numeric kernels: dense direct convolution and a cyclic Jacobi eigensolver.

Both kernels carry a numba @njit build and a pure-numpy fallback; which one
backs the public names (``conv_full``, ``jacobi_sweeps``) is decided by
``logcone._backend.USE_NUMBA``.  The fallbacks stay importable either way so
tests and benchmarks can compare the two paths directly.

Convolution is deliberately *direct* (no FFT): the outputs feed log-concavity
checks that look at log-values of cells many orders of magnitude below the
peak, where FFT ringing would fabricate support islands.
"""

import numpy as np

from ._backend import USE_NUMBA

_JACOBI_MAX_SWEEPS = 100


# ---------------------------------------------------------------------------
# numpy fallbacks
# ---------------------------------------------------------------------------

def conv_full_numpy(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Full direct convolution of two nd arrays (same ndim, ndim <= 3).

    Accumulates ``a[idx] * b`` into shifted windows of the output, one shift
    per nonzero cell of ``a``; exact up to float summation order.
    """
    out_shape = tuple(na + nb - 1 for na, nb in zip(a.shape, b.shape))
    out = np.zeros(out_shape)
    for idx in np.argwhere(a != 0.0):
        window = tuple(slice(int(i), int(i) + n) for i, n in zip(idx, b.shape))
        out[window] += a[tuple(idx)] * b
    return out


def jacobi_sweeps_numpy(A: np.ndarray, tol: float = 1e-12,
                        max_sweeps: int = _JACOBI_MAX_SWEEPS):
    """Cyclic Jacobi rotations on a symmetric matrix.

    Returns (eigenvalues, eigenvector columns, converged).  Stops when the
    off-diagonal Frobenius norm drops below ``tol`` times the matrix norm.
    """
    A = np.array(A, dtype=np.float64)
    n = A.shape[0]
    V = np.eye(n)
    scale = np.sqrt((A * A).sum())
    if n == 1 or scale == 0.0:
        return np.diagonal(A).copy(), V, True
    for _ in range(max_sweeps):
        off = np.sqrt(2.0 * (np.triu(A, 1) ** 2).sum())
        if off <= tol * scale:
            return np.diagonal(A).copy(), V, True
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if abs(apq) <= 1e-300:
                    continue
                app = A[p, p]
                aqq = A[q, q]
                tau = (aqq - app) / (2.0 * apq)
                if tau >= 0.0:
                    t = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                colp = A[:, p].copy()
                colq = A[:, q].copy()
                A[:, p] = c * colp - s * colq
                A[:, q] = s * colp + c * colq
                rowp = A[p, :].copy()
                rowq = A[q, :].copy()
                A[p, :] = c * rowp - s * rowq
                A[q, :] = s * rowp + c * rowq
                A[p, q] = 0.0
                A[q, p] = 0.0
                A[p, p] = app - t * apq
                A[q, q] = aqq + t * apq
                vp = V[:, p].copy()
                vq = V[:, q].copy()
                V[:, p] = c * vp - s * vq
                V[:, q] = s * vp + c * vq
    off = np.sqrt(2.0 * (np.triu(A, 1) ** 2).sum())
    return np.diagonal(A).copy(), V, off <= tol * scale


# ---------------------------------------------------------------------------
# numba builds
# ---------------------------------------------------------------------------

conv_full_njit = None
jacobi_sweeps_njit = None

if USE_NUMBA:
    from numba import njit

    @njit(cache=True)
    def _conv1(a, b):
        na = a.shape[0]
        nb = b.shape[0]
        out = np.zeros(na + nb - 1)
        for i in range(na):
            v = a[i]
            if v != 0.0:
                for j in range(nb):
                    out[i + j] += v * b[j]
        return out

    @njit(cache=True)
    def _conv2(a, b):
        na0, na1 = a.shape
        nb0, nb1 = b.shape
        out = np.zeros((na0 + nb0 - 1, na1 + nb1 - 1))
        for i0 in range(na0):
            for i1 in range(na1):
                v = a[i0, i1]
                if v != 0.0:
                    for j0 in range(nb0):
                        for j1 in range(nb1):
                            out[i0 + j0, i1 + j1] += v * b[j0, j1]
        return out

    @njit(cache=True)
    def _conv3(a, b):
        na0, na1, na2 = a.shape
        nb0, nb1, nb2 = b.shape
        out = np.zeros((na0 + nb0 - 1, na1 + nb1 - 1, na2 + nb2 - 1))
        for i0 in range(na0):
            for i1 in range(na1):
                for i2 in range(na2):
                    v = a[i0, i1, i2]
                    if v != 0.0:
                        for j0 in range(nb0):
                            for j1 in range(nb1):
                                for j2 in range(nb2):
                                    out[i0 + j0, i1 + j1, i2 + j2] += v * b[j0, j1, j2]
        return out

    def conv_full_njit(a: np.ndarray, b: np.ndarray) -> np.ndarray:
        a = np.ascontiguousarray(a, dtype=np.float64)
        b = np.ascontiguousarray(b, dtype=np.float64)
        if a.ndim == 1:
            return _conv1(a, b)
        if a.ndim == 2:
            return _conv2(a, b)
        return _conv3(a, b)

    @njit(cache=True)
    def _jacobi(A, tol, max_sweeps):
        n = A.shape[0]
        V = np.eye(n)
        scale = 0.0
        for i in range(n):
            for j in range(n):
                scale += A[i, j] * A[i, j]
        scale = np.sqrt(scale)
        if n == 1 or scale == 0.0:
            return np.diag(A).copy(), V, True
        for _ in range(max_sweeps):
            off = 0.0
            for i in range(n - 1):
                for j in range(i + 1, n):
                    off += 2.0 * A[i, j] * A[i, j]
            if np.sqrt(off) <= tol * scale:
                return np.diag(A).copy(), V, True
            for p in range(n - 1):
                for q in range(p + 1, n):
                    apq = A[p, q]
                    if abs(apq) <= 1e-300:
                        continue
                    app = A[p, p]
                    aqq = A[q, q]
                    tau = (aqq - app) / (2.0 * apq)
                    if tau >= 0.0:
                        t = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
                    else:
                        t = -1.0 / (-tau + np.sqrt(1.0 + tau * tau))
                    c = 1.0 / np.sqrt(1.0 + t * t)
                    s = t * c
                    for i in range(n):
                        if i != p and i != q:
                            aip = A[i, p]
                            aiq = A[i, q]
                            A[i, p] = c * aip - s * aiq
                            A[p, i] = A[i, p]
                            A[i, q] = s * aip + c * aiq
                            A[q, i] = A[i, q]
                    A[p, p] = app - t * apq
                    A[q, q] = aqq + t * apq
                    A[p, q] = 0.0
                    A[q, p] = 0.0
                    for i in range(n):
                        vip = V[i, p]
                        viq = V[i, q]
                        V[i, p] = c * vip - s * viq
                        V[i, q] = s * vip + c * viq
        off = 0.0
        for i in range(n - 1):
            for j in range(i + 1, n):
                off += 2.0 * A[i, j] * A[i, j]
        return np.diag(A).copy(), V, np.sqrt(off) <= tol * scale

    def jacobi_sweeps_njit(A: np.ndarray, tol: float = 1e-12,
                           max_sweeps: int = _JACOBI_MAX_SWEEPS):
        A = np.array(A, dtype=np.float64)
        return _jacobi(A, tol, max_sweeps)


# selected implementations
if USE_NUMBA:
    conv_full = conv_full_njit
    jacobi_sweeps = jacobi_sweeps_njit
else:
    conv_full = conv_full_numpy
    jacobi_sweeps = jacobi_sweeps_numpy
