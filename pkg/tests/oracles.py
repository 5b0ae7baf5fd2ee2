"""Independent oracles for the test suite.

Everything here is deliberately decoupled from the package internals:
closed-form densities, brute-force reference computations, and numpy/scipy
reference solvers, used to grade the production code paths.
"""

import math

import numpy as np

from logcone.grid import DensityGrid


def std_normal_pdf(x):
    x = np.asarray(x, dtype=np.float64)
    return np.exp(-x * x / 2.0) / math.sqrt(2.0 * math.pi)


def gaussian_pdf(x, sigma=1.0):
    x = np.asarray(x, dtype=np.float64)
    return np.exp(-x * x / (2 * sigma * sigma)) / (sigma * math.sqrt(2 * math.pi))


def box_trapezoid(x, w1, w2):
    """Density of the sum of centered uniforms of widths w1 and w2."""
    x = np.asarray(x, dtype=np.float64)
    return np.clip((w1 + w2) / 2.0 - np.abs(x), 0.0, min(w1, w2)) / (w1 * w2)


def uniform_grid(width, n, center=0.0, pad=0):
    """Exact uniform density on an interval, sampled at cell midpoints."""
    h = width / n
    values = np.full(n + 2 * pad, 1.0 / width)
    if pad:
        values[:pad] = 0.0
        values[-pad:] = 0.0
    origin = center - width / 2.0 + h / 2.0 - pad * h
    return DensityGrid(values, np.array([origin]), np.array([h]))


def grid_from_function(fn, lo, hi, n, dim=1):
    """Sample a callable on a regular midpoint lattice over [lo, hi]^dim."""
    h = (hi - lo) / n
    xs = lo + (np.arange(n) + 0.5) * h
    if dim == 1:
        values = fn(xs)
        return DensityGrid(values, np.array([xs[0]]), np.array([h]))
    mesh = np.meshgrid(*([xs] * dim), indexing="ij")
    values = fn(*mesh)
    return DensityGrid(values, np.full(dim, xs[0]), np.full(dim, h))


def riemann_mass(g: DensityGrid) -> float:
    """Plain reference quadrature, independent of the package's mass()."""
    total = 0.0
    for v in g.values.reshape(-1):
        total += v
    return total * float(np.prod(g.spacing))


def level_set_counts(values, thresholds):
    """#{cells with value >= c} for each threshold; the quantity a
    rearrangement must preserve exactly."""
    v = np.asarray(values).reshape(-1)
    return np.array([(v >= c).sum() for c in thresholds])


def is_symmetric_decreasing(values, positions) -> bool:
    """Nonincreasing when read in order of growing |position|."""
    order = np.lexsort((positions, np.abs(positions)))
    seq = np.asarray(values)[order]
    return bool(np.all(np.diff(seq) <= 1e-15 * max(1.0, seq.max())))


def irwin_hall_by_convolution(n, h=1e-3):
    """Reference convolution power of uniform[0,1] built with np.convolve.

    Returns (x, density) sampled at midpoints; independent of both the
    closed form and the package convolution."""
    base = np.full(int(round(1.0 / h)), 1.0)
    cur = base.copy()
    for _ in range(n - 1):
        cur = np.convolve(cur, base) * h
    x = (np.arange(cur.size) + 0.5 * n) * h
    return x, cur


def eigh_oracle(A):
    return np.linalg.eigh(np.asarray(A, dtype=np.float64))


def brute_force_conv(a, b):
    """O(N^2) reference convolution via explicit loops (small inputs only)."""
    a = np.asarray(a)
    b = np.asarray(b)
    out = np.zeros(tuple(na + nb - 1 for na, nb in zip(a.shape, b.shape)))
    for ia in np.ndindex(a.shape):
        for ib in np.ndindex(b.shape):
            out[tuple(i + j for i, j in zip(ia, ib))] += a[ia] * b[ib]
    return out
