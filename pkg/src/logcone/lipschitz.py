"""Directional Lipschitz estimation and the tent-kernel smoothing functional.

The headline quantity is the product L * sqrt(Var_X,i * Var_Y,i) for the
convolution of two densities with diagonal covariances summing to the
identity: across variance splits it stays inside a per-dimension band
(recorded in :mod:`logcone.bands`), while either factor alone blows up as
its variance shrinks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CovarianceContractViolated, DeltaTooSmall, DimensionMismatch
from .grid import DensityGrid, moments
from .measure_ops import convolve, sample_at, sup_profile

#: refinement ratio separating the smooth limit (1.0) from the jump limit (2.0)
DISCONTINUITY_RATIO = 1.6


@dataclass(frozen=True, eq=False)
class LipschitzReport:
    """Largest difference quotient along a direction, plus a flag telling
    whether it kept growing like 1/h on a refined grid."""

    direction: np.ndarray
    constant: float
    discontinuity_flag: bool


def directional_lipschitz(g: DensityGrid, axis: int,
                          refined: DensityGrid | None = None) -> LipschitzReport:
    """Max |f(x + h e_axis) - f(x)| / h over adjacent sample pairs.

    When a refinement of the same density is supplied, the constant is
    recomputed there; a ratio above 1.6 (doubling under h -> h/2 means a
    jump) sets the discontinuity flag.
    """
    if not 0 <= axis < g.dim:
        raise DimensionMismatch(f"axis {axis} out of range for dim {g.dim}")
    h = float(g.spacing[axis])
    diffs = np.abs(np.diff(g.values, axis=axis))
    constant = float(diffs.max()) / h if diffs.size else 0.0
    flag = False
    if refined is not None:
        fine = directional_lipschitz(refined, axis).constant
        flag = fine > DISCONTINUITY_RATIO * constant and fine > 1e-12
    direction = np.zeros(g.dim)
    direction[axis] = 1.0
    return LipschitzReport(direction=direction, constant=constant,
                           discontinuity_flag=flag)


_TENT_VOLUME = {1: lambda d: d, 2: lambda d: math.pi * d * d / 3.0,
                3: lambda d: math.pi * d ** 3 / 3.0}


def smooth_functional(g: DensityGrid, delta: float, z) -> float:
    """Average of the density against the tent kernel max(1 - |x-z|/delta, 0).

    Numerator by midpoint quadrature, denominator analytic per dimension.
    The kernel must straddle several cells: delta > 2 * max spacing.
    """
    if delta <= 2.0 * float(g.spacing.max()):
        raise DeltaTooSmall(f"delta {delta} must exceed twice the spacing")
    z = np.atleast_1d(np.asarray(z, dtype=np.float64))
    if z.shape != (g.dim,):
        raise DimensionMismatch("evaluation point has wrong dimension")
    # restrict to the kernel's bounding window
    window = []
    for k in range(g.dim):
        lo = int(np.floor((z[k] - delta - g.origin[k]) / g.spacing[k]))
        hi = int(np.ceil((z[k] + delta - g.origin[k]) / g.spacing[k]))
        lo = max(lo, 0)
        hi = min(hi, g.shape[k] - 1)
        if hi < lo:
            return 0.0
        window.append((lo, hi))
    sub = g.values[tuple(slice(lo, hi + 1) for lo, hi in window)]
    axes = [g.coords(k)[lo:hi + 1] - z[k] for k, (lo, hi) in enumerate(window)]
    sq = np.zeros(sub.shape)
    for k, ax in enumerate(axes):
        shape = [1] * g.dim
        shape[k] = ax.size
        sq = sq + (ax ** 2).reshape(shape)
    kernel = np.maximum(1.0 - np.sqrt(sq) / delta, 0.0)
    num = float((sub * kernel).sum()) * g.cell_volume
    return num / _TENT_VOLUME[g.dim](delta)


def profile_conv_value(g: DensityGrid, h: DensityGrid, axis: int, z) -> float:
    """Convolution of the two directional sup-profiles, evaluated at ``z``.

    Requires diagonal covariances summing to the identity (within 1e-4);
    the caller multiplies by sqrt of the axis-variance product to land in
    the recorded per-dimension band.
    """
    if g.dim != h.dim:
        raise DimensionMismatch("grids differ in dimension")
    if g.dim < 2:
        raise DimensionMismatch("profiles need dim >= 2")
    cg = moments(g).cov.entries
    ch = moments(h).cov.entries
    total = cg + ch
    eye = np.eye(g.dim)
    if np.abs(total - eye).max() > 1e-4:
        raise CovarianceContractViolated("covariances do not sum to the identity")
    for c in (cg, ch):
        off = c - np.diag(np.diagonal(c))
        if np.abs(off).max() > 1e-4:
            raise CovarianceContractViolated("covariance is not diagonal")
    gp = sup_profile(g, axis).grid
    hp = sup_profile(h, axis).grid
    z = np.atleast_1d(np.asarray(z, dtype=np.float64))
    if z.shape != (g.dim - 1,):
        raise DimensionMismatch("z must live on the complementary hyperplane")
    mesh = np.meshgrid(*(gp.coords(k) for k in range(gp.dim)), indexing="ij")
    pts = np.stack(mesh, axis=-1)
    vals = sample_at(hp, z - pts)
    return float((gp.values * vals).sum()) * gp.cell_volume


def lipschitz_scaling_product(x: DensityGrid, y: DensityGrid, axis: int) -> dict:
    """Lipschitz constant of the convolution times sqrt of the axis-variance
    product; the scale-free quantity the variance sweeps record."""
    conv = convolve(x, y)
    var_x = float(moments(x).cov.entries[axis, axis])
    var_y = float(moments(y).cov.entries[axis, axis])
    constant = directional_lipschitz(conv, axis).constant
    return {
        "lipschitz": constant,
        "var_x": var_x,
        "var_y": var_y,
        "product": constant * math.sqrt(var_x * var_y),
    }


def shift_difference_integral(g: DensityGrid, s: float) -> float:
    """Discrete integral of |f(t + s) - f(t)| dt for a 1-D grid.

    ``s`` is rounded to a whole number of cells.  For a log-concave line this
    is at most 2|s| sup f (+ one-cell slack): the shifted difference changes
    sign once.
    """
    if g.dim != 1:
        raise DimensionMismatch("shift integral defined for 1-D grids")
    h = float(g.spacing[0])
    m = abs(int(round(s / h)))
    v = g.values
    ahead = np.concatenate([v, np.zeros(m)])
    here = np.concatenate([np.zeros(m), v])
    return float(np.abs(ahead - here).sum()) * h
