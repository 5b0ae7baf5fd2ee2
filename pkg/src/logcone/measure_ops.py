"""Measure transformations on grid densities.

Products, invertible linear images, orthogonal projections, convolution,
per-line symmetric-decreasing rearrangement, whitening to isotropic
position, directional sup-profiles and hyperplane restrictions.  All
operations are pure: they return new grids.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import (
    DegenerateCovariance,
    DimensionMismatch,
    DimensionOverflow,
    DimensionTooLow,
    GridNotCentered,
    LevelOutOfRange,
    NoConvergence,
    NotOrthonormal,
    SingularMap,
)
from .grid import MAX_DIM, DensityGrid, GridSpec, moments, normalize
from .spectra import eigendecompose

#: off-diagonal threshold below which a map is treated as exactly diagonal
DIAG_TOL = 1e-13


@dataclass(frozen=True, eq=False)
class LinearMap:
    """Dense real matrix used for pushforwards and projections."""

    entries: np.ndarray

    def __post_init__(self):
        entries = np.ascontiguousarray(self.entries, dtype=np.float64)
        if entries.ndim != 2:
            raise ValueError("LinearMap entries must be a matrix")
        if not np.all(np.isfinite(entries)):
            raise ValueError("LinearMap entries must be finite")
        entries.flags.writeable = False
        object.__setattr__(self, "entries", entries)

    @property
    def rows(self) -> int:
        return self.entries.shape[0]

    @property
    def cols(self) -> int:
        return self.entries.shape[1]

    def to_json(self) -> dict:
        return {"rows": self.rows, "cols": self.cols,
                "entries": [float(x) for x in self.entries.reshape(-1)]}

    @classmethod
    def from_json(cls, obj) -> "LinearMap":
        rows, cols = int(obj["rows"]), int(obj["cols"])
        entries = np.asarray(obj["entries"], dtype=np.float64).reshape(rows, cols)
        return cls(entries)


@dataclass(frozen=True, eq=False)
class AffineMap:
    """x -> matrix @ x + offset."""

    matrix: np.ndarray
    offset: np.ndarray

    def __call__(self, x):
        return np.asarray(x, dtype=np.float64) @ self.matrix.T + self.offset

    def to_json(self) -> dict:
        d = self.matrix.shape[0]
        return {"rows": d, "cols": self.matrix.shape[1],
                "entries": [float(x) for x in self.matrix.reshape(-1)],
                "offset": [float(x) for x in self.offset]}

    @classmethod
    def from_json(cls, obj) -> "AffineMap":
        rows, cols = int(obj["rows"]), int(obj["cols"])
        matrix = np.asarray(obj["entries"], dtype=np.float64).reshape(rows, cols)
        offset = np.asarray(obj["offset"], dtype=np.float64)
        return cls(matrix, offset)


@dataclass(frozen=True, eq=False)
class ProfileGrid:
    """(d-1)-dimensional grid of directional suprema, plus the removed axis."""

    grid: DensityGrid
    axis: int


# ---------------------------------------------------------------------------
# interpolation and resampling
# ---------------------------------------------------------------------------

def sample_at(g: DensityGrid, points: np.ndarray) -> np.ndarray:
    """Multilinear interpolation of the grid at physical points.

    ``points`` has shape (..., dim); queries outside the grid return 0.
    """
    pts = np.asarray(points, dtype=np.float64)
    if pts.shape[-1] != g.dim:
        raise DimensionMismatch("point dimension does not match grid")
    u = (pts - g.origin) / g.spacing
    base = np.floor(u).astype(np.int64)
    frac = u - base
    out = np.zeros(pts.shape[:-1])
    shape = g.shape
    for corner in itertools.product((0, 1), repeat=g.dim):
        idx = base + np.array(corner)
        weight = np.ones(pts.shape[:-1])
        inside = np.ones(pts.shape[:-1], dtype=bool)
        for k in range(g.dim):
            w_k = frac[..., k] if corner[k] else 1.0 - frac[..., k]
            weight = weight * w_k
            inside &= (idx[..., k] >= 0) & (idx[..., k] < shape[k])
        clipped = tuple(np.clip(idx[..., k], 0, shape[k] - 1) for k in range(g.dim))
        out += np.where(inside, g.values[clipped] * weight, 0.0)
    return out


def _spec_nodes(spec: GridSpec) -> np.ndarray:
    axes = [spec.coords(k) for k in range(spec.dim)]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack(mesh, axis=-1)


def resample(g: DensityGrid, spec: GridSpec) -> DensityGrid:
    """Sample the grid onto a new geometry by multilinear interpolation."""
    values = sample_at(g, _spec_nodes(spec))
    return DensityGrid(values, np.array(spec.origin), np.array(spec.spacing))


# ---------------------------------------------------------------------------
# products, linear images, projections
# ---------------------------------------------------------------------------

def tensor_product(a: DensityGrid, b: DensityGrid) -> DensityGrid:
    """Product density on the product grid; masses multiply exactly."""
    if a.dim + b.dim > MAX_DIM:
        raise DimensionOverflow(f"product dimension {a.dim + b.dim} exceeds {MAX_DIM}")
    values = a.values.reshape(a.shape + (1,) * b.dim) * b.values
    return DensityGrid(values,
                       np.concatenate([a.origin, b.origin]),
                       np.concatenate([a.spacing, b.spacing]))


def _auto_output_spec(g: DensityGrid, T: np.ndarray) -> GridSpec:
    """Bounding-box output geometry for the image of ``g`` under ``T``.

    Spacing is uniform, chosen to keep the cell volume scaling with |det T|;
    symmetric images keep 0 as a sample (odd counts)."""
    d = g.dim
    lo = g.origin - g.spacing / 2.0
    hi = g.origin + (np.array(g.shape) - 1) * g.spacing + g.spacing / 2.0
    corners = np.array(list(itertools.product(*zip(lo, hi))))
    mapped = corners @ T.T
    lo_m = mapped.min(axis=0)
    hi_m = mapped.max(axis=0)
    h = float(np.prod(g.spacing) * abs(np.linalg.det(T))) ** (1.0 / d)
    center = (lo_m + hi_m) / 2.0
    center[np.abs(center) < 1e-12] = 0.0
    half = (hi_m - lo_m) / 2.0
    counts = tuple(2 * int(np.ceil(hk / h)) + 1 for hk in half)
    origin = tuple(center[k] - (counts[k] - 1) * h / 2.0 for k in range(d))
    return GridSpec(counts, origin, (h,) * d)


def _is_diagonal(T: np.ndarray) -> bool:
    off = T - np.diag(np.diagonal(T))
    return np.abs(off).max() <= DIAG_TOL * max(1.0, np.abs(T).max())


def _diagonal_image(g: DensityGrid, diag: np.ndarray) -> DensityGrid:
    """Exact pushforward under a diagonal map: pure relabeling of the axes."""
    values = g.values
    origin = np.empty(g.dim)
    spacing = np.empty(g.dim)
    last = g.origin + (np.array(g.shape) - 1) * g.spacing
    for k, t in enumerate(diag):
        if t > 0:
            origin[k] = t * g.origin[k]
        else:
            values = np.flip(values, axis=k)
            origin[k] = t * last[k]
        spacing[k] = abs(t) * g.spacing[k]
    values = values / abs(float(np.prod(diag)))
    return DensityGrid(values, origin, spacing)


def linear_image(g: DensityGrid, T, out: GridSpec | None = None) -> DensityGrid:
    """Pushforward density under an invertible map: y -> g(T^-1 y)/|det T|.

    Diagonal maps with no explicit output geometry are relabeled exactly;
    anything else is resampled by multilinear interpolation onto ``out``
    (auto bounding box when omitted).
    """
    M = T.entries if isinstance(T, LinearMap) else np.asarray(T, dtype=np.float64)
    if M.shape != (g.dim, g.dim):
        raise DimensionMismatch("map shape does not match grid dimension")
    det = float(np.linalg.det(M))
    if abs(det) <= 1e-12:
        raise SingularMap(f"|det| = {abs(det):.3e}; degenerate maps must use project")
    if out is None and _is_diagonal(M):
        return _diagonal_image(g, np.diagonal(M))
    spec = out if out is not None else _auto_output_spec(g, M)
    Minv = np.linalg.inv(M)
    pts = _spec_nodes(spec) @ Minv.T
    values = sample_at(g, pts) / abs(det)
    return DensityGrid(values, np.array(spec.origin), np.array(spec.spacing))


def _axis_aligned(directions: np.ndarray) -> list[tuple[int, float]] | None:
    picks = []
    for row in directions:
        nz = np.flatnonzero(np.abs(row) > 1e-12)
        if len(nz) != 1 or abs(abs(row[nz[0]]) - 1.0) > 1e-12:
            return None
        picks.append((int(nz[0]), float(np.sign(row[nz[0]]))))
    if len({k for k, _ in picks}) != len(picks):
        return None
    return picks


def _marginalize(g: DensityGrid, keep: list[int]) -> DensityGrid:
    drop = tuple(k for k in range(g.dim) if k not in keep)
    weight = float(np.prod([g.spacing[k] for k in drop])) if drop else 1.0
    values = g.values.sum(axis=drop) * weight
    # summing preserves the relative order of the kept axes
    kept_sorted = [k for k in range(g.dim) if k in keep]
    perm = [kept_sorted.index(k) for k in keep]
    values = np.transpose(values, perm)
    return DensityGrid(values, g.origin[keep], g.spacing[keep])


def project(g: DensityGrid, directions) -> DensityGrid:
    """Density of the orthogonal projection onto the span of ``directions``.

    Directions must be mutually orthonormal and fewer than the grid
    dimension.  Coordinate-aligned directions marginalize exactly; anything
    else rotates the grid first (multilinear resampling) and then
    integrates the complementary axes out.
    """
    D = np.atleast_2d(np.asarray(directions, dtype=np.float64))
    k, d = D.shape
    if d != g.dim:
        raise DimensionMismatch("direction length does not match grid dimension")
    if not 1 <= k < g.dim:
        raise DimensionTooLow(f"need 1 <= k < dim directions, got k={k}")
    gram = D @ D.T
    if np.abs(gram - np.eye(k)).max() > 1e-10:
        raise NotOrthonormal("directions are not orthonormal")

    picks = _axis_aligned(D)
    if picks is not None:
        out = _marginalize(g, [ax for ax, _ in picks])
        for pos, (_, sign) in enumerate(picks):
            if sign < 0:
                out = _diagonal_image(
                    out, np.array([sign if j == pos else 1.0 for j in range(k)]))
        return out

    # complete to a rotation whose first k rows are the directions
    _, _, vt = np.linalg.svd(D)
    Q = np.vstack([D, vt[k:]])
    rotated = linear_image(g, Q)
    return _marginalize(rotated, list(range(k)))


# ---------------------------------------------------------------------------
# convolution
# ---------------------------------------------------------------------------

def _canonical_pair(a: DensityGrid, b: DensityGrid):
    """Deterministic operand order so convolve(a, b) == convolve(b, a) bitwise."""
    ka = (int(np.count_nonzero(a.values)), a.values.size, a.shape, tuple(a.origin))
    kb = (int(np.count_nonzero(b.values)), b.values.size, b.shape, tuple(b.origin))
    if ka != kb:
        return (a, b) if ka < kb else (b, a)
    if a.values.tobytes() <= b.values.tobytes():
        return a, b
    return b, a


def convolve(a: DensityGrid, b: DensityGrid) -> DensityGrid:
    """Density of the sum of two independent measures (direct convolution).

    Grids must share dimension; mismatched spacings are resampled to the
    finer one first.  The output grid spans the Minkowski sum of the input
    extents and masses multiply up to float roundoff.
    """
    if a.dim != b.dim:
        raise DimensionMismatch(f"dims {a.dim} and {b.dim} differ")
    rel = np.abs(a.spacing - b.spacing) / np.minimum(a.spacing, b.spacing)
    if rel.max() > 1e-9:
        common = np.minimum(a.spacing, b.spacing)
        a = _resample_to_spacing(a, common)
        b = _resample_to_spacing(b, common)
    first, second = _canonical_pair(a, b)
    values = _kernels.conv_full(first.values, second.values) * first.cell_volume
    return DensityGrid(values, a.origin + b.origin, a.spacing.copy())


def _resample_to_spacing(g: DensityGrid, spacing: np.ndarray) -> DensityGrid:
    if np.abs(g.spacing - spacing).max() <= 1e-15 * spacing.max():
        return g
    last = g.origin + (np.array(g.shape) - 1) * g.spacing
    counts = tuple(int(np.floor((last[k] - g.origin[k]) / spacing[k] + 1e-9)) + 1
                   for k in range(g.dim))
    spec = GridSpec(counts, tuple(g.origin), tuple(spacing))
    return resample(g, spec)


# ---------------------------------------------------------------------------
# symmetrization
# ---------------------------------------------------------------------------

def _symmetric_layout(o: float, h: float, n: int):
    """Embed samples at o + j*h into a grid symmetric about 0, exactly.

    Returns (n_new, j0) with new origin -(n_new-1)h/2 and old sample j
    landing on new index j0 + j, or None when the origin is not a multiple
    of h/2 (no exact embedding exists)."""
    s = o / h
    if abs(2 * s - round(2 * s)) > 1e-9:
        return None
    s = round(2 * s) / 2.0
    m = max(abs(s), abs(s + n - 1))
    n_new = int(round(2 * m + 1))
    j0 = s + (n_new - 1) / 2.0
    if abs(j0 - round(j0)) > 1e-9:
        return None
    return n_new, int(round(j0))


def _rearrange_rows(V: np.ndarray) -> np.ndarray:
    """Symmetric-decreasing rearrangement of every row.

    Sorted-descending values go to the center index n//2 first, then
    alternate outward (center-1, center+1, center-2, ...), which places
    larger values at weakly smaller |coordinate| on a symmetric axis."""
    n = V.shape[1]
    c = n // 2
    k = np.arange(n)
    offsets = np.where(k % 2 == 0, k // 2, -(k + 1) // 2)
    perm = c + offsets
    ordered = -np.sort(-V, axis=1)
    out = np.empty_like(V)
    out[:, perm] = ordered
    return out


def symmetrize(g: DensityGrid, axis: int, recenter: bool = True) -> DensityGrid:
    """Per-line symmetric-decreasing rearrangement along one axis.

    Every grid line parallel to the axis is replaced by its rearrangement:
    the multiset of values on each line is preserved exactly, so mass and
    all complementary-axis marginals survive bit-for-bit (up to summation
    order).  The output grid is symmetric about the hyperplane x_axis = 0.

    A grid whose axis samples are not symmetric about 0 is first embedded
    into a symmetric grid — exactly when the origin is a multiple of h/2,
    otherwise by interpolation.  With ``recenter=False`` such grids raise
    GridNotCentered instead.
    """
    if not 0 <= axis < g.dim:
        raise DimensionMismatch(f"axis {axis} out of range for dim {g.dim}")
    o, h, n = float(g.origin[axis]), float(g.spacing[axis]), g.shape[axis]
    layout = _symmetric_layout(o, h, n)
    already = layout is not None and layout == (n, 0)
    if not already and not recenter:
        raise GridNotCentered(f"axis {axis} samples are not symmetric about 0")

    work = np.moveaxis(g.values, axis, -1)
    lead = work.shape[:-1]
    if layout is not None:
        n_new, j0 = layout
        rows = np.zeros((int(np.prod(lead)), n_new))
        rows[:, j0:j0 + n] = work.reshape(-1, n)
    else:
        half = max(abs(o), abs(o + (n - 1) * h)) + h
        n_new = 2 * int(np.ceil(half / h)) + 1
        spec_origin = g.origin.copy()
        spec_origin[axis] = -(n_new - 1) * h / 2.0
        shape = tuple(n_new if k == axis else g.shape[k] for k in range(g.dim))
        res = resample(g, GridSpec(shape, tuple(spec_origin), tuple(g.spacing)))
        rows = np.moveaxis(res.values, axis, -1).reshape(-1, n_new)

    rear = _rearrange_rows(rows).reshape(lead + (n_new,))
    values = np.moveaxis(rear, -1, axis)
    origin = g.origin.copy()
    origin[axis] = -(n_new - 1) * h / 2.0
    return DensityGrid(values, origin, g.spacing.copy())


# ---------------------------------------------------------------------------
# isotropic position
# ---------------------------------------------------------------------------

def _inv_sqrt(cov) -> np.ndarray:
    w, V = eigendecompose(cov)
    if w[0] <= 1e-10:
        raise DegenerateCovariance(
            f"smallest covariance eigenvalue {w[0]:.3e} is not positive")
    A = V @ np.diag(1.0 / np.sqrt(w)) @ V.T
    return (A + A.T) / 2.0


def isotropize(g: DensityGrid, mean_tol: float = 1e-6, cov_tol: float = 1e-4,
               max_iter: int = 8) -> tuple[DensityGrid, AffineMap]:
    """Affine image with mean 0 and identity covariance.

    Normalizes, then applies x -> C^{-1/2}(x - mean).  Diagonal covariances
    take the exact relabeling path.  General maps resample the grid, which
    biases the measured moments by O(h^2); the whitening is therefore
    iterated, composing the map and resampling the *original* grid each
    round, until the measured mean and covariance meet the tolerances.

    Raises DegenerateCovariance for numerically singular covariance and
    NoConvergence if the iteration stalls.
    """
    gn = normalize(g)
    A = np.eye(g.dim)
    b = np.zeros(g.dim)
    current = gn
    for _ in range(max_iter):
        ms = moments(current)
        dev_mean = float(np.abs(ms.mean).max())
        dev_cov = float(np.abs(ms.cov.entries - np.eye(g.dim)).max())
        if dev_mean <= mean_tol and dev_cov <= cov_tol:
            return current, AffineMap(A, b)
        S = _inv_sqrt(ms.cov)
        A = S @ A
        b = S @ (b - ms.mean)
        # origin shift is an exact relabeling, so diagonal A never interpolates
        shifted = gn.with_origin(gn.origin + np.linalg.solve(A, b))
        current = normalize(linear_image(shifted, A))
    raise NoConvergence("whitening iteration did not reach tolerance")


# ---------------------------------------------------------------------------
# profiles and restrictions
# ---------------------------------------------------------------------------

def _drop_axis(arr: np.ndarray, axis: int) -> np.ndarray:
    return np.delete(arr, axis)


def sup_profile(g: DensityGrid, axis: int) -> ProfileGrid:
    """Pointwise maximum along one axis, as a (d-1)-dimensional grid."""
    if g.dim < 2:
        raise DimensionTooLow("sup_profile needs dim >= 2")
    if not 0 <= axis < g.dim:
        raise DimensionMismatch(f"axis {axis} out of range for dim {g.dim}")
    values = g.values.max(axis=axis)
    grid = DensityGrid(values, _drop_axis(g.origin, axis), _drop_axis(g.spacing, axis))
    return ProfileGrid(grid=grid, axis=axis)


def restrict_hyperplane(g: DensityGrid, axis: int, level: float) -> DensityGrid:
    """Interpolated slice of the density at x_axis = level ((d-1)-dimensional)."""
    if g.dim < 2:
        raise DimensionTooLow("restrict_hyperplane needs dim >= 2")
    if not 0 <= axis < g.dim:
        raise DimensionMismatch(f"axis {axis} out of range for dim {g.dim}")
    o, h, n = float(g.origin[axis]), float(g.spacing[axis]), g.shape[axis]
    t = (level - o) / h
    if t < -1e-9 or t > n - 1 + 1e-9:
        raise LevelOutOfRange(f"level {level} outside the sampled range")
    t = min(max(t, 0.0), float(n - 1))
    i0 = min(int(np.floor(t)), n - 2) if n > 1 else 0
    w = t - i0
    lo = np.take(g.values, i0, axis=axis)
    hi = np.take(g.values, min(i0 + 1, n - 1), axis=axis)
    values = (1.0 - w) * lo + w * hi
    return DensityGrid(values, _drop_axis(g.origin, axis), _drop_axis(g.spacing, axis))


def sup_distance(a: DensityGrid, b: DensityGrid) -> float:
    """Sup-norm distance between two densities, evaluated on the nodes of
    each grid against the interpolation of the other."""
    if a.dim != b.dim:
        raise DimensionMismatch("grids differ in dimension")
    d1 = float(np.abs(a.values - sample_at(b, _spec_nodes(a.spec))).max())
    d2 = float(np.abs(b.values - sample_at(a, _spec_nodes(b.spec))).max())
    return max(d1, d2)


__all__ = [
    "AffineMap", "LinearMap", "ProfileGrid", "convolve", "isotropize",
    "linear_image", "project", "resample", "restrict_hyperplane", "sample_at",
    "sup_distance", "sup_profile", "symmetrize", "tensor_product",
]
