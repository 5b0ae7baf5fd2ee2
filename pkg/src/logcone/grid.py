"""Grid-sampled densities: representation, quadrature, moments, concavity checks.

A density is held as point samples on a regular axis-aligned grid; every
integral in the package is the midpoint Riemann sum ``sum(values) * prod(h)``,
treating each sample as the midpoint of its cell.  Dimensions 1 to 3.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    LcgridFormatError,
    NotIsotropic,
    NotNormalized,
    ZeroMass,
)
from .spectra import CovMatrix

MAX_DIM = 3

#: relative tolerance for "this grid is normalized"
NORMALIZED_TOL = 1e-6
#: absolute tolerance on the mean for "this grid is isotropic"
ISO_MEAN_TOL = 1e-6
#: max-norm tolerance on cov - Id for "this grid is isotropic"
ISO_COV_TOL = 1e-4
#: default slack on log-values in the midpoint concavity test
LOG_CONCAVE_TOL = 1e-7


@dataclass(frozen=True)
class GridSpec:
    """Geometry of a grid: per-axis sample counts, first-sample coordinate, step."""

    shape: tuple[int, ...]
    origin: tuple[float, ...]
    spacing: tuple[float, ...]

    @property
    def dim(self) -> int:
        return len(self.shape)

    def coords(self, axis: int) -> np.ndarray:
        return self.origin[axis] + self.spacing[axis] * np.arange(self.shape[axis])


@dataclass(frozen=True, eq=False)
class DensityGrid:
    """Nonnegative density samples on a regular grid.

    values    row-major array, one entry per grid node, all >= 0
    origin    coordinate of the first sample along each axis
    spacing   positive step along each axis

    All-zero grids are constructible (they arise pre-normalization and from
    boundary slices); operations that need actual mass raise ZeroMass or
    NotNormalized instead.
    """

    values: np.ndarray
    origin: np.ndarray
    spacing: np.ndarray

    def __post_init__(self):
        values = np.ascontiguousarray(self.values, dtype=np.float64)
        origin = np.atleast_1d(np.asarray(self.origin, dtype=np.float64))
        spacing = np.atleast_1d(np.asarray(self.spacing, dtype=np.float64))
        if not 1 <= values.ndim <= MAX_DIM:
            raise ValueError(f"grid dimension must be 1..{MAX_DIM}, got {values.ndim}")
        if origin.shape != (values.ndim,) or spacing.shape != (values.ndim,):
            raise ValueError("origin/spacing must have one entry per axis")
        if not np.all(np.isfinite(values)):
            raise ValueError("grid values must be finite")
        if not (np.all(np.isfinite(origin)) and np.all(np.isfinite(spacing))):
            raise ValueError("origin/spacing must be finite")
        if np.any(spacing <= 0):
            raise ValueError("spacing must be positive")
        if np.any(values < 0):
            raise ValueError("grid values must be nonnegative")
        values.flags.writeable = False
        origin.flags.writeable = False
        spacing.flags.writeable = False
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "origin", origin)
        object.__setattr__(self, "spacing", spacing)

    @property
    def dim(self) -> int:
        return self.values.ndim

    @property
    def shape(self) -> tuple[int, ...]:
        return self.values.shape

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacing))

    @property
    def spec(self) -> GridSpec:
        return GridSpec(self.shape, tuple(self.origin), tuple(self.spacing))

    def coords(self, axis: int) -> np.ndarray:
        """Sample coordinates along one axis."""
        return self.origin[axis] + self.spacing[axis] * np.arange(self.shape[axis])

    def meshgrid(self) -> list[np.ndarray]:
        return np.meshgrid(*(self.coords(k) for k in range(self.dim)), indexing="ij")

    def with_values(self, values: np.ndarray) -> "DensityGrid":
        return DensityGrid(values, self.origin.copy(), self.spacing.copy())

    def with_origin(self, origin) -> "DensityGrid":
        return DensityGrid(self.values, np.asarray(origin, dtype=np.float64),
                           self.spacing.copy())


@dataclass(frozen=True)
class MomentSummary:
    """Mean, covariance, sup of the density and Riemann mass of a grid."""

    mean: np.ndarray
    cov: CovMatrix
    sup_density: float
    mass: float


def mass(g: DensityGrid) -> float:
    """Riemann-sum total mass of the grid."""
    return float(g.values.sum()) * g.cell_volume


def normalize(g: DensityGrid) -> DensityGrid:
    """Rescale so the Riemann mass is 1.  Raises ZeroMass on an all-zero grid."""
    m = mass(g)
    if m <= 0.0:
        raise ZeroMass(f"cannot normalize grid of mass {m}")
    return g.with_values(g.values / m)


def moments(g: DensityGrid, tol: float = NORMALIZED_TOL) -> MomentSummary:
    """Mean and covariance by midpoint quadrature.

    The grid must be normalized within ``tol`` (relative); covariance is
    computed from raw second moments and symmetrized exactly.
    """
    m = mass(g)
    if abs(m - 1.0) > tol:
        raise NotNormalized(f"grid mass {m} differs from 1 by more than {tol}")
    d = g.dim
    vol = g.cell_volume
    coords = [g.coords(k) for k in range(d)]
    all_axes = tuple(range(d))

    mean = np.empty(d)
    marg1 = []
    for k in range(d):
        mk = g.values.sum(axis=tuple(ax for ax in all_axes if ax != k))
        marg1.append(mk)
        mean[k] = (mk @ coords[k]) * vol

    raw2 = np.empty((d, d))
    for j in range(d):
        cj = coords[j] - mean[j]
        raw2[j, j] = (marg1[j] @ (cj * cj)) * vol
        for k in range(j + 1, d):
            mjk = g.values.sum(axis=tuple(ax for ax in all_axes if ax not in (j, k)))
            raw2[j, k] = (cj @ mjk @ (coords[k] - mean[k])) * vol
            raw2[k, j] = raw2[j, k]

    return MomentSummary(mean=mean, cov=CovMatrix(raw2),
                         sup_density=float(g.values.max()), mass=m)


def is_isotropic(g: DensityGrid, mean_tol: float = ISO_MEAN_TOL,
                 cov_tol: float = ISO_COV_TOL) -> bool:
    """True when the grid is normalized with mean ~0 and covariance ~Id."""
    try:
        ms = moments(g)
    except NotNormalized:
        return False
    dev = np.abs(ms.cov.entries - np.eye(g.dim)).max()
    return bool(np.abs(ms.mean).max() <= mean_tol and dev <= cov_tol)


def isotropic_constant(g: DensityGrid, mean_tol: float = ISO_MEAN_TOL,
                       cov_tol: float = ISO_COV_TOL) -> float:
    """(sup of the density)**(1/dim) for an isotropic grid."""
    if not is_isotropic(g, mean_tol=mean_tol, cov_tol=cov_tol):
        raise NotIsotropic("grid is not isotropic within tolerance")
    return float(g.values.max()) ** (1.0 / g.dim)


# ---------------------------------------------------------------------------
# log-concavity verification
# ---------------------------------------------------------------------------

def _direction_steps(dim: int, directions: str) -> list[tuple[int, ...]]:
    axes = [tuple(1 if k == a else 0 for k in range(dim)) for a in range(dim)]
    if directions == "axes":
        return axes
    if directions in ("all", "axes+diagonals"):
        if dim == 1:
            return axes
        diagonals = []
        # main diagonals: first component +1, the rest free in {-1, +1}
        rest = dim - 1
        for bits in range(2 ** rest):
            step = [1] + [1 if (bits >> k) & 1 == 0 else -1 for k in range(rest)]
            diagonals.append(tuple(step))
        return axes + diagonals
    raise ValueError(f"unknown direction set {directions!r}")


def _triple_slices(shape, step):
    """Slices selecting x-step, x, x+step triples along an index direction."""
    lo, mid, hi = [], [], []
    for n, s in zip(shape, step):
        if s == 0:
            lo.append(slice(None)); mid.append(slice(None)); hi.append(slice(None))
        elif n < 3:
            return None
        elif s == 1:
            lo.append(slice(0, -2)); mid.append(slice(1, -1)); hi.append(slice(2, None))
        else:
            lo.append(slice(2, None)); mid.append(slice(1, -1)); hi.append(slice(0, -2))
    return tuple(lo), tuple(mid), tuple(hi)


def _worst_violation(logv, pos, step) -> float:
    sl = _triple_slices(logv.shape, step)
    if sl is None:
        return -np.inf
    lo, mid, hi = sl
    ok = pos[lo] & pos[mid] & pos[hi]
    if not ok.any():
        return -np.inf
    viol = logv[lo][ok] + logv[hi][ok] - 2.0 * logv[mid][ok]
    return float(viol.max())


def _shift_mask(mask, step):
    """Mask translated by +step in index space, zero-filled at the boundary."""
    out = np.zeros_like(mask)
    src, dst = [], []
    for n, s in zip(mask.shape, step):
        if s == 0:
            src.append(slice(None)); dst.append(slice(None))
        elif s == 1:
            src.append(slice(0, n - 1)); dst.append(slice(1, n))
        else:
            src.append(slice(1, n)); dst.append(slice(0, n - 1))
    out[tuple(dst)] = mask[tuple(src)]
    return out


def _has_interior_zero(pos, step) -> bool:
    """True when some line in direction ``step`` has a zero between positives.

    A line's positive cells are contiguous iff the line is entered (zero or
    grid edge followed by a positive cell) at most once, so we count entry
    transitions per line instead of scanning reachability.
    """
    enter = pos & ~_shift_mask(pos, step)
    cells = np.argwhere(enter)
    if cells.shape[0] <= 1:
        return False
    sv = np.asarray(step)
    axis = int(np.flatnonzero(sv)[0])
    t = cells[:, axis] * sv[axis]
    keys = cells - t[:, None] * sv[None, :]
    uniq = np.unique(keys, axis=0)
    return uniq.shape[0] < cells.shape[0]


def check_log_concave(g: DensityGrid, directions: str = "axes",
                      tol: float = LOG_CONCAVE_TOL) -> tuple[bool, float]:
    """Verify grid log-concavity along sampled lines.

    For every line in the requested index directions (``"axes"`` or
    ``"axes+diagonals"``/``"all"``) and every consecutive triple of strictly
    positive samples, tests 2*log f(x) >= log f(x-s) + log f(x+s) - tol, and
    that the positive cells on each line are contiguous.

    Returns (pass, worst) where ``worst`` is the largest midpoint log excess
    (<= tol means pass); a support gap forces worst = inf.  Reports, never
    raises.
    """
    pos = g.values > 0.0
    with np.errstate(divide="ignore"):
        logv = np.log(g.values)
    worst = -np.inf
    connected = True
    for step in _direction_steps(g.dim, directions):
        worst = max(worst, _worst_violation(logv, pos, step))
        if connected and _has_interior_zero(pos, step):
            connected = False
    if not connected:
        return False, np.inf
    if worst == -np.inf:
        worst = 0.0
    return worst <= tol, worst


# ---------------------------------------------------------------------------
# LCGRID v1 text format
# ---------------------------------------------------------------------------

def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def write_lcgrid(g: DensityGrid, path) -> None:
    """Write the grid in the LCGRID v1 text format (17 significant digits)."""
    lines = [
        "LCGRID v1",
        f"dim {g.dim}",
        "shape " + " ".join(str(n) for n in g.shape),
        "origin " + " ".join(_fmt(o) for o in g.origin),
        "spacing " + " ".join(_fmt(h) for h in g.spacing),
    ]
    with open(path, "w") as fh:
        fh.write("\n".join(lines))
        fh.write("\n")
        for v in g.values.reshape(-1):
            fh.write(_fmt(v))
            fh.write("\n")


def read_lcgrid(path) -> DensityGrid:
    """Parse an LCGRID v1 file written by :func:`write_lcgrid`."""
    with open(path) as fh:
        text = fh.read()
    raw = text.splitlines()
    if len(raw) < 5:
        raise LcgridFormatError("truncated LCGRID file")
    if raw[0].strip() != "LCGRID v1":
        raise LcgridFormatError(f"bad magic line {raw[0]!r}")

    def fields(line, key):
        parts = line.split()
        if not parts or parts[0] != key:
            raise LcgridFormatError(f"expected {key!r} line, got {line!r}")
        return parts[1:]

    try:
        dim = int(fields(raw[1], "dim")[0])
        shape = tuple(int(t) for t in fields(raw[2], "shape"))
        origin = np.array([float(t) for t in fields(raw[3], "origin")])
        spacing = np.array([float(t) for t in fields(raw[4], "spacing")])
        values = np.array([float(t) for t in raw[5:] if t.strip()])
    except ValueError as exc:
        raise LcgridFormatError(str(exc)) from exc
    if len(shape) != dim or len(origin) != dim or len(spacing) != dim:
        raise LcgridFormatError("dim does not match header vectors")
    count = int(np.prod(shape))
    if values.size != count:
        raise LcgridFormatError(f"expected {count} values, found {values.size}")
    try:
        return DensityGrid(values.reshape(shape), origin, spacing)
    except ValueError as exc:
        raise LcgridFormatError(str(exc)) from exc
