"""Canonical log-concave density generators and demonstration pipelines.

Families: uniform_box, uniform_ball, uniform_simplex, gaussian, laplace,
exponential, triangle.  Generators snap support geometry to the requested
lattice spacing (so convolution partners always share a grid), surround the
support with a two-cell zero margin (so boundary jumps are visible to the
difference-quotient machinery) and normalize.

Defaults give unit variance per axis.  Symmetric families sample the center
plane (odd counts), which keeps symmetrization an exact permutation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BadParameters, NotNormalized, SingularMap
from .grid import DensityGrid, mass, normalize
from .measure_ops import (
    LinearMap,
    convolve,
    isotropize,
    linear_image,
    project,
    sup_distance,
    tensor_product,
)

FAMILY_NAMES = ("uniform_box", "uniform_ball", "uniform_simplex", "gaussian",
                "laplace", "exponential", "triangle")

#: zero-margin cells added around every generated support
PAD = 2
#: generators truncate unbounded tails where the density drops below this
#: fraction of its supremum
TAIL_CUT = 1e-12


@dataclass(frozen=True)
class FamilySpec:
    """Named density family plus grid resolution.

    params: width (box/simplex), sigma, rate (laplace/exponential),
    radius, halfwidth (triangle), centered (exponential).
    """

    name: str
    dim: int
    h: float
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.name not in FAMILY_NAMES:
            raise BadParameters(f"unknown family {self.name!r}")
        if not 1 <= self.dim <= 3:
            raise BadParameters(f"dim must be 1..3, got {self.dim}")
        if not (self.h > 0 and math.isfinite(self.h)):
            raise BadParameters(f"h must be positive, got {self.h}")

    def to_json(self) -> dict:
        return {"name": self.name, "dim": self.dim, "h": self.h,
                "params": dict(self.params)}

    @classmethod
    def from_json(cls, obj) -> "FamilySpec":
        return cls(name=obj["name"], dim=int(obj["dim"]), h=float(obj["h"]),
                   params=dict(obj.get("params", {})))


def _positive(params, key, default) -> float:
    value = float(params.get(key, default))
    if not (value > 0 and math.isfinite(value)):
        raise BadParameters(f"{key} must be positive, got {value}")
    return value


def _per_axis(params, key, default, dim) -> list[float]:
    raw = params.get(key, default)
    if np.isscalar(raw):
        raw = [raw] * dim
    vals = [float(v) for v in raw]
    if len(vals) != dim:
        raise BadParameters(f"{key} needs one entry per axis")
    if any(not (v > 0 and math.isfinite(v)) for v in vals):
        raise BadParameters(f"{key} entries must be positive")
    return vals


def _finish(values: np.ndarray, origin: np.ndarray, h: float) -> DensityGrid:
    pad_width = [(PAD, PAD)] * values.ndim
    values = np.pad(values, pad_width)
    origin = np.asarray(origin, dtype=np.float64) - PAD * h
    grid = DensityGrid(values, origin, np.full(values.ndim, h))
    return normalize(grid)


def _centered_axis(n: int, h: float) -> np.ndarray:
    return (np.arange(n) - (n - 1) / 2.0) * h


def _product_values(axis_values: list[np.ndarray]) -> np.ndarray:
    out = axis_values[0]
    for v in axis_values[1:]:
        out = np.multiply.outer(out, v)
    return out


def _box(dim, h, params) -> tuple[np.ndarray, np.ndarray]:
    widths = _per_axis(params, "width", 2.0 * math.sqrt(3.0), dim)
    counts = [max(1, round(w / h)) for w in widths]
    axis_vals = [np.full(n, 1.0 / (n * h)) for n in counts]
    origin = np.array([-(n - 1) * h / 2.0 for n in counts])
    return _product_values(axis_vals), origin


def _gaussian(dim, h, params) -> tuple[np.ndarray, np.ndarray]:
    sigmas = _per_axis(params, "sigma", 1.0, dim)
    cut = math.sqrt(-2.0 * math.log(TAIL_CUT))
    axis_vals, origin = [], []
    for s in sigmas:
        m = int(math.ceil(cut * s / h))
        x = np.arange(-m, m + 1) * h
        axis_vals.append(np.exp(-x * x / (2 * s * s)) / (s * math.sqrt(2 * math.pi)))
        origin.append(-m * h)
    return _product_values(axis_vals), np.array(origin)


def _laplace(dim, h, params) -> tuple[np.ndarray, np.ndarray]:
    rates = _per_axis(params, "rate", math.sqrt(2.0), dim)
    axis_vals, origin = [], []
    for r in rates:
        m = int(math.ceil(-math.log(TAIL_CUT) / (r * h)))
        x = np.arange(-m, m + 1) * h
        axis_vals.append(0.5 * r * np.exp(-r * np.abs(x)))
        origin.append(-m * h)
    return _product_values(axis_vals), np.array(origin)


def _exponential(dim, h, params) -> tuple[np.ndarray, np.ndarray]:
    rates = _per_axis(params, "rate", 1.0, dim)
    centered = bool(params.get("centered", False))
    axis_vals, origin = [], []
    for r in rates:
        n = int(math.ceil(-math.log(TAIL_CUT) / (r * h)))
        x = (np.arange(n) + 0.5) * h
        axis_vals.append(r * np.exp(-r * x))
        origin.append(0.5 * h - (1.0 / r if centered else 0.0))
    return _product_values(axis_vals), np.array(origin)


def _triangle(dim, h, params) -> tuple[np.ndarray, np.ndarray]:
    halfwidths = _per_axis(params, "halfwidth", math.sqrt(6.0), dim)
    axis_vals, origin = [], []
    for a in halfwidths:
        m = max(1, round(a / h))
        x = np.arange(-m, m + 1) * h
        axis_vals.append(np.maximum(1.0 - np.abs(x) / (m * h), 0.0) / (m * h))
        origin.append(-m * h)
    return _product_values(axis_vals), np.array(origin)


def _ball(dim, h, params) -> tuple[np.ndarray, np.ndarray]:
    radius = _positive(params, "radius", math.sqrt(dim + 2.0))
    if dim == 1:
        return _box(1, h, {"width": 2.0 * radius})
    m = int(math.ceil(radius / h))
    ax = _centered_axis(2 * m + 1, h)
    sq = np.zeros((ax.size,) * dim)
    for k in range(dim):
        shape = [1] * dim
        shape[k] = ax.size
        sq = sq + (ax ** 2).reshape(shape)
    values = (sq <= radius * radius).astype(np.float64)
    origin = np.full(dim, -m * h)
    return values, origin


def _simplex(dim, h, params) -> tuple[np.ndarray, np.ndarray]:
    width = _positive(params, "width",
                      (dim + 1) * math.sqrt((dim + 2.0) / dim))
    n = max(1, round(width / h))
    w = n * h
    x = (np.arange(n) + 0.5) * h
    total = np.zeros((n,) * dim)
    for k in range(dim):
        shape = [1] * dim
        shape[k] = n
        total = total + x.reshape(shape)
    values = (total <= w).astype(np.float64)
    origin = np.full(dim, 0.5 * h)
    return values, origin


_BUILDERS = {
    "uniform_box": _box,
    "uniform_ball": _ball,
    "uniform_simplex": _simplex,
    "gaussian": _gaussian,
    "laplace": _laplace,
    "exponential": _exponential,
    "triangle": _triangle,
}


def generate(spec: FamilySpec) -> DensityGrid:
    """Normalized grid of the named density."""
    values, origin = _BUILDERS[spec.name](spec.dim, spec.h, spec.params)
    return _finish(values, origin, spec.h)


# ---------------------------------------------------------------------------
# corpus helpers
# ---------------------------------------------------------------------------

def corpus_specs() -> list[FamilySpec]:
    """The standing test corpus: seven families spread over dimensions 1-3."""
    return [
        FamilySpec("uniform_box", 1, 0.005),
        FamilySpec("gaussian", 1, 0.005),
        FamilySpec("laplace", 1, 0.005),
        FamilySpec("exponential", 1, 0.005, {"centered": True}),
        FamilySpec("triangle", 1, 0.005),
        FamilySpec("uniform_simplex", 1, 0.005),
        FamilySpec("uniform_box", 2, 0.04),
        FamilySpec("gaussian", 2, 0.04),
        FamilySpec("uniform_ball", 2, 0.04),
        FamilySpec("laplace", 2, 0.08),
        FamilySpec("uniform_simplex", 2, 0.03),
        FamilySpec("uniform_box", 3, 0.1),
        FamilySpec("gaussian", 3, 0.12),
        FamilySpec("uniform_ball", 3, 0.1),
    ]


def corpus() -> list[tuple[str, DensityGrid]]:
    """Generated corpus members, labeled ``name/dim``."""
    return [(f"{s.name}/{s.dim}d", generate(s)) for s in corpus_specs()]


def member_with_variance(name: str, dim: int, h: float,
                         variance: float) -> DensityGrid:
    """Centered family member with the given per-axis variance.

    Used by the variance sweeps: X gets variance v, its partner 1 - v, so
    the convolution is isotropic.  Support geometry snaps to the lattice,
    so measure the actual variance off the grid rather than trusting v.
    Families without a diagonal-covariance centered form are rejected.
    """
    if not 0.0 < variance:
        raise BadParameters(f"variance must be positive, got {variance}")
    s = math.sqrt(variance)
    params: dict
    if name == "uniform_box":
        params = {"width": 2.0 * math.sqrt(3.0) * s}
    elif name == "gaussian":
        params = {"sigma": s}
    elif name == "laplace":
        params = {"rate": math.sqrt(2.0) / s}
    elif name == "exponential":
        params = {"rate": 1.0 / s, "centered": True}
    elif name == "triangle":
        params = {"halfwidth": math.sqrt(6.0) * s}
    elif name == "uniform_ball":
        params = {"radius": math.sqrt(dim + 2.0) * s}
    else:
        raise BadParameters(f"{name} has no centered diagonal-covariance form")
    return generate(FamilySpec(name, dim, h, params))


def isotropic_corpus() -> list[tuple[str, DensityGrid]]:
    """Corpus members brought to isotropic position.

    Restricted to families whose covariance is diagonal on the lattice, so
    the whitening is an exact relabeling and the members are isotropic to
    float precision.
    """
    out = []
    for spec in corpus_specs():
        if spec.name == "uniform_simplex":
            continue
        g, _ = isotropize(generate(spec))
        out.append((f"{spec.name}/{spec.dim}d", g))
    return out


# ---------------------------------------------------------------------------
# Irwin-Hall oracle and the CLT demo
# ---------------------------------------------------------------------------

def irwin_hall_density(n: int, x):
    """Density of the sum of n independent uniform[0,1] variables.

    f_n(x) = 1/(n-1)! * sum_{k<=x} (-1)^k C(n,k) (x-k)^(n-1) on [0, n],
    zero outside.  Vectorized over x.
    """
    if n < 1:
        raise BadParameters(f"n must be >= 1, got {n}")
    arr = np.asarray(x, dtype=np.float64)
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    out = np.zeros_like(arr)
    inside = (arr >= 0.0) & (arr <= float(n))
    for k in range(n + 1):
        m = inside & (arr >= k)
        if not m.any():
            continue
        term = math.comb(n, k) * (arr[m] - k) ** (n - 1)
        out[m] += -term if k % 2 else term
    out /= math.factorial(n - 1)
    np.maximum(out, 0.0, out=out)
    return float(out[0]) if scalar else out


def std_normal_pdf(x):
    x = np.asarray(x, dtype=np.float64)
    return np.exp(-x * x / 2.0) / math.sqrt(2.0 * math.pi)


def clt_diagonal_table(n_max: int, h: float = 0.005) -> list[dict]:
    """Whitened n-fold self-convolutions of uniform[0,1] versus the Gaussian.

    For each n up to n_max, builds the isotropized convolution power on the
    lattice and records the sup-norm distance to the standard normal density
    plus the largest deviation from the closed-form convolution-power
    density.  The distance column is strictly decreasing from n = 2 on.
    """
    if n_max < 2:
        raise BadParameters(f"n_max must be >= 2, got {n_max}")
    base = generate(FamilySpec("uniform_box", 1, h, {"width": 1.0}))
    rows = []
    cur = base
    for n in range(1, n_max + 1):
        if n > 1:
            cur = convolve(cur, base)
        iso, _ = isotropize(cur)
        xs = iso.coords(0)
        sigma = math.sqrt(n / 12.0)
        dist = float(np.abs(iso.values - std_normal_pdf(xs)).max())
        oracle = sigma * irwin_hall_density(n, sigma * xs + n / 2.0)
        dev = float(np.abs(iso.values - oracle).max())
        rows.append({"n": n, "sup_distance": dist, "oracle_dev": dev})
    return rows


# ---------------------------------------------------------------------------
# uniform-box detection and the closure-sequence demo
# ---------------------------------------------------------------------------

def is_uniform_box(g: DensityGrid, tol: float = 0.05) -> bool:
    """Detect a constant density on an axis-aligned box.

    True iff the positive cells fill their bounding box (one boundary cell
    of slack per face) and the values there are constant within ``tol``.
    Grid discretization blurs indicator edges by a cell, so the boundary
    layer is exempt from both conditions.
    """
    if abs(mass(g) - 1.0) > 1e-6:
        raise NotNormalized("detector expects a normalized grid")
    pos = g.values > 0.0
    box = []
    for k in range(g.dim):
        proj = pos.any(axis=tuple(ax for ax in range(g.dim) if ax != k))
        idx = np.flatnonzero(proj)
        box.append((int(idx[0]), int(idx[-1])))
    inner = tuple(slice(lo + 1, hi) for lo, hi in box)
    core = g.values[inner]
    if core.size == 0:
        core = g.values[tuple(slice(lo, hi + 1) for lo, hi in box)]
        core = core[core > 0]
        return bool(core.max() / core.min() <= 1.0 + tol)
    if not (core > 0.0).all():
        return False
    return bool(core.max() / core.min() <= 1.0 + tol)


def _apply_map(g: DensityGrid, M: np.ndarray) -> DensityGrid:
    """Invertible maps push forward; wide or rank-deficient maps must be
    orthogonal projections and route through ``project``."""
    rows, cols = M.shape
    if rows == cols:
        det = float(np.linalg.det(M))
        if abs(det) > 1e-12:
            return linear_image(g, M)
        raise SingularMap("square map is singular; supply projection rows instead")
    return project(g, M)


def closure_sequence_demo(seeds, maps, steps: int) -> list[dict]:
    """Iterate map-then-isotropize over a tensor product of seed densities.

    ``seeds`` are FamilySpecs (or prebuilt grids); ``maps`` cycle over the
    steps.  Each row reports whether the isotropized iterate looks like a
    uniform box and the sup-distance to the previous iterate.
    """
    if steps < 1:
        raise BadParameters("steps must be >= 1")
    grids = [generate(s) if isinstance(s, FamilySpec) else s for s in seeds]
    base = grids[0]
    for g in grids[1:]:
        base = tensor_product(base, g)
    rows = []
    prev = None
    for step in range(1, steps + 1):
        if maps:
            m = maps[(step - 1) % len(maps)]
            M = m.entries if isinstance(m, LinearMap) else np.asarray(m, dtype=np.float64)
            mapped = _apply_map(base, M)
        else:
            mapped = base
        iso, _ = isotropize(normalize(mapped))
        dist = sup_distance(iso, prev) if prev is not None else float("nan")
        rows.append({
            "step": step,
            "is_uniform_box": is_uniform_box(iso),
            "sup_distance": dist,
        })
        prev = iso
    return rows
