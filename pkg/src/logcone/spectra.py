"""Covariance matrices, eigen bounds for diagonally mixed sums, and the
constructive splitting of an identity decomposition.

``split_covariance`` takes PSD matrices summing to the identity and either
extracts, for every input with near-unit eigenvalues, the subspace they span
(when those subspaces jointly fill the whole space), or produces a subset of
inputs whose partial sum has a genuinely intermediate eigenvalue.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import (
    DiagonalConstraintViolated,
    EpsOutOfRange,
    InternalContractViolation,
    NoConvergence,
    NotIdentitySum,
    NotPSD,
)

PSD_TOL = 1e-10
IDENTITY_SUM_TOL = 1e-8
#: slack pushing borderline "large eigenvalue" comparisons toward inclusion
LARGE_EIG_SLACK = 1e-12


@dataclass(frozen=True, eq=False)
class CovMatrix:
    """Symmetric d x d matrix with eigendecomposition access.

    The entries must be exactly symmetric; use :meth:`from_array` to
    symmetrize float input first.
    """

    entries: np.ndarray

    def __post_init__(self):
        entries = np.ascontiguousarray(self.entries, dtype=np.float64)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise ValueError("CovMatrix entries must be square")
        if not np.all(np.isfinite(entries)):
            raise ValueError("CovMatrix entries must be finite")
        if not np.array_equal(entries, entries.T):
            raise ValueError("CovMatrix entries must be exactly symmetric")
        entries.flags.writeable = False
        object.__setattr__(self, "entries", entries)

    @classmethod
    def from_array(cls, a) -> "CovMatrix":
        a = np.asarray(a, dtype=np.float64)
        return cls((a + a.T) / 2.0)

    @property
    def d(self) -> int:
        return self.entries.shape[0]

    def eigenvalues(self) -> np.ndarray:
        return eigendecompose(self)[0]

    def __getitem__(self, idx):
        return self.entries[idx]


def _as_matrix(a) -> np.ndarray:
    if isinstance(a, CovMatrix):
        return a.entries
    return np.asarray(a, dtype=np.float64)


def eigendecompose(A, tol: float = 1e-12) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and orthonormal eigenvector columns of a
    symmetric matrix, via cyclic Jacobi rotations.

    Deterministic up to the solver: eigenvectors get a fixed sign convention
    (largest-magnitude component positive).  Raises NoConvergence if the
    sweep limit is hit or the residual contract fails.
    """
    M = _as_matrix(A)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError("matrix must be square")
    if not np.allclose(M, M.T, rtol=0, atol=1e-12 * max(1.0, np.abs(M).max())):
        raise ValueError("matrix must be symmetric")
    M = (M + M.T) / 2.0
    w, V, converged = _kernels.jacobi_sweeps(M, tol)
    if not converged:
        raise NoConvergence("Jacobi sweeps did not reduce the off-diagonal norm")
    order = np.argsort(w, kind="stable")
    w = w[order]
    V = V[:, order]
    for k in range(V.shape[1]):
        j = int(np.argmax(np.abs(V[:, k])))
        if V[j, k] < 0:
            V[:, k] = -V[:, k]
    norm = np.abs(M).max()
    resid = np.abs(M @ V - V * w[None, :]).max()
    if norm > 0 and resid > 1e-9 * norm:
        raise NoConvergence(f"eigen residual {resid:.3e} exceeds contract")
    return w, V


def mixed_sum_eig_bounds(G1, G2, w, v) -> tuple[float, float]:
    """Extreme eigenvalues of W*G1*W + V*G2*V for diagonal W, V with
    W^2 + V^2 = Id.

    ``w`` and ``v`` are the diagonals.  If the eigenvalues of G1 and G2 all
    lie in [c, C], the result provably stays in [c, C] as well.
    """
    G1 = _as_matrix(G1)
    G2 = _as_matrix(G2)
    w = np.asarray(w, dtype=np.float64).reshape(-1)
    v = np.asarray(v, dtype=np.float64).reshape(-1)
    if w.shape != v.shape or w.shape[0] != G1.shape[0]:
        raise DiagonalConstraintViolated("diagonal size mismatch")
    if np.abs(w * w + v * v - 1.0).max() > 1e-10:
        raise DiagonalConstraintViolated("W^2 + V^2 differs from the identity")
    M = w[:, None] * G1 * w[None, :] + v[:, None] * G2 * v[None, :]
    eigs = eigendecompose(CovMatrix.from_array(M))[0]
    return float(eigs[0]), float(eigs[-1])


# ---------------------------------------------------------------------------
# identity-decomposition splitting
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class FullDecomposition:
    """Orthonormal bases, keyed by input index, of the near-unit-eigenvalue
    subspaces; their dimensions sum to d."""

    subspaces: dict[int, np.ndarray]

    @property
    def total_dim(self) -> int:
        return sum(b.shape[1] for b in self.subspaces.values())


@dataclass(frozen=True, eq=False)
class MiddleEigen:
    """A subset of inputs whose partial covariance sum has an eigenvalue
    well inside (0, 1)."""

    subset: tuple[int, ...]
    eigenvalue: float
    vector: np.ndarray


SplitResult = FullDecomposition | MiddleEigen


def _validate_split(result: SplitResult, mats: list[np.ndarray], d: int,
                    eps: float) -> None:
    if isinstance(result, FullDecomposition):
        if result.total_dim != d:
            raise InternalContractViolation("subspace dimensions do not sum to d")
        for i, basis in result.subspaces.items():
            A = mats[i]
            gram = basis.T @ basis
            if np.abs(gram - np.eye(basis.shape[1])).max() > 1e-10:
                raise InternalContractViolation("basis not orthonormal")
            for k in range(basis.shape[1]):
                vec = basis[:, k]
                if float(vec @ A @ vec) <= 1.0 - eps - 1e-9:
                    raise InternalContractViolation("Rayleigh quotient below 1-eps")
        return
    lam = result.eigenvalue
    if not (eps - 1e-9 <= lam <= 1.0 - eps + 1e-9):
        raise InternalContractViolation(f"eigenvalue {lam} outside [eps, 1-eps]")
    if not (eps / 2.0 < lam < 1.0 - eps / 2.0):
        raise InternalContractViolation(f"eigenvalue {lam} outside (eps/2, 1-eps/2)")
    S = sum(mats[i] for i in result.subset)
    resid = np.abs(S @ result.vector - lam * result.vector).max()
    if resid > 1e-8:
        raise InternalContractViolation(f"eigenvector residual {resid:.3e}")


def split_covariance(matrices, eps: float) -> SplitResult:
    """Split a PSD decomposition of the identity.

    Algorithm: (1) if any single input has an eigenvalue strictly inside
    (eps, 1-eps), report it; (2) if the eigenvectors with eigenvalues above
    1-eps jointly span the space, return those subspaces; (3) otherwise
    accumulate the inputs with no large eigenvalue until the trace budget
    d*eps is passed, and report the top eigenvalue of that partial sum
    (guaranteed to land in [eps, 2*d*eps]).

    Preconditions: 0 < eps < (d+1)**-2, inputs PSD and summing to Id.
    The returned result is re-checked against its own invariants; a failure
    raises InternalContractViolation (numerical breakdown).
    """
    mats = [_as_matrix(m) for m in matrices]
    if not mats:
        raise NotIdentitySum("no matrices supplied")
    d = mats[0].shape[0]
    if not (0.0 < eps < (d + 1) ** -2):
        raise EpsOutOfRange(f"eps must lie in (0, {(d + 1) ** -2:.6g}), got {eps}")
    total = np.zeros((d, d))
    for m in mats:
        if m.shape != (d, d):
            raise NotIdentitySum("matrices must share one dimension")
        total += m
    if np.abs(total - np.eye(d)).max() > IDENTITY_SUM_TOL:
        raise NotIdentitySum("matrices do not sum to the identity")

    decomps = [eigendecompose(CovMatrix.from_array(m)) for m in mats]
    for w, _ in decomps:
        if w[0] < -PSD_TOL:
            raise NotPSD(f"eigenvalue {w[0]} below PSD tolerance")

    large_cut = 1.0 - eps - LARGE_EIG_SLACK

    # step 1: one input already exposes a middle eigenvalue
    for i, (w, V) in enumerate(decomps):
        inside = (w > eps + LARGE_EIG_SLACK) & (w < large_cut)
        if inside.any():
            idx = np.flatnonzero(inside)
            k = idx[int(np.argmin(np.abs(w[idx] - 0.5)))]
            result = MiddleEigen(subset=(i,), eigenvalue=float(w[k]),
                                 vector=V[:, k].copy())
            _validate_split(result, mats, d, eps)
            return result

    # step 2: large-eigenvalue subspaces fill the space
    large = [np.flatnonzero(w > large_cut) for w, _ in decomps]
    if sum(len(ix) for ix in large) == d:
        subspaces = {i: decomps[i][1][:, ix].copy()
                     for i, ix in enumerate(large) if len(ix)}
        result = FullDecomposition(subspaces=subspaces)
        _validate_split(result, mats, d, eps)
        return result

    # step 3: accumulate trace over the inputs with no large eigenvalue
    order = [i for i, ix in enumerate(large) if len(ix) == 0] + \
            [i for i, ix in enumerate(large) if len(ix) > 0]
    budget = d * eps
    acc = 0.0
    subset = []
    for i in order:
        subset.append(i)
        acc += float(np.trace(mats[i]))
        if acc >= budget:
            break
    else:
        raise InternalContractViolation("trace budget never reached")
    S = CovMatrix.from_array(sum(mats[i] for i in subset))
    w, V = eigendecompose(S)
    result = MiddleEigen(subset=tuple(subset), eigenvalue=float(w[-1]),
                         vector=V[:, -1].copy())
    _validate_split(result, mats, d, eps)
    return result


# ---------------------------------------------------------------------------
# JSON wire formats
# ---------------------------------------------------------------------------

def split_request_from_json(obj) -> tuple[list[CovMatrix], float]:
    """Parse ``{"d": d, "matrices": [[row-major], ...], "eps": e}``."""
    d = int(obj["d"])
    eps = float(obj["eps"])
    mats = [CovMatrix.from_array(np.asarray(m, dtype=np.float64).reshape(d, d))
            for m in obj["matrices"]]
    return mats, eps


def split_result_to_json(result: SplitResult) -> dict:
    if isinstance(result, FullDecomposition):
        return {
            "variant": "full_decomposition",
            "subspaces": {str(i): basis.T.tolist()
                          for i, basis in sorted(result.subspaces.items())},
        }
    return {
        "variant": "middle_eigen",
        "subset": list(result.subset),
        "lambda": result.eigenvalue,
        "vector": result.vector.tolist(),
    }
