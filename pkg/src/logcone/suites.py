"""Randomized verification suites for the spectral layer.

Seeded generators for covariance test cases plus the two standing suites:
eigenvalue bounds of diagonally mixed sums, and splitting random PSD
decompositions of the identity.  The suite verifiers deliberately check
results against ``numpy.linalg.eigh`` so the package's own Jacobi solver
never grades itself.
"""

from __future__ import annotations

import numpy as np

from .errors import InternalContractViolation
from .spectra import (
    CovMatrix,
    FullDecomposition,
    MiddleEigen,
    mixed_sum_eig_bounds,
    split_covariance,
)


def haar_orthogonal(rng: np.random.Generator, d: int) -> np.ndarray:
    """Haar-distributed orthogonal matrix (QR of a Gaussian with sign fix)."""
    q, r = np.linalg.qr(rng.standard_normal((d, d)))
    return q * np.sign(np.diagonal(r))


def random_cov(rng: np.random.Generator, d: int, lo: float, hi: float) -> CovMatrix:
    """Random symmetric matrix with eigenvalues drawn uniformly in [lo, hi]."""
    q = haar_orthogonal(rng, d)
    eigs = rng.uniform(lo, hi, size=d)
    return CovMatrix.from_array(q @ np.diag(eigs) @ q.T)


def random_identity_decomposition(rng: np.random.Generator, d: int,
                                  n_parts: int) -> list[CovMatrix]:
    """PSD matrices summing to the identity.

    Random positively weighted rank-1 projectors are dealt to the parts and
    the whole family is conjugated by the inverse square root of its sum;
    parts that receive nothing stay zero."""
    k = max(n_parts, d) + d
    vecs = rng.standard_normal((k, d))
    vecs /= np.linalg.norm(vecs, axis=1, keepdims=True)
    weights = rng.uniform(0.2, 1.0, size=k)
    owner = rng.integers(0, n_parts, size=k)
    parts = [np.zeros((d, d)) for _ in range(n_parts)]
    for w, v, i in zip(weights, vecs, owner):
        parts[i] += w * np.outer(v, v)
    total = sum(parts)
    ew, ev = np.linalg.eigh(total)
    whiten = ev @ np.diag(ew ** -0.5) @ ev.T
    return [CovMatrix.from_array(whiten @ p @ whiten) for p in parts]


def run_mixed_sum_suite(seed: int = 0, trials: int = 1000,
                        dims=(2, 3, 5, 8), lo: float = 0.3,
                        hi: float = 2.0) -> dict:
    """Random mixed-sum trials; counts eigenvalue-band violations."""
    rng = np.random.default_rng(seed)
    violations = 0
    total = 0
    for d in dims:
        for _ in range(trials):
            g1 = random_cov(rng, d, lo, hi)
            g2 = random_cov(rng, d, lo, hi)
            w = rng.uniform(0.0, 1.0, size=d)
            v = np.sqrt(1.0 - w * w)
            mn, mx = mixed_sum_eig_bounds(g1, g2, w, v)
            total += 1
            if mn < lo - 1e-9 or mx > hi + 1e-9:
                violations += 1
    return {"suite": "mixed_sum", "seed": seed, "dims": list(dims),
            "trials": total, "violations": violations,
            "pass": violations == 0}


def _verify_split(result, mats: list[np.ndarray], d: int, eps: float) -> bool:
    """Grade a split result against numpy's eigensolver."""
    if isinstance(result, FullDecomposition):
        bases = list(result.subspaces.values())
        if sum(b.shape[1] for b in bases) != d:
            return False
        for i, basis in result.subspaces.items():
            if np.abs(basis.T @ basis - np.eye(basis.shape[1])).max() > 1e-8:
                return False
            for k in range(basis.shape[1]):
                vec = basis[:, k]
                if float(vec @ mats[i] @ vec) <= 1.0 - eps - 1e-9:
                    return False
        for a in range(len(bases)):
            for b in range(a + 1, len(bases)):
                if np.abs(bases[a].T @ bases[b]).max() > 1e-8:
                    return False
        return True
    if not isinstance(result, MiddleEigen):
        return False
    lam = result.eigenvalue
    if not (eps - 1e-9 <= lam <= 1.0 - eps + 1e-9):
        return False
    if not (eps / 2.0 < lam < 1.0 - eps / 2.0):
        return False
    S = sum(mats[i] for i in result.subset)
    if np.abs(S @ result.vector - lam * result.vector).max() > 1e-8:
        return False
    oracle = np.linalg.eigvalsh((S + S.T) / 2.0)
    return bool(np.abs(oracle - lam).min() <= 1e-8)


def run_split_suite(seed: int = 0, trials: int = 1000,
                    dims=(1, 2, 3, 5, 8),
                    eps_fractions=(0.5, 0.9)) -> dict:
    """Random identity decompositions through split_covariance.

    ``trials`` is the total decomposition count, spread evenly over the
    (dim, eps) grid; every result is graded independently."""
    rng = np.random.default_rng(seed)
    cells = [(d, frac) for d in dims for frac in eps_fractions]
    per_cell = max(1, trials // len(cells))
    violations = 0
    total = 0
    for d, frac in cells:
        eps = frac * (d + 1) ** -2
        for _ in range(per_cell):
            parts = random_identity_decomposition(rng, d, int(rng.integers(2, 21)))
            total += 1
            try:
                result = split_covariance(parts, eps)
            except InternalContractViolation:
                violations += 1
                continue
            if not _verify_split(result, [p.entries for p in parts], d, eps):
                violations += 1
    return {"suite": "split_covariance", "seed": seed, "dims": list(dims),
            "eps_fractions": list(eps_fractions), "trials": total,
            "violations": violations, "pass": violations == 0}
