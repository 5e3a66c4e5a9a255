"""Dense linear-algebra kernels shared by every solver.

Thin, contract-checked wrappers around LAPACK (via numpy): full SVD with a
reproducible sign convention, best rank-r truncation, positive definite
square roots and inverse square roots, Moore-Penrose pseudoinverses, and the
left-null-space projector I - G G^+. All arithmetic is float64; results are
deterministic for bit-identical inputs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import tolerances as tol
from .errors import NoConvergence, NotPositiveDefinite, NotSymmetric, RankOutOfRange


@dataclass(frozen=True)
class SvdFactors:
    """Full SVD ``M = U diag(sigma) V^T`` with orthogonal U, V.

    ``sigma`` is nonincreasing with length min(rows, cols); U and V are
    square. Singular vectors are sign-normalized so the largest-magnitude
    entry of each left singular vector is positive.
    """

    u: np.ndarray
    sigma: np.ndarray
    v: np.ndarray

    def reconstruct(self) -> np.ndarray:
        k = self.sigma.size
        return (self.u[:, :k] * self.sigma) @ self.v[:, :k].T


def _flip_to_positive(vecs: np.ndarray, start: int) -> None:
    # normalize the sign of unpaired basis columns (null-space completions)
    for i in range(start, vecs.shape[1]):
        j = int(np.argmax(np.abs(vecs[:, i])))
        if vecs[j, i] < 0:
            vecs[:, i] = -vecs[:, i]


def svd(m: np.ndarray) -> SvdFactors:
    """Full SVD with deterministic signs.

    Raises NoConvergence if the underlying iteration fails (ill-conditioned
    input or an upstream bug); numpy's divide-and-conquer driver converges
    for all finite inputs in practice.
    """
    m = np.asarray(m, dtype=float)
    try:
        u, s, vt = np.linalg.svd(m, full_matrices=True)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(f"SVD did not converge for shape {m.shape}") from exc
    v = vt.T.copy()
    u = u.copy()
    for i in range(s.size):
        j = int(np.argmax(np.abs(u[:, i])))
        if u[j, i] < 0:
            u[:, i] = -u[:, i]
            v[:, i] = -v[:, i]
    _flip_to_positive(u, s.size)
    _flip_to_positive(v, s.size)
    return SvdFactors(u=u, sigma=s, v=v)


def singular_values(m: np.ndarray) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    try:
        return np.linalg.svd(m, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(f"SVD did not converge for shape {m.shape}") from exc


def rank_cutoff(sigma: np.ndarray, shape: tuple[int, int]) -> float:
    """Threshold below which singular values count as zero."""
    if sigma.size == 0:
        return 0.0
    return tol.RANK_CUTOFF_REL * float(sigma[0]) * max(shape)


def numerical_rank(m: np.ndarray) -> int:
    m = np.asarray(m, dtype=float)
    if m.size == 0:
        return 0
    s = singular_values(m)
    return int(np.count_nonzero(s > rank_cutoff(s, m.shape)))


def best_rank_r(m: np.ndarray, r: int) -> np.ndarray:
    """Closest (Frobenius) matrix of rank <= r: keep the top r singular triples."""
    m = np.asarray(m, dtype=float)
    if r < 0 or r > min(m.shape):
        raise RankOutOfRange(f"rank {r} outside [0, {min(m.shape)}]")
    if r == 0:
        return np.zeros_like(m)
    f = svd(m)
    return (f.u[:, :r] * f.sigma[:r]) @ f.v[:, :r].T


def _check_symmetric(m: np.ndarray) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise NotSymmetric(f"expected a square matrix, got shape {m.shape}")
    scale = max(1.0, float(np.linalg.norm(m)))
    if np.linalg.norm(m - m.T) > tol.SYMMETRY * scale:
        raise NotSymmetric("matrix is not symmetric within tolerance")
    return m


def _pd_eigh(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    m = _check_symmetric(m)
    w, vecs = np.linalg.eigh((m + m.T) / 2.0)
    if w[-1] <= 0 or w[0] <= tol.PD_EIG_REL * w[-1]:
        raise NotPositiveDefinite(
            f"eigenvalue range [{w[0]:.3e}, {w[-1]:.3e}] fails the positive-definite check"
        )
    return w, vecs


def pd_sqrt(m: np.ndarray) -> np.ndarray:
    """Symmetric positive definite square root P with P @ P = M."""
    w, vecs = _pd_eigh(m)
    p = (vecs * np.sqrt(w)) @ vecs.T
    return (p + p.T) / 2.0


def pd_inv_sqrt(m: np.ndarray) -> np.ndarray:
    """Inverse of the positive definite square root, M^(-1/2)."""
    w, vecs = _pd_eigh(m)
    p = (vecs / np.sqrt(w)) @ vecs.T
    return (p + p.T) / 2.0


def pinv(m: np.ndarray) -> np.ndarray:
    """Moore-Penrose pseudoinverse via SVD with the shared rank cutoff."""
    m = np.asarray(m, dtype=float)
    f = svd(m)
    cutoff = rank_cutoff(f.sigma, m.shape)
    inv = np.zeros_like(f.sigma)
    keep = f.sigma > cutoff
    inv[keep] = 1.0 / f.sigma[keep]
    k = f.sigma.size
    return (f.v[:, :k] * inv) @ f.u[:, :k].T


def left_null_projector(g: np.ndarray) -> np.ndarray:
    """Projector Pi = I - G G^+ onto the orthogonal complement of col(G).

    Any W satisfies (W @ Pi) @ G = 0; Pi is symmetric and idempotent.
    """
    g = np.asarray(g, dtype=float)
    proj = np.eye(g.shape[0]) - g @ pinv(g)
    return (proj + proj.T) / 2.0
