"""Closed-form global optimizers for invariant rank-bounded regression.

Three routes to an invariant low-rank map W minimizing (1/n)||WX - Y||_F^2:

* hard-wired: constrain W G = 0 and rank(W) <= r; the optimum is the best
  rank-r approximation of the whitened, null-space-projected target, mapped
  back through P^-1 with P = (X X^T)^(1/2);
* regularized: penalize lambda ||W G||_F^2; the optimum whitens by
  B(lambda) = (I + n lambda G~ G~^T)^(1/2) instead of projecting;
* data augmentation: average the risk over the group orbit of X; the
  optimum whitens by Q = (sum_g rho(g) X X^T rho(g)^T)^(1/2).

The module also traces the regularization path, enumerates every critical
point of each problem on the rank-r variety, and computes the
invariant/non-invariant decomposition of an arbitrary W.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import linalg
from . import tolerances as tol
from .errors import (
    DegenerateSpectrum,
    InvalidGrid,
    NotPositiveDefinite,
    ShapeMismatch,
    SingularData,
    TooManySubsets,
)
from .groups import ConstraintMatrix, GroupRep, elements, group_average, invariance_constraint

WARN_RANK_VACUOUS = "RankConstraintVacuous"
WARN_RANK_ASSUMPTION = "RankAssumptionViolated"
WARN_NON_UNIQUE = "NonUniqueOptimum"
WARN_GAP_SMALL = "SpectralGapSmall"
FLAG_FILLING = "Filling"
FLAG_NON_FILLING = "NonFilling"


@dataclass(frozen=True)
class RegressionProblem:
    """Data (X, Y), a constraint (matrix G or group rep), a rank bound, and lambda.

    X X^T must be positive definite (full-row-rank data). Construction
    derives the constraint from the rep when only a rep is given, and
    attaches classification flags: Filling / NonFilling for the rank bound
    against min(d0, dL), and RankConstraintVacuous when r >= nullity(G).
    """

    x: np.ndarray
    y: np.ndarray
    r: int
    constraint: ConstraintMatrix | None = None
    rep: GroupRep | None = None
    lam: float = 0.0
    flags: tuple[str, ...] = field(init=False, default=())

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        y = np.asarray(self.y, dtype=float)
        if x.ndim != 2 or y.ndim != 2 or x.shape[1] != y.shape[1]:
            raise ShapeMismatch(f"X {x.shape} and Y {y.shape} must share a sample axis")
        if self.r < 0:
            raise ValueError(f"rank bound must be >= 0, got {self.r}")
        if self.lam < 0:
            raise ValueError(f"lambda must be >= 0, got {self.lam}")
        if self.constraint is None and self.rep is None:
            raise ValueError("need a ConstraintMatrix or a GroupRep")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        w = np.linalg.eigvalsh(x @ x.T)
        if w[-1] <= 0 or w[0] <= tol.PD_EIG_REL * w[-1]:
            raise SingularData("X X^T is not positive definite; supply full-row-rank data")
        constraint = self.constraint
        if constraint is None:
            constraint = invariance_constraint(self.rep)
            object.__setattr__(self, "constraint", constraint)
        if constraint.dim != x.shape[0]:
            raise ShapeMismatch(
                f"constraint dimension {constraint.dim} does not match d0 = {x.shape[0]}"
            )
        flags = [FLAG_NON_FILLING if self.r < min(self.d0, self.dl) else FLAG_FILLING]
        if self.r >= constraint.nullity:
            flags.append(WARN_RANK_VACUOUS)
        object.__setattr__(self, "flags", tuple(flags))

    @property
    def d0(self) -> int:
        return self.x.shape[0]

    @property
    def dl(self) -> int:
        return self.y.shape[0]

    @property
    def n(self) -> int:
        return self.x.shape[1]


@dataclass(frozen=True)
class RankBoundedSolution:
    """An end-to-end matrix with its objective value and diagnostics."""

    w: np.ndarray
    loss: float
    rank: int
    invariance_residual: float
    warnings: tuple[str, ...]


@dataclass(frozen=True)
class CriticalPoint:
    """One critical point of the rank-constrained problem.

    ``loss`` is the transformed-space value sum_{i not in I} sigma_i^2 of the
    whitened target; ``index_set`` stores 0-based indices into its
    nonincreasing singular values.
    """

    w: np.ndarray
    index_set: tuple[int, ...]
    loss: float
    is_global_min: bool


@dataclass(frozen=True)
class PathSample:
    """One point of the regularization path."""

    lam: float
    w: np.ndarray
    distance_to_inv: float
    warnings: tuple[str, ...]


def _constraint_entries(g) -> np.ndarray:
    return g.entries if isinstance(g, ConstraintMatrix) else np.asarray(g, dtype=float)


def _whiten(problem: RegressionProblem) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """P^-1, Z = Y X^T P^-1, and G~ = P^-1 G."""
    try:
        p_inv = linalg.pd_inv_sqrt(problem.x @ problem.x.T)
    except NotPositiveDefinite as exc:
        raise SingularData(str(exc)) from exc
    z = problem.y @ problem.x.T @ p_inv
    g_t = p_inv @ problem.constraint.entries
    return p_inv, z, g_t


def _truncate(f: linalg.SvdFactors, r: int) -> np.ndarray:
    if r == 0:
        return np.zeros((f.u.shape[0], f.v.shape[0]))
    return (f.u[:, :r] * f.sigma[:r]) @ f.v[:, :r].T


def _truncation_warnings(f: linalg.SvdFactors, r: int, shape: tuple[int, int]) -> list[str]:
    out = []
    cutoff = linalg.rank_cutoff(f.sigma, shape)
    if int(np.count_nonzero(f.sigma > cutoff)) <= r:
        out.append(WARN_RANK_ASSUMPTION)
    if 0 < r < f.sigma.size and f.sigma[r - 1] <= f.sigma[r] * (1.0 + tol.SPECTRAL_GAP_REL):
        out.append(WARN_NON_UNIQUE)
    return out


def _problem_warnings(problem: RegressionProblem) -> list[str]:
    return [WARN_RANK_VACUOUS] if WARN_RANK_VACUOUS in problem.flags else []


def _finish(problem: RegressionProblem, w: np.ndarray, loss: float,
            warnings: list[str]) -> RankBoundedSolution:
    residual = float(np.linalg.norm(w @ problem.constraint.entries))
    return RankBoundedSolution(
        w=w,
        loss=float(loss),
        rank=linalg.numerical_rank(w),
        invariance_residual=residual,
        warnings=tuple(warnings),
    )


def solve_constrained(problem: RegressionProblem) -> RankBoundedSolution:
    """Global optimum of the hard-constrained problem (W G = 0, rank <= r).

    Projects the whitened target Z onto the left null space of G~, truncates
    to rank r, and maps back through P^-1.
    """
    p_inv, z, g_t = _whiten(problem)
    zbar = z @ linalg.left_null_projector(g_t)
    f = linalg.svd(zbar)
    warnings = _problem_warnings(problem) + _truncation_warnings(f, problem.r, zbar.shape)
    w = _truncate(f, problem.r) @ p_inv
    loss = empirical_risk(w, problem.x, problem.y)
    return _finish(problem, w, loss, warnings)


def _regularized_with_spectrum(
    problem: RegressionProblem, lam: float
) -> tuple[RankBoundedSolution, np.ndarray]:
    p_inv, z, g_t = _whiten(problem)
    b_inv = linalg.pd_inv_sqrt(
        np.eye(problem.d0) + problem.n * lam * (g_t @ g_t.T)
    )
    zbar = z @ b_inv
    f = linalg.svd(zbar)
    warnings = _problem_warnings(problem) + _truncation_warnings(f, problem.r, zbar.shape)
    w = _truncate(f, problem.r) @ b_inv @ p_inv
    loss = empirical_risk(w, problem.x, problem.y, g=problem.constraint, lam=lam)
    return _finish(problem, w, loss, warnings), f.sigma


def solve_regularized(problem: RegressionProblem) -> RankBoundedSolution:
    """Global optimum of the penalized problem (+ lambda ||W G||_F^2, rank <= r).

    The reported loss is the penalized objective. At lambda = 0 this is the
    plain reduced-rank regression solution.
    """
    solution, _ = _regularized_with_spectrum(problem, problem.lam)
    return solution


def _augmented_target(problem: RegressionProblem) -> tuple[np.ndarray, np.ndarray]:
    """Z_da = |G| Y X^T Gbar^T Q^-1 and the right factor Q^-1."""
    if problem.rep is None:
        raise ValueError("augmented mode needs a GroupRep on the problem")
    rep = problem.rep
    xxt = problem.x @ problem.x.T
    q2 = sum(g @ xxt @ g.T for g in elements(rep))
    try:
        q_inv = linalg.pd_inv_sqrt(q2)
    except NotPositiveDefinite as exc:
        raise SingularData(str(exc)) from exc
    gbar = group_average(rep)
    zbar = rep.order * problem.y @ problem.x.T @ gbar.T @ q_inv
    return zbar, q_inv


def augmented_risk(w: np.ndarray, x: np.ndarray, y: np.ndarray, rep: GroupRep) -> float:
    """Orbit-averaged risk (1/(n|G|)) sum_g ||W rho(g) X - Y||_F^2."""
    n = x.shape[1]
    total = sum(float(np.linalg.norm(w @ (g @ x) - y) ** 2) for g in elements(rep))
    return total / (n * rep.order)


def solve_augmented(problem: RegressionProblem) -> RankBoundedSolution:
    """Global optimum of the orbit-averaged (data augmentation) problem.

    For unitary representations the result is an invariant map and equals
    the hard-constrained optimum.
    """
    zbar, q_inv = _augmented_target(problem)
    f = linalg.svd(zbar)
    warnings = _problem_warnings(problem) + _truncation_warnings(f, problem.r, zbar.shape)
    w = _truncate(f, problem.r) @ q_inv
    loss = augmented_risk(w, problem.x, problem.y, problem.rep)
    return _finish(problem, w, loss, warnings)


def regularization_path(problem: RegressionProblem, lambdas) -> list[PathSample]:
    """Penalized optima along an increasing grid of positive lambdas.

    Each sample records the Frobenius distance to the hard-constrained
    optimum; the path converges to it as lambda grows. SpectralGapSmall is
    attached wherever sigma_r - sigma_{r+1} < 1e-8 sigma_1 of the whitened
    target (truncation, hence the path, is numerically fragile there).
    """
    lams = [float(v) for v in lambdas]
    if not lams:
        raise InvalidGrid("lambda grid is empty")
    if any(v <= 0 for v in lams):
        raise InvalidGrid("lambda grid must contain positive values only")
    if any(b <= a for a, b in zip(lams, lams[1:])):
        raise InvalidGrid("lambda grid must be strictly increasing")
    w_inv = solve_constrained(problem).w
    samples = []
    for lam in lams:
        solution, sigma = _regularized_with_spectrum(problem, lam)
        warnings = list(solution.warnings)
        r = problem.r
        if 0 < r < sigma.size and sigma[r - 1] - sigma[r] < tol.SPECTRAL_GAP_REL * sigma[0]:
            warnings.append(WARN_GAP_SMALL)
        samples.append(
            PathSample(
                lam=lam,
                w=solution.w,
                distance_to_inv=float(np.linalg.norm(solution.w - w_inv)),
                warnings=tuple(warnings),
            )
        )
    return samples


def _mode_target(problem: RegressionProblem, mode: str) -> tuple[np.ndarray, np.ndarray]:
    if mode == "constrained":
        p_inv, z, g_t = _whiten(problem)
        return z @ linalg.left_null_projector(g_t), p_inv
    if mode == "augmented":
        return _augmented_target(problem)
    if mode == "regularized":
        p_inv, z, g_t = _whiten(problem)
        b_inv = linalg.pd_inv_sqrt(
            np.eye(problem.d0) + problem.n * problem.lam * (g_t @ g_t.T)
        )
        return z @ b_inv, b_inv @ p_inv
    raise ValueError(f"unknown mode {mode!r}")


def enumerate_critical_points(problem: RegressionProblem, mode: str) -> list[CriticalPoint]:
    """All critical points of the chosen problem on the rank-r variety.

    One point per size-r subset of the whitened target's nonzero singular
    values, mapped back through the mode's right factor, sorted by loss
    ascending. Exactly one point (the subset of the r largest values) is the
    global minimum. Requires pairwise-distinct nonzero singular values;
    otherwise the critical set is not finite.
    """
    zbar, right = _mode_target(problem, mode)
    f = linalg.svd(zbar)
    cutoff = linalg.rank_cutoff(f.sigma, zbar.shape)
    k = int(np.count_nonzero(f.sigma > cutoff))
    r = problem.r
    if r > k:
        raise DegenerateSpectrum(
            f"rank bound {r} exceeds the whitened target rank {k}; critical set degenerates"
        )
    count = math.comb(k, r)
    if count > tol.MAX_SUBSETS:
        raise TooManySubsets(f"binom({k}, {r}) = {count} exceeds the {tol.MAX_SUBSETS} guard")
    for i in range(k - 1):
        if f.sigma[i] - f.sigma[i + 1] <= tol.SPECTRAL_GAP_REL * f.sigma[0]:
            raise DegenerateSpectrum(
                f"singular values {i} and {i + 1} coincide within relative gap "
                f"{tol.SPECTRAL_GAP_REL:.0e}"
            )
    total_sq = float(np.sum(f.sigma[:k] ** 2))
    points = []
    global_set = tuple(range(r))
    for subset in itertools.combinations(range(k), r):
        idx = list(subset)
        w_t = (f.u[:, idx] * f.sigma[idx]) @ f.v[:, idx].T if r else np.zeros_like(zbar)
        loss = total_sq - float(np.sum(f.sigma[idx] ** 2))
        points.append(
            CriticalPoint(
                w=w_t @ right,
                index_set=subset,
                loss=loss,
                is_global_min=subset == global_set,
            )
        )
    points.sort(key=lambda p: p.loss)
    return points


def empirical_risk(w: np.ndarray, x: np.ndarray, y: np.ndarray,
                   g=None, lam: float = 0.0) -> float:
    """(1/n)||W X - Y||_F^2, plus lambda ||W G||_F^2 when a constraint is given."""
    w = np.asarray(w, dtype=float)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if w.shape[1] != x.shape[0] or w.shape[0] != y.shape[0] or x.shape[1] != y.shape[1]:
        raise ShapeMismatch(f"W {w.shape}, X {x.shape}, Y {y.shape} do not chain")
    risk = float(np.linalg.norm(w @ x - y) ** 2) / x.shape[1]
    if g is not None:
        entries = _constraint_entries(g)
        if entries.shape[0] != w.shape[1]:
            raise ShapeMismatch(f"constraint rows {entries.shape[0]} != d0 {w.shape[1]}")
        risk += lam * float(np.linalg.norm(w @ entries) ** 2)
    return risk


def invariance_decomposition(w: np.ndarray, g) -> tuple[np.ndarray, np.ndarray, float]:
    """Split W = W_inv + W_perp along the invariant subspace of G.

    W_inv = W (I - G G^+) satisfies W_inv G = 0; the split is Frobenius-
    orthogonal, so ||W||^2 = ||W_inv||^2 + ||W_perp||^2. Returns
    (W_inv, W_perp, ratio) with ratio = ||W_inv||_F^2 / ||W||_F^2 (defined
    as 1 for W = 0).
    """
    w = np.asarray(w, dtype=float)
    entries = _constraint_entries(g)
    if w.shape[1] != entries.shape[0]:
        raise ShapeMismatch(f"W cols {w.shape[1]} != constraint rows {entries.shape[0]}")
    w_inv = w @ linalg.left_null_projector(entries)
    w_perp = w - w_inv
    total = float(np.linalg.norm(w) ** 2)
    ratio = 1.0 if total == 0.0 else float(np.linalg.norm(w_inv) ** 2) / total
    return w_inv, w_perp, ratio


def with_lambda(problem: RegressionProblem, lam: float) -> RegressionProblem:
    """A copy of the problem with a different penalty strength."""
    return replace(problem, lam=lam)
