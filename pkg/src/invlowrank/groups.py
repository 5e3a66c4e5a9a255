"""Finite group representations and the linear constraints they induce.

A representation is given by one or more generator matrices with declared
orders. A linear map W is invariant exactly when W G = 0 for the constraint
matrix G built from blocks I - rho(g_m); equivariant maps are characterized
the same way on vec(W) through Kronecker blocks.

Group elements and averages are only enumerated for single-generator
(cyclic) representations; multi-generator groups are supported through the
stacked constraint blocks alone.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import linalg
from . import tolerances as tol
from .errors import (
    EmptyNullSpace,
    IndexOutOfRange,
    NonSquare,
    NotARepresentation,
    OrderMismatch,
)


def _freeze(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=float)
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class GroupRep:
    """A finite group representation: generator matrices plus their orders."""

    generators: tuple[np.ndarray, ...]
    orders: tuple[int, ...]

    @property
    def dim(self) -> int:
        return self.generators[0].shape[0]

    @property
    def is_cyclic(self) -> bool:
        return len(self.generators) == 1

    @property
    def order(self) -> int:
        """Group order; defined for single-generator (cyclic) reps only."""
        if not self.is_cyclic:
            raise ValueError("order of a multi-generator rep is not enumerated")
        return self.orders[0]


@dataclass(frozen=True)
class ConstraintMatrix:
    """Stacked blocks [I - rho(g_1), ..., I - rho(g_M)]; W G = 0 iff W invariant."""

    entries: np.ndarray  # d0 x (M * d0)
    nullity: int

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class EquivarianceConstraint:
    """Horizontally stacked Kronecker blocks acting on vec(W).

    Block m is rho_X(g_m)^T (x) rho_Y(g_m^-1) - I; vec(W) (column-major) is
    annihilated by every block exactly when W rho_X(g) = rho_Y(g) W for all
    group elements.
    """

    entries: np.ndarray  # (d0*dL) x (M * d0*dL)
    block_dim: int


def _validate_generator(gen: np.ndarray, order: int) -> np.ndarray:
    gen = np.asarray(gen, dtype=float)
    if gen.ndim != 2 or gen.shape[0] != gen.shape[1]:
        raise NonSquare(f"generator must be square, got shape {gen.shape}")
    if order < 1:
        raise ValueError(f"order must be >= 1, got {order}")
    d = gen.shape[0]
    power = np.linalg.matrix_power(gen, order)
    if np.linalg.norm(power - np.eye(d)) > tol.REP_VALIDATION * d:
        raise NotARepresentation(
            f"generator**{order} differs from the identity beyond {tol.REP_VALIDATION * d:.1e}"
        )
    return gen


def rep_from_generator(gen: np.ndarray, order: int) -> GroupRep:
    """Validate a single generator of a cyclic group of the given order."""
    gen = _validate_generator(gen, order)
    return GroupRep(generators=(_freeze(gen),), orders=(order,))


def rep_from_generators(gens: Sequence[np.ndarray], orders: Sequence[int]) -> GroupRep:
    """Validate a finitely generated group given one matrix per generator."""
    if len(gens) != len(orders) or not gens:
        raise ValueError("need one order per generator")
    validated = [_validate_generator(g, o) for g, o in zip(gens, orders)]
    d = validated[0].shape[0]
    for g in validated[1:]:
        if g.shape[0] != d:
            raise NonSquare("all generators must share the same dimension")
    return GroupRep(
        generators=tuple(_freeze(g) for g in validated), orders=tuple(int(o) for o in orders)
    )


def c4_image_rotation(p: int) -> GroupRep:
    """Order-4 permutation generator rotating a column-major p x p image by 90 degrees.

    Pixel convention: (row i, col j) -> (j, p-1-i).
    """
    if p < 1:
        raise ValueError(f"grid side must be >= 1, got {p}")
    gen = np.zeros((p * p, p * p))
    for i in range(p):
        for j in range(p):
            src = j * p + i
            dst = (p - 1 - i) * p + j
            gen[dst, src] = 1.0
    return rep_from_generator(gen, 4)


def cyclic_permutation(d: int) -> GroupRep:
    """The full d-cycle permutation rep on R^d (order d)."""
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    gen = np.roll(np.eye(d), 1, axis=0)
    return rep_from_generator(gen, d)


def rotation_2d(k: int) -> GroupRep:
    """Planar rotation by 2*pi/k, order k.

    Note: the rotation group of a regular k-gon is generated by the angle
    2*pi/k; that convention is used here.
    """
    if k < 1:
        raise ValueError(f"order must be >= 1, got {k}")
    theta = 2.0 * np.pi / k
    c, s = np.cos(theta), np.sin(theta)
    gen = np.array([[c, -s], [s, c]])
    return rep_from_generator(gen, k)


def element(rep: GroupRep, j: int) -> np.ndarray:
    """rho(g^j) by repeated multiplication; cyclic reps only."""
    if not rep.is_cyclic:
        raise ValueError("element enumeration requires a single-generator rep")
    if j < 0 or j >= rep.order:
        raise IndexOutOfRange(f"element index {j} outside [0, {rep.order})")
    out = np.eye(rep.dim)
    for _ in range(j):
        out = rep.generators[0] @ out
    return out


def elements(rep: GroupRep) -> list[np.ndarray]:
    """All group elements rho(g^0), ..., rho(g^(order-1)); cyclic reps only."""
    if not rep.is_cyclic:
        raise ValueError("element enumeration requires a single-generator rep")
    out = [np.eye(rep.dim)]
    for _ in range(rep.order - 1):
        out.append(rep.generators[0] @ out[-1])
    return out


def group_average(rep: GroupRep) -> np.ndarray:
    """Mean of all group elements: an idempotent projector onto the fixed subspace."""
    mats = elements(rep)
    return sum(mats[1:], start=mats[0]) / len(mats)


def invariance_constraint(rep: GroupRep) -> ConstraintMatrix:
    """Constraint G = [I - rho(g_1), ..., I - rho(g_M)] with cached nullity."""
    d = rep.dim
    blocks = [np.eye(d) - g for g in rep.generators]
    entries = np.hstack(blocks)
    nullity = d - linalg.numerical_rank(entries)
    return ConstraintMatrix(entries=_freeze(entries), nullity=nullity)


def equivariance_constraint(rep_x: GroupRep, rep_y: GroupRep) -> EquivarianceConstraint:
    """Kronecker constraint blocks rho_X(g_m)^T (x) rho_Y(g_m^-1) - I on vec(W)."""
    if rep_x.orders != rep_y.orders:
        raise OrderMismatch(f"group orders differ: {rep_x.orders} vs {rep_y.orders}")
    dim = rep_x.dim * rep_y.dim
    blocks = []
    for gx, gy, order in zip(rep_x.generators, rep_y.generators, rep_x.orders):
        gy_inv = np.linalg.matrix_power(gy, order - 1)
        blocks.append(np.kron(gx.T, gy_inv) - np.eye(dim))
    return EquivarianceConstraint(entries=_freeze(np.hstack(blocks)), block_dim=dim)


def equivariant_null_basis(constraint: EquivarianceConstraint) -> np.ndarray:
    """Orthonormal rows spanning {v : B_m v = 0 for every block B_m}.

    Rows are vectorized (column-major) equivariant maps.
    """
    dim = constraint.block_dim
    n_blocks = constraint.entries.shape[1] // dim
    stacked = np.vstack([constraint.entries[:, m * dim:(m + 1) * dim] for m in range(n_blocks)])
    f = linalg.svd(stacked)
    rank = int(np.count_nonzero(f.sigma > linalg.rank_cutoff(f.sigma, stacked.shape)))
    if rank == dim:
        raise EmptyNullSpace("no equivariant maps for these representations")
    basis = f.v[:, rank:].T
    return _fix_row_signs(basis)


def _fix_row_signs(basis: np.ndarray) -> np.ndarray:
    basis = basis.copy()
    for i in range(basis.shape[0]):
        row = basis[i]
        floor = 1e-12 * max(1.0, float(np.max(np.abs(row))))
        nonzero = np.nonzero(np.abs(row) > floor)[0]
        if nonzero.size and row[nonzero[0]] < 0:
            basis[i] = -row
    return basis


def invariant_basis(constraint: ConstraintMatrix) -> np.ndarray:
    """Orthonormal rows B (d x d0) spanning the left null space of G: B G = 0.

    Sign convention: the first nonzero entry of each row is positive, so the
    basis is reproducible across runs.
    """
    g = constraint.entries
    f = linalg.svd(g)
    rank = int(np.count_nonzero(f.sigma > linalg.rank_cutoff(f.sigma, g.shape)))
    if rank == g.shape[0]:
        raise EmptyNullSpace("constraint has full row rank: no invariant maps")
    basis = f.u[:, rank:].T
    return _fix_row_signs(basis)


def is_unitary(rep: GroupRep, tolerance: float = tol.ORTHOGONALITY) -> bool:
    """True iff every generator is orthogonal within the given tolerance."""
    d = rep.dim
    return all(np.linalg.norm(g.T @ g - np.eye(d)) <= tolerance for g in rep.generators)
