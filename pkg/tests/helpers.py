"""Shared instance builders for the test suite."""

from __future__ import annotations

import numpy as np

from invlowrank import groups, linalg
from invlowrank.solvers import RegressionProblem


def embedded_cycle_rep(d0: int, order: int) -> groups.GroupRep:
    """A unitary permutation rep: an order-cycle on the first coordinates of R^d0.

    Its invariant subspace has dimension d0 - order + 1.
    """
    gen = np.eye(d0)
    gen[:order, :order] = np.roll(np.eye(order), 1, axis=0)
    return groups.rep_from_generator(gen, order)


def skewed_cycle_rep(d0: int, order: int, seed: int = 0) -> groups.GroupRep:
    """A non-unitary rep of the same cyclic group: S P S^-1 for a diagonal S."""
    rng = np.random.default_rng(seed)
    scale = np.exp(rng.uniform(-1.0, 1.0, d0))
    perm = np.eye(d0)
    perm[:order, :order] = np.roll(np.eye(order), 1, axis=0)
    gen = np.diag(1.0 / scale) @ perm @ np.diag(scale)
    return groups.rep_from_generator(gen, order)


def random_problem(seed: int, d0: int = 8, dl: int = 5, order: int = 4,
                   r: int = 2, n: int | None = None, noise: float = 0.5,
                   invariant_wtrue: bool = True,
                   rep: groups.GroupRep | None = None) -> RegressionProblem:
    """Y = W_true X + noise E with a cyclic permutation symmetry."""
    if rep is None:
        rep = embedded_cycle_rep(d0, order)
    if n is None:
        n = 3 * d0
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((d0, n))
    w_true = rng.standard_normal((dl, d0))
    if invariant_wtrue:
        g = groups.invariance_constraint(rep)
        w_true = w_true @ linalg.left_null_projector(g.entries)
    y = w_true @ x + noise * rng.standard_normal((dl, n))
    return RegressionProblem(x=x, y=y, r=r, rep=rep)


def trivial_rep(d0: int) -> groups.GroupRep:
    return groups.rep_from_generator(np.eye(d0), 1)


def one_hot(labels: np.ndarray, classes: int) -> np.ndarray:
    out = np.zeros((classes, labels.size))
    out[labels, np.arange(labels.size)] = 1.0
    return out


# the trainer-vs-solver experiment: C4 rotations of a 4x4 grid, net 16 -> 3 -> 4
STANDARD_INSTANCE = dict(data_seed=1, train_seed=7, noise=0.5, n=64, dl=4,
                         hidden=(3,), r=3, epochs=5000, learning_rate=1e-3)


def standard_instance() -> tuple[np.ndarray, np.ndarray, groups.GroupRep]:
    rep = groups.c4_image_rotation(4)
    g = groups.invariance_constraint(rep)
    rng = np.random.default_rng(STANDARD_INSTANCE["data_seed"])
    x = rng.standard_normal((16, STANDARD_INSTANCE["n"]))
    w_true = rng.standard_normal((STANDARD_INSTANCE["dl"], 16))
    w_true = w_true @ linalg.left_null_projector(g.entries)
    y = w_true @ x + STANDARD_INSTANCE["noise"] * rng.standard_normal(
        (STANDARD_INSTANCE["dl"], STANDARD_INSTANCE["n"])
    )
    return x, y, rep
