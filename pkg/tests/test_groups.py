"""Representations, constraint matrices, and invariant bases."""

import numpy as np
import pytest

from invlowrank import groups, linalg
from invlowrank.errors import (
    EmptyNullSpace,
    IndexOutOfRange,
    NonSquare,
    NotARepresentation,
    OrderMismatch,
)

from helpers import embedded_cycle_rep, skewed_cycle_rep, trivial_rep

SWAP = np.array([[0.0, 1.0], [1.0, 0.0]])


def rotation(angle: float) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, -s], [s, c]])


def test_rep_from_generator_identity():
    rep = groups.rep_from_generator(np.eye(3), 1)
    assert rep.order == 1 and rep.dim == 3


def test_rep_from_generator_swap():
    rep = groups.rep_from_generator(SWAP, 2)
    assert rep.order == 2


def test_rep_from_generator_rotations():
    groups.rep_from_generator(rotation(2 * np.pi / 3), 3)
    with pytest.raises(NotARepresentation):
        groups.rep_from_generator(rotation(np.pi / 3), 3)


def test_rep_from_generator_rejects_non_square():
    with pytest.raises(NonSquare):
        groups.rep_from_generator(np.ones((2, 3)), 2)


def test_c4_image_rotation_single_pixel():
    rep = groups.c4_image_rotation(1)
    assert rep.dim == 1 and rep.order == 4
    assert np.array_equal(rep.generators[0], np.eye(1))


def test_c4_image_rotation_two_by_two():
    rep = groups.c4_image_rotation(2)
    gen = rep.generators[0]
    assert sorted(np.nonzero(gen)[0].tolist()) == [0, 1, 2, 3]  # permutation
    for j in range(1, 4):
        assert not np.array_equal(np.linalg.matrix_power(gen, j), np.eye(4))
    assert np.array_equal(np.linalg.matrix_power(gen, 4), np.eye(4))


def test_c4_image_rotation_odd_grid_fixes_center():
    gen = groups.c4_image_rotation(3).generators[0]
    center = 1 * 3 + 1  # column-major index of pixel (1, 1)
    assert gen[center, center] == 1.0


def test_element_identity_and_powers():
    rep = groups.rep_from_generator(SWAP, 2)
    assert np.array_equal(groups.element(rep, 0), np.eye(2))
    assert np.array_equal(groups.element(rep, 1), SWAP)
    c4 = groups.c4_image_rotation(2)
    gen = c4.generators[0]
    assert np.array_equal(groups.element(c4, 2), gen @ gen)
    with pytest.raises(IndexOutOfRange):
        groups.element(c4, 4)
    with pytest.raises(IndexOutOfRange):
        groups.element(c4, -1)


def test_element_requires_single_generator():
    rep = groups.rep_from_generators([SWAP, np.eye(2)], [2, 1])
    with pytest.raises(ValueError):
        groups.element(rep, 0)
    with pytest.raises(ValueError):
        groups.group_average(rep)


def test_group_average_examples():
    assert np.array_equal(groups.group_average(trivial_rep(3)), np.eye(3))
    swap_rep = groups.rep_from_generator(SWAP, 2)
    assert np.allclose(groups.group_average(swap_rep), np.full((2, 2), 0.5))
    c4 = groups.c4_image_rotation(2)
    assert np.allclose(groups.group_average(c4), np.full((4, 4), 0.25))


def test_group_average_lemma_properties():
    # projector identities: Gbar rho(g^j) = Gbar, Gbar^2 = Gbar, symmetry when unitary
    rng = np.random.default_rng(0)
    for trial in range(25):
        d0 = int(rng.integers(3, 9))
        order = int(rng.integers(2, min(d0, 6) + 1))
        rep = embedded_cycle_rep(d0, order)
        gbar = groups.group_average(rep)
        for mat in groups.elements(rep):
            assert np.linalg.norm(gbar @ mat - gbar) < 1e-10
        assert np.linalg.norm(gbar @ gbar - gbar) < 1e-10
        assert np.linalg.norm(gbar - gbar.T) < 1e-10


def test_group_average_rotation_rep_idempotent():
    rep = groups.rotation_2d(5)
    gbar = groups.group_average(rep)
    assert np.linalg.norm(gbar @ gbar - gbar) < 1e-10
    assert np.linalg.norm(gbar) < 1e-10  # no fixed directions for a true rotation


def test_invariance_constraint_trivial():
    g = groups.invariance_constraint(trivial_rep(4))
    assert np.all(g.entries == 0.0)
    assert g.nullity == 4


def test_invariance_constraint_swap():
    g = groups.invariance_constraint(groups.rep_from_generator(SWAP, 2))
    assert np.allclose(g.entries, np.array([[1.0, -1.0], [-1.0, 1.0]]))
    assert g.nullity == 1


def test_invariance_constraint_iff_on_random_maps():
    # W G = 0 exactly characterizes invariance under all powers
    rep = groups.rep_from_generator(np.roll(np.eye(6), 1, axis=0), 6)
    g = groups.invariance_constraint(rep)
    basis = groups.invariant_basis(g)
    proj = linalg.left_null_projector(g.entries)
    rng = np.random.default_rng(1)
    mats = groups.elements(rep)
    for _ in range(100):
        w = rng.standard_normal((3, 6)) @ proj  # annihilates G by construction
        for mat in mats:
            assert np.linalg.norm(w @ mat - w) < 1e-10 * max(1.0, np.linalg.norm(w))
        # converse: averaging over the orbit lands in the null space
        w0 = rng.standard_normal((3, 6))
        w_avg = sum(w0 @ mat for mat in mats) / len(mats)
        assert np.linalg.norm(w_avg @ g.entries) < 1e-10 * max(1.0, np.linalg.norm(w_avg))
        # a generic map is moved by the generator
        assert np.linalg.norm(w0 @ mats[1] - w0) > 1e-3


def test_multi_generator_constraint_stacks_blocks():
    rep = groups.rep_from_generators([SWAP, np.eye(2)], [2, 1])
    g = groups.invariance_constraint(rep)
    assert g.entries.shape == (2, 4)
    assert g.nullity == 1


def test_equivariance_constraint_trivial_output_matches_invariance():
    rep_x = embedded_cycle_rep(4, 4)
    rep_y = groups.rep_from_generator(np.eye(1), 4)
    eq = groups.equivariance_constraint(rep_x, rep_y)
    eq_basis = groups.equivariant_null_basis(eq)
    inv_basis = groups.invariant_basis(groups.invariance_constraint(rep_x))
    assert eq_basis.shape[0] == inv_basis.shape[0]
    # mutual containment: each basis row of one space lies in the other's span
    for row in eq_basis:
        coeffs = inv_basis @ row
        assert np.linalg.norm(inv_basis.T @ coeffs - row) < 1e-10
    for row in inv_basis:
        coeffs = eq_basis @ row
        assert np.linalg.norm(eq_basis.T @ coeffs - row) < 1e-10


def test_equivariance_constraint_swap_pair():
    rep = groups.rep_from_generator(SWAP, 2)
    eq = groups.equivariance_constraint(rep, rep)
    basis = groups.equivariant_null_basis(eq)
    assert basis.shape == (2, 4)
    span = np.vstack([np.eye(2).flatten(order="F"), SWAP.flatten(order="F")])
    for row in basis:
        coeff, *_ = np.linalg.lstsq(span.T, row, rcond=None)
        assert np.linalg.norm(span.T @ coeff - row) < 1e-10


def test_equivariance_constraint_sign_rep():
    rep_x = groups.rep_from_generator(SWAP, 2)
    rep_y = groups.rep_from_generator(-np.eye(1), 2)
    basis = groups.equivariant_null_basis(groups.equivariance_constraint(rep_x, rep_y))
    assert basis.shape == (1, 2)
    expected = np.array([1.0, -1.0]) / np.sqrt(2.0)
    assert np.allclose(basis[0], expected) or np.allclose(basis[0], -expected)


def test_equivariance_constraint_order_mismatch():
    with pytest.raises(OrderMismatch):
        groups.equivariance_constraint(
            groups.rep_from_generator(SWAP, 2), groups.rep_from_generator(np.eye(1), 1)
        )


def test_invariant_basis_trivial_rep():
    basis = groups.invariant_basis(groups.invariance_constraint(trivial_rep(5)))
    assert basis.shape == (5, 5)
    assert np.linalg.norm(basis @ basis.T - np.eye(5)) < 1e-10


def test_invariant_basis_swap():
    basis = groups.invariant_basis(groups.invariance_constraint(groups.rep_from_generator(SWAP, 2)))
    assert np.allclose(basis, np.array([[1.0, 1.0]]) / np.sqrt(2.0))


def test_invariant_basis_c4_image():
    basis = groups.invariant_basis(groups.invariance_constraint(groups.c4_image_rotation(2)))
    assert np.allclose(basis, np.full((1, 4), 0.5))


def test_invariant_basis_rows_orthonormal_and_annihilating():
    rng = np.random.default_rng(2)
    for _ in range(20):
        d0 = int(rng.integers(4, 10))
        order = int(rng.integers(2, min(d0, 5) + 1))
        rep = embedded_cycle_rep(d0, order)
        g = groups.invariance_constraint(rep)
        basis = groups.invariant_basis(g)
        assert basis.shape == (g.nullity, d0)
        assert np.linalg.norm(basis @ basis.T - np.eye(g.nullity)) < 1e-10
        assert np.linalg.norm(basis @ g.entries) < 1e-10


def test_invariant_basis_empty_null_space():
    rep = groups.rotation_2d(3)
    with pytest.raises(EmptyNullSpace):
        groups.invariant_basis(groups.invariance_constraint(rep))


def test_is_unitary():
    assert groups.is_unitary(groups.c4_image_rotation(3), 1e-10)
    assert groups.is_unitary(groups.rotation_2d(7), 1e-10)
    scaled = groups.GroupRep(generators=(np.diag([2.0, 0.5]),), orders=(1,))
    assert not groups.is_unitary(scaled, 1e-10)
    assert not groups.is_unitary(skewed_cycle_rep(4, 3), 1e-10)
