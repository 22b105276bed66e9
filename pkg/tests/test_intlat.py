"""
Tests for exact integer lattice arithmetic.
"""
import random
import unittest

import pytest

from src.intlat import (
    AbelianInvariants,
    Lattice,
    hnf,
    int_matrix,
    matrix_from_columns,
    intersect,
    kernel,
    lattice_sum,
    member,
    preimage,
    preimage_columns,
    quotient_invariants,
    saturate,
    scale,
    snf,
    sum_all,
)
from src.utils.error_handling import LatticeError


class TestLattice(unittest.TestCase):
    """Canonical form, membership and reduction."""

    def setUp(self):
        self.L = Lattice.from_generators(2, [(2, 4), (1, 3)])

    def test_canonical_basis(self):
        self.assertEqual(self.L.basis, ((1, 1), (0, 2)))
        self.assertEqual(self.L.pivots, (0, 1))
        self.assertEqual(self.L, Lattice.from_generators(2, [(1, 1), (0, 2), (3, 5)]))

    def test_membership(self):
        self.assertIn((2, 4), self.L)
        self.assertIn((0, -2), self.L)
        self.assertNotIn((1, 0), self.L)
        self.assertEqual(member((1, 3), self.L), (1, 1))
        self.assertIsNone(member((1, 0), self.L))

    def test_reduce(self):
        self.assertEqual(self.L.reduce((1, 0)), (0, 1))
        self.assertEqual(self.L.reduce((5, 9)), (0, 0))

    def test_ambient_mismatch(self):
        with self.assertRaises(LatticeError):
            Lattice.from_generators(2, [(1, 2, 3)])
        with self.assertRaises(LatticeError):
            lattice_sum(self.L, Lattice.zero(3))

    def test_subset(self):
        self.assertTrue(Lattice.zero(2) <= self.L)
        self.assertTrue(self.L.issubset(Lattice.ambient(2)))
        self.assertFalse(Lattice.ambient(2).issubset(self.L))

    def test_zero_vectors_are_ignored(self):
        self.assertEqual(Lattice.from_generators(3, [(0, 0, 0)]), Lattice.zero(3))


def test_sum_and_intersection():
    A = Lattice.from_generators(2, [(2, 0), (0, 1)])
    B = Lattice.from_generators(2, [(1, 0), (0, 3)])
    assert intersect(A, B).basis == ((2, 0), (0, 3))
    assert lattice_sum(A, B) == Lattice.ambient(2)
    assert sum_all(2, [A, B, Lattice.zero(2)]) == Lattice.ambient(2)
    assert intersect(A, Lattice.zero(2)) == Lattice.zero(2)


def test_saturate_and_scale():
    L = Lattice.from_generators(2, [(2, 4)])
    assert saturate(L).basis == ((1, 2),)
    assert saturate(Lattice.from_generators(2, [(2, 0), (0, 6)])) == Lattice.ambient(2)
    assert scale(Lattice.ambient(2), 3).basis == ((3, 0), (0, 3))
    assert scale(L, 0) == Lattice.zero(2)


def test_kernel_and_preimage():
    assert kernel(int_matrix([[1, 1]])).basis == ((1, -1),)
    assert preimage(int_matrix([[2]]), Lattice.from_generators(1, [(4,)])).basis == ((2,),)
    # columns (1, 1) and (1, -1) map into the even-sum lattice
    even = Lattice.from_generators(2, [(1, 1), (0, 2)])
    assert preimage_columns([(1, 1), (1, -1)], even) == Lattice.ambient(2)
    assert preimage_columns([(1, 0)], even).basis == ((2,),)


def test_hnf_transform():
    M = int_matrix([[2, 1], [4, 3]])
    H, U = hnf(M)
    assert H.basis == ((1, 1), (0, 2))
    assert (M * U).to_list() == H.matrix().to_list()


def test_snf_divisors_and_certificate():
    M = int_matrix([[2, 0], [0, 3]])
    divisors, S, T = snf(M)
    assert divisors == (1, 6)
    assert (S * M * T).to_list() == [[1, 0], [0, 6]]


class TestQuotientInvariants(unittest.TestCase):

    def test_mixed_quotient(self):
        B = Lattice.from_generators(3, [(2, 0, 0), (0, 4, 0)])
        result = quotient_invariants(Lattice.ambient(3), B)
        self.assertEqual(result, AbelianInvariants((2, 4), 1))
        self.assertEqual(str(result), "Z + Z/4 + Z/2")
        self.assertIsNone(result.order)

    def test_cyclic_from_coprime(self):
        B = Lattice.from_generators(2, [(2, 0), (0, 3)])
        result = quotient_invariants(Lattice.ambient(2), B)
        self.assertEqual(result.torsion, (6,))
        self.assertEqual(result.order, 6)
        self.assertEqual(result.exponent, 6)

    def test_trivial_and_free(self):
        self.assertTrue(quotient_invariants(Lattice.ambient(2), Lattice.ambient(2)).is_trivial)
        self.assertEqual(quotient_invariants(Lattice.ambient(2), Lattice.zero(2)).free_rank, 2)

    def test_requires_containment(self):
        with self.assertRaises(LatticeError):
            quotient_invariants(Lattice.from_generators(2, [(2, 0)]), Lattice.ambient(2))


@pytest.mark.parametrize("torsion,free,text", [
    ((), 0, "0"),
    ((), 2, "Z^2"),
    ((2, 4, 8, 16, 16, 256, 256, 256), 1, "Z + (Z/256)^3 + (Z/16)^2 + Z/8 + Z/4 + Z/2"),
])
def test_invariants_text(torsion, free, text):
    assert str(AbelianInvariants(torsion, free)) == text


def _random_vectors(rng, count, width, bound):
    return [tuple(rng.randint(-bound, bound) for _ in range(width)) for _ in range(count)]


def _random_unimodular(rng, n, steps=12):
    U = [[int(i == j) for j in range(n)] for i in range(n)]
    for _ in range(steps):
        i, j = rng.sample(range(n), 2)
        move = rng.choice(("add", "swap", "negate"))
        if move == "add":
            c = rng.choice((-2, -1, 1, 2))
            U[i] = [a + c * b for a, b in zip(U[i], U[j])]
        elif move == "swap":
            U[i], U[j] = U[j], U[i]
        else:
            U[i] = [-a for a in U[i]]
    return U


def _apply(U, vec):
    return tuple(sum(u * x for u, x in zip(row, vec)) for row in U)


@pytest.mark.parametrize("seed", range(3))
def test_preimage_matches_enumeration(seed):
    rng = random.Random(seed)
    columns = _random_vectors(rng, 3, 3, 3)
    M = matrix_from_columns(columns, 3)
    L = Lattice.from_generators(3, _random_vectors(rng, 2, 3, 4))
    pre = preimage(M, L)
    assert pre == preimage_columns(columns, L)
    box = range(-5, 6)
    for v in ((a, b, c) for a in box for b in box for c in box):
        image = tuple(sum(col[i] * x for col, x in zip(columns, v)) for i in range(3))
        assert (v in pre) == (image in L), v


@pytest.mark.parametrize("seed", range(4))
def test_hnf_idempotent(seed):
    rng = random.Random(seed)
    width = rng.randint(2, 5)
    H, _ = hnf(matrix_from_columns(_random_vectors(rng, rng.randint(1, 5), width, 6), width))
    again, U = hnf(H.matrix())
    assert again == H
    assert again.basis == H.basis
    assert (H.matrix() * U).to_list() == again.matrix().to_list()


@pytest.mark.parametrize("seed", range(4))
def test_quotient_invariants_basis_independent(seed):
    rng = random.Random(seed)
    width = 4
    gens = _random_vectors(rng, 3, width, 5)
    A = Lattice.from_generators(width, gens)
    B_gens = [
        tuple(sum(rng.randint(-3, 3) * g[i] for g in gens) for i in range(width))
        for _ in range(3)
    ]
    B = Lattice.from_generators(width, B_gens)
    expected = quotient_invariants(A, B)

    shuffled = list(B_gens)
    rng.shuffle(shuffled)
    U = _random_unimodular(rng, len(shuffled))
    mixed = [
        tuple(sum(c * g[i] for c, g in zip(row, shuffled)) for i in range(width))
        for row in U
    ]
    assert quotient_invariants(A, Lattice.from_generators(width, mixed)) == expected

    # a unimodular change of the ambient coordinates
    V = _random_unimodular(rng, width)
    moved_A = Lattice.from_generators(width, [_apply(V, g) for g in gens])
    moved_B = Lattice.from_generators(width, [_apply(V, g) for g in B_gens])
    assert quotient_invariants(moved_A, moved_B) == expected
