"""
Tests for the Hall basis and bracket normalization.
"""
import random
import unittest
import warnings

import pytest

from src.assoc import AssocContext, iota, mul
from src.hall import FreeLieContext, LieVec, format_vec, generate_hall_basis, left_normed, witt_rank
from src.utils.error_handling import ContextMismatchError, InvalidQueryError


def _random_vec(rng, ctx, terms=3):
    coeffs = {rng.randrange(ctx.dimension): rng.randint(-3, 3) for _ in range(terms)}
    return LieVec(ctx, coeffs)


class TestWittRank(unittest.TestCase):
    """Necklace formula against known values."""

    def test_two_generators(self):
        self.assertEqual([witt_rank(2, n) for n in range(1, 7)], [2, 1, 2, 3, 6, 9])

    def test_three_generators(self):
        self.assertEqual([witt_rank(3, n) for n in range(1, 7)], [3, 3, 8, 18, 48, 116])

    def test_invalid_arguments(self):
        with self.assertRaises(InvalidQueryError):
            witt_rank(0, 3)
        with self.assertRaises(InvalidQueryError):
            witt_rank(2, 0)


@pytest.mark.parametrize("m", [1, 2, 3])
def test_basis_sizes_match_witt(m):
    ctx = generate_hall_basis(m, 6)
    for degree in range(1, 7):
        assert ctx.degree_size(degree) == witt_rank(m, degree)
    assert ctx.dimension == sum(witt_rank(m, d) for d in range(1, 7))


def test_witt_rank_raises_no_warnings():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert [witt_rank(2, n) for n in range(1, 9)] == [2, 1, 2, 3, 6, 9, 18, 30]
        assert witt_rank(3, 4) == 18


class TestHallBasis(unittest.TestCase):
    """Structure and ordering of the basis on two generators."""

    def setUp(self):
        self.ctx = generate_hall_basis(2, 4)
        self.x1 = self.ctx.generator(1)
        self.x2 = self.ctx.generator(2)

    def test_ordering(self):
        basis = self.ctx.basis
        self.assertTrue(basis[0].is_leaf and basis[1].is_leaf)
        self.assertEqual((basis[2].left, basis[2].right), (1, 0))
        self.assertEqual((basis[3].left, basis[3].right), (2, 0))
        self.assertEqual((basis[4].left, basis[4].right), (2, 1))
        self.assertEqual(list(self.ctx.degree_ids(3)), [3, 4])
        self.assertEqual(self.ctx.format_element(4), "[[x2,x1],x2]")

    def test_antisymmetry(self):
        self.assertEqual(self.ctx.bracket(self.x2, self.x1), self.ctx.vec(2))
        self.assertEqual(self.ctx.bracket(self.x1, self.x2), -self.ctx.vec(2))
        self.assertFalse(self.ctx.bracket(self.x1, self.x1))

    def test_left_normed(self):
        self.assertEqual(left_normed(self.ctx, [1, 2, 2]), -self.ctx.vec(4))
        self.assertEqual(self.ctx.left_normed([2]), self.x2)

    def test_truncation_above_cap(self):
        c3 = self.ctx.vec(3)
        self.assertFalse(self.ctx.bracket(c3, c3 + self.ctx.vec(4)))
        self.assertFalse(self.ctx.bracket(self.ctx.vec(3), self.ctx.vec(2)))

    def test_format_vec(self):
        vec = 2 * self.ctx.vec(2) - self.x1
        self.assertEqual(format_vec(vec), "-x1 + 2*[x2,x1]")
        self.assertEqual(self.ctx.format_vec(self.ctx.zero()), "0")

    def test_generator_by_name(self):
        self.assertEqual(self.ctx.generator_by_name("x2"), self.x2)
        with self.assertRaises(InvalidQueryError):
            self.ctx.generator_by_name("y")

    def test_components(self):
        vec = self.x1 + 3 * self.ctx.vec(2) - self.ctx.vec(4)
        self.assertEqual(vec.degrees(), [1, 2, 3])
        self.assertEqual(vec.component(2), 3 * self.ctx.vec(2))
        self.assertEqual(vec.above(1), 3 * self.ctx.vec(2) - self.ctx.vec(4))


def test_context_mismatch():
    a = generate_hall_basis(2, 3)
    b = generate_hall_basis(2, 3)
    with pytest.raises(ContextMismatchError):
        a.generator(1) + b.generator(1)
    with pytest.raises(ContextMismatchError):
        a.bracket(a.generator(1), b.generator(2))


def test_invalid_contexts():
    with pytest.raises(InvalidQueryError):
        generate_hall_basis(0, 3)
    with pytest.raises(InvalidQueryError):
        generate_hall_basis(2, 0)
    with pytest.raises(InvalidQueryError):
        generate_hall_basis(2, 3, names=["a", "a"])
    assert isinstance(generate_hall_basis(2, 2, names=["a", "b"]), FreeLieContext)


def test_jacobi_identity_on_random_triples():
    rng = random.Random(7)
    ctx = generate_hall_basis(3, 5)
    for _ in range(500):
        a, b, c = (_random_vec(rng, ctx) for _ in range(3))
        br = ctx.bracket
        total = br(a, br(b, c)) + br(b, br(c, a)) + br(c, br(a, b))
        assert not total


def test_iota_is_a_lie_homomorphism():
    rng = random.Random(11)
    ctx = generate_hall_basis(3, 4)
    words = AssocContext(3, 4)
    for _ in range(500):
        a, b = _random_vec(rng, ctx), _random_vec(rng, ctx)
        ia, ib = iota(a, words), iota(b, words)
        assert iota(ctx.bracket(a, b), words) == mul(ia, ib) - mul(ib, ia)
