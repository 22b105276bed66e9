"""
Tests for the invariant suite and the random presentation sampler.
"""
import unittest
from unittest.mock import patch

from sympy import Matrix

from src.fplie import Presentation
from src.hall import generate_hall_basis
from src.invariant_suite import (
    InvariantSuite,
    delta_abelian_property,
    delta_bracket_property,
    gamma_in_delta_property,
    graded_delta4_property,
    run_invariant_suite,
    twice_delta4_property,
)
from src.randgen import CONJUGATE_PERIOD, PREABELIAN_DIVISORS, PresentationSampler
from src.utils.error_handling import InvalidQueryError


class TestPresentationSampler(unittest.TestCase):
    """Tests for the seeded sampler."""

    def test_same_seed_same_instances(self):
        a, b = PresentationSampler(5), PresentationSampler(5)
        self.assertEqual(
            [a.presentation().describe() for _ in range(5)],
            [b.presentation().describe() for _ in range(5)],
        )

    def test_contexts_are_shared(self):
        sampler = PresentationSampler(0)
        self.assertIs(sampler.context(2, 4), sampler.context(2, 4))

    def test_preabelian_shape(self):
        sampler = PresentationSampler(1)
        for _ in range(10):
            pres = sampler.preabelian_presentation()
            m = pres.rank
            for rel in pres.relators:
                linear = [rel.coeffs.get(i, 0) for i in range(m)]
                # at most one generator appears, with a divisor from the chain
                nonzero = [c for c in linear if c]
                self.assertLessEqual(len(nonzero), 1)
                for c in nonzero:
                    self.assertIn(c, PREABELIAN_DIVISORS)

    def test_presentations_have_relators(self):
        sampler = PresentationSampler(3)
        for _ in range(30):
            pres = sampler.presentation()
            self.assertGreaterEqual(pres.rank, 2)
            self.assertTrue(pres.relators)

    def test_unimodular_determinant(self):
        sampler = PresentationSampler(4)
        for n in (1, 2, 4):
            self.assertIn(Matrix(sampler.unimodular(n)).det(), (1, -1))

    def test_delta4_instances(self):
        sampler = PresentationSampler(6)
        instances = [sampler.delta4_instance() for _ in range(2 * CONJUGATE_PERIOD)]
        for index, pres in enumerate(instances, start=1):
            if index % CONJUGATE_PERIOD == 0:
                self.assertEqual(pres.rank, 4)
                self.assertEqual(len(pres.relators), 3)
            else:
                self.assertIn(pres.rank, (2, 3))

    def test_homogeneous_relator(self):
        sampler = PresentationSampler(2)
        ctx = sampler.context(2, 4)
        for degree in (1, 2, 3):
            rel = sampler.homogeneous_relator(ctx, degree)
            self.assertEqual(rel.degrees(), [degree])
        with self.assertRaises(InvalidQueryError):
            sampler.homogeneous_relator(ctx, 5)
        with self.assertRaises(InvalidQueryError):
            sampler.relator_set(ctx, max_degree=0)


class TestProperties(unittest.TestCase):
    """The structural identities on small fixed presentations."""

    def setUp(self):
        ctx = generate_hall_basis(2, 4)
        x1, x2 = ctx.generator(1), ctx.generator(2)
        self.pres = Presentation(ctx, (4 * x1 + ctx.vec(2), 16 * x2), 4)

    def test_filtration_properties(self):
        self.assertTrue(delta_bracket_property(self.pres))
        self.assertTrue(gamma_in_delta_property(self.pres))
        self.assertTrue(delta_abelian_property(self.pres))

    def test_delta4_properties(self):
        self.assertTrue(twice_delta4_property(self.pres))
        self.assertTrue(graded_delta4_property(self.pres))


class TestInvariantSuite(unittest.TestCase):
    """Tests for InvariantSuite result bookkeeping."""

    def setUp(self):
        self.suite = InvariantSuite(seed=0, trials=2)
        ctx = generate_hall_basis(2, 4)
        self.pres = Presentation(ctx, (2 * ctx.generator(1),), 4)

    def test_check_presentation(self):
        results = self.suite.check_presentation(self.pres)
        self.assertTrue(results["passed"], results)
        self.assertEqual(len(results["checks"]), 11)
        self.assertEqual(results["errors"], [])
        self.assertIn("processing_time_seconds", results)
        self.assertTrue(results["checks"]["deltan_divisibility"]["passed"])

    def test_errors_are_recorded(self):
        with patch("src.invariant_suite.delta4_centrality_check", side_effect=RuntimeError("boom")):
            results = self.suite.check_presentation(self.pres)
        self.assertFalse(results["passed"])
        self.assertEqual(results["checks"]["delta4_centrality"], {"passed": False, "error": "boom"})
        self.assertEqual(len(results["errors"]), 1)
        # the other checks still ran
        self.assertTrue(results["checks"]["delta_brackets"]["passed"])

    def test_failed_family_lists_instances(self):
        with patch("src.invariant_suite.graded_delta4_property", return_value=False):
            results = self.suite.run_random_families(trials=2)
        family = results["checks"]["graded_delta4_equals_gamma4"]
        self.assertFalse(family["passed"])
        self.assertEqual(family["trials"], 2)
        self.assertEqual(len(family["failures"]), 2)
        self.assertFalse(results["passed"])

    def test_run_invariant_suite(self):
        results = run_invariant_suite(self.pres, seed=1, trials=1)
        self.assertEqual(set(results), {"presentation", "random", "passed"})
        self.assertTrue(results["passed"])
        self.assertEqual(results["random"]["seed"], 1)
        self.assertEqual(
            set(results["random"]["checks"]),
            {"delta2_delta3_trivial", "delta4_coefficient_description",
             "graded_delta4_equals_gamma4", "sjogren_equality", "sandwich"},
        )
