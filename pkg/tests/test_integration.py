"""
End-to-end tests for liedim.

This module covers the complete workflow:
- The golden run on the built-in delta_4 != gamma_4 presentation
- Free Lie rings and the Fox example
- Seeded randomized sweeps of the structural identities (marked slow)
"""
import pytest

from src.counterexample import (
    COUNTEREXAMPLE_TEXT,
    EXPECTED_CLASS3_QUOTIENT,
    verify_counterexample,
)
from src.cli.parser import parse_presentation
from src.dimsub import (
    DimQuery,
    delta_lattice,
    dimension_quotient,
    fox_intersection,
    sandwich_check,
    sjogren_equality_check,
)
from src.fplie import Presentation, free_gamma_lattice
from src.hall import generate_hall_basis
from src.invariant_suite import (
    delta4_oracle_property,
    delta_abelian_property,
    delta_bracket_property,
    dimension_quotient_trivial,
    gamma_in_delta_property,
    graded_delta4_property,
    twice_delta4_property,
)
from src.intlat import scale
from src.randgen import PresentationSampler


@pytest.fixture(scope="module")
def golden():
    return verify_counterexample()


def test_counterexample_golden_run(golden):
    """Test every fact about the built-in presentation."""
    assert golden.class3_quotient == EXPECTED_CLASS3_QUOTIENT
    assert str(golden.class3_quotient) == "Z + (Z/256)^3 + (Z/16)^2 + Z/8 + Z/4 + Z/2"
    assert golden.a_nonzero_in_quotient
    assert any(golden.a_coordinates)
    assert golden.a_in_delta4
    assert not golden.a_in_gamma4
    assert golden.twice_a_in_gamma4
    assert golden.a_in_oracle
    assert golden.passed


def test_counterexample_report(golden):
    data = golden.to_dict()
    assert data["passed"] is True
    assert data["class3_quotient"]["torsion"] == [2, 4, 8, 16, 16, 256, 256, 256]
    assert data["class3_quotient"]["free_rank"] == 1
    assert data["delta4_over_gamma4"]["free_rank"] == 0
    assert "total" in data["timing"]


def test_counterexample_text_parses():
    pres = parse_presentation(COUNTEREXAMPLE_TEXT)
    assert pres.class_cap == 4
    assert pres.rank == 4
    assert len(pres.relators) == 3


def test_counterexample_conjugate_keeps_delta4_quotient(golden):
    """Test that a disguised copy of the built-in ring still has delta_4 != gamma_4."""
    pres = PresentationSampler(3).counterexample_conjugate()
    report = dimension_quotient(DimQuery(pres, 4))
    assert not report.is_trivial
    assert report.quotient == golden.dimension_report.quotient
    assert delta4_oracle_property(pres)


@pytest.mark.parametrize("m", [2, 3])
def test_free_ring_delta_equals_gamma(m):
    """Test delta_n = gamma_n in the free Lie ring up to degree 5."""
    ctx = generate_hall_basis(m, 5)
    pres = Presentation(ctx, (), 5)
    for n in range(1, 6):
        assert delta_lattice(DimQuery(pres, n)) == free_gamma_lattice(ctx, n)


@pytest.mark.parametrize("p", [2, 3])
def test_fox_example(p):
    """Test F n w r = p[F,F] for R = pF on two generators."""
    ctx = generate_hall_basis(2, 4)
    relators = [p * ctx.generator(1), p * ctx.generator(2)]
    gamma2 = free_gamma_lattice(ctx, 2)
    lattice = fox_intersection(ctx, relators, 1)
    assert lattice == scale(gamma2, p)
    assert lattice != scale(gamma2, p * p)
    assert sandwich_check(ctx, relators)


@pytest.mark.slow
def test_low_dimension_quotients_vanish():
    """Test delta_2 = gamma_2 and delta_3 = gamma_3 with the filtration properties on random rings."""
    sampler = PresentationSampler(2024)
    for _ in range(200):
        pres = sampler.presentation()
        assert dimension_quotient_trivial(pres, 2), pres.describe()
        assert dimension_quotient_trivial(pres, 3), pres.describe()
        assert delta_bracket_property(pres), pres.describe()
        assert gamma_in_delta_property(pres), pres.describe()
        assert delta_abelian_property(pres), pres.describe()


@pytest.mark.slow
def test_delta4_coefficient_description():
    """Test the coefficient description of delta_4 and 2 delta_4 <= gamma_4 on the delta_4 family."""
    sampler = PresentationSampler(7)
    nontrivial = 0
    for _ in range(100):
        pres = sampler.delta4_instance()
        assert delta4_oracle_property(pres), pres.describe()
        assert twice_delta4_property(pres), pres.describe()
        if not dimension_quotient(DimQuery(pres, 4)).is_trivial:
            nontrivial += 1
    assert nontrivial >= 1


@pytest.mark.slow
def test_graded_rings_have_trivial_delta4():
    sampler = PresentationSampler(11)
    for _ in range(50):
        pres = sampler.presentation()
        assert graded_delta4_property(pres), pres.describe()


@pytest.mark.slow
@pytest.mark.parametrize("n", [1, 2, 3])
def test_sjogren_identity_on_random_relators(n):
    sampler = PresentationSampler(100 + n)
    ctx = sampler.context(2, n + 1)
    for _ in range(50):
        relators = sampler.relator_set(ctx)
        assert sjogren_equality_check(ctx, relators, n), [ctx.format_vec(r) for r in relators]
