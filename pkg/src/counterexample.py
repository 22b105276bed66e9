"""
The built-in Lie ring with delta_4 != gamma_4.

L = <x1, x2, x3, x4 | 4x1 + 2[x4,x3] + [x4,x2],
                      16x2 + 4[x4,x3] - [x4,x1],
                      64x3 - 4[x4,x2] - 2[x4,x1]>

and a = 32[x1,x2] + 64[x1,x3] + 128[x2,x3]. The class-3 quotient that keeps
only T_i = [x4,xi,xi] in degree 3, subject to 4T1, 4T2 - T1 and 4T3 - T2,
is additively Z + (Z/256)^3 + (Z/16)^2 + Z/8 + Z/4 + Z/2 and a survives
there, so a is not in gamma_4(L). Membership of a in delta_4(L) comes from
the enveloping algebra computation.
"""
import logging
import time
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from src.dimsub import DimQuery, DimReport, coefficient_pairs, delta4_solution_set, dimension_quotient
from src.fplie import Presentation, gamma_lattice, nilpotent_quotient, preabelianize, with_relators
from src.hall import FreeLieContext, LieVec, generate_hall_basis
from src.intlat import AbelianInvariants

logger = logging.getLogger(__name__)

COUNTEREXAMPLE_TEXT = """\
# Lie ring with delta_4 != gamma_4
gens: x1 x2 x3 x4;
rel: 4*x1 + 2*[x4,x3] + [x4,x2];
rel: 16*x2 + 4*[x4,x3] - [x4,x1];
rel: 64*x3 - 4*[x4,x2] - 2*[x4,x1];
class: 4;
"""

EXPECTED_CLASS3_QUOTIENT = AbelianInvariants(torsion=(2, 4, 8, 16, 16, 256, 256, 256), free_rank=1)
A_COEFFICIENTS = {(2, 1): 32, (3, 1): 64, (3, 2): 128}


def counterexample_presentation(class_cap: int = 4, ctx: Optional[FreeLieContext] = None) -> Presentation:
    """The three-relator presentation on x1..x4 with the given class cap."""
    ctx = ctx or generate_hall_basis(4, max(class_cap, 4))
    x1, x2, x3, x4 = (ctx.generator(i) for i in range(1, 5))
    b = ctx.bracket
    relators = (
        4 * x1 + 2 * b(x4, x3) + b(x4, x2),
        16 * x2 + 4 * b(x4, x3) - b(x4, x1),
        64 * x3 - 4 * b(x4, x2) - 2 * b(x4, x1),
    )
    return Presentation(ctx, relators, class_cap)


def element_a(ctx: FreeLieContext) -> LieVec:
    """a = 32[x1,x2] + 64[x1,x3] + 128[x2,x3]."""
    x1, x2, x3 = (ctx.generator(i) for i in range(1, 4))
    return 32 * ctx.bracket(x1, x2) + 64 * ctx.bracket(x1, x3) + 128 * ctx.bracket(x2, x3)


def auxiliary_relators(ctx: FreeLieContext) -> List[LieVec]:
    """
    Extra relators of the class-3 quotient: every degree-3 Hall element
    except T_i = [[x4,xi],xi], then 4T1, 4T2 - T1 and 4T3 - T2.
    """
    x4 = ctx.generator(4)
    kept = []
    for i in range(1, 4):
        xi = ctx.generator(i)
        kept.append(ctx.bracket(ctx.bracket(x4, xi), xi))
    kept_ids = {next(iter(t.coeffs)) for t in kept}

    relators = [ctx.vec(h) for h in ctx.degree_ids(3) if h not in kept_ids]
    t1, t2, t3 = kept
    relators.extend([4 * t1, 4 * t2 - t1, 4 * t3 - t2])
    return relators


@dataclass
class CounterexampleResult:
    """Outcome of the golden run; ``passed`` when every expected fact holds."""
    class3_quotient: AbelianInvariants
    a_nonzero_in_quotient: bool
    a_coordinates: tuple
    a_in_delta4: bool
    a_in_gamma4: bool
    twice_a_in_gamma4: bool
    a_in_oracle: bool
    dimension_report: DimReport
    timing: Dict[str, float] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return (
            self.class3_quotient == EXPECTED_CLASS3_QUOTIENT
            and self.a_nonzero_in_quotient
            and self.a_in_delta4
            and not self.a_in_gamma4
            and self.twice_a_in_gamma4
            and self.a_in_oracle
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "class3_quotient": self.class3_quotient.to_dict(),
            "expected_class3_quotient": EXPECTED_CLASS3_QUOTIENT.to_dict(),
            "a_nonzero_in_quotient": self.a_nonzero_in_quotient,
            "a_coordinates": list(self.a_coordinates),
            "a_in_delta4": self.a_in_delta4,
            "a_in_gamma4": self.a_in_gamma4,
            "twice_a_in_gamma4": self.twice_a_in_gamma4,
            "a_in_delta4_coefficient_lattice": self.a_in_oracle,
            "delta4_over_gamma4": self.dimension_report.quotient.to_dict(),
            "witnesses": [self.dimension_report.query.pres.ctx.format_vec(w)
                          for w in self.dimension_report.witnesses],
            "passed": self.passed,
            "timing": self.timing,
        }


def verify_counterexample(cap_A: Optional[int] = None) -> CounterexampleResult:
    """
    Recompute every fact about the built-in instance.

    Args:
        cap_A: Associative cap for the delta_4 query (default 4)

    Returns:
        CounterexampleResult: Structured outcome, truthy fields per fact
    """
    timing: Dict[str, float] = {}
    start = time.perf_counter()
    pres = counterexample_presentation()
    ctx = pres.ctx
    a = element_a(ctx)

    quotient_pres = with_relators(pres, auxiliary_relators(ctx), class_cap=3)
    nq = nilpotent_quotient(quotient_pres)
    timing["class3_quotient"] = time.perf_counter() - start
    logger.info(f"Class-3 quotient: {nq.invariants}")

    mark = time.perf_counter()
    # an explicit cap runs the unprojected computation in words of degree <= cap_A
    report = dimension_quotient(DimQuery(pres, 4, cap_A=cap_A, project=cap_A is None))
    timing["delta4"] = time.perf_counter() - mark

    mark = time.perf_counter()
    pd = preabelianize(pres)
    solutions = delta4_solution_set(pd)
    a_vector = tuple(A_COEFFICIENTS.get(p, 0) for p in coefficient_pairs(ctx.rank))
    timing["oracle"] = time.perf_counter() - mark

    gamma4 = gamma_lattice(pres, 4)
    result = CounterexampleResult(
        class3_quotient=nq.invariants,
        a_nonzero_in_quotient=not nq.is_zero(a),
        a_coordinates=nq.coordinates(a),
        a_in_delta4=a.dense() in report.delta_lattice,
        a_in_gamma4=a.dense() in gamma4,
        twice_a_in_gamma4=(2 * a).dense() in gamma4,
        a_in_oracle=a_vector in solutions,
        dimension_report=report,
        timing=timing,
    )
    timing["total"] = time.perf_counter() - start
    if result.passed:
        logger.info("Counterexample verified", extra={"delta4_over_gamma4": str(report.quotient)})
    else:
        logger.warning("Counterexample verification failed", extra=result.to_dict())
    return result
