"""
Lie dimension subrings and the related lattice identities.

For L = F/R the n-th dimension subring is delta_n(L) = L n w^n(L). Since
U(L) = U(F)/r with r the two-sided ideal generated by R, its preimage in F
is {f in F : iota(f) in w^n + r}, represented here as a lattice in Hall
coordinates that contains the relator ideal.

Truncation: w^n is the coordinate lattice of words of degree >= n, so
membership in w^n + r only depends on word coordinates of degree < n.
Queries therefore work in Z<X>/w^n by default; the associative cap cap_A
only matters for the unprojected computation, where w^(cap_A+1) lies in w^n
as long as cap_A >= n - 1.

This module also provides:
- The explicit description of delta_4 by coefficient conditions
- The divisibility statement for delta_n modulo gamma_n + F'' + R
- Fox intersections F n w^k r and the relation module
- The Sjogren-type identity with r(k) and R(k)
- The sandwich [R,R] <= F n w r <= sqrt[R,R] <= R
"""
import itertools
import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Dict, List, Optional, Sequence, Tuple

from src.assoc import (
    AssocContext,
    commutator_images,
    ideal_span,
    iota,
    iota_columns,
    omega_power_lattice,
    r_n_lattice,
)
from src.fplie import (
    PreabelianData,
    Presentation,
    bracket_span,
    derived_lattice,
    free_gamma_lattice,
    gamma_lattice,
    ideal_closure,
    preabelianize,
    second_derived_lattice,
)
from src.hall import FreeLieContext, LieVec
from src.intlat import (
    AbelianInvariants,
    Lattice,
    intersect,
    lattice_sum,
    preimage_columns,
    quotient_invariants,
    saturate,
    sum_all,
)
from src.utils.error_handling import ContextMismatchError, InvalidQueryError

logger = logging.getLogger(__name__)


@dataclass
class CheckResult:
    """Outcome of a lattice identity check; truthy when it passed."""
    name: str
    passed: bool
    witness: Optional[LieVec] = None
    details: Dict[str, Any] = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.passed

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "passed": self.passed,
            "witness": None if self.witness is None else self.witness.ctx.format_vec(self.witness),
            "details": self.details,
        }


@dataclass(frozen=True, eq=False)
class DimQuery:
    """
    A request for delta_n of a presentation.

    ``cap_A`` defaults to max(n, class_cap) and may not drop below
    max(n - 1, class_cap). With ``project`` set (the default) the
    computation runs in words of degree < n, which gives the same lattice.
    """
    pres: Presentation
    n: int
    cap_A: Optional[int] = None
    project: bool = True

    def __post_init__(self):
        if self.n < 1:
            raise InvalidQueryError(f"Dimension subring index must be positive, got {self.n}")
        floor = max(self.n - 1, self.pres.class_cap)
        if self.cap_A is None:
            object.__setattr__(self, "cap_A", max(self.n, self.pres.class_cap))
        elif self.cap_A < floor:
            raise InvalidQueryError(
                f"Associative cap {self.cap_A} below the safe bound {floor} for n={self.n}",
                details={"cap_A": self.cap_A, "minimum": floor}
            )

    @cached_property
    def delta(self) -> Lattice:
        return _compute_delta(self)


@dataclass
class DimReport:
    """delta_n and gamma_n of a presentation and the invariants of their quotient."""
    query: DimQuery
    delta_lattice: Lattice
    gamma_lattice: Lattice
    quotient: AbelianInvariants
    witnesses: Tuple[LieVec, ...] = ()

    @property
    def is_trivial(self) -> bool:
        return self.quotient.is_trivial

    def to_dict(self) -> Dict[str, Any]:
        ctx = self.query.pres.ctx
        return {
            "n": self.query.n,
            "class_cap": self.query.pres.class_cap,
            "cap_assoc": self.query.cap_A,
            "projected": self.query.project,
            "quotient": self.quotient.to_dict(),
            "witnesses": [ctx.format_vec(w) for w in self.witnesses],
            "delta_lattice": self.delta_lattice.to_dict(),
            "gamma_lattice": self.gamma_lattice.to_dict(),
        }


def _relator_images(pres: Presentation, work: AssocContext) -> List:
    gens = [iota(r, work, truncate=True) for r in pres.relators]
    # gamma_{c+1}(F) generates the same two-sided ideal as its degree c+1 commutators
    if pres.class_cap + 1 <= work.cap:
        gens.extend(commutator_images(work, pres.class_cap + 1))
    return [g for g in gens if g]


def _compute_delta(q: DimQuery) -> Lattice:
    pres = q.pres
    ctx = pres.ctx
    work_cap = q.n - 1 if q.project else q.cap_A
    if work_cap == 0 or q.n == 1:
        return Lattice.ambient(ctx.dimension)

    work = AssocContext(ctx.rank, work_cap)
    target = ideal_span(_relator_images(pres, work), work)
    if not q.project:
        target = lattice_sum(target, omega_power_lattice(q.n, work))
    preimage = preimage_columns(iota_columns(ctx, work, truncate=True), target)
    delta = lattice_sum(preimage, pres.relator_lattice)
    logger.info(
        f"delta_{q.n}: rank {delta.rank} in dimension {ctx.dimension}",
        extra={"word_dimension": work.dimension, "class_cap": pres.class_cap}
    )
    return delta


def delta_lattice(q: DimQuery) -> Lattice:
    """Preimage of delta_n(L) in F, containing the relator ideal."""
    return q.delta


def dimension_quotient(q: DimQuery) -> DimReport:
    """
    Invariants of delta_n(L) / gamma_n(L), with coset representatives of
    the delta basis vectors that are not in gamma_n.
    """
    delta = delta_lattice(q)
    gamma = gamma_lattice(q.pres, q.n)
    quotient = quotient_invariants(delta, gamma)
    witnesses: List[LieVec] = []
    if not quotient.is_trivial:
        seen = set()
        for b in delta.basis:
            remainder = gamma.reduce(b)
            if any(remainder) and remainder not in seen:
                seen.add(remainder)
                witnesses.append(q.pres.ctx.from_dense(remainder))
        logger.warning(
            f"delta_{q.n}/gamma_{q.n} is nontrivial: {quotient}",
            extra={"witnesses": len(witnesses)}
        )
    return DimReport(q, delta, gamma, quotient, tuple(witnesses))


# delta_4 by coefficients

def coefficient_pairs(m: int) -> List[Tuple[int, int]]:
    """Index pairs (i, j) with i > j, ordered (2,1), (3,1), (3,2), (4,1), ..."""
    return [(i, j) for i in range(2, m + 1) for j in range(1, i)]


def delta4_solution_set(pd: PreabelianData, pres: Optional[Presentation] = None) -> Lattice:
    """
    Integer vectors (a_ij)_{i>j} with e_i | a_ij and
    W_i = sum_{j<i} a_ij X_j - sum_{j>i} a_ji X_j in e_i gamma_2 + gamma_3 + R.

    Args:
        pd: Preabelian data supplying the divisors e_i
        pres: The preabelian presentation; defaults to ``pd.presentation``

    Returns:
        Lattice: Solutions, in coordinates ordered as ``coefficient_pairs``
    """
    pres = pres or pd.presentation
    if pres.ctx is not pd.ctx:
        raise ContextMismatchError("Preabelian data and presentation use different contexts")
    ctx = pres.ctx
    if ctx.cap < 2:
        raise InvalidQueryError(f"Lie cap {ctx.cap} has no degree-2 commutators")
    m = ctx.rank
    N = ctx.dimension
    pairs = coefficient_pairs(m)
    P = len(pairs)
    if not P:
        return Lattice.zero(0)

    divisibility = []
    for k, (i, _) in enumerate(pairs):
        vec = [0] * P
        vec[k] = pd.divisors[i - 1]
        divisibility.append(vec)
    solutions = Lattice.from_generators(P, divisibility)

    degree_two = ctx.degree_ids(2)
    cubic_and_relations = lattice_sum(free_gamma_lattice(ctx, 3), pres.relator_lattice)
    for i in range(1, m + 1):
        e = pd.divisors[i - 1]
        scaled = []
        for element_id in degree_two:
            vec = [0] * N
            vec[element_id] = e
            scaled.append(vec)
        allowed = lattice_sum(Lattice.from_generators(N, scaled), cubic_and_relations)

        columns = []
        for p, q in pairs:
            col = [0] * N
            if p == i:
                col[q - 1] = 1
            elif q == i:
                col[p - 1] = -1
            columns.append(tuple(col))
        solutions = intersect(solutions, preimage_columns(columns, allowed))
    logger.debug(f"delta_4 coefficient lattice has rank {solutions.rank} of {P}")
    return solutions


def delta4_oracle_lattice(pd: PreabelianData, pres: Optional[Presentation] = None) -> Lattice:
    """Image of the delta_4 coefficient lattice in F, plus gamma_4 + R."""
    pres = pres or pd.presentation
    ctx = pres.ctx
    N = ctx.dimension
    images = []
    for a in delta4_solution_set(pd, pres).basis:
        vec = [0] * N
        for coeff, (i, j) in zip(a, coefficient_pairs(ctx.rank)):
            if coeff:
                vec[ctx.node_id(i - 1, j - 1)] += coeff
        images.append(vec)
    return sum_all(N, [
        Lattice.from_generators(N, images),
        free_gamma_lattice(ctx, 4),
        pres.relator_lattice,
    ])


def deltan_divisibility_check(pres: Presentation, n: int) -> CheckResult:
    """
    Every element of delta_n is, modulo gamma_n + F'' + R, a combination of
    left-normed commutators [X_i1, ..., X_ir] (2 <= r < n) whose coefficient
    is divisible by e_i1.

    The presentation is brought to preabelian form first.
    """
    if n < 2:
        raise InvalidQueryError(f"Divisibility check needs n >= 2, got {n}")
    pd = preabelianize(pres)
    work = pd.presentation
    ctx = work.ctx
    m = ctx.rank
    N = ctx.dimension

    base = lattice_sum(free_gamma_lattice(ctx, n), second_derived_lattice(work, include_relators=True))
    allowed = []
    for length in range(2, n):
        for indices in itertools.product(range(1, m + 1), repeat=length):
            e = pd.divisors[indices[0] - 1]
            if not e:
                continue
            commutator = ctx.left_normed(indices)
            if commutator:
                allowed.append((e * commutator).dense())
    spanned = lattice_sum(base, Lattice.from_generators(N, allowed))

    delta = delta_lattice(DimQuery(work, n))
    for b in delta.basis:
        if b not in spanned:
            witness = ctx.from_dense(base.reduce(b))
            logger.warning(f"delta_{n} element outside the divisibility span: {ctx.format_vec(witness)}")
            return CheckResult("deltan_divisibility", False, witness, {"n": n, "divisors": list(pd.divisors)})
    return CheckResult("deltan_divisibility", True, None, {"n": n, "divisors": list(pd.divisors)})


def delta4_centrality_check(pres: Presentation) -> CheckResult:
    """[delta_4(L), L] lies in gamma_5(L) + L''."""
    ctx = pres.ctx
    delta = delta_lattice(DimQuery(pres, 4, cap_A=max(4, pres.class_cap)))
    target = lattice_sum(free_gamma_lattice(ctx, 5), second_derived_lattice(pres, include_relators=True))
    generators = [ctx.generator(i) for i in range(1, ctx.rank + 1)]
    for b in delta.basis:
        element = ctx.from_dense(b)
        for x in generators:
            product = ctx.bracket(element, x)
            if product.dense() not in target:
                return CheckResult("delta4_centrality", False, product)
    return CheckResult("delta4_centrality", True)


def ideal_check(q: DimQuery) -> bool:
    """delta_n is closed under bracketing with the generators."""
    ctx = q.pres.ctx
    delta = delta_lattice(q)
    for b in delta.basis:
        element = ctx.from_dense(b)
        for i in range(1, ctx.rank + 1):
            if ctx.bracket(element, ctx.generator(i)).dense() not in delta:
                return False
    return True


# Fox intersections and relation modules

def _relator_lattice(ctx: FreeLieContext, relators: Sequence[LieVec]) -> Lattice:
    for r in relators:
        if r.ctx is not ctx:
            raise ContextMismatchError("Relator from a different context")
    seeds = Lattice.from_generators(ctx.dimension, [r.dense() for r in relators])
    return ideal_closure(ctx, seeds)


def fox_intersection(ctx: FreeLieContext, relators: Sequence[LieVec], n: int,
                     cap_A: Optional[int] = None) -> Lattice:
    """
    F n w^n r, where r is the two-sided ideal generated by the relators.

    Args:
        ctx: Free Lie ring context
        relators: Generators of R
        n: Power of the augmentation ideal multiplying r on the left
        cap_A: Associative cap, at least ctx.cap (default ctx.cap)
    """
    if n < 0:
        raise InvalidQueryError(f"Fox power must be nonnegative, got {n}")
    cap_A = ctx.cap if cap_A is None else cap_A
    if cap_A < ctx.cap:
        raise InvalidQueryError(
            f"Associative cap {cap_A} below the Lie cap {ctx.cap}",
            details={"cap_A": cap_A, "lie_cap": ctx.cap}
        )
    work = AssocContext(ctx.rank, cap_A)
    gens = [iota(r, work) for r in relators]
    target = ideal_span(gens, work, left_degree=n)
    result = preimage_columns(iota_columns(ctx, work), target)
    logger.info(f"F n w^{n} r has rank {result.rank}")
    return result


def relation_module_invariants(ctx: FreeLieContext, relators: Sequence[LieVec]) -> AbelianInvariants:
    """
    Invariants of R / (F n w r).

    Exact for homogeneous relators; with inhomogeneous relators the
    truncation may push F n w r outside R, which raises LatticeError.
    """
    R = _relator_lattice(ctx, relators)
    M = fox_intersection(ctx, relators, 1)
    return quotient_invariants(R, M)


def sandwich_check(ctx: FreeLieContext, relators: Sequence[LieVec]) -> CheckResult:
    """[R, R] <= F n w r <= sqrt[R, R] <= R, with sqrt[R,R] = saturate([R,R]) n R."""
    R = _relator_lattice(ctx, relators)
    RR = bracket_span(ctx, R, R)
    M = fox_intersection(ctx, relators, 1)
    root = intersect(saturate(RR), R)
    inclusions = {
        "commutator_in_fox": RR.issubset(M),
        "fox_in_radical": M.issubset(root),
        "radical_in_relators": root.issubset(R),
    }
    details: Dict[str, Any] = dict(inclusions)
    details.update({"rank_RR": RR.rank, "rank_M": M.rank, "rank_root": root.rank, "rank_R": R.rank})
    passed = all(inclusions.values())
    if not passed:
        logger.warning(f"Sandwich inclusions failed: {inclusions}")
    return CheckResult("sandwich", passed, None, details)


def metabelian_fox_check(ctx: FreeLieContext, n: int) -> bool:
    """F n (w^n + w a) = gamma_n(F) + F'', where a is the ideal generated by gamma_2(F)."""
    if n < 1:
        raise InvalidQueryError(f"n must be positive, got {n}")
    N = ctx.dimension
    right = lattice_sum(free_gamma_lattice(ctx, n), derived_lattice(ctx, 2))
    if n == 1:
        return right == Lattice.ambient(N)
    work = AssocContext(ctx.rank, n - 1)
    gens = [iota(ctx.vec(h), work, truncate=True) for h in ctx.degree_ids(2)]
    target = ideal_span(gens, work, left_degree=1)
    left = preimage_columns(iota_columns(ctx, work, truncate=True), target)
    return left == right


# Sjogren-type identity

def sjogren_lattices(ctx: FreeLieContext, relators: Sequence[LieVec], n: int) -> Tuple[Lattice, Lattice]:
    """
    Both sides of F n (w^(n+1) + r(n-1)) = gamma_{n+1}(F) + R(n-1).

    R(0) = R, R(k+1) = [R(k), F]; r(0) = U(F) R U(F),
    r(k+1) = w r(k) + r(k) w.
    """
    if n < 1:
        raise InvalidQueryError(f"n must be positive, got {n}")
    if ctx.cap < n + 1:
        raise InvalidQueryError(
            f"Lie cap {ctx.cap} too small for n={n}; need at least {n + 1}",
            details={"lie_cap": ctx.cap, "n": n}
        )
    work = AssocContext(ctx.rank, n)
    gens = [g for g in (iota(r, work, truncate=True) for r in relators) if g]
    left = preimage_columns(iota_columns(ctx, work, truncate=True), r_n_lattice(gens, n - 1, work))

    lower = _relator_lattice(ctx, relators)
    generators = Lattice.coordinate(ctx.dimension, ctx.degree_ids(1))
    for _ in range(n - 1):
        lower = bracket_span(ctx, lower, generators)
    right = lattice_sum(free_gamma_lattice(ctx, n + 1), lower)
    return left, right


def sjogren_equality_check(ctx: FreeLieContext, relators: Sequence[LieVec], n: int) -> bool:
    left, right = sjogren_lattices(ctx, relators, n)
    if left != right:
        logger.warning(f"Sjogren identity fails at n={n}: ranks {left.rank} and {right.rank}")
    return left == right
