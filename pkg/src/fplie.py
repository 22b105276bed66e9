"""
Finitely presented Lie rings over the integers.

A ``Presentation`` is a free Lie ring context, a finite list of relators
and a class cap c; gamma_{c+1}(F) is always part of the relations, so
every quotient computed here is L / gamma_{c+1}(L). All subgroups of F are
lattices in Hall coordinates of degree <= ctx.cap.

This module provides:
- Relator ideal closure and the lower central series lattices
- Nilpotent quotients with their additive invariants and induced bracket
- Preabelian form (Smith form of the linear parts of the relators)
- Derived series lattices and the associated graded presentation
"""
import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from sympy import Matrix

from src.hall import FreeLieContext, LieVec
from src.intlat import (
    AbelianInvariants,
    Lattice,
    int_matrix,
    intersect,
    lattice_sum,
    quotient_invariants,
    snf,
)
from src.utils.error_handling import ContextMismatchError, InvalidQueryError, LieDimError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Presentation:
    """
    L = <x1..xm | relators> modulo gamma_{class_cap + 1}.

    Instances are immutable; the relator ideal lattice is computed once on
    first use.
    """
    ctx: FreeLieContext
    relators: Tuple[LieVec, ...]
    class_cap: int

    def __post_init__(self):
        object.__setattr__(self, "relators", tuple(self.relators))
        if self.class_cap < 1:
            raise InvalidQueryError(f"Class cap must be positive, got {self.class_cap}")
        if self.class_cap > self.ctx.cap:
            raise InvalidQueryError(
                f"Class cap {self.class_cap} exceeds the Lie degree cap {self.ctx.cap}"
            )
        for rel in self.relators:
            if not isinstance(rel, LieVec) or rel.ctx is not self.ctx:
                raise ContextMismatchError("Relator built over a different context")
            if not rel:
                raise InvalidQueryError("Relators must be nonzero")

    @property
    def rank(self) -> int:
        return self.ctx.rank

    @cached_property
    def relator_lattice(self) -> Lattice:
        seeds = [rel.dense() for rel in self.relators]
        seeds.extend(_unit(self.ctx.dimension, i) for i in self.ctx.ids_from_degree(self.class_cap + 1))
        lattice = ideal_closure(self.ctx, Lattice.from_generators(self.ctx.dimension, seeds))
        logger.info(
            f"Relator ideal of {len(self.relators)} relators, class {self.class_cap}: rank {lattice.rank}",
            extra={"dimension": self.ctx.dimension}
        )
        return lattice

    def describe(self) -> str:
        rels = "; ".join(self.ctx.format_vec(r) for r in self.relators) or "-"
        names = " ".join(g.name for g in self.ctx.generators)
        return f"<{names} | {rels}> class {self.class_cap}"


def _unit(n: int, i: int) -> Tuple[int, ...]:
    vec = [0] * n
    vec[i] = 1
    return tuple(vec)


def ideal_closure(ctx: FreeLieContext, seeds: Lattice) -> Lattice:
    """
    Smallest Lie ideal lattice containing ``seeds``.

    Brackets the current basis with every generator and adds the results,
    sweeping until the HNF stops changing.
    """
    generators = [ctx.generator(i) for i in range(1, ctx.rank + 1)]
    current = seeds
    sweeps = 0
    while True:
        sweeps += 1
        vectors = list(current.basis)
        for b in current.basis:
            element = ctx.from_dense(b)
            for x in generators:
                product = ctx.bracket(element, x)
                if product:
                    vectors.append(product.dense())
        closed = Lattice.from_generators(ctx.dimension, vectors)
        if closed == current:
            logger.debug(f"Ideal closure stable after {sweeps} sweeps at rank {closed.rank}")
            return closed
        current = closed


def free_gamma_lattice(ctx: FreeLieContext, n: int) -> Lattice:
    """gamma_n(F): Hall elements of degree >= n."""
    if n < 1:
        raise InvalidQueryError(f"Lower central index must be positive, got {n}")
    return Lattice.coordinate(ctx.dimension, ctx.ids_from_degree(n))


def relator_ideal_lattice(pres: Presentation) -> Lattice:
    """R + gamma_{c+1}(F) in Hall coordinates."""
    return pres.relator_lattice


def gamma_lattice(pres: Presentation, n: int) -> Lattice:
    """
    gamma_n(F) + R.

    For n > c + 1 this is the relator lattice itself, since
    gamma_n(F) lies in gamma_{c+1}(F).
    """
    return lattice_sum(free_gamma_lattice(pres.ctx, n), relator_ideal_lattice(pres))


def bracket_span(ctx: FreeLieContext, A: Lattice, B: Lattice) -> Lattice:
    """Lattice spanned by the brackets [a, b] of basis vectors a of A and b of B."""
    vectors = []
    left = [ctx.from_dense(a) for a in A.basis]
    right = left if A is B else [ctx.from_dense(b) for b in B.basis]
    for i, a in enumerate(left):
        start = i + 1 if A is B else 0
        for b in right[start:]:
            product = ctx.bracket(a, b)
            if product:
                vectors.append(product.dense())
    return Lattice.from_generators(ctx.dimension, vectors)


def derived_lattice(ctx: FreeLieContext, k: int) -> Lattice:
    """
    k-th derived subring of F: F^(0) = F, F^(j+1) = [F^(j), F^(j)].

    Each term is an ideal, and it is spanned by brackets of pairs from a
    spanning set of the previous term.
    """
    if k < 0:
        raise InvalidQueryError(f"Derived index must be nonnegative, got {k}")
    if k == 0:
        return Lattice.ambient(ctx.dimension)
    current = free_gamma_lattice(ctx, 2)
    for _ in range(k - 1):
        current = bracket_span(ctx, current, current)
    return current


def second_derived_lattice(pres: Presentation, include_relators: bool = False) -> Lattice:
    """F'' (plus the relator ideal when requested)."""
    lattice = derived_lattice(pres.ctx, 2)
    if include_relators:
        lattice = lattice_sum(lattice, pres.relator_lattice)
    return lattice


def with_relators(pres: Presentation, extra: Iterable[LieVec], class_cap: Optional[int] = None) -> Presentation:
    """A presentation with additional relators (zero vectors are skipped)."""
    relators = list(pres.relators) + [r for r in extra if r]
    return Presentation(pres.ctx, tuple(relators), class_cap or pres.class_cap)


def substitute(vec: LieVec, images: Sequence[LieVec]) -> LieVec:
    """
    Apply the endomorphism of F sending generator i to ``images[i - 1]``.

    Args:
        vec: Element to transform
        images: One image per generator, in the same context

    Returns:
        LieVec: The image of ``vec``
    """
    ctx = vec.ctx
    if len(images) != ctx.rank:
        raise InvalidQueryError(f"Expected {ctx.rank} generator images, got {len(images)}")
    for img in images:
        if img.ctx is not ctx:
            raise ContextMismatchError("Generator image from a different context")
    memo: Dict[int, LieVec] = {}

    def image(element_id: int) -> LieVec:
        cached = memo.get(element_id)
        if cached is not None:
            return cached
        element = ctx.basis[element_id]
        if element.is_leaf:
            result = images[element.generator.index - 1]
        else:
            result = ctx.bracket(image(element.left), image(element.right))
        memo[element_id] = result
        return result

    out = ctx.zero()
    for element_id, c in vec.items():
        out = out + c * image(element_id)
    return out


@dataclass(frozen=True, eq=False)
class NilpotentQuotient:
    """L / gamma_{c+1}(L) as Z^N modulo the relator lattice."""
    pres: Presentation
    rel_lattice: Lattice
    invariants: AbelianInvariants

    def is_zero(self, vec: LieVec) -> bool:
        self._check(vec)
        return vec.dense() in self.rel_lattice

    def reduce(self, vec: LieVec) -> LieVec:
        """Canonical representative of the class of ``vec``."""
        self._check(vec)
        return self.pres.ctx.from_dense(self.rel_lattice.reduce(vec.dense()))

    def bracket(self, a: LieVec, b: LieVec) -> LieVec:
        """Induced bracket, returned as a canonical representative."""
        return self.reduce(self.pres.ctx.bracket(a, b))

    @cached_property
    def _smith(self) -> Tuple[Tuple[int, ...], List[List[int]]]:
        divisors, S, _ = snf(self.rel_lattice.matrix())
        return divisors, [[int(x) for x in row] for row in S.to_list()]

    def coordinates(self, vec: LieVec) -> Tuple[int, ...]:
        """
        Coordinates of the class of ``vec``: one residue per torsion summand
        (in the order of ``invariants.torsion``), then the free coordinates.
        """
        self._check(vec)
        divisors, S = self._smith
        values = vec.dense()
        y = [sum(s * v for s, v in zip(row, values) if v) for row in S]
        torsion = []
        free = []
        for i, yi in enumerate(y):
            d = divisors[i] if i < len(divisors) else 0
            if d == 1:
                continue
            if d == 0:
                free.append(yi)
            else:
                torsion.append(yi % d)
        return tuple(torsion + free)

    def _check(self, vec: LieVec) -> None:
        if vec.ctx is not self.pres.ctx:
            raise ContextMismatchError("Vector from a different context than the quotient")


def nilpotent_quotient(pres: Presentation) -> NilpotentQuotient:
    """Additive structure of L / gamma_{c+1}(L)."""
    rel = relator_ideal_lattice(pres)
    invariants = quotient_invariants(Lattice.ambient(pres.ctx.dimension), rel)
    logger.info(f"Nilpotent quotient of class {pres.class_cap}: {invariants}")
    return NilpotentQuotient(pres=pres, rel_lattice=rel, invariants=invariants)


def lower_central_factors(nq: NilpotentQuotient) -> List[AbelianInvariants]:
    """Invariants of gamma_n(L) / gamma_{n+1}(L) for n = 1..c."""
    pres = nq.pres
    gammas = [gamma_lattice(pres, n) for n in range(1, pres.class_cap + 2)]
    return [quotient_invariants(gammas[i], gammas[i + 1]) for i in range(pres.class_cap)]


@dataclass(frozen=True, eq=False)
class PreabelianData:
    """
    Presentation rewritten as e_i X_i + xi_i with e_1 | e_2 | ... | e_m.

    ``transform`` expresses the old generators in the new ones
    (x_k = sum_i transform[k][i] X_i); ``inverse`` goes the other way.
    ``leading[i]`` is the relator e_i X_i + xi_i (possibly zero);
    ``trailing`` holds the relators xi_{m+1}, ... in gamma_2(F).
    """
    source: Presentation
    divisors: Tuple[int, ...]
    leading: Tuple[LieVec, ...]
    trailing: Tuple[LieVec, ...]
    transform: Tuple[Tuple[int, ...], ...]
    inverse: Tuple[Tuple[int, ...], ...]

    @property
    def ctx(self) -> FreeLieContext:
        return self.source.ctx

    def xi(self, i: int) -> LieVec:
        """The gamma_2 part of the i-th leading relator (1-based)."""
        rel = self.leading[i - 1]
        return rel - self.divisors[i - 1] * self.ctx.generator(i)

    @cached_property
    def presentation(self) -> Presentation:
        relators = [r for r in self.leading if r] + [r for r in self.trailing if r]
        return Presentation(self.ctx, tuple(relators), self.source.class_cap)


def _linear_part(rel: LieVec, m: int) -> List[int]:
    coeffs = rel.coeffs
    return [coeffs.get(i, 0) for i in range(m)]


def _is_preabelian(rows: List[List[int]], m: int) -> bool:
    previous = 1
    for j, row in enumerate(rows):
        for i, value in enumerate(row):
            if i != j and value:
                return False
        if j < m:
            d = row[j]
            if d < 0:
                return False
            if d and (previous == 0 or d % previous):
                return False
            if previous and not d:
                previous = 0
            elif d:
                previous = d
    return True


def preabelianize(pres: Presentation) -> PreabelianData:
    """
    Change generators and relators unimodularly so that the linear parts
    of the relators become e_i X_i.

    When the linear parts already have that shape the identity change is
    used.
    """
    ctx = pres.ctx
    m = ctx.rank
    k = len(pres.relators)
    rows = [_linear_part(r, m) for r in pres.relators]

    if _is_preabelian(rows, m):
        divisors = [rows[j][j] for j in range(min(k, m))]
        S = [[int(i == j) for j in range(k)] for i in range(k)]
        T = [[int(i == j) for j in range(m)] for i in range(m)]
    else:
        divisors_t, S_mat, T_mat = snf(int_matrix(rows, (k, m)))
        divisors = list(divisors_t)
        S = [[int(x) for x in row] for row in S_mat.to_list()]
        T = [[int(x) for x in row] for row in T_mat.to_list()]
    divisors = divisors + [0] * (m - len(divisors))

    T_inverse = Matrix(T).inv()
    inverse = tuple(tuple(int(T_inverse[i, j]) for j in range(m)) for i in range(m))

    # x_k = sum_i T[k][i] X_i
    images = []
    for row in T:
        img = ctx.zero()
        for i, c in enumerate(row):
            if c:
                img = img + c * ctx.generator(i + 1)
        images.append(img)

    new_relators = []
    for j in range(k):
        combined = ctx.zero()
        for l, s in enumerate(S[j]):
            if s:
                combined = combined + s * pres.relators[l]
        new_relators.append(substitute(combined, images))

    leading = list(new_relators[:m]) + [ctx.zero()] * max(0, m - k)
    trailing = new_relators[m:]
    data = PreabelianData(
        source=pres,
        divisors=tuple(divisors),
        leading=tuple(leading),
        trailing=tuple(trailing),
        transform=tuple(tuple(row) for row in T),
        inverse=inverse,
    )
    logger.info(f"Preabelian divisors {data.divisors}", extra={"trailing": len(trailing)})
    return data


def associated_graded(nq: NilpotentQuotient, check: bool = False) -> Presentation:
    """
    Presentation of gr(L) = sum of gamma_n(L)/gamma_{n+1}(L), n = 1..c.

    The degree-n relators are the degree-n components of the elements of
    (R + gamma_{n+1}(F)) intersected with gamma_n(F).

    Args:
        nq: The nilpotent quotient to grade
        check: Compare the graded pieces with those of ``nq`` and raise on mismatch

    Returns:
        Presentation: Homogeneous presentation with the same class cap
    """
    pres = nq.pres
    ctx = pres.ctx
    relators: List[LieVec] = []
    for n in range(1, pres.class_cap + 1):
        filtered = intersect(
            lattice_sum(nq.rel_lattice, free_gamma_lattice(ctx, n + 1)),
            free_gamma_lattice(ctx, n),
        )
        for b in filtered.basis:
            leading = ctx.from_dense(b).component(n)
            if leading:
                relators.append(leading)
    graded = Presentation(ctx, tuple(relators), pres.class_cap)
    if check:
        expected = lower_central_factors(nq)
        actual = lower_central_factors(nilpotent_quotient(graded))
        if expected != actual:
            raise LieDimError(
                "Associated graded presentation has different graded pieces",
                details={"expected": [str(a) for a in expected], "actual": [str(a) for a in actual]}
            )
    return graded
