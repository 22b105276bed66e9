"""
Seeded random instances for the property suites.

All sampling goes through one ``random.Random``; the same seed gives the
same sequence of presentations. Hall contexts are shared per (m, cap) so
bracket tables are built once per family.
"""
import logging
import random
from typing import Dict, List, Optional, Sequence, Tuple

from src.counterexample import counterexample_presentation
from src.fplie import Presentation, substitute
from src.hall import FreeLieContext, LieVec, generate_hall_basis
from src.utils.error_handling import InvalidQueryError

logger = logging.getLogger(__name__)

PREABELIAN_DIVISORS = (0, 2, 4, 8, 16)
# every CONJUGATE_PERIOD-th delta_4 instance is isomorphic to the counterexample
CONJUGATE_PERIOD = 10


class PresentationSampler:
    """Random presentations, preabelian presentations and relator sets."""

    def __init__(self, seed: int = 0):
        self.seed = seed
        self.rng = random.Random(seed)
        self._contexts: Dict[Tuple[int, int], FreeLieContext] = {}
        self._delta4_draws = 0

    def context(self, m: int, cap: int) -> FreeLieContext:
        key = (m, cap)
        ctx = self._contexts.get(key)
        if ctx is None:
            ctx = generate_hall_basis(m, cap)
            self._contexts[key] = ctx
        return ctx

    def bracket_term(self, ctx: FreeLieContext, depth: int) -> LieVec:
        """A generator (depth 0), [xi,xj] (depth 1) or a nested triple bracket (depth 2)."""
        gens = [ctx.generator(i) for i in range(1, ctx.rank + 1)]
        if depth <= 0:
            return self.rng.choice(gens)
        if depth == 1:
            return ctx.bracket(self.rng.choice(gens), self.rng.choice(gens))
        inner = self.bracket_term(ctx, depth - 1)
        outer = self.rng.choice(gens)
        if self.rng.random() < 0.5:
            return ctx.bracket(inner, outer)
        return ctx.bracket(outer, inner)

    def combination(self, ctx: FreeLieContext, depths: Sequence[int], terms: int,
                    bound: int = 4) -> LieVec:
        """Sum of ``terms`` random brackets with coefficients in [-bound, bound]."""
        out = ctx.zero()
        for _ in range(terms):
            depth = self.rng.choice(list(depths))
            out = out + self.rng.randint(-bound, bound) * self.bracket_term(ctx, depth)
        return out

    def presentation(self, max_generators: int = 3, max_relators: int = 3, bound: int = 4,
                     max_depth: int = 2, class_cap: int = 4) -> Presentation:
        """
        Random presentation with 2..``max_generators`` generators and
        1..``max_relators`` relators of bracket depth <= ``max_depth``.
        Zero combinations are redrawn, so every sample has a relator.
        """
        m = self.rng.randint(min(2, max_generators), max_generators)
        ctx = self.context(m, class_cap)
        count = self.rng.randint(1, max(1, max_relators))
        relators: List[LieVec] = []
        while len(relators) < count:
            rel = self.combination(ctx, range(max_depth + 1), self.rng.randint(1, 3), bound)
            if rel:
                relators.append(rel)
        return Presentation(ctx, tuple(relators), class_cap)

    def preabelian_presentation(self, m: Optional[int] = None, class_cap: int = 4,
                                bound: int = 4) -> Presentation:
        """
        Relators e_i x_i + xi_i with e_i from {0, 2, 4, 8, 16} forming a
        divisibility chain (zeros last) and xi_i of degree 2 or 3, mostly 2.
        A relator whose divisor is zero is kept only when xi_i is nonzero.
        """
        m = m or self.rng.randint(2, 3)
        ctx = self.context(m, class_cap)
        drawn = [self.rng.choice(PREABELIAN_DIVISORS) for _ in range(m)]
        divisors = sorted(d for d in drawn if d) + [0] * drawn.count(0)
        relators: List[LieVec] = []
        for i, e in enumerate(divisors, start=1):
            xi = self.combination(ctx, (1, 1, 2), self.rng.randint(1, 3), bound)
            rel = e * ctx.generator(i) + xi
            if rel:
                relators.append(rel)
        logger.debug(f"Preabelian sample with divisors {divisors}")
        return Presentation(ctx, tuple(relators), class_cap)

    def unimodular(self, n: int, steps: int = 6) -> List[List[int]]:
        """Random n x n integer matrix of determinant +-1, a product of elementary moves."""
        U = [[int(i == j) for j in range(n)] for i in range(n)]
        if n < 2:
            return U
        for _ in range(steps):
            i, j = self.rng.sample(range(n), 2)
            move = self.rng.choice(("add", "add", "swap", "negate"))
            if move == "add":
                c = self.rng.choice((-1, 1))
                U[i] = [a + c * b for a, b in zip(U[i], U[j])]
            elif move == "swap":
                U[i], U[j] = U[j], U[i]
            else:
                U[i] = [-a for a in U[i]]
        return U

    def counterexample_conjugate(self, class_cap: int = 4) -> Presentation:
        """
        The counterexample ring in disguise: generators changed by a random
        unimodular substitution and relators recombined unimodularly.

        The result is isomorphic to the counterexample, so delta_4 / gamma_4
        is nontrivial, but its linear parts are no longer diagonal.
        """
        ctx = self.context(4, max(class_cap, 4))
        base = counterexample_presentation(class_cap, ctx)
        T = self.unimodular(ctx.rank)
        images = [
            sum((c * ctx.generator(i + 1) for i, c in enumerate(row) if c), ctx.zero())
            for row in T
        ]
        moved = [substitute(rel, images) for rel in base.relators]
        S = self.unimodular(len(moved))
        relators = [
            sum((s * rel for s, rel in zip(row, moved) if s), ctx.zero())
            for row in S
        ]
        logger.debug(f"Counterexample conjugate with generator change {T}")
        return Presentation(ctx, tuple(r for r in relators if r), class_cap)

    def delta4_instance(self, class_cap: int = 4) -> Presentation:
        """
        Next instance of the delta_4 family: a preabelian sample, except
        every ``CONJUGATE_PERIOD``-th draw, which is a counterexample conjugate.
        """
        self._delta4_draws += 1
        if self._delta4_draws % CONJUGATE_PERIOD == 0:
            return self.counterexample_conjugate(class_cap)
        return self.preabelian_presentation(class_cap=class_cap)

    def relator_set(self, ctx: FreeLieContext, count: int = 2, max_degree: int = 2,
                    bound: int = 4) -> List[LieVec]:
        """Up to ``count`` nonzero relators built from brackets of degree <= ``max_degree``."""
        if max_degree < 1:
            raise InvalidQueryError(f"max_degree must be positive, got {max_degree}")
        relators = []
        for _ in range(count):
            rel = self.combination(ctx, range(max_degree), self.rng.randint(1, 3), bound)
            if rel:
                relators.append(rel)
        return relators

    def homogeneous_relator(self, ctx: FreeLieContext, degree: int, bound: int = 4) -> LieVec:
        """A nonzero homogeneous element of the given degree."""
        ids = list(ctx.degree_ids(degree))
        if not ids:
            raise InvalidQueryError(f"No Hall elements of degree {degree} below cap {ctx.cap}")
        while True:
            coeffs = {h: self.rng.randint(-bound, bound) for h in self.rng.sample(ids, min(2, len(ids)))}
            vec = LieVec(ctx, coeffs)
            if vec:
                return vec
