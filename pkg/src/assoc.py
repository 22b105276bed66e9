"""
Degree-truncated free associative ring Z<x1..xm> / w^(D+1).

For a free Lie ring F this ring is the universal enveloping algebra U(F),
so the augmentation ideal w (words of degree >= 1), its powers and two-sided
ideals generated by relators are all coordinate lattices or spans of word
vectors here. The map iota sends a Hall element to its commutator
expansion.

Words of degree above the cap D are dropped by every product.
"""
import itertools
import logging
import threading
import weakref
from types import MappingProxyType
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

from src.hall import FreeLieContext, LieVec
from src.intlat import Lattice, Vector
from src.utils.error_handling import ContextMismatchError, InvalidQueryError

logger = logging.getLogger(__name__)

Word = Tuple[int, ...]
WordCoeffs = Dict[Word, int]


class AssocContext:
    """
    Word coordinates of Z<x1..xm> in degrees 1..cap.

    Words of one degree are enumerated lexicographically; ids are
    contiguous per degree, lowest degree first.
    """

    def __init__(self, m: int, cap: int):
        if m < 1:
            raise InvalidQueryError(f"Generator count must be positive, got {m}")
        if cap < 0:
            raise InvalidQueryError(f"Associative cap must be nonnegative, got {cap}")
        self.m = m
        self.cap = cap
        self.words: List[Word] = []
        self._degree_start: List[int] = [0, 0]
        for degree in range(1, cap + 1):
            self.words.extend(itertools.product(range(1, m + 1), repeat=degree))
            self._degree_start.append(len(self.words))
        self.index: Dict[Word, int] = {w: i for i, w in enumerate(self.words)}
        self._iota_cache: "weakref.WeakKeyDictionary[FreeLieContext, Dict[int, WordCoeffs]]" = weakref.WeakKeyDictionary()
        self._lock = threading.Lock()

    @property
    def dimension(self) -> int:
        return len(self.words)

    def word_ids(self, degree: int) -> range:
        if degree < 1 or degree > self.cap:
            return range(0)
        return range(self._degree_start[degree], self._degree_start[degree + 1])

    def ids_from_degree(self, degree: int) -> range:
        if degree > self.cap:
            return range(self.dimension, self.dimension)
        return range(self._degree_start[max(degree, 1)], self.dimension)

    def words_of_degree(self, degree: int) -> List[Word]:
        if degree == 0:
            return [()]
        return [self.words[i] for i in self.word_ids(degree)]

    def zero(self) -> "AssocVec":
        return AssocVec(self, {})

    def letter(self, index: int) -> "AssocVec":
        """The generator x_index as a word of degree one."""
        if not 1 <= index <= self.m:
            raise InvalidQueryError(f"No generator with index {index}")
        return AssocVec(self, {(index,): 1})

    def word(self, letters: Sequence[int]) -> "AssocVec":
        return AssocVec(self, {tuple(letters): 1})

    def from_dense(self, values: Sequence[int]) -> "AssocVec":
        if len(values) != self.dimension:
            raise ContextMismatchError(f"Expected {self.dimension} word coordinates, got {len(values)}")
        return AssocVec(self, {self.words[i]: v for i, v in enumerate(values) if v})

    def truncated(self, cap: int) -> "AssocContext":
        """A context on the same generators with a lower cap."""
        if cap == self.cap:
            return self
        return AssocContext(self.m, cap)


class AssocVec:
    """Integer combination of words of degree 1..cap."""
    __slots__ = ("ctx", "_coeffs")

    def __init__(self, ctx: AssocContext, coeffs: Optional[Mapping[Word, int]] = None):
        self.ctx = ctx
        cleaned: WordCoeffs = {}
        if coeffs:
            for w, value in coeffs.items():
                if not value:
                    continue
                if not 1 <= len(w) <= ctx.cap:
                    continue
                cleaned[tuple(w)] = int(value)
        self._coeffs = cleaned

    @property
    def cap_A(self) -> int:
        return self.ctx.cap

    @property
    def coeffs(self) -> Mapping[Word, int]:
        return MappingProxyType(self._coeffs)

    def items(self) -> Iterator[Tuple[Word, int]]:
        return iter(sorted(self._coeffs.items(), key=lambda kv: (len(kv[0]), kv[0])))

    def _check(self, other: "AssocVec") -> None:
        if not isinstance(other, AssocVec) or other.ctx is not self.ctx:
            raise ContextMismatchError("Word vectors belong to different contexts")

    def __add__(self, other: "AssocVec") -> "AssocVec":
        self._check(other)
        out = dict(self._coeffs)
        for w, value in other._coeffs.items():
            out[w] = out.get(w, 0) + value
        return AssocVec(self.ctx, out)

    def __sub__(self, other: "AssocVec") -> "AssocVec":
        return self + (-other)

    def __neg__(self) -> "AssocVec":
        return AssocVec(self.ctx, {w: -v for w, v in self._coeffs.items()})

    def __mul__(self, other):
        if isinstance(other, int):
            return AssocVec(self.ctx, {w: other * v for w, v in self._coeffs.items()})
        if isinstance(other, AssocVec):
            return mul(self, other)
        return NotImplemented

    def __rmul__(self, scalar):
        if isinstance(scalar, int):
            return self * scalar
        return NotImplemented

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AssocVec):
            return NotImplemented
        return other.ctx is self.ctx and other._coeffs == self._coeffs

    def __hash__(self) -> int:
        return hash(frozenset(self._coeffs.items()))

    def __bool__(self) -> bool:
        return bool(self._coeffs)

    def __repr__(self) -> str:
        if not self._coeffs:
            return "AssocVec(0)"
        terms = [f"{v}*{''.join(f'x{i}' for i in w)}" for w, v in self.items()]
        return f"AssocVec({' + '.join(terms)})"

    @property
    def lowest_degree(self) -> Optional[int]:
        if not self._coeffs:
            return None
        return min(len(w) for w in self._coeffs)

    def dense(self) -> Vector:
        out = [0] * self.ctx.dimension
        index = self.ctx.index
        for w, value in self._coeffs.items():
            out[index[w]] = value
        return tuple(out)


def _mul_coeffs(a: Mapping[Word, int], b: Mapping[Word, int], cap: int) -> WordCoeffs:
    out: WordCoeffs = {}
    for wa, ca in a.items():
        room = cap - len(wa)
        if room <= 0:
            continue
        for wb, cb in b.items():
            if len(wb) > room:
                continue
            w = wa + wb
            out[w] = out.get(w, 0) + ca * cb
    return out


def mul(a: AssocVec, b: AssocVec) -> AssocVec:
    """Concatenation product; words above the cap are dropped."""
    a._check(b)
    return AssocVec(a.ctx, _mul_coeffs(a._coeffs, b._coeffs, a.ctx.cap))


def _check_lie(lie_ctx: FreeLieContext, ctx: AssocContext, truncate: bool) -> None:
    if lie_ctx.rank != ctx.m:
        raise ContextMismatchError(
            f"Lie ring on {lie_ctx.rank} generators mapped into words on {ctx.m} letters"
        )
    if not truncate and lie_ctx.cap > ctx.cap:
        raise ContextMismatchError(
            f"Lie cap {lie_ctx.cap} exceeds associative cap {ctx.cap}",
            details={"lie_cap": lie_ctx.cap, "cap_A": ctx.cap}
        )


def _iota_basis(lie_ctx: FreeLieContext, ctx: AssocContext, element_id: int) -> WordCoeffs:
    with ctx._lock:
        table = ctx._iota_cache.get(lie_ctx)
        if table is None:
            table = {}
            ctx._iota_cache[lie_ctx] = table
    cached = table.get(element_id)
    if cached is not None:
        return cached
    element = lie_ctx.basis[element_id]
    if element.degree > ctx.cap:
        result: WordCoeffs = {}
    elif element.is_leaf:
        result = {(element.generator.index,): 1}
    else:
        left = _iota_basis(lie_ctx, ctx, element.left)
        right = _iota_basis(lie_ctx, ctx, element.right)
        result = _mul_coeffs(left, right, ctx.cap)
        for w, v in _mul_coeffs(right, left, ctx.cap).items():
            result[w] = result.get(w, 0) - v
        result = {w: v for w, v in result.items() if v}
    with ctx._lock:
        table[element_id] = result
    return result


def iota(a: LieVec, ctx: AssocContext, truncate: bool = False) -> AssocVec:
    """
    Commutator expansion of a Lie element: [u, v] -> uv - vu.

    Args:
        a: Element of the free Lie ring
        ctx: Word context on the same generators
        truncate: Allow an associative cap below the Lie cap (higher words dropped)

    Raises:
        ContextMismatchError: On generator or cap mismatch
    """
    _check_lie(a.ctx, ctx, truncate)
    out: WordCoeffs = {}
    for element_id, c in a.coeffs.items():
        for w, v in _iota_basis(a.ctx, ctx, element_id).items():
            out[w] = out.get(w, 0) + c * v
    return AssocVec(ctx, out)


def iota_columns(lie_ctx: FreeLieContext, ctx: AssocContext, truncate: bool = False) -> List[Vector]:
    """Dense images of every Hall basis element, in basis order."""
    _check_lie(lie_ctx, ctx, truncate)
    index = ctx.index
    columns = []
    for element_id in range(lie_ctx.dimension):
        col = [0] * ctx.dimension
        for w, v in _iota_basis(lie_ctx, ctx, element_id).items():
            col[index[w]] = v
        columns.append(tuple(col))
    return columns


def commutator_images(ctx: AssocContext, length: int) -> List[AssocVec]:
    """Images of all left-normed commutators of generators with ``length`` entries."""
    if length < 1:
        raise InvalidQueryError(f"Commutator length must be positive, got {length}")
    letters = [ctx.letter(i) for i in range(1, ctx.m + 1)]
    layer = list(letters)
    for _ in range(length - 1):
        layer = [mul(c, x) - mul(x, c) for c in layer for x in letters]
    return [c for c in layer if c]


def omega_power_lattice(n: int, ctx: AssocContext) -> Lattice:
    """
    The power w^n of the augmentation ideal: all words of degree >= n.

    Raises:
        InvalidQueryError: Unless 1 <= n <= cap + 1
    """
    if not 1 <= n <= ctx.cap + 1:
        raise InvalidQueryError(f"omega power {n} outside 1..{ctx.cap + 1}")
    return Lattice.coordinate(ctx.dimension, ctx.ids_from_degree(n))


def _ideal_vectors(gens: Iterable[AssocVec], ctx: AssocContext, left_degree: int) -> Iterator[Vector]:
    for g in gens:
        if g.ctx is not ctx:
            raise ContextMismatchError("Ideal generator from a different word context")
        low = g.lowest_degree
        if low is None:
            continue
        room = ctx.cap - low
        for du in range(left_degree, room + 1):
            for u in ctx.words_of_degree(du):
                ug = _mul_coeffs({u: 1}, g._coeffs, ctx.cap) if u else dict(g._coeffs)
                if not ug:
                    continue
                for dv in range(0, room - du + 1):
                    for v in ctx.words_of_degree(dv):
                        product = _mul_coeffs(ug, {v: 1}, ctx.cap) if v else ug
                        if product:
                            yield AssocVec(ctx, product).dense()


def ideal_span(gens: Sequence[AssocVec], ctx: AssocContext, left_degree: int = 0) -> Lattice:
    """
    Lattice spanned by u * g * v over words u, v and generators g.

    With ``left_degree = k`` only left factors u of degree >= k are used,
    which gives the one-sided product w^k * r of the ideal r generated by
    ``gens``. Zero generators are ignored.
    """
    if left_degree < 0:
        raise InvalidQueryError(f"left_degree must be nonnegative, got {left_degree}")
    lattice = Lattice.from_generators(ctx.dimension, _ideal_vectors(gens, ctx, left_degree))
    logger.debug(
        f"Ideal span of {len(gens)} generators in degrees <= {ctx.cap}: rank {lattice.rank}",
        extra={"left_degree": left_degree}
    )
    return lattice


def r_n_lattice(gens: Sequence[AssocVec], n: int, ctx: AssocContext) -> Lattice:
    """
    The ideals r(0) = <gens> and r(k+1) = w r(k) + r(k) w.

    Each r(k) is a two-sided ideal, so multiplying its basis on either side
    by single letters spans the next term.
    """
    if n < 0:
        raise InvalidQueryError(f"r_n index must be nonnegative, got {n}")
    current = ideal_span(gens, ctx)
    letters = [{(i,): 1} for i in range(1, ctx.m + 1)]
    for step in range(n):
        vectors = []
        for b in current.basis:
            element = ctx.from_dense(b)._coeffs
            for x in letters:
                for product in (_mul_coeffs(x, element, ctx.cap), _mul_coeffs(element, x, ctx.cap)):
                    if product:
                        vectors.append(AssocVec(ctx, product).dense())
        current = Lattice.from_generators(ctx.dimension, vectors)
        logger.debug(f"r({step + 1}) has rank {current.rank}")
    return current
