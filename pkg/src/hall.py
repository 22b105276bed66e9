"""
Free Lie rings over the integers on a Hall basis.

This module provides:
- Generation of the Hall basis of the free Lie ring on m generators up to a
  degree cap (Marshall Hall's basic commutators)
- Sparse integer vectors over that basis (``LieVec``)
- Bracket normalization by antisymmetry and the Jacobi identity, memoized
  per pair of basis ids
- The Witt necklace formula for the rank of each degree

All arithmetic happens in F/γ_{cap+1}(F): components of degree above the
cap are dropped.

Order on basis elements: degree first; within a degree leaves follow the
generator index and nodes compare by (left id, right id). A node [u, v] is
a basis element when u > v and, if u = [u1, u2], also u2 <= v.
"""
import logging
import threading
from dataclasses import dataclass
from types import MappingProxyType
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

from sympy.functions.combinatorial.numbers import mobius
from sympy.ntheory import divisors

from src.utils.error_handling import ContextMismatchError, InvalidQueryError

logger = logging.getLogger(__name__)

Coeffs = Dict[int, int]


@dataclass(frozen=True)
class Generator:
    """A free generator; ``index`` runs over 1..m."""
    index: int
    name: str


@dataclass(frozen=True)
class HallElement:
    """
    A Hall basis element.

    Leaves carry ``generator``; nodes carry the ids of their ``left`` and
    ``right`` factors. ``id`` is the position in the ordered basis.
    """
    id: int
    degree: int
    generator: Optional[Generator] = None
    left: Optional[int] = None
    right: Optional[int] = None

    @property
    def is_leaf(self) -> bool:
        return self.generator is not None


class LieVec:
    """
    An integer combination of Hall basis elements.

    Values are immutable; arithmetic returns new vectors. Two vectors can
    only be combined when they belong to the same context.
    """
    __slots__ = ("ctx", "_coeffs", "_hash")

    def __init__(self, ctx: "FreeLieContext", coeffs: Optional[Mapping[int, int]] = None):
        self.ctx = ctx
        cleaned: Coeffs = {}
        if coeffs:
            for key, value in coeffs.items():
                if value:
                    if not 0 <= key < ctx.dimension:
                        raise ContextMismatchError(
                            f"Basis id {key} outside context of dimension {ctx.dimension}"
                        )
                    cleaned[key] = int(value)
        self._coeffs = cleaned
        self._hash: Optional[int] = None

    @property
    def cap(self) -> int:
        return self.ctx.cap

    @property
    def coeffs(self) -> Mapping[int, int]:
        return MappingProxyType(self._coeffs)

    def items(self) -> Iterator[Tuple[int, int]]:
        return iter(sorted(self._coeffs.items()))

    def _check(self, other: "LieVec") -> None:
        if not isinstance(other, LieVec) or other.ctx is not self.ctx:
            raise ContextMismatchError("Lie vectors belong to different contexts")

    def __add__(self, other: "LieVec") -> "LieVec":
        self._check(other)
        out = dict(self._coeffs)
        for key, value in other._coeffs.items():
            out[key] = out.get(key, 0) + value
        return LieVec(self.ctx, out)

    def __sub__(self, other: "LieVec") -> "LieVec":
        return self + (-other)

    def __neg__(self) -> "LieVec":
        return LieVec(self.ctx, {k: -v for k, v in self._coeffs.items()})

    def __mul__(self, scalar: int) -> "LieVec":
        if not isinstance(scalar, int):
            return NotImplemented
        return LieVec(self.ctx, {k: scalar * v for k, v in self._coeffs.items()})

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LieVec):
            return NotImplemented
        return other.ctx is self.ctx and other._coeffs == self._coeffs

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._coeffs.items()))
        return self._hash

    def __bool__(self) -> bool:
        return bool(self._coeffs)

    def __repr__(self) -> str:
        return f"LieVec({self.ctx.format_vec(self)})"

    def degrees(self) -> List[int]:
        """Sorted list of degrees with a nonzero component."""
        return sorted({self.ctx.basis[k].degree for k in self._coeffs})

    def component(self, degree: int) -> "LieVec":
        """Homogeneous component of the given degree."""
        basis = self.ctx.basis
        return LieVec(self.ctx, {k: v for k, v in self._coeffs.items() if basis[k].degree == degree})

    def above(self, degree: int) -> "LieVec":
        """Sum of the components of degree strictly greater than ``degree``."""
        basis = self.ctx.basis
        return LieVec(self.ctx, {k: v for k, v in self._coeffs.items() if basis[k].degree > degree})

    def dense(self) -> Tuple[int, ...]:
        """Coordinates in the full Hall basis of the context."""
        out = [0] * self.ctx.dimension
        for key, value in self._coeffs.items():
            out[key] = value
        return tuple(out)


class FreeLieContext:
    """
    The free Lie ring on ``generators`` truncated above degree ``cap``.

    The basis is fixed at construction. The bracket table fills lazily and
    is guarded by a lock, so a context can be shared between threads.
    """

    def __init__(self, generators: Sequence[Generator], cap: int):
        if not generators:
            raise InvalidQueryError("A free Lie ring needs at least one generator")
        if cap < 1:
            raise InvalidQueryError(f"Degree cap must be positive, got {cap}")
        names = [g.name for g in generators]
        if len(set(names)) != len(names):
            raise InvalidQueryError(f"Generator names must be unique: {names}")
        self.generators: Tuple[Generator, ...] = tuple(generators)
        self.cap = cap
        self.basis: Tuple[HallElement, ...] = ()
        self._node_index: Dict[Tuple[int, int], int] = {}
        self._degree_start: List[int] = []
        self._build_basis()
        self._table: Dict[Tuple[int, int], Coeffs] = {}
        self._lock = threading.RLock()

    def _build_basis(self) -> None:
        elements: List[HallElement] = []
        by_degree: List[List[HallElement]] = [[]]
        for gen in self.generators:
            elements.append(HallElement(id=len(elements), degree=1, generator=gen))
        by_degree.append(list(elements))
        self._degree_start = [0, 0]

        for degree in range(2, self.cap + 1):
            candidates: List[Tuple[int, int]] = []
            for left_degree in range(degree - 1, 0, -1):
                right_degree = degree - left_degree
                if right_degree > left_degree:
                    break
                for u in by_degree[left_degree]:
                    for v in by_degree[right_degree]:
                        if u.id <= v.id:
                            continue
                        if not u.is_leaf and u.right > v.id:
                            continue
                        candidates.append((u.id, v.id))
            candidates.sort()
            self._degree_start.append(len(elements))
            layer = []
            for left, right in candidates:
                element = HallElement(id=len(elements), degree=degree, left=left, right=right)
                self._node_index[(left, right)] = element.id
                elements.append(element)
                layer.append(element)
            by_degree.append(layer)

        self._degree_start.append(len(elements))
        self.basis = tuple(elements)
        logger.debug(
            f"Hall basis on {self.rank} generators up to degree {self.cap}: {len(elements)} elements",
            extra={"sizes": [self.degree_size(d) for d in range(1, self.cap + 1)]}
        )

    @property
    def rank(self) -> int:
        """Number of generators m."""
        return len(self.generators)

    @property
    def dimension(self) -> int:
        """Number of Hall basis elements of degree at most ``cap``."""
        return len(self.basis)

    def degree_ids(self, degree: int) -> range:
        """Ids of the basis elements of a given degree (empty above the cap)."""
        if degree < 1 or degree > self.cap:
            return range(0)
        return range(self._degree_start[degree], self._degree_start[degree + 1])

    def ids_from_degree(self, degree: int) -> range:
        """Ids of all basis elements of degree at least ``degree``."""
        start = self._degree_start[max(degree, 1)] if degree <= self.cap else self.dimension
        return range(start, self.dimension)

    def degree_size(self, degree: int) -> int:
        return len(self.degree_ids(degree))

    def zero(self) -> LieVec:
        return LieVec(self, {})

    def vec(self, element_id: int) -> LieVec:
        """The basis element with the given id as a vector."""
        return LieVec(self, {element_id: 1})

    def generator(self, index: int) -> LieVec:
        """The generator x_index (1-based)."""
        if not 1 <= index <= self.rank:
            raise InvalidQueryError(f"No generator with index {index}")
        return self.vec(index - 1)

    def generator_by_name(self, name: str) -> LieVec:
        for gen in self.generators:
            if gen.name == name:
                return self.generator(gen.index)
        raise InvalidQueryError(f"No generator named {name!r}")

    def from_dense(self, values: Sequence[int]) -> LieVec:
        if len(values) != self.dimension:
            raise ContextMismatchError(
                f"Expected {self.dimension} coordinates, got {len(values)}"
            )
        return LieVec(self, {i: v for i, v in enumerate(values) if v})

    def node_id(self, left: int, right: int) -> Optional[int]:
        """Id of the basis node [left, right], if that pair is a basis element."""
        return self._node_index.get((left, right))

    # Bracket normalization

    def _bracket_ids(self, i: int, j: int) -> Coeffs:
        if i == j:
            return {}
        if self.basis[i].degree + self.basis[j].degree > self.cap:
            return {}
        if i < j:
            return {k: -v for k, v in self._bracket_ids(j, i).items()}

        key = (i, j)
        with self._lock:
            cached = self._table.get(key)
            if cached is not None:
                return cached

            u = self.basis[i]
            if u.is_leaf or u.right <= j:
                result = {self._node_index[key]: 1}
            else:
                # [[u1, u2], v] = [u1, [u2, v]] + [[u1, v], u2]
                result = {}
                for k, c in self._bracket_ids(u.right, j).items():
                    _accumulate(result, self._bracket_ids(u.left, k), c)
                for k, c in self._bracket_ids(u.left, j).items():
                    _accumulate(result, self._bracket_ids(k, u.right), c)
                result = {k: v for k, v in result.items() if v}
            self._table[key] = result
            return result

    def bracket(self, a: LieVec, b: LieVec) -> LieVec:
        """Normalized Hall form of [a, b], truncated above the cap."""
        if a.ctx is not self or b.ctx is not self:
            raise ContextMismatchError("Bracket of vectors from a different context")
        out: Coeffs = {}
        for i, ca in a._coeffs.items():
            for j, cb in b._coeffs.items():
                _accumulate(out, self._bracket_ids(i, j), ca * cb)
        return LieVec(self, out)

    def left_normed(self, indices: Sequence[int]) -> LieVec:
        """The left-normed commutator [x_{i1}, x_{i2}, ..., x_{ir}] (1-based indices)."""
        if not indices:
            raise InvalidQueryError("A commutator needs at least one entry")
        result = self.generator(indices[0])
        for index in indices[1:]:
            result = self.bracket(result, self.generator(index))
        return result

    # Display

    def format_element(self, element_id: int) -> str:
        element = self.basis[element_id]
        if element.is_leaf:
            return element.generator.name
        return f"[{self.format_element(element.left)},{self.format_element(element.right)}]"

    def format_vec(self, vec: LieVec) -> str:
        """Render a vector in the presentation-file expression syntax."""
        if not vec:
            return "0"
        parts: List[str] = []
        for key, value in vec.items():
            sign = "-" if value < 0 else "+"
            magnitude = abs(value)
            term = self.format_element(key)
            if magnitude != 1:
                term = f"{magnitude}*{term}"
            if not parts:
                parts.append(term if sign == "+" else f"-{term}")
            else:
                parts.append(f"{sign} {term}")
        return " ".join(parts)


def _accumulate(target: Coeffs, source: Mapping[int, int], scale: int) -> None:
    if not scale:
        return
    for key, value in source.items():
        target[key] = target.get(key, 0) + scale * value


def generate_hall_basis(m: int, cap: int, names: Optional[Iterable[str]] = None) -> FreeLieContext:
    """
    Build the free Lie ring on m generators truncated above degree ``cap``.

    Args:
        m: Number of generators
        cap: Degree bound
        names: Optional generator names; defaults to x1..xm

    Returns:
        FreeLieContext: The context holding the ordered Hall basis

    Raises:
        InvalidQueryError: If m or cap is not positive
    """
    if m < 1:
        raise InvalidQueryError(f"Generator count must be positive, got {m}")
    if cap < 1:
        raise InvalidQueryError(f"Degree cap must be positive, got {cap}")
    name_list = list(names) if names is not None else [f"x{i}" for i in range(1, m + 1)]
    if len(name_list) != m:
        raise InvalidQueryError(f"Expected {m} generator names, got {len(name_list)}")
    generators = [Generator(index=i + 1, name=name) for i, name in enumerate(name_list)]
    return FreeLieContext(generators, cap)


def bracket(a: LieVec, b: LieVec, ctx: FreeLieContext) -> LieVec:
    """Normalized Hall form of [a, b] in ``ctx``."""
    return ctx.bracket(a, b)


def left_normed(ctx: FreeLieContext, indices: Sequence[int]) -> LieVec:
    return ctx.left_normed(indices)


def format_vec(vec: LieVec) -> str:
    return vec.ctx.format_vec(vec)


def witt_rank(m: int, n: int) -> int:
    """
    Rank of the degree-n part of the free Lie ring on m generators.

    Args:
        m: Number of generators
        n: Degree

    Returns:
        int: (1/n) * sum over d | n of mobius(d) * m^(n/d)
    """
    if m < 1 or n < 1:
        raise InvalidQueryError(f"witt_rank needs m >= 1 and n >= 1, got m={m}, n={n}")
    total = sum(int(mobius(d)) * m ** (n // d) for d in divisors(n))
    return total // n
