"""
Exact integer lattice arithmetic.

Subgroups of Z^N are stored as ``Lattice`` objects whose basis is the
canonical Hermite normal form of a generating set: basis vectors are
ordered by strictly increasing pivot position, every pivot is positive and
the entries of earlier vectors at a pivot position lie in [0, pivot).
Two lattices are equal exactly when their bases are identical.

The echelon form is built incrementally with unimodular row operations
(division when one entry divides the other, an extended-gcd 2x2 step
otherwise). Carrying identity tags through the same operations yields
transform certificates and kernels. Smith forms come from sympy.
"""
import logging
from dataclasses import dataclass
from math import gcd
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from sympy.polys.domains import ZZ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.normalforms import invariant_factors, smith_normal_decomp

from src.utils.error_handling import LatticeError

logger = logging.getLogger(__name__)

Vector = Tuple[int, ...]
IntMat = DomainMatrix


def int_matrix(rows: Sequence[Sequence[int]], shape: Optional[Tuple[int, int]] = None) -> IntMat:
    """
    Build an integer matrix over ZZ.

    Args:
        rows: Row-major entries
        shape: Required when there are no rows (or rows are empty)

    Returns:
        IntMat: The matrix as a sympy DomainMatrix
    """
    if shape is None:
        shape = (len(rows), len(rows[0]) if rows else 0)
    nrows, ncols = shape
    if nrows == 0 or ncols == 0:
        return DomainMatrix.zeros((nrows, ncols), ZZ)
    return DomainMatrix([[ZZ(int(x)) for x in row] for row in rows], (nrows, ncols), ZZ)


def matrix_from_columns(columns: Sequence[Sequence[int]], nrows: int) -> IntMat:
    """Matrix whose columns are the given vectors."""
    rows = [[int(col[i]) for col in columns] for i in range(nrows)]
    return int_matrix(rows, (nrows, len(columns)))


def matrix_columns(M: IntMat) -> List[Vector]:
    """Columns of an integer matrix as tuples of Python ints."""
    nrows, ncols = M.shape
    entries = M.to_list()
    return [tuple(int(entries[i][j]) for i in range(nrows)) for j in range(ncols)]


def py_xgcd(a: int, b: int) -> Tuple[int, int, int]:
    """Return (x, y, g) with x*a + y*b == g == +-gcd(a, b)."""
    x, next_x = 1, 0
    y, next_y = 0, 1
    g, next_g = a, b
    while next_g:
        q = g // next_g
        x, next_x = next_x, x - q * next_x
        y, next_y = next_y, y - q * next_y
        g, next_g = next_g, g - q * next_g
    return x, y, g


class _Echelon:
    """
    Incremental row echelon form of integer vectors.

    Pivots are taken only among the first ``width`` entries; the remaining
    entries are tags carried along by every row operation. Vectors whose
    first ``width`` entries vanish after reduction are kept in ``residues``
    (their tags span the relations among the inputs).
    """

    def __init__(self, width: int, total: int):
        self.width = width
        self.total = total
        self.rows: Dict[int, List[int]] = {}
        self.residues: List[List[int]] = []

    def add(self, vec0: Sequence[int]) -> None:
        vec = [int(x) for x in vec0]
        width, total = self.width, self.total
        j = 0
        while True:
            while j < width and not vec[j]:
                j += 1
            if j == width:
                if any(vec[width:]):
                    self.residues.append(vec)
                return
            row = self.rows.get(j)
            if row is None:
                self.rows[j] = vec
                return
            a = row[j]
            b = vec[j]
            if b % a == 0:
                q = b // a
                for jj in range(j, total):
                    vec[jj] -= q * row[jj]
            elif a % b == 0:
                row[j:], vec[j:] = vec[j:], row[j:]
                q = a // b
                for jj in range(j, total):
                    vec[jj] -= q * row[jj]
            else:
                x, y, g = py_xgcd(a, b)
                ag = a // g
                mbg = -b // g
                for jj in range(j, total):
                    aa = row[jj]
                    bb = vec[jj]
                    row[jj] = x * aa + y * bb
                    vec[jj] = mbg * aa + ag * bb

    def reduced(self) -> Tuple[List[int], List[List[int]]]:
        """Pivot positions and rows in canonical (Hermite) form."""
        pivots = sorted(self.rows)
        rows = [self.rows[p] for p in pivots]
        total = self.total
        for k, p in enumerate(pivots):
            row = rows[k]
            if row[p] < 0:
                for jj in range(total):
                    row[jj] = -row[jj]
            piv = row[p]
            for earlier in rows[:k]:
                q = earlier[p] // piv
                if q:
                    for jj in range(p, total):
                        earlier[jj] -= q * row[jj]
        return pivots, rows


class Lattice:
    """
    A subgroup of Z^N in canonical Hermite normal form.

    Instances are immutable. ``basis`` holds the HNF vectors; the column
    HNF matrix of the lattice is the matrix with these vectors as columns.
    """
    __slots__ = ("ambient_rank", "basis", "pivots", "_hash")

    def __init__(self, ambient_rank: int, basis: Sequence[Vector], pivots: Sequence[int]):
        # Callers must pass an already canonical basis; use the class constructors.
        self.ambient_rank = ambient_rank
        self.basis: Tuple[Vector, ...] = tuple(tuple(v) for v in basis)
        self.pivots: Tuple[int, ...] = tuple(pivots)
        self._hash: Optional[int] = None

    @classmethod
    def from_generators(cls, ambient_rank: int, vectors: Iterable[Sequence[int]]) -> "Lattice":
        """Lattice spanned by the given vectors."""
        echelon = _Echelon(ambient_rank, ambient_rank)
        for vec in vectors:
            if len(vec) != ambient_rank:
                raise LatticeError(
                    f"Vector of length {len(vec)} in ambient rank {ambient_rank}"
                )
            echelon.add(vec)
        pivots, rows = echelon.reduced()
        return cls(ambient_rank, rows, pivots)

    @classmethod
    def zero(cls, ambient_rank: int) -> "Lattice":
        return cls(ambient_rank, (), ())

    @classmethod
    def ambient(cls, ambient_rank: int) -> "Lattice":
        return cls.coordinate(ambient_rank, range(ambient_rank))

    @classmethod
    def coordinate(cls, ambient_rank: int, indices: Iterable[int]) -> "Lattice":
        """Lattice spanned by the unit vectors at ``indices``."""
        chosen = sorted(set(indices))
        basis = []
        for i in chosen:
            vec = [0] * ambient_rank
            vec[i] = 1
            basis.append(tuple(vec))
        return cls(ambient_rank, basis, chosen)

    @property
    def rank(self) -> int:
        return len(self.basis)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Lattice):
            return NotImplemented
        return self.ambient_rank == other.ambient_rank and self.basis == other.basis

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.ambient_rank, self.basis))
        return self._hash

    def __repr__(self) -> str:
        return f"Lattice(ambient_rank={self.ambient_rank}, rank={self.rank})"

    def _check_vector(self, vec: Sequence[int]) -> None:
        if len(vec) != self.ambient_rank:
            raise LatticeError(
                f"Vector of length {len(vec)} tested against lattice in Z^{self.ambient_rank}"
            )

    def coordinates(self, vec: Sequence[int]) -> Optional[Vector]:
        """Integer coordinates of ``vec`` in the HNF basis, or None if not a member."""
        self._check_vector(vec)
        work = [int(x) for x in vec]
        coords = []
        N = self.ambient_rank
        previous = 0
        for p, row in zip(self.pivots, self.basis):
            if any(work[previous:p]):
                return None
            q, r = divmod(work[p], row[p])
            if r:
                return None
            coords.append(q)
            if q:
                for jj in range(p, N):
                    work[jj] -= q * row[jj]
            previous = p + 1
        if any(work[previous:]):
            return None
        return tuple(coords)

    def __contains__(self, vec: Sequence[int]) -> bool:
        return self.coordinates(vec) is not None

    def reduce(self, vec: Sequence[int]) -> Vector:
        """Canonical representative of ``vec`` modulo the lattice."""
        self._check_vector(vec)
        work = [int(x) for x in vec]
        N = self.ambient_rank
        for p, row in zip(self.pivots, self.basis):
            q = work[p] // row[p]
            if q:
                for jj in range(p, N):
                    work[jj] -= q * row[jj]
        return tuple(work)

    def issubset(self, other: "Lattice") -> bool:
        """True when every basis vector of this lattice lies in ``other``."""
        _same_ambient(self, other)
        return all(v in other for v in self.basis)

    __le__ = issubset

    def matrix(self) -> IntMat:
        """The column HNF matrix (N x rank)."""
        return matrix_from_columns(self.basis, self.ambient_rank)

    def to_dict(self) -> Dict[str, object]:
        return {
            "ambient_rank": self.ambient_rank,
            "rank": self.rank,
            "hnf": [list(v) for v in self.basis],
        }


@dataclass(frozen=True)
class AbelianInvariants:
    """Elementary divisor decomposition Z^free_rank + sum of Z/d."""
    torsion: Tuple[int, ...] = ()
    free_rank: int = 0

    @property
    def is_trivial(self) -> bool:
        return not self.torsion and self.free_rank == 0

    @property
    def order(self) -> Optional[int]:
        """Group order, or None when the group is infinite."""
        if self.free_rank:
            return None
        result = 1
        for d in self.torsion:
            result *= d
        return result

    @property
    def exponent(self) -> Optional[int]:
        if self.free_rank:
            return None
        return self.torsion[-1] if self.torsion else 1

    def __str__(self) -> str:
        if self.is_trivial:
            return "0"
        parts = []
        if self.free_rank:
            parts.append("Z" if self.free_rank == 1 else f"Z^{self.free_rank}")
        # largest divisors first, grouped by multiplicity
        grouped: List[Tuple[int, int]] = []
        for d in reversed(self.torsion):
            if grouped and grouped[-1][0] == d:
                grouped[-1] = (d, grouped[-1][1] + 1)
            else:
                grouped.append((d, 1))
        for d, count in grouped:
            parts.append(f"(Z/{d})^{count}" if count > 1 else f"Z/{d}")
        return " + ".join(parts)

    def to_dict(self) -> Dict[str, object]:
        return {"torsion": list(self.torsion), "free_rank": self.free_rank, "text": str(self)}


def _divisibility_chain(values: Iterable[int]) -> Tuple[int, ...]:
    vals = sorted(abs(int(v)) for v in values if v)
    for i in range(len(vals)):
        for j in range(i + 1, len(vals)):
            g = gcd(vals[i], vals[j])
            vals[i], vals[j] = g, vals[i] * vals[j] // g
    return tuple(vals)


def _same_ambient(A: Lattice, B: Lattice) -> None:
    if A.ambient_rank != B.ambient_rank:
        raise LatticeError(
            f"Lattices live in Z^{A.ambient_rank} and Z^{B.ambient_rank}",
            details={"left": A.ambient_rank, "right": B.ambient_rank}
        )


def _relations(vectors: Sequence[Sequence[int]], width: int, tagged: int) -> List[Vector]:
    """
    Spanning set of the tag projections of all integer relations.

    Returns vectors t in Z^tagged such that some relation
    sum_i c_i vectors[i] = 0 has (c_0, ..., c_{tagged-1}) = t; together they
    span the projection of the relation module onto the first ``tagged``
    coefficients.
    """
    total = width + tagged
    echelon = _Echelon(width, total)
    for i, vec in enumerate(vectors):
        row = [0] * total
        row[:width] = vec
        if i < tagged:
            row[width + i] = 1
        echelon.add(row)
    return [tuple(res[width:]) for res in echelon.residues]


def hnf(M: IntMat) -> Tuple[Lattice, IntMat]:
    """
    Hermite normal form of the column span of M.

    Args:
        M: N x k integer matrix

    Returns:
        Tuple[Lattice, IntMat]: The lattice and a k x rank matrix U with
        M * U equal to the column HNF matrix
    """
    N, k = M.shape
    columns = matrix_columns(M)
    total = N + k
    echelon = _Echelon(N, total)
    for i, col in enumerate(columns):
        row = [0] * total
        row[:N] = col
        row[N + i] = 1
        echelon.add(row)
    pivots, rows = echelon.reduced()
    lattice = Lattice(N, [tuple(r[:N]) for r in rows], pivots)
    transform = matrix_from_columns([r[N:] for r in rows], k)
    return lattice, transform


def snf(M: IntMat) -> Tuple[Tuple[int, ...], IntMat, IntMat]:
    """
    Smith normal form of M.

    Args:
        M: r x c integer matrix

    Returns:
        Tuple: (divisors d1 | d2 | ..., S, T) with S * M * T diagonal and
        S, T unimodular; divisors are nonnegative, zeros last
    """
    r, c = M.shape
    if r == 0 or c == 0:
        return (), DomainMatrix.eye(r, ZZ), DomainMatrix.eye(c, ZZ)
    D, S, T = smith_normal_decomp(M)
    diag = D.to_list()
    s_rows = S.to_list()
    divisors = []
    for i in range(min(r, c)):
        d = int(diag[i][i])
        if d < 0:
            s_rows[i] = [-x for x in s_rows[i]]
            d = -d
        divisors.append(d)
    S = int_matrix([[int(x) for x in row] for row in s_rows], (r, r))
    return tuple(divisors), S, T


def member(vec: Sequence[int], L: Lattice) -> Optional[Vector]:
    """Coordinates of ``vec`` in L's basis, or None when vec is not in L."""
    return L.coordinates(vec)


def lattice_sum(A: Lattice, B: Lattice) -> Lattice:
    _same_ambient(A, B)
    if not B.rank:
        return A
    if not A.rank:
        return B
    return Lattice.from_generators(A.ambient_rank, A.basis + B.basis)


def sum_all(ambient_rank: int, lattices: Iterable[Lattice]) -> Lattice:
    """Sum of several lattices in the same ambient space."""
    vectors: List[Vector] = []
    for L in lattices:
        if L.ambient_rank != ambient_rank:
            raise LatticeError(f"Lattice in Z^{L.ambient_rank} summed in Z^{ambient_rank}")
        vectors.extend(L.basis)
    return Lattice.from_generators(ambient_rank, vectors)


def intersect(A: Lattice, B: Lattice) -> Lattice:
    """Intersection via the relations among the basis of A and the basis of -B."""
    _same_ambient(A, B)
    N = A.ambient_rank
    if not A.rank or not B.rank:
        return Lattice.zero(N)
    vectors = list(A.basis) + [tuple(-x for x in b) for b in B.basis]
    images = []
    for coeffs in _relations(vectors, N, A.rank):
        vec = [0] * N
        for c, a in zip(coeffs, A.basis):
            if c:
                for jj in range(N):
                    vec[jj] += c * a[jj]
        images.append(vec)
    return Lattice.from_generators(N, images)


def kernel(M: IntMat) -> Lattice:
    """Lattice of integer vectors v with M * v = 0."""
    N, k = M.shape
    return Lattice.from_generators(k, _relations(matrix_columns(M), N, k))


def preimage(M: IntMat, L: Lattice) -> Lattice:
    """
    Preimage {v in Z^k : M v in L}.

    Computed from the relations of [M | -basis(L)] projected onto the
    first k coordinates.
    """
    N, k = M.shape
    if L.ambient_rank != N:
        raise LatticeError(f"Matrix maps into Z^{N} but lattice lives in Z^{L.ambient_rank}")
    vectors = matrix_columns(M) + [tuple(-x for x in b) for b in L.basis]
    return Lattice.from_generators(k, _relations(vectors, N, k))


def preimage_columns(columns: Sequence[Sequence[int]], L: Lattice) -> Lattice:
    """``preimage`` for a map given directly by its image columns."""
    N = L.ambient_rank
    k = len(columns)
    for col in columns:
        if len(col) != N:
            raise LatticeError(f"Column of length {len(col)} mapped into Z^{N}")
    vectors = list(columns) + [tuple(-x for x in b) for b in L.basis]
    return Lattice.from_generators(k, _relations(vectors, N, k))


def _orthogonal(vectors: Sequence[Sequence[int]], N: int) -> Lattice:
    # {y in Z^N : <v, y> = 0 for all v}
    r = len(vectors)
    columns = [tuple(v[i] for v in vectors) for i in range(N)]
    return Lattice.from_generators(N, _relations(columns, r, N))


def saturate(L: Lattice) -> Lattice:
    """Saturation {v : n v in L for some n != 0}, the double orthogonal complement."""
    N = L.ambient_rank
    if not L.rank:
        return L
    complement = _orthogonal(L.basis, N)
    if not complement.rank:
        return Lattice.ambient(N)
    return _orthogonal(complement.basis, N)


def scale(L: Lattice, factor: int) -> Lattice:
    """The lattice factor * L."""
    if factor == 0:
        return Lattice.zero(L.ambient_rank)
    return Lattice.from_generators(L.ambient_rank, [[factor * x for x in v] for v in L.basis])


def quotient_invariants(A: Lattice, B: Lattice) -> AbelianInvariants:
    """
    Abelian invariants of A / B.

    Raises:
        LatticeError: If B is not contained in A
    """
    _same_ambient(A, B)
    coords = []
    for v in B.basis:
        c = A.coordinates(v)
        if c is None:
            raise LatticeError(
                "Quotient requested for a lattice not contained in the numerator",
                details={"vector": list(v)}
            )
        coords.append(c)
    if not A.rank:
        return AbelianInvariants((), 0)
    if not coords:
        return AbelianInvariants((), A.rank)
    factors = invariant_factors(matrix_from_columns(coords, A.rank))
    nonzero = [int(d) for d in factors if d]
    chain = _divisibility_chain(nonzero)
    result = AbelianInvariants(
        torsion=tuple(d for d in chain if d > 1),
        free_rank=A.rank - len(nonzero)
    )
    logger.debug(f"Quotient of rank-{A.rank} by rank-{B.rank} lattice: {result}")
    return result
