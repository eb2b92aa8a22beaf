"""Bit-packed GF(2) vectors, matrices and code-distance primitives.

Vectors are stored as Python ints: bit ``j`` holds coordinate ``j`` (column
``j`` of a matrix, the ``j``-th character of its text row).  The hot loops
(Gray-code codeword enumeration) run under numba on 64-bit words.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numba
import numpy as np

MAX_LENGTH = 1 << 16
#: codes up to this dimension are scanned exhaustively in Gray-code order
K_ENUM = 24


class DimensionError(ValueError):
    """Operands have incompatible lengths or shapes."""


class SingularMatrixError(ValueError):
    """A square matrix that must be invertible over GF(2) is not."""


class UndefinedDistanceError(ValueError):
    """Minimum distance requested for the zero code."""


class MatrixFormatError(ValueError):
    """Malformed matrix text."""


def popcount(x: int) -> int:
    return x.bit_count()


@dataclass(frozen=True)
class BitVector:
    length: int
    bits: int = 0

    def __post_init__(self):
        if not 0 < self.length <= MAX_LENGTH:
            raise DimensionError(f"length {self.length} out of range")
        if self.bits < 0 or self.bits >> self.length:
            raise DimensionError("bits set beyond vector length")

    @classmethod
    def from_string(cls, s: str) -> "BitVector":
        s = s.strip()
        if not s or set(s) - {"0", "1"}:
            raise MatrixFormatError(f"not a 0/1 string: {s!r}")
        return cls(len(s), parse_row(s))

    @classmethod
    def from_list(cls, xs: Sequence[int]) -> "BitVector":
        return cls(len(xs), sum(1 << j for j, x in enumerate(xs) if x))

    @property
    def weight(self) -> int:
        return popcount(self.bits)

    def __getitem__(self, j: int) -> int:
        return (self.bits >> j) & 1

    def __xor__(self, other: "BitVector") -> "BitVector":
        _check_lengths(self, other)
        return BitVector(self.length, self.bits ^ other.bits)

    def __str__(self) -> str:
        return format_row(self.bits, self.length)


def parse_row(s: str) -> int:
    return sum(1 << j for j, ch in enumerate(s) if ch == "1")


def format_row(bits: int, length: int) -> str:
    return "".join("1" if (bits >> j) & 1 else "0" for j in range(length))


def _check_lengths(a: BitVector, b: BitVector) -> None:
    if a.length != b.length:
        raise DimensionError(f"length mismatch: {a.length} vs {b.length}")


@dataclass(frozen=True)
class BitMatrix:
    nrows: int
    ncols: int
    rows: tuple[int, ...]

    def __post_init__(self):
        if self.nrows <= 0 or self.ncols <= 0:
            raise DimensionError("matrix dimensions must be positive")
        if len(self.rows) != self.nrows:
            raise DimensionError(f"expected {self.nrows} rows, got {len(self.rows)}")
        for r in self.rows:
            if r < 0 or r >> self.ncols:
                raise DimensionError("row has bits beyond ncols")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> "BitMatrix":
        if not rows:
            raise DimensionError("empty matrix")
        ncols = len(rows[0])
        if any(len(r) != ncols for r in rows):
            raise DimensionError("ragged rows")
        return cls(len(rows), ncols, tuple(BitVector.from_list(r).bits for r in rows))

    @classmethod
    def from_text(cls, text: str) -> "BitMatrix":
        """Parse the shared matrix format: one '0'/'1' row per line.

        Blank lines and anything after '#' are ignored.
        """
        lines = []
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if set(line) - {"0", "1"}:
                raise MatrixFormatError(f"line {lineno}: unexpected characters in {line!r}")
            lines.append(line)
        if not lines:
            raise MatrixFormatError("no matrix rows found")
        ncols = len(lines[0])
        if any(len(line) != ncols for line in lines):
            raise MatrixFormatError("rows have different lengths")
        return cls(len(lines), ncols, tuple(parse_row(line) for line in lines))

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls(n, n, tuple(1 << j for j in range(n)))

    def to_text(self) -> str:
        return "\n".join(format_row(r, self.ncols) for r in self.rows) + "\n"

    def row(self, i: int) -> BitVector:
        return BitVector(self.ncols, self.rows[i])

    def entry(self, i: int, j: int) -> int:
        return (self.rows[i] >> j) & 1

    def to_array(self) -> np.ndarray:
        return np.array([[self.entry(i, j) for j in range(self.ncols)]
                         for i in range(self.nrows)], dtype=np.uint8)

    def permute_columns(self, perm: Sequence[int]) -> "BitMatrix":
        """Column ``j`` of the result is column ``perm[j]`` of ``self``."""
        if sorted(perm) != list(range(self.ncols)):
            raise DimensionError("not a permutation of the columns")
        rows = tuple(sum(((r >> p) & 1) << j for j, p in enumerate(perm)) for r in self.rows)
        return BitMatrix(self.nrows, self.ncols, rows)

    @property
    def is_square(self) -> bool:
        return self.nrows == self.ncols

    def __str__(self) -> str:
        return self.to_text().rstrip("\n")


@dataclass(frozen=True)
class LinearCode:
    length: int
    generators: tuple[int, ...] = field(default=())

    @classmethod
    def from_vectors(cls, vectors: Iterable[BitVector], length: int | None = None) -> "LinearCode":
        vectors = list(vectors)
        if length is None:
            if not vectors:
                raise DimensionError("length needed for an empty generator list")
            length = vectors[0].length
        for v in vectors:
            if v.length != length:
                raise DimensionError("generator length mismatch")
        return cls(length, tuple(v.bits for v in vectors))

    @cached_property
    def basis(self) -> tuple[int, ...]:
        return tuple(row_reduce(self.generators, self.length)[0])

    @property
    def rank(self) -> int:
        return len(self.basis)

    @property
    def dimension(self) -> int:
        return self.rank

    def contains(self, v: int) -> bool:
        return reduce_vector(v, *row_reduce(self.generators, self.length)) == 0


def row_reduce(rows: Iterable[int], ncols: int) -> tuple[list[int], list[int]]:
    """Reduced row echelon basis of the span of ``rows``.

    Returns ``(basis, pivots)`` where ``basis[t]`` is the only basis vector
    with a one in column ``pivots[t]``.
    """
    basis: list[int] = []
    pivots: list[int] = []
    for r in rows:
        for b, p in zip(basis, pivots):
            if (r >> p) & 1:
                r ^= b
        if r == 0:
            continue
        p = (r & -r).bit_length() - 1
        for t, b in enumerate(basis):
            if (b >> p) & 1:
                basis[t] = b ^ r
        basis.append(r)
        pivots.append(p)
    return basis, pivots


def reduce_vector(v: int, basis: Sequence[int], pivots: Sequence[int]) -> int:
    """Canonical coset representative: ``v`` with every pivot column cleared."""
    for b, p in zip(basis, pivots):
        if (v >> p) & 1:
            v ^= b
    return v


def hamming_distance(a: BitVector, b: BitVector) -> int:
    _check_lengths(a, b)
    return popcount(a.bits ^ b.bits)


def rank(m: BitMatrix) -> int:
    return len(row_reduce(m.rows, m.ncols)[0])


# -- codeword enumeration ---------------------------------------------------

@numba.njit(cache=True)
def _popcount64(x):
    x = x - ((x >> 1) & 0x5555555555555555)
    x = (x & 0x3333333333333333) + ((x >> 2) & 0x3333333333333333)
    x = (x + (x >> 4)) & 0x0F0F0F0F0F0F0F0F
    return ((x * 0x0101010101010101) & 0xFFFFFFFFFFFFFFFF) >> 56


@numba.njit(cache=True)
def _gray_min_weight(v, gens, floor):
    # min weight over the coset v + span(gens); stops early once <= floor
    best = _popcount64(v)
    if best <= floor:
        return best
    cur = v
    k = gens.shape[0]
    for step in range(1, np.int64(1) << k):
        t = 0
        s = step
        while (s & 1) == 0:
            s >>= 1
            t += 1
        cur ^= gens[t]
        w = _popcount64(cur)
        if w < best:
            best = w
            if best <= floor:
                break
    return best


def _coset_min_weight_python(v: int, gens: Sequence[int], floor: int) -> int:
    best = popcount(v)
    cur = v
    for step in range(1, 1 << len(gens)):
        cur ^= gens[(step & -step).bit_length() - 1]
        w = popcount(cur)
        if w < best:
            best = w
            if best <= floor:
                break
    return best


def coset_min_weight_enum(v: int, gens: Sequence[int], n: int, floor: int = -1) -> int:
    """Minimum weight of ``v + span(gens)`` by Gray-code enumeration."""
    if n <= 63:
        arr = np.array(list(gens), dtype=np.uint64)
        return int(_gray_min_weight(np.uint64(v), arr, np.int64(floor)))
    return _coset_min_weight_python(v, gens, floor)


def coset_min_weight_mitm(v: int, basis: Sequence[int], pivots: Sequence[int], n: int,
                          floor: int = -1) -> int:
    """Minimum weight of ``v + span(basis)`` by syndrome meet-in-the-middle.

    Weights are tried in increasing order so the first hit is exact; ``floor``
    is accepted for signature compatibility only.  Syndromes are canonical
    coset representatives (pivot columns cleared).  Coordinates are split into two halves; for growing weight ``w`` the
    left-half syndromes of each weight are tabulated and matched against
    right-half patterns of the complementary weight.
    """
    target = reduce_vector(v, basis, pivots)
    if target == 0:
        return 0
    col_syn = [reduce_vector(1 << j, basis, pivots) for j in range(n)]
    half = n // 2
    left, right = col_syn[:half], col_syn[half:]
    tables: list[set[int]] = []

    def left_table(a: int) -> set[int]:
        while len(tables) <= a:
            w = len(tables)
            tables.append({_xor_all(c) for c in itertools.combinations(left, w)})
        return tables[a]

    for w in range(1, n + 1):
        for a in range(min(w, half) + 1):
            b = w - a
            if b > len(right):
                continue
            table = left_table(a)
            for combo in itertools.combinations(right, b):
                if target ^ _xor_all(combo) in table:
                    return w
    raise AssertionError("coset without a representative")  # unreachable


def _xor_all(xs: Iterable[int]) -> int:
    acc = 0
    for x in xs:
        acc ^= x
    return acc


def distance_to_code(v: BitVector, c: LinearCode, method: str = "auto") -> int:
    """d_H(v, C): minimum distance from ``v`` to any codeword of ``c``.

    ``method`` is ``"enumerate"`` (Gray code over 2^k codewords),
    ``"mitm"`` (syndrome meet-in-the-middle) or ``"auto"`` (enumerate when
    k <= K_ENUM).
    """
    if v.length != c.length:
        raise DimensionError(f"length mismatch: {v.length} vs {c.length}")
    return coset_min_weight(v.bits, c.generators, c.length, method=method)


def coset_min_weight(v: int, gens: Sequence[int], n: int, method: str = "auto",
                     floor: int = -1) -> int:
    basis, pivots = row_reduce(gens, n)
    if not basis:
        return popcount(v)
    if method == "auto":
        method = "enumerate" if len(basis) <= K_ENUM else "mitm"
    if method == "enumerate":
        return coset_min_weight_enum(v, basis, n, floor)
    if method == "mitm":
        return coset_min_weight_mitm(v, basis, pivots, n, floor)
    raise ValueError(f"unknown method {method!r}")


def code_min_distance(c: LinearCode, method: str = "auto") -> int:
    """Minimum weight over the nonzero codewords of ``c``."""
    basis = list(c.basis)
    if not basis:
        raise UndefinedDistanceError("the zero code has no minimum distance")
    # dmin = min over basis vectors b_t of d(b_t, span(b_{t+1}, ...)), a chain
    # of coset searches whose first term covers all codewords involving b_0
    best = c.length
    for t in range(len(basis)):
        best = min(best, coset_min_weight(basis[t], basis[t + 1:], c.length, method, floor=0))
    return best


# -- Hall matching ----------------------------------------------------------

def hall_diagonal_permutation(m: BitMatrix) -> list[int]:
    """Column permutation putting ones on the whole diagonal.

    Returns ``perm`` with ``m.entry(i, perm[i]) == 1`` for every row ``i``, so
    ``m.permute_columns(perm)`` has an all-ones diagonal.  Found as a perfect
    matching rows -> columns by augmenting paths.
    """
    if not m.is_square:
        raise DimensionError("matrix must be square")
    # a perfect matching alone does not imply invertibility (all-ones 2x2)
    if rank(m) < m.nrows:
        raise SingularMatrixError("matrix is singular over GF(2)")
    n = m.nrows
    adjacency = [[j for j in range(n) if m.entry(i, j)] for i in range(n)]
    owner = [-1] * n  # column -> matched row

    def augment(i: int, seen: list[bool]) -> bool:
        for j in adjacency[i]:
            if seen[j]:
                continue
            seen[j] = True
            if owner[j] < 0 or augment(owner[j], seen):
                owner[j] = i
                return True
        return False

    for i in range(n):
        if not augment(i, [False] * n):
            raise SingularMatrixError("no perfect matching: matrix is singular")
    perm = [0] * n
    for j, i in enumerate(owner):
        perm[i] = j
    return perm


# -- batched coset weights --------------------------------------------------

@numba.njit(cache=True)
def _offset_min_weights(code, offsets):
    out = np.empty(offsets.shape[0], dtype=np.int64)
    for s in range(offsets.shape[0]):
        out[s] = _gray_min_weight(offsets[s], code, np.int64(-1))
    return out


@numba.njit(cache=True)
def _syndrome_leader_weights(col_syn, r):
    # breadth-first search over the 2^r syndromes; level = coset leader weight
    size = np.int64(1) << r
    dist = np.full(size, -1, dtype=np.int64)
    frontier = np.empty(size, dtype=np.int64)
    dist[0] = 0
    frontier[0] = 0
    head = 0
    tail = 1
    while head < tail:
        s = frontier[head]
        head += 1
        for c in col_syn:
            t = s ^ c
            if dist[t] < 0:
                dist[t] = dist[s] + 1
                frontier[tail] = t
                tail += 1
    return dist


def _span_masks(vectors: Sequence[int]) -> list[int]:
    out = [0]
    for v in vectors:
        out += [x ^ v for x in out]
    return out


def quotient_coset_weights(code: Sequence[int], offsets: Sequence[int], n: int) -> list[int]:
    """Minimum weight of every coset ``u + C`` for ``u`` in span(offsets).

    Entry ``mask`` corresponds to ``u = xor of offsets[t] for bits t of mask``.
    Uses codeword enumeration when dim C is small and a syndrome-table
    breadth-first search when the codimension is small; cost is at most
    about 2^(n/2) * n word operations either way.
    """
    basis, pivots = row_reduce(code, n)
    k = len(basis)
    us = _span_masks(list(offsets))
    if n > 63 or (k <= n - k and k <= K_ENUM):
        if n > 63:
            return [_coset_min_weight_python(u, basis, -1) for u in us]
        arr = np.array(basis, dtype=np.uint64).reshape(-1)
        return [int(w) for w in _offset_min_weights(arr, np.array(us, dtype=np.uint64))]
    free = [j for j in range(n) if j not in set(pivots)]

    def compress(v: int) -> int:
        v = reduce_vector(v, basis, pivots)
        return sum(((v >> c) & 1) << t for t, c in enumerate(free))

    col_syn = np.array([compress(1 << j) for j in range(n)], dtype=np.int64)
    leader = _syndrome_leader_weights(col_syn, len(free))
    return [int(leader[compress(u)]) for u in us]


def syndrome_weights(code: Sequence[int], n: int) -> tuple[list[int], list[int], list[int], np.ndarray]:
    """Coset-leader weight of every coset of C, indexed by syndrome.

    Returns ``(basis, pivots, free, weights)``: RREF data of C, its non-pivot
    columns, and an array of length 2^(n-k) where bit t of the index stands
    for column ``free[t]``; the coset of a vector v is ``compress(reduce(v))``
    and the unit vector on ``free[t]`` has syndrome ``1 << t``.
    """
    basis, pivots = row_reduce(code, n)
    pset = set(pivots)
    free = [j for j in range(n) if j not in pset]
    index = {c: t for t, c in enumerate(free)}
    col_syn = np.empty(n, dtype=np.int64)
    for j in range(n):
        v = reduce_vector(1 << j, basis, pivots)
        col_syn[j] = sum(1 << index[c] for c in range(n) if (v >> c) & 1)
    return basis, pivots, free, _syndrome_leader_weights(col_syn, len(free))
