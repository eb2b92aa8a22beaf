"""GF(2^m) arithmetic, cyclotomic chords and BCH-derived kernels.

Polynomials over GF(2) are ints (bit ``d`` = coefficient of ``x^d``).  A
kernel row for the polynomial ``p`` is its length-l coefficient vector, so
with the repo-wide bit convention (bit ``j`` = column ``j``) the row value is
``p`` itself.

Kernel basis: for chord ``k`` (ordered by minimal element) let
``G_k = prod_{j<k} m_j`` be the generator of the BCH code with zeros on the
first ``k-1`` chords.  Block ``k`` contributes rows ``x^t G_k``,
``t = 0 .. l(k)-1``, and blocks are stacked with ``k = 1`` on top.  Row
degrees are then exactly ``0 .. l-1`` (the matrix is invertible) and the
bottom ``sum_{j>=k} l(j)`` rows span the cyclic code generated by ``G_k``,
whose designed distance is ``mu(k) + 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

from .gf2 import BitMatrix
from .kernel import Kernel, PartialDistanceProfile

# x^m + ... as bit masks
DEFAULT_PRIMITIVE = {
    2: 0b111,
    3: 0b1011,
    4: 0b10011,
    5: 0b100101,
    6: 0b1000011,
    7: 0b10000011,
    8: 0x11D,
    9: 0x211,
    10: 0x409,
    11: 0x805,
    12: 0x1053,
    13: 0x201B,
    14: 0x4443,
    15: 0x8003,
    16: 0x1100B,
}


class FieldError(ValueError):
    pass


@dataclass(frozen=True)
class FieldSpec:
    m: int
    primitive_polynomial: int

    def __post_init__(self):
        if not 2 <= self.m <= 16:
            raise FieldError(f"m={self.m} outside 2..16")
        if self.primitive_polynomial.bit_length() != self.m + 1:
            raise FieldError("polynomial degree must equal m")
        if self.order() != (1 << self.m) - 1:
            raise FieldError(f"{self.primitive_polynomial:#x} is not primitive for m={self.m}")

    @classmethod
    def default(cls, m: int) -> "FieldSpec":
        return cls(m, DEFAULT_PRIMITIVE[m])

    def order(self) -> int:
        """Multiplicative order of x modulo the polynomial."""
        n = (1 << self.m) - 1
        a = 1
        for e in range(1, n + 1):
            a = self._times_x(a)
            if a == 1:
                return e
        return 0

    def _times_x(self, a: int) -> int:
        a <<= 1
        if a >> self.m:
            a ^= self.primitive_polynomial
        return a

    @property
    def n(self) -> int:
        return (1 << self.m) - 1

    @cached_property
    def exp_table(self) -> list[int]:
        table = [1]
        for _ in range(2 * self.n):
            table.append(self._times_x(table[-1]))
        return table

    @cached_property
    def log_table(self) -> dict[int, int]:
        return {self.exp_table[e]: e for e in range(self.n)}

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return self.exp_table[self.log_table[a] + self.log_table[b]]


def is_primitive(m: int, poly: int) -> bool:
    try:
        FieldSpec(m, poly)
    except FieldError:
        return False
    return True


def primitive_polynomials(m: int) -> list[int]:
    return [p for p in range(1 << m | 1, 1 << (m + 1), 2) if is_primitive(m, p)]


@dataclass(frozen=True)
class ChordSet:
    m: int
    chords: tuple[tuple[int, ...], ...]

    @property
    def mu(self) -> tuple[int, ...]:
        return tuple(c[0] for c in self.chords)

    @property
    def lengths(self) -> tuple[int, ...]:
        return tuple(len(c) for c in self.chords)

    def index_of(self, s: int) -> int:
        for k, c in enumerate(self.chords):
            if s in c:
                return k
        raise ValueError(f"{s} not in any chord")


def chords(m: int) -> ChordSet:
    """Cyclotomic cosets of 2 modulo 2^m - 1, sorted by minimal element.

    Each chord is listed in sorted order, so its first entry is mu.
    """
    if not 2 <= m <= 16:
        raise ValueError(f"m={m} outside 2..16")
    n = (1 << m) - 1
    seen = bytearray(n)
    out = []
    for s in range(n):
        if seen[s]:
            continue
        orbit = []
        x = s
        while not seen[x]:
            seen[x] = 1
            orbit.append(x)
            x = (2 * x) % n
        out.append(tuple(sorted(orbit)))
    return ChordSet(m, tuple(out))


def poly_mul(a: int, b: int) -> int:
    """Carry-less product of GF(2) polynomials."""
    out = 0
    while b:
        if b & 1:
            out ^= a
        a <<= 1
        b >>= 1
    return out


def minimal_polynomial(spec: FieldSpec, s: int) -> int:
    """prod over the chord of s of (x - alpha^i), as a GF(2) polynomial."""
    if not 0 <= s < spec.n:
        raise ValueError(f"exponent {s} outside 0..{spec.n - 1}")
    chord = chords(spec.m).chords[chords(spec.m).index_of(s)]
    coeffs = [1]  # GF(2^m) coefficients, lowest degree first
    for i in chord:
        root = spec.exp_table[i]
        nxt = [0] * (len(coeffs) + 1)
        for d, c in enumerate(coeffs):
            nxt[d + 1] ^= c
            nxt[d] ^= spec.mul(c, root)
        coeffs = nxt
    if any(c not in (0, 1) for c in coeffs):
        raise AssertionError("minimal polynomial left GF(2)")
    return sum(1 << d for d, c in enumerate(coeffs) if c)


@dataclass(frozen=True)
class BchKernel:
    kernel: Kernel
    design_profile: PartialDistanceProfile
    chord_set: ChordSet
    field: FieldSpec


def bch_kernel(m: int, primitive_polynomial: int | None = None) -> BchKernel:
    spec = FieldSpec(m, primitive_polynomial or DEFAULT_PRIMITIVE[m])
    cs = chords(m)
    n = spec.n
    rows: list[int] = []
    design: list[int] = []
    gen = 1
    for k, chord in enumerate(cs.chords):
        for t in range(len(chord)):
            rows.append(gen << t)
            design.append(chord[0] + 1)
        gen = poly_mul(gen, minimal_polynomial(spec, chord[0]))
    assert gen == (1 << n) | 1  # x^n - 1
    return BchKernel(Kernel(BitMatrix(n, n, tuple(rows))),
                     PartialDistanceProfile(tuple(design)), cs, spec)


def bch_exponent_bound(m: int) -> float:
    """(1/(2^m-1)) * sum over chords of l(i) log_{2^m-1}(mu(i)+1)."""
    if m < 2:
        raise ValueError("m >= 2 required")
    cs = chords(m)
    n = (1 << m) - 1
    return math.fsum(len(c) * math.log(c[0] + 1) for c in cs.chords) / (n * math.log(n))
