"""Kernel analysis: partial distances, exponent, polarization test, shortening."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .gf2 import (BitMatrix, DimensionError, SingularMatrixError, coset_min_weight,
                  format_row, hall_diagonal_permutation, popcount, quotient_coset_weights,
                  rank)


class InvalidKernelError(SingularMatrixError):
    """Kernel matrix is not square and invertible over GF(2)."""


@dataclass(frozen=True)
class Kernel:
    g: BitMatrix

    def __post_init__(self):
        if not self.g.is_square:
            raise InvalidKernelError(f"kernel must be square, got {self.g.nrows}x{self.g.ncols}")
        if rank(self.g) != self.g.nrows:
            raise InvalidKernelError("kernel matrix is singular over GF(2)")

    @property
    def ell(self) -> int:
        return self.g.nrows

    @property
    def rows(self) -> tuple[int, ...]:
        return self.g.rows

    @classmethod
    def from_text(cls, text: str) -> "Kernel":
        return cls(BitMatrix.from_text(text))

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> "Kernel":
        return cls(BitMatrix.from_rows(rows))

    @classmethod
    def from_file(cls, path: str | Path) -> "Kernel":
        return cls.from_text(Path(path).read_text())

    @classmethod
    def identity(cls, ell: int) -> "Kernel":
        return cls(BitMatrix.identity(ell))

    def to_text(self) -> str:
        return self.g.to_text()

    def permute_columns(self, perm: Sequence[int]) -> "Kernel":
        return Kernel(self.g.permute_columns(perm))


@dataclass(frozen=True)
class PartialDistanceProfile:
    distances: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "distances", tuple(int(d) for d in self.distances))

    @property
    def ell(self) -> int:
        return len(self.distances)

    @property
    def exponent(self) -> float:
        return exponent(self)

    def __iter__(self):
        return iter(self.distances)

    def __len__(self):
        return len(self.distances)

    def __getitem__(self, i):
        return self.distances[i]

    def __str__(self) -> str:
        return ",".join(map(str, self.distances))


def exponent(p: PartialDistanceProfile | Sequence[int]) -> float:
    """(1/l) * sum_i log_l D_i, evaluated as (sum(ln D_i) / ln l) / l.

    Dividing by ln l before l keeps simple cases exact, e.g. (1, 1, 3) -> 1/3.
    """
    distances = tuple(p)
    ell = len(distances)
    if ell < 2:
        raise ValueError("exponent needs l >= 2")
    if any(d <= 0 for d in distances):
        raise ValueError(f"partial distances must be positive: {distances}")
    return math.fsum(math.log(d) for d in distances) / math.log(ell) / ell


def partial_distances(k: Kernel, method: str = "auto") -> PartialDistanceProfile:
    """D_i = d_H(g_i, <g_{i+1}, ..., g_l>), D_l = wt(g_l)."""
    rows = k.rows
    n = k.ell
    return PartialDistanceProfile(
        tuple(coset_min_weight(rows[i], rows[i + 1:], n, method) for i in range(n)))


@dataclass(frozen=True)
class PolarizationWitness:
    row: int      # 1-based row index
    copies: int   # the synthesized channel is equivalent to this many channel uses


def is_polarizing(k: Kernel) -> tuple[bool, PolarizationWitness | None]:
    """Test whether no column permutation of ``k`` is upper triangular.

    After a Hall-matching permutation puts ones on the diagonal, rows are
    peeled from the bottom: the last remaining row restricted to the
    remaining columns either has weight one (peel it with its column) or
    weight >= 2, in which case that bit sees >= 2 independent channel uses.
    """
    perm = hall_diagonal_permutation(k.g)
    g = k.g.permute_columns(perm)
    for t in range(k.ell - 1, -1, -1):
        remaining = popcount(g.rows[t] & ((1 << (t + 1)) - 1))
        if remaining >= 2:
            return True, PolarizationWitness(t + 1, remaining)
    return False, None


def peel_weights(k: Kernel) -> list[int]:
    """Remaining weight of each row, bottom-up, under the polarization peel."""
    g = k.g.permute_columns(hall_diagonal_permutation(k.g))
    return [popcount(g.rows[t] & ((1 << (t + 1)) - 1)) for t in range(k.ell - 1, -1, -1)]


def monotone_swap(k: Kernel, row: int) -> Kernel:
    """Swap rows ``row`` and ``row + 1`` (1-based)."""
    if not 1 <= row < k.ell:
        raise IndexError(f"row {row} out of range for l={k.ell}")
    rows = list(k.rows)
    rows[row - 1], rows[row] = rows[row], rows[row - 1]
    return Kernel(BitMatrix(k.ell, k.ell, tuple(rows)))


def normalize(k: Kernel) -> tuple[Kernel, PartialDistanceProfile]:
    """Adjacent swaps until D_1 <= ... <= D_l; the exponent never decreases."""
    rows = list(k.rows)
    n = k.ell
    dist = list(partial_distances(k))
    changed = True
    while changed:
        changed = False
        for i in range(n - 1):
            if dist[i] > dist[i + 1]:
                rows[i], rows[i + 1] = rows[i + 1], rows[i]
                dist[i] = coset_min_weight(rows[i], rows[i + 1:], n)
                dist[i + 1] = coset_min_weight(rows[i + 1], rows[i + 2:], n)
                changed = True
    return Kernel(BitMatrix(n, n, tuple(rows))), PartialDistanceProfile(tuple(dist))


def _best_flag(table: list[int], w: int) -> tuple[int, list[int]]:
    """Exhaustive flag search inside a w-dimensional quotient.

    ``table[mask]`` is the minimum weight of the coset selected by ``mask``.
    Returns (product of partial distances, masks bottom-up) of the first
    flag, in mask order, with the largest product.
    """
    best = (0, [])

    def dfs(chosen: list[int], span: list[int], prod: int) -> None:
        nonlocal best
        if len(chosen) == w:
            if prod > best[0]:
                best = (prod, list(chosen))
            return
        span_set = set(span)
        seen = set()
        for m in range(1, 1 << w):
            if m in span_set:
                continue
            rep = min(m ^ u for u in span)
            if rep in seen:
                continue
            seen.add(rep)
            d = min(table[rep ^ u] for u in span)
            dfs(chosen + [rep], span + [x ^ rep for x in span], prod * d)

    dfs([], [0], 1)
    return best


def refine_flags(k: Kernel, window: int = 4,
                 profile: PartialDistanceProfile | None = None
                 ) -> tuple[Kernel, PartialDistanceProfile]:
    """Re-choose rows inside sliding windows to raise the exponent.

    For rows ``a..b`` the span of rows ``b+1..l`` and of rows ``a..l`` are
    kept, so only the window's partial distances can change; the window's
    rows are replaced by the flag maximizing the product of its distances.
    Swapping adjacent rows (window 2) is the special case of monotone_swap.
    Sweeps repeat until no window improves.
    """
    n = k.ell
    window = max(1, min(window, n))
    rows = list(k.rows)
    dist = list(profile if profile is not None else partial_distances(k))
    improved = True
    while improved:
        improved = False
        for a in range(n - window, -1, -1):
            b = a + window
            table = quotient_coset_weights(rows[b:], rows[a:b], n)
            prod, masks = _best_flag(table, window)
            if prod <= math.prod(dist[a:b]):
                continue
            span = [0]
            new_rows, new_dist = [], []
            for m in masks:
                vec = 0
                for t in range(window):
                    if (m >> t) & 1:
                        vec ^= rows[a + t]
                new_dist.append(min(table[m ^ u] for u in span))
                span = span + [x ^ m for x in span]
                new_rows.append(vec)
            rows[a:b] = new_rows[::-1]
            dist[a:b] = new_dist[::-1]
            improved = True
    return Kernel(BitMatrix(n, n, tuple(rows))), PartialDistanceProfile(tuple(dist))


# -- shortening -------------------------------------------------------------

@dataclass(frozen=True)
class ShortenTrace:
    row: int      # 1-based index of the deleted row
    column: int   # 1-based index of the deleted column
    zero_run: int


def bottom_zero_runs(k: Kernel) -> list[int]:
    runs = []
    for j in range(k.ell):
        run = 0
        for r in reversed(k.rows):
            if (r >> j) & 1:
                break
            run += 1
        runs.append(run)
    return runs


def _shorten_at(k: Kernel, j: int) -> tuple[Kernel, int]:
    n = k.ell
    rows = list(k.rows)
    i = max(t for t in range(n) if (rows[t] >> j) & 1)
    pivot = rows[i]
    for t in range(n):
        if t != i and (rows[t] >> j) & 1:
            rows[t] ^= pivot
    del rows[i]
    low = (1 << j) - 1
    rows = [(r & low) | ((r >> (j + 1)) << j) for r in rows]
    return Kernel(BitMatrix(n - 1, n - 1, tuple(rows))), i


def shorten_step(k: Kernel, mode: str = "greedy") -> list[tuple[Kernel, ShortenTrace]]:
    """One shortening step on the column with the longest bottom run of zeros.

    Greedy mode uses the smallest such column and returns a one-element list;
    ``explore-ties`` returns one result per maximal column.
    """
    if k.ell < 2:
        raise DimensionError("cannot shorten a 1x1 kernel")
    if mode not in ("greedy", "explore-ties"):
        raise ValueError(f"unknown shortening mode {mode!r}")
    runs = bottom_zero_runs(k)
    best = max(runs)
    columns = [j for j, r in enumerate(runs) if r == best]
    if mode == "greedy":
        columns = columns[:1]
    out = []
    for j in columns:
        child, i = _shorten_at(k, j)
        out.append((child, ShortenTrace(i + 1, j + 1, best)))
    return out


def shortened_profile(parent: PartialDistanceProfile, child: Kernel,
                      trace: ShortenTrace) -> PartialDistanceProfile:
    """Child profile: rows at or below the deleted one keep their distances
    (they only lose a zero column); rows above are recomputed."""
    i = trace.row - 1
    rows = child.rows
    n = child.ell
    top = [coset_min_weight(rows[t], rows[t + 1:], n) for t in range(i)]
    return PartialDistanceProfile(tuple(top) + tuple(parent.distances[i + 1:]))


def canonical_columns(k: Kernel) -> tuple[int, ...]:
    """Column-permutation invariant key: rows after sorting columns."""
    n = k.ell
    cols = sorted((sum(((k.rows[i] >> j) & 1) << (n - 1 - i) for i in range(n))
                   for j in range(n)), reverse=True)
    return tuple(sum(((c >> (n - 1 - i)) & 1) << j for j, c in enumerate(cols))
                 for i in range(n))


@dataclass
class ShortenResult:
    ell: int
    kernel: Kernel
    profile: PartialDistanceProfile
    exponent: float
    candidates: int = 1
    trace: list[ShortenTrace] = field(default_factory=list)


def shorten_to(k: Kernel, target_ell: int, strategy: str = "greedy",
               beam_width: int = 64, profile: PartialDistanceProfile | None = None,
               refine_window: int = 4) -> dict[int, ShortenResult]:
    """Shorten repeatedly down to ``target_ell``; best kernel per size.

    ``greedy`` follows the single smallest-index tie choice.  ``explore-ties``
    expands every maximal column, merges column-permutation duplicates and
    keeps the ``beam_width`` best candidates (by exponent, then canonical
    form) at each size.  With ``refine_window > 1`` (the default) every
    candidate is passed through refine_flags before ranking, the input kernel
    included; ``refine_window=0`` gives plain column deletion.
    """
    if not 1 <= target_ell < k.ell:
        raise ValueError(f"target size {target_ell} must be below l={k.ell}")
    mode = "greedy" if strategy == "greedy" else "explore-ties"
    if strategy not in ("greedy", "explore-ties"):
        raise ValueError(f"unknown strategy {strategy!r}")
    if profile is None:
        profile = partial_distances(k)
    if refine_window > 1:
        k, profile = refine_flags(k, refine_window, profile)
    beam = [(k, profile, [])]
    results: dict[int, ShortenResult] = {
        k.ell: ShortenResult(k.ell, k, profile, exponent(profile))}
    for size in range(k.ell - 1, target_ell - 1, -1):
        children: dict[tuple[int, ...], tuple] = {}
        for parent, pprof, trace in beam:
            for child, step in shorten_step(parent, mode):
                key = canonical_columns(child) if mode == "explore-ties" else child.rows
                if key in children:
                    continue
                cprof = shortened_profile(pprof, child, step)
                if refine_window > 1:
                    child, cprof = refine_flags(child, refine_window, cprof)
                children[key] = (child, cprof, trace + [step], key)
        ranked = sorted(children.values(), key=lambda c: (-_exp_or_zero(c[1]), c[3]))
        beam = [(c[0], c[1], c[2]) for c in ranked[:beam_width]]
        best_k, best_p, best_t = beam[0]
        results[size] = ShortenResult(size, best_k, best_p, _exp_or_zero(best_p),
                                      len(children), best_t)
    return results


def _exp_or_zero(p: PartialDistanceProfile) -> float:
    return exponent(p) if p.ell >= 2 else 0.0


# -- reports ----------------------------------------------------------------

@dataclass
class KernelReport:
    kernel: Kernel
    polarizing: bool
    witness: PolarizationWitness | None
    profile: PartialDistanceProfile
    exponent: float

    def to_dict(self) -> dict:
        n = self.kernel.ell
        return {
            "matrix": [format_row(r, n) for r in self.kernel.rows],
            "ell": n,
            "polarizing": self.polarizing,
            "witness": (None if self.witness is None else
                        {"row": self.witness.row, "copies": self.witness.copies}),
            "partial_distances": list(self.profile.distances),
            "exponent": self.exponent,
            "exponent_5dp": f"{self.exponent:.5f}",
        }


def analyze(k: Kernel) -> KernelReport:
    polarizing, witness = is_polarizing(k)
    profile = partial_distances(k)
    return KernelReport(k, polarizing, witness, profile, exponent(profile))


def load_kernels(paths: Iterable[str | Path]) -> list[Kernel]:
    return [Kernel.from_file(p) for p in paths]
