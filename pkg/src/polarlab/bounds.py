"""Bounds on the best exponent E_l over all l x l kernels.

Lower bound: Gilbert-Varshamov style profile.  Upper bounds: per-row
minimum-distance limits d(l, l-i+1), and the sharper composition bound where
each row's distance splits as ``t_i + s_i`` over disjoint column sets.
"""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from .kernel import PartialDistanceProfile, exponent

ENV_DTABLE = "POLARLAB_DTABLE"
ANALYTIC_BOUNDS = ("singleton", "sphere", "plotkin", "griesmer")
NEG_INF = float("-inf")


# -- analytic upper bounds on d(n, k) ---------------------------------------

def singleton_bound(n: int, k: int) -> int:
    return n - k + 1


def sphere_packing_bound(n: int, k: int) -> int:
    """Largest d with sum_{j <= (d-1)/2} C(n, j) <= 2^(n-k)."""
    budget = 1 << (n - k)
    d = 1
    while d + 1 <= n and _ball(n, d // 2) <= budget:
        d += 1
    return d


def _ball(n: int, radius: int) -> int:
    return sum(math.comb(n, j) for j in range(radius + 1))


def plotkin_bound(n: int, k: int) -> int:
    """Average nonzero weight of a linear code: d <= n 2^(k-1) / (2^k - 1)."""
    return (n << (k - 1)) // ((1 << k) - 1)


def griesmer_length(k: int, d: int) -> int:
    return sum(-(-d // (1 << i)) for i in range(k))


def griesmer_bound(n: int, k: int) -> int:
    d = 1
    while d + 1 <= n and griesmer_length(k, d + 1) <= n:
        d += 1
    return d


_BOUND_FUNCS = {
    "singleton": singleton_bound,
    "sphere": sphere_packing_bound,
    "plotkin": plotkin_bound,
    "griesmer": griesmer_bound,
}


def load_dtable(path: str | Path | None = None) -> dict[tuple[int, int], int]:
    """Read ``n<TAB>k<TAB>d`` lines; '#' starts a comment."""
    if path is None:
        text = resources.files("polarlab").joinpath("data/dtable.tsv").read_text()
    else:
        text = Path(path).read_text()
    table = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split("\t") if "\t" in line else line.split()
        if len(parts) != 3:
            raise ValueError(f"d-table line {lineno}: expected n, k, d")
        n, k, d = map(int, parts)
        table[(n, k)] = d
    return table


def write_dtable(table: Mapping[tuple[int, int], int], path: str | Path, header: str = "") -> None:
    with open(path, "w") as f:
        for line in header.splitlines():
            f.write(f"# {line}\n")
        for (n, k) in sorted(table):
            f.write(f"{n}\t{k}\t{table[(n, k)]}\n")


@dataclass(frozen=True)
class DminOracle:
    """Upper bound on d(n, k), the best minimum distance of a binary [n, k] code.

    The minimum of the selected analytic bounds and the table entry (when
    present).  Degenerate arguments: k > n -> 0, n = 0 -> 0, k = 0 -> n + 1.
    """
    table: Mapping[tuple[int, int], int] = field(default_factory=dict)
    bounds: tuple[str, ...] = ANALYTIC_BOUNDS
    name: str = "analytic"

    def __post_init__(self):
        unknown = set(self.bounds) - set(_BOUND_FUNCS)
        if unknown:
            raise ValueError(f"unknown bounds {sorted(unknown)}")

    @classmethod
    def analytic(cls) -> "DminOracle":
        return cls()

    @classmethod
    def sphere_only(cls) -> "DminOracle":
        return cls(bounds=("sphere",), name="sphere")

    @classmethod
    def with_table(cls, path: str | Path | None = None) -> "DminOracle":
        """Bundled exact table, or ``path`` / $POLARLAB_DTABLE when given."""
        path = path or os.environ.get(ENV_DTABLE) or None
        return cls(table=load_dtable(path), name="table")

    def __call__(self, n: int, k: int) -> int:
        return _oracle_value(self, n, k)

    def __hash__(self):
        return hash((self.name, self.bounds, tuple(sorted(self.table.items()))))


@lru_cache(maxsize=None)
def _oracle_value(oracle: DminOracle, n: int, k: int) -> int:
    if k > n or n <= 0:
        return 0
    if k <= 0:
        return n + 1
    best = min(_BOUND_FUNCS[b](n, k) for b in oracle.bounds) if oracle.bounds else n
    if (n, k) in oracle.table:
        best = min(best, oracle.table[(n, k)])
    return best


# -- lower bound --------------------------------------------------------------

GV_EXACT_MAX = 4096


def gv_profile(ell: int) -> PartialDistanceProfile:
    """D~_i = max{D : sum_{j<D} C(l, j) < 2^i}.

    Since an integer x satisfies x < 2^i iff x.bit_length() <= i, D~_i counts
    the D whose ball size has bit length <= i.  Exact integers up to
    ``GV_EXACT_MAX``; above that the ball sizes are compared in log2 domain
    (lgamma plus cumulative log-sum-exp), which may misplace a D~_i when a
    ball size lies within a relative 1e-7 of a power of two.
    """
    if ell < 1:
        raise ValueError("l >= 1 required")
    if ell <= GV_EXACT_MAX:
        sizes, acc, c = [], 0, 1
        for j in range(ell):  # sizes[D-1] = bit length of sum_{j<D} C(l, j)
            acc += c
            sizes.append(acc.bit_length())
            c = c * (ell - j) // (j + 1)
        key = np.array(sizes)
        return PartialDistanceProfile(tuple(
            int(x) for x in np.searchsorted(key, np.arange(1, ell + 1), side="right")))
    j = np.arange(ell)
    log2c = (math.lgamma(ell + 1) - np.array([math.lgamma(x + 1) + math.lgamma(ell - x + 1)
                                               for x in j])) / math.log(2)
    key = np.logaddexp2.accumulate(log2c)  # log2 of the ball sizes
    # ball sizes equal to a power of two (e.g. 2^(l-1) for odd l) must fail
    # the strict test despite rounding, hence the tolerance
    d = np.searchsorted(key, np.arange(1, ell + 1) - 1e-7, side="left")
    d[-1] = ell  # the ball of radius l-1 is 2^l - 1 < 2^l, exactly
    return PartialDistanceProfile(tuple(int(x) for x in d))


def gv_bound(ell: int) -> float:
    return exponent(gv_profile(ell))


def smallest_ell_gv_exceeds(value: float = 0.5, start: int = 2, stop: int = 1000) -> int | None:
    for ell in range(start, stop):
        if gv_bound(ell) > value:
            return ell
    return None


# -- upper bounds -------------------------------------------------------------

def naive_upper_bound(ell: int, oracle: DminOracle | None = None) -> float:
    oracle = oracle or DminOracle.analytic()
    return exponent([oracle(ell, ell - i + 1) for i in range(1, ell + 1)])


@dataclass(frozen=True)
class CompositionBound:
    ell: int
    t: tuple[int, ...]
    value: float

    def sub_distances(self, oracle: DminOracle) -> tuple[int, ...]:
        return tuple(sub_distance(self.ell, i, r, oracle)
                     for i, r in zip(range(1, self.ell + 1), _tails(self.t)))

    def distances(self, oracle: DminOracle) -> tuple[int, ...]:
        return tuple(t + s for t, s in zip(self.t, self.sub_distances(oracle)))


def _tails(t: Iterable[int]) -> list[int]:
    """r_i = sum_{j > i} t_j for each i."""
    t = list(t)
    out, acc = [0] * len(t), 0
    for i in range(len(t) - 1, -1, -1):
        out[i] = acc
        acc += t[i]
    return out


def sub_distance(ell: int, i: int, r: int, oracle: DminOracle) -> int:
    """s_i = min(floor(r_i / 2), d(r_i, l - i + 1)) for 1-based row i."""
    return min(r // 2, oracle(r, ell - i + 1))


def improved_upper_bound(ell: int, oracle: DminOracle | None = None
                         ) -> tuple[float, CompositionBound]:
    """Max over compositions t of l of (1/l) sum_i log_l(t_i + s_i).

    Dynamic program over (row i, r = sum_{j >= i} t_j): s_i only depends on
    (i, r_i) so the optimum over t_i, ..., t_l given r is a function of
    (i, r).  O(l^3).  Ties prefer the smaller r_i.
    """
    if ell < 2:
        raise ValueError("l >= 2 required")
    oracle = oracle or DminOracle.analytic()
    # best[i][r]: max of sum_{j >= i} log(t_j + s_j) with sum_{j >= i} t_j = r
    best = [[NEG_INF] * (ell + 1) for _ in range(ell + 2)]
    choice = [[-1] * (ell + 1) for _ in range(ell + 2)]
    best[ell + 1][0] = 0.0
    for i in range(ell, 0, -1):
        for r in range(ell + 1):
            for r_next in range(r + 1):  # r_next = r_i, ascending: ties keep smaller
                tail = best[i + 1][r_next]
                if tail == NEG_INF:
                    continue
                d = (r - r_next) + sub_distance(ell, i, r_next, oracle)
                if d <= 0:
                    continue
                val = tail + math.log(d)
                if val > best[i][r] + 1e-12:
                    best[i][r] = val
                    choice[i][r] = r_next
    total = best[1][ell]
    t = []
    r = ell
    for i in range(1, ell + 1):
        r_next = choice[i][r]
        t.append(r - r_next)
        r = r_next
    value = total / (ell * math.log(ell))
    return value, CompositionBound(ell, tuple(t), value)


def compositions(total: int, parts: int):
    """All tuples of ``parts`` nonnegative ints summing to ``total``."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in compositions(total - first, parts - 1):
            yield (first,) + rest


def composition_value(t: tuple[int, ...], oracle: DminOracle) -> float:
    ell = len(t)
    terms = [ti + sub_distance(ell, i, r, oracle)
             for i, (ti, r) in enumerate(zip(t, _tails(t)), 1)]
    if min(terms) <= 0:
        return NEG_INF
    return exponent(terms)


def improved_upper_bound_bruteforce(ell: int, oracle: DminOracle | None = None) -> float:
    """Same maximum by listing every composition; exponential, for checking."""
    oracle = oracle or DminOracle.analytic()
    return max(composition_value(t, oracle) for t in compositions(ell, ell))


# -- admissible profiles ------------------------------------------------------

def profile_feasible(profile: Iterable[int], oracle: DminOracle) -> bool:
    """Is there a composition t with D_i <= t_i + s_i for every i?"""
    d = list(profile)
    ell = len(d)
    reach = 1  # bit r set: r_i = r is reachable
    for i in range(ell, 0, -1):
        reach = _advance(reach, ell, i, d[i - 1], oracle)
        if not reach:
            return False
    return bool((reach >> ell) & 1)


def _advance(reach: int, ell: int, i: int, target: int, oracle: DminOracle) -> int:
    nxt = 0
    for r in range(ell + 1):
        if (reach >> r) & 1:
            t_min = max(0, target - sub_distance(ell, i, r, oracle))
            if r + t_min <= ell:
                # every r' in [r + t_min, l] is reachable
                nxt |= ((1 << (ell + 1)) - 1) & ~((1 << (r + t_min)) - 1)
    return nxt


def enumerate_profiles(ell: int, threshold: float = 0.5, oracle: DminOracle | None = None
                       ) -> list[PartialDistanceProfile]:
    """Monotone profiles allowed by the per-row and composition bounds.

    Lists every D_1 <= ... <= D_l with D_i <= d(l, l-i+1), feasible under
    the composition bound, and exponent strictly above ``threshold``;
    sorted by exponent (descending), then lexicographically.
    """
    if ell < 2:
        raise ValueError("l >= 2 required")
    oracle = oracle or DminOracle.analytic()
    caps = [oracle(ell, ell - i + 1) for i in range(1, ell + 1)]
    need = threshold * ell * math.log(ell)
    logs = [0.0] + [math.log(x) for x in range(1, ell + 1)]
    found: list[tuple[int, ...]] = []
    suffix = [0] * ell

    def dfs(i: int, upper: int, reach: int, acc: float) -> None:
        # choose D_i (1-based i), rows below already fixed
        for d in range(min(upper, caps[i - 1]), 0, -1):
            # optimistic completion: rows 1..i-1 take min(d, cap)
            rest = sum(logs[min(d, caps[j])] for j in range(i - 1))
            if acc + logs[d] + rest <= need + 1e-12:
                break  # smaller d only lowers the bound
            nreach = _advance(reach, ell, i, d, oracle)
            if not nreach:
                continue
            suffix[i - 1] = d
            if i == 1:
                if (nreach >> ell) & 1 and acc + logs[d] > need + 1e-12:
                    found.append(tuple(suffix))
            else:
                dfs(i - 1, d, nreach, acc + logs[d])

    dfs(ell, ell, 1, 0.0)
    profiles = [PartialDistanceProfile(p) for p in found]
    profiles.sort(key=lambda p: (-exponent(p), p.distances))
    return profiles


def universal_beta(ell: int) -> float:
    """log_l(2) / l."""
    if ell < 2:
        raise ValueError("l >= 2 required")
    return math.log(2) / (ell * math.log(ell))


def bch_asymptotic_bound(m: int) -> float:
    """Chord bound with the worst case mu(i) = 2i + 1 and full-length chords."""
    if m < 2:
        raise ValueError("m >= 2 required")
    n = (1 << m) - 1
    a = (n - 1) // m
    total = math.fsum(m * math.log(2 * k) for k in range(1, a + 1))
    total += (n - 1 - a * m) * math.log(2 * a + 2)
    return total / (n * math.log(n))


@dataclass
class BoundRow:
    ell: int
    gv_lower: float
    naive_upper: float
    improved_upper: float


def bound_sweep(ells: Iterable[int], oracle: DminOracle | None = None) -> list[BoundRow]:
    oracle = oracle or DminOracle.analytic()
    return [BoundRow(ell, gv_bound(ell), naive_upper_bound(ell, oracle),
                     improved_upper_bound(ell, oracle)[0]) for ell in ells]


def write_bound_csv(rows: Iterable[BoundRow], stream) -> None:
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(["ell", "gv_lower", "naive_upper", "improved_upper"])
    for r in rows:
        w.writerow([r.ell, f"{r.gv_lower:.6f}", f"{r.naive_upper:.6f}", f"{r.improved_upper:.6f}"])
