"""Constructive and exhaustive kernel searches, plus exact d(n, k) helpers."""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .bounds import DminOracle, gv_profile
from .gf2 import BitMatrix, coset_min_weight, popcount, row_reduce, syndrome_weights
from .kernel import Kernel, PartialDistanceProfile, partial_distances


class CapacityError(ValueError):
    pass


# -- exact d(n, k) -----------------------------------------------------------

@njit(cache=True)
def _best_parity_multiset(k, r, stop_at):
    """Max over multisets of r parity columns in F_2^k of the systematic code's dmin."""
    q = 1 << k
    msgs = q - 1
    par = np.zeros((q, q), dtype=np.int64)
    for u in range(q):
        for c in range(q):
            x = u & c
            p = 0
            while x:
                p ^= 1
                x &= x - 1
            par[u, c] = p
    base = np.zeros(msgs, dtype=np.int64)
    for u in range(1, q):
        x = u
        w = 0
        while x:
            w += 1
            x &= x - 1
        base[u - 1] = w
    if r == 0:
        return 1
    best = 0
    # weights after j columns, per message
    acc = np.zeros((r + 1, msgs), dtype=np.int64)
    acc[0, :] = base
    cols = np.zeros(r, dtype=np.int64)
    depth = 0
    cols[0] = 0
    while depth >= 0:
        if cols[depth] >= q:
            depth -= 1
            if depth >= 0:
                cols[depth] += 1
            continue
        c = cols[depth]
        for u in range(1, q):
            acc[depth + 1, u - 1] = acc[depth, u - 1] + par[u, c]
        if depth == r - 1:
            d = acc[r, 0]
            for i in range(1, msgs):
                if acc[r, i] < d:
                    d = acc[r, i]
            if d > best:
                best = d
                if best >= stop_at:
                    return best
            cols[depth] += 1
        else:
            # column multiset in nondecreasing order
            cols[depth + 1] = c
            depth += 1
    return best


def dmin_exact_small(n: int, k: int) -> int:
    """Exact d(n, k) for k <= n <= 10, k <= 6.

    Every [n, k] code with k >= 1 has a systematic generator [I | A] up to a
    column permutation, which leaves dmin unchanged; so it suffices to
    exhaust the multisets of the n - k parity columns of A.
    """
    if not (1 <= k <= n <= 10 and k <= 6):
        raise CapacityError(f"dmin_exact_small supports 1 <= k <= n <= 10, k <= 6; got ({n}, {k})")
    stop = DminOracle.analytic()(n, k)
    return int(_best_parity_multiset(k, n - k, stop))


def code_exists_ilp(n: int, k: int, d: int, time_limit: float | None = None) -> bool | None:
    """Does a binary [n, k] code with minimum distance >= d exist?

    Integer program over column multiplicities x_c (c a nonzero vector of
    F_2^k): sum x_c = n, and every nonzero message u has weight
    sum_{u.c = 1} x_c >= d.  Unit columns are forced present, which loses
    nothing: a rank-k code can be put in systematic form by a basis change.
    Returns None when the solver stops without a verdict.
    """
    from scipy.optimize import Bounds, LinearConstraint, milp

    q = 1 << k
    cols = np.arange(1, q)
    par = np.array([[popcount(u & c) & 1 for c in cols] for u in range(1, q)], dtype=float)
    lb = np.zeros(q - 1)
    for t in range(k):
        lb[(1 << t) - 1] = 1
    cons = [LinearConstraint(np.ones((1, q - 1)), n, n),
            LinearConstraint(par, d, np.inf)]
    opts = {"time_limit": time_limit} if time_limit else {}
    res = milp(c=np.zeros(q - 1), constraints=cons, integrality=np.ones(q - 1),
               bounds=Bounds(lb, np.full(q - 1, n)), options=opts)
    if res.status == 0:
        return True
    if res.status == 2:
        return False
    return None


def dmin_exact_ilp(n: int, k: int, time_limit: float | None = None) -> int:
    """Exact d(n, k) by walking down from the analytic upper bound."""
    if not 1 <= k <= n:
        raise ValueError("need 1 <= k <= n")
    d = DminOracle.analytic()(n, k)
    while d > 1:
        ok = code_exists_ilp(n, k, d, time_limit)
        if ok is None:
            raise RuntimeError(f"solver gave no verdict for [{n},{k},{d}]")
        if ok:
            return d
        d -= 1
    return 1


# -- GV construction ---------------------------------------------------------

def greedy_gv_construct(ell: int) -> Kernel:
    """Build rows bottom-up, row i at distance exactly D~_i from the rows below.

    A vector at distance >= D~_i exists by the counting argument; a coset
    leader of such a coset has weight equal to its distance, so scanning
    weight-D~_i vectors in lexicographic order always succeeds.
    """
    if not 1 <= ell <= 20:
        raise CapacityError("greedy_gv_construct supports l <= 20")
    target = gv_profile(ell).distances
    rows: list[int] = []
    for i in range(ell - 1, -1, -1):
        d = target[i]
        for v in _vectors_of_weight(ell, d):
            if coset_min_weight(v, rows, ell, floor=d - 1) >= d:
                rows.insert(0, v)
                break
        else:  # pragma: no cover - ruled out by the counting argument
            raise AssertionError(f"no vector at distance {d} for row {i + 1}")
    return Kernel(BitMatrix(ell, ell, tuple(rows)))


def _vectors_of_weight(n: int, w: int):
    for pos in itertools.combinations(range(n), w):
        yield sum(1 << p for p in pos)


# -- target-profile search ---------------------------------------------------
#
# Only the chain of spans C_i = span(g_i, ..., g_l) matters: D_i is the
# weight of the coset g_i + C_{i+1}.  For a nondecreasing target,
# "D_j >= T_j for all j" is the same as "dmin(C_j) >= T_j for all j"
# (dmin(C_j) = min_{m >= j} D_m).  Inside a run of rows a..b with equal
# targets the middle codes are subcodes of C_a, so only C_a has to be
# checked: each run is one jump from C_{b+1} to a supercode with
# b - a + 1 more dimensions and minimum distance >= T.  Such supercodes are
# the subspaces of the quotient F_2^l / C_{b+1} whose nonzero cosets all
# have weight >= T.
#
# Symmetry.  Column permutations preserve every D_i.  Any kernel can be
# column-permuted so that its columns, read as bottom-up bit strings with
# the bottom row most significant, are in descending order; then the same
# holds for every block of bottom rows (prefixes of a descending list of
# strings stay descending).  The first phase therefore builds bottom rows
# one at a time and only keeps column-sorted partial matrices.  Once the
# columns are pairwise distinct sorting no longer constrains anything and
# the second phase searches over spans, remembering codes that cannot be
# completed (completion depends on the span alone).

@dataclass(frozen=True)
class SearchBudget:
    max_nodes: int = 10**9
    time_limit: float = math.inf
    symmetry_reduction: bool = True

    def __post_init__(self):
        if self.max_nodes <= 0 or self.time_limit <= 0:
            raise ValueError("budget limits must be positive")


FOUND, NONEXISTENT, INDETERMINATE = "found", "nonexistent", "indeterminate"


@dataclass
class SearchResult:
    verdict: str
    kernel: Kernel | None = None
    profile: PartialDistanceProfile | None = None
    nodes: int = 0
    seconds: float = 0.0
    notes: list[str] = field(default_factory=list)


class _Exhausted(Exception):
    pass


class _ProfileSearch:
    def __init__(self, ell, target, budget, phase1_rows):
        self.ell = ell
        self.target = target
        self.budget = budget
        self.phase1_rows = phase1_rows
        self.nodes = 0
        self.start = time.monotonic()
        self.dead: set[tuple[int, ...]] = set()

    def tick(self):
        self.nodes += 1
        if self.nodes > self.budget.max_nodes or (
                self.nodes % 256 == 0 and time.monotonic() - self.start > self.budget.time_limit):
            raise _Exhausted

    # phase 1: column-sorted bottom rows
    def rows_phase(self, rows: list[int]) -> list[int] | None:
        i = self.ell - len(rows)  # 1-based index of the next row
        if i == 0:
            return rows
        if not self.budget.symmetry_reduction or len(rows) >= self.phase1_rows \
                or _columns_distinct(rows, self.ell):
            return self.span_phase(rows)
        t = self.target[i - 1]
        for v in _sorted_extensions(rows, self.ell):
            if coset_min_weight(v, rows, self.ell, floor=t - 1) < t:
                continue
            self.tick()
            got = self.rows_phase([v] + rows)
            if got is not None:
                return got
        return None

    # phase 2: supercodes run by run
    def span_phase(self, rows: list[int]) -> list[int] | None:
        i = self.ell - len(rows)
        if i == 0:
            return rows
        key = tuple(row_reduce(rows, self.ell)[0])
        if key in self.dead:
            return None
        t = self.target[i - 1]
        a = i
        while a > 1 and self.target[a - 2] == t:
            a -= 1
        m = i - a + 1  # dimensions to add in this run
        basis, pivots, free, weights = syndrome_weights(rows, self.ell)
        good = weights >= t
        good[0] = False
        for sub in _good_subspaces(good, len(free), m):
            self.tick()
            new = [_lift(s, free) for s in sub]
            got = self.span_phase(new + rows)
            if got is not None:
                return got
        self.dead.add(key)
        return None


def _lift(mask: int, free: list[int]) -> int:
    return sum(1 << c for t, c in enumerate(free) if (mask >> t) & 1)


def _column_keys(rows: list[int], ell: int) -> list[int]:
    # bottom row is the most significant digit
    m = len(rows)
    return [sum(((r >> j) & 1) << (m - 1 - t) for t, r in enumerate(reversed(rows)))
            for j in range(ell)]


def _columns_distinct(rows: list[int], ell: int) -> bool:
    return len(set(_column_keys(rows, ell))) == ell


def _sorted_extensions(rows: list[int], ell: int):
    """Nonzero rows v keeping [v; rows] column-sorted, by weight then value.

    The columns of ``rows`` are sorted, so equal columns form contiguous
    blocks; within a block the new row must read 1...10...0.
    """
    keys = _column_keys(rows, ell)
    blocks = []
    start = 0
    for j in range(1, ell + 1):
        if j == ell or keys[j] != keys[start]:
            blocks.append((start, j - start))
            start = j
    out = []
    for counts in itertools.product(*(range(b + 1) for _, b in blocks)):
        v = 0
        for (s, _), c in zip(blocks, counts):
            v |= ((1 << c) - 1) << s
        if v:
            out.append((popcount(v), v))
    out.sort()
    return [v for _, v in out]


def _good_subspaces(good: np.ndarray, q: int, m: int):
    """m-dimensional subspaces of F_2^q with every nonzero element good.

    Each subspace is produced once, through its reduced echelon basis:
    b_1 > b_2 > ... with distinct top bits and every b_j zero at the other
    basis vectors' top bits.
    """
    if m == 0:
        yield []
        return
    idx = np.arange(1 << q, dtype=np.int64)

    def rec(basis, span, lead_mask, top):
        if len(basis) == m:
            yield list(basis)
            return
        # candidates: top bit below `top`, zero at previous leads, and
        # v ^ s good for every s in the current span
        hi = 1 << top
        cand = idx[1:hi]
        ok = good[cand].copy()
        ok &= (cand & lead_mask) == 0
        for s in span[1:]:
            ok &= good[cand ^ s]
        for v in cand[ok]:
            v = int(v)
            b = v.bit_length() - 1
            if any((u >> b) & 1 for u in basis):
                continue
            yield from rec(basis + [v], span + [x ^ v for x in span], lead_mask | (1 << b), b)

    yield from rec([], [0], 0, q)


def find_matrix_with_profile(ell: int, target, budget: SearchBudget | None = None,
                             oracle: DminOracle | None = None,
                             phase1_rows: int = 8) -> SearchResult:
    """Search for an l x l kernel with D_i >= target_i for every i.

    Verdicts: ``found`` (with the kernel, columns in canonical order),
    ``nonexistent`` (the pruned tree was exhausted; sound, see the module
    comment above), or ``indeterminate`` (budget ran out).
    """
    budget = budget or SearchBudget()
    target = tuple(int(x) for x in target)
    if len(target) != ell:
        raise ValueError(f"target has {len(target)} entries, expected {ell}")
    if any(a > b for a, b in zip(target, target[1:])):
        raise ValueError("target must be nondecreasing")
    if min(target) < 1:
        raise ValueError("target distances must be >= 1")
    oracle = oracle or DminOracle.analytic()
    res = SearchResult(NONEXISTENT)
    start = time.monotonic()
    for i in range(1, ell + 1):
        cap = oracle(ell, ell - i + 1)
        if target[i - 1] > cap:
            res.notes.append(f"D_{i} <= d({ell},{ell - i + 1}) <= {cap}")
            res.seconds = time.monotonic() - start
            return res
    s = _ProfileSearch(ell, target, budget, phase1_rows)
    try:
        rows = s.rows_phase([])
    except _Exhausted:
        rows = None
        res.verdict = INDETERMINATE
    res.nodes = s.nodes
    res.seconds = time.monotonic() - start
    if rows is None:
        return res
    k = Kernel(BitMatrix(ell, ell, tuple(rows)))
    keys = _column_keys(list(rows), ell)
    perm = sorted(range(ell), key=lambda j: (-keys[j], j))
    k = k.permute_columns(perm)
    prof = partial_distances(k)
    if any(a < b for a, b in zip(prof, target)):
        raise AssertionError("search returned a kernel below the target")
    res.verdict, res.kernel, res.profile = FOUND, k, prof
    return res
