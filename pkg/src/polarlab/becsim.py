"""Polarization on the binary erasure channel, plus a channel-free bounds process.

On a BEC(eps) every synthesized channel W^(i) is again an erasure channel.
Given the unerased output set U, bit u_i (with u_1..u_{i-1} known) is lost
exactly when g_i restricted to U lies in the span of g_{i+1}, ..., g_l
restricted to U: then two input sequences differing in u_i produce the same
unerased outputs.  Otherwise u_i is determined.  So the erasure probability
of W^(i) is a polynomial in eps,

    f_i(eps) = sum_w N_i(w) eps^w (1 - eps)^(l - w),

where N_i(w) counts the weight-w erasure patterns that are ambiguous for
index i.  The Bhattacharyya parameter of a BEC equals its erasure
probability, and recursing the f_i level by level is exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numba
import numpy as np

from .kernel import Kernel, PartialDistanceProfile

MAX_AMBIGUITY_ELL = 24
MAX_STATE = 10**7


class CapacityError(ValueError):
    pass


@numba.njit(cache=True)
def _ambiguity_counts(rows, ell):
    counts = np.zeros((ell, ell + 1), dtype=np.int64)
    basis = np.zeros(64, dtype=np.int64)  # basis[b]: vector with top bit b
    for u in range(np.int64(1) << ell):  # u = unerased columns
        w = ell
        x = u
        while x:
            w -= 1
            x &= x - 1
        for b in range(ell):
            basis[b] = 0
        for i in range(ell - 1, -1, -1):
            v = rows[i] & u
            while v:
                b = 63
                while not (v >> b) & 1:
                    b -= 1
                if basis[b] == 0:
                    basis[b] = v
                    break
                v ^= basis[b]
            if v == 0:
                counts[i, w] += 1
    return counts


@dataclass(frozen=True)
class AmbiguityPolynomial:
    """counts[i][w]: ambiguous erasure patterns of weight w for row i (0-based)."""
    ell: int
    counts: tuple[tuple[int, ...], ...]

    def transfer(self, i: int, eps):
        """f_i at eps (scalar or array), 1-based i."""
        eps = np.asarray(eps, dtype=float)
        out = np.zeros_like(eps)
        for w, c in enumerate(self.counts[i - 1]):
            if c:
                out = out + c * eps ** w * (1.0 - eps) ** (self.ell - w)
        return out

    def min_weight(self, i: int) -> int:
        return next(w for w, c in enumerate(self.counts[i - 1]) if c)


def ambiguity_polynomials(k: Kernel) -> AmbiguityPolynomial:
    if k.ell > MAX_AMBIGUITY_ELL:
        raise CapacityError(f"l={k.ell} exceeds {MAX_AMBIGUITY_ELL} (2^l pattern enumeration)")
    arr = np.array(k.rows, dtype=np.int64)
    counts = _ambiguity_counts(arr, k.ell)
    return AmbiguityPolynomial(k.ell, tuple(tuple(int(c) for c in row) for row in counts))


@dataclass
class BecState:
    """z[j] for the l^n synthesized channels; index digits in base l, first branch most significant.

    ``log2z`` is carried alongside ``z`` so that values below the double
    range (z < 2^-1074 underflows to 0) still compare correctly.
    """
    ell: int
    level: int
    eps: float
    z: np.ndarray
    log2z: np.ndarray

    def conservation_residual(self) -> float:
        return abs(math.fsum(self.z.tolist()) - self.z.size * self.eps)


def _log2(z: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.log2(z)


def bec_step(poly: AmbiguityPolynomial, z: np.ndarray, log2z: np.ndarray | None = None):
    """Children of every node; returns (z, log2 z) at the next level.

    log2 f_i is evaluated as a base-2 log-sum-exp of the terms
    N_i(w) z^w (1 - z)^(l - w), so it stays finite far below 2^-1074.
    """
    if log2z is None:
        log2z = _log2(z)
    out = np.empty((z.size, poly.ell))
    lout = np.empty((z.size, poly.ell))
    lz = log2z[:, None]
    with np.errstate(divide="ignore"):
        l1z = (np.log1p(-z) / math.log(2))[:, None]
    ws = np.arange(poly.ell + 1)
    for i in range(1, poly.ell + 1):
        out[:, i - 1] = poly.transfer(i, z)
        counts = np.array(poly.counts[i - 1], dtype=float)
        keep = counts > 0
        w = ws[keep]
        with np.errstate(invalid="ignore"):
            terms = np.log2(counts[keep]) + w * lz + np.where(poly.ell - w > 0, (poly.ell - w) * l1z, 0.0)
        lout[:, i - 1] = np.logaddexp2.reduce(terms, axis=1)
    # z <= 1 always; clamp rounding overshoot of the log-sum-exp
    return out.reshape(-1), np.minimum(lout, 0.0).reshape(-1)


def bec_evolve(k: Kernel, eps: float, levels: int, poly: AmbiguityPolynomial | None = None,
               history: bool = False):
    """Exact erasure probabilities after ``levels`` kernel applications.

    With ``history=True`` returns the list of states for levels 0..n.
    """
    if not 0.0 <= eps <= 1.0:
        raise ValueError("eps must lie in [0, 1]")
    if levels < 0 or k.ell ** levels > MAX_STATE:
        raise CapacityError(f"l^n = {k.ell}^{levels} exceeds {MAX_STATE}")
    poly = poly or ambiguity_polynomials(k)
    z = np.array([float(eps)])
    lz = _log2(z)
    states = [BecState(k.ell, 0, eps, z, lz)]
    for n in range(1, levels + 1):
        z, lz = bec_step(poly, z, lz)
        states.append(BecState(k.ell, n, eps, z, lz))
    return states if history else states[-1]


def polarization_threshold_log2(ell: int, n: int, beta: float) -> float:
    """log2 of 2^(-l^(n beta))."""
    return -(float(ell) ** (n * beta))


def polarization_fraction(state: BecState, beta: float) -> float:
    """Fraction of indices with z <= 2^(-l^(n beta))."""
    return float(np.mean(state.log2z <= polarization_threshold_log2(state.ell, state.level, beta)))


def unpolarized_fraction(state: BecState, delta: float) -> float:
    return float(np.mean((state.z > delta) & (state.z < 1 - delta)))


# -- Monte-Carlo bounds process ----------------------------------------------

@dataclass(frozen=True)
class BoundsTrajectory:
    branches: tuple[int, ...]  # 1-based B_1..B_n
    lo: tuple[float, ...]      # log2 lower bounds, levels 0..n
    hi: tuple[float, ...]


@dataclass
class BoundsEnsemble:
    ell: int
    branches: np.ndarray  # (paths, n), 1-based
    lo: np.ndarray        # (paths, n + 1)
    hi: np.ndarray

    def __len__(self):
        return self.branches.shape[0]

    def trajectory(self, p: int) -> BoundsTrajectory:
        return BoundsTrajectory(tuple(int(b) for b in self.branches[p]),
                                tuple(self.lo[p].tolist()), tuple(self.hi[p].tolist()))

    def fraction_below(self, beta: float, bound: str = "hi") -> float:
        n = self.branches.shape[1]
        col = (self.hi if bound == "hi" else self.lo)[:, n]
        return float(np.mean(col <= polarization_threshold_log2(self.ell, n, beta)))


def mc_bounds_process(profile: PartialDistanceProfile, z0: float, levels: int, paths: int,
                      seed: int = 0) -> BoundsEnsemble:
    """Sample Z_n paths through the partial-distance sandwich, in log2 domain.

    lo' = D_B lo;  hi' = min(D_B hi + (l - B), hi + log2 l, 0).  Path p uses
    its own generator seeded with ``seed ^ p``, so results do not depend on
    how paths are split across workers.
    """
    if not 0.0 < z0 < 1.0:
        raise ValueError("z0 must lie in (0, 1)")
    d = np.array(profile.distances, dtype=float)
    ell = len(d)
    lg = math.log2(ell)
    br = np.empty((paths, levels), dtype=np.int64)
    lo = np.empty((paths, levels + 1))
    hi = np.empty((paths, levels + 1))
    for p in range(paths):
        rng = np.random.default_rng(seed ^ p)
        br[p] = rng.integers(1, ell + 1, size=levels)
    lo[:, 0] = hi[:, 0] = math.log2(z0)
    for n in range(levels):
        b = br[:, n]
        db = d[b - 1]
        lo[:, n + 1] = db * lo[:, n]
        hi[:, n + 1] = np.minimum(np.minimum(db * hi[:, n] + (ell - b), hi[:, n] + lg), 0.0)
    return BoundsEnsemble(ell, br, lo, hi)


def exact_path_log2(poly: AmbiguityPolynomial, eps: float, branches) -> list[float]:
    """log2 z along one branch sequence of the exact BEC recursion (log domain)."""
    z = np.array([float(eps)])
    lz = _log2(z)
    out = [float(lz[0])]
    for b in branches:
        z, lz = bec_step(poly, z, lz)
        z, lz = z[int(b) - 1:int(b)], lz[int(b) - 1:int(b)]
        out.append(float(lz[0]))
    return out


# -- block error bounds and scalar formulas ----------------------------------

def pe_lower(z: float) -> float:
    """Error probability lower bound (1 - sqrt(1 - z^2)) / 2 for Bhattacharyya z."""
    if not 0.0 <= z <= 1.0:
        raise ValueError("z must lie in [0, 1]")
    # same value, without cancellation for small z
    return 0.5 * z * z / (1.0 + math.sqrt(1.0 - z * z))


def block_error_bounds(state: BecState, rate: float):
    """(lower, upper, info set) for the |A| = floor(R N) most reliable indices."""
    if not 0.0 < rate < 1.0:
        raise ValueError("rate must lie in (0, 1)")
    size = int(math.floor(rate * state.z.size))
    if size < 1:
        raise ValueError("rate too small: empty information set")
    order = np.argsort(state.z, kind="stable")  # equal z: smaller index first
    info = np.sort(order[:size])
    zs = state.z[info]
    lower = max(pe_lower(float(z)) for z in zs)
    upper = min(1.0, math.fsum(zs.tolist()))
    return lower, upper, info


def binary_entropy(p: float) -> float:
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    if p in (0.0, 1.0):
        return 0.0
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)


def bsc_pair_gain(eps: float) -> float:
    """h(2 eps (1 - eps)) - h(eps), eps in [0, 1/2]."""
    if not 0.0 <= eps <= 0.5:
        raise ValueError("eps must lie in [0, 1/2]")
    return binary_entropy(2 * eps * (1 - eps)) - binary_entropy(eps)
