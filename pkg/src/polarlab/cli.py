"""polarlab command line.

Machine-readable results go to stdout (JSON, CSV or the matrix text format),
a short human summary to stderr.  Exit status: 0 success, 2 bad input,
3 search budget exhausted.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import os
import sys
from importlib import resources
from pathlib import Path

from . import bounds, search
from .bch import bch_kernel, chords
from .becsim import (ambiguity_polynomials, bec_evolve, block_error_bounds, mc_bounds_process,
                     polarization_fraction, unpolarized_fraction)
from .gf2 import MatrixFormatError, SingularMatrixError
from .kernel import Kernel, analyze, partial_distances, shorten_to

log = logging.getLogger("polarlab")

EXIT_OK, EXIT_INPUT, EXIT_INDETERMINATE = 0, 2, 3
FIXTURES = ("g2", "example1_f", "shorten5", "shorten5_result", "kernel16")


class InputError(Exception):
    pass


def read_kernel(spec: str) -> Kernel:
    """Path, '-' for stdin, or 'fixture:NAME' for a bundled matrix."""
    try:
        if spec == "-":
            return Kernel.from_text(sys.stdin.read())
        if spec.startswith("fixture:"):
            name = spec.split(":", 1)[1]
            if name not in FIXTURES:
                raise InputError(f"unknown fixture {name!r}; choose from {', '.join(FIXTURES)}")
            text = resources.files("polarlab").joinpath(f"data/{name}.txt").read_text()
            return Kernel.from_text(text)
        return Kernel.from_file(spec)
    except OSError as e:
        raise InputError(str(e)) from e
    except (MatrixFormatError, SingularMatrixError) as e:
        raise InputError(f"{spec}: {e}") from e


def make_oracle(args) -> bounds.DminOracle:
    if args.oracle == "sphere":
        return bounds.DminOracle.sphere_only()
    if args.oracle == "analytic":
        return bounds.DminOracle.analytic()
    try:
        return bounds.DminOracle.with_table(args.dtable)
    except (OSError, ValueError) as e:
        raise InputError(f"d-table: {e}") from e


def parse_range(text: str) -> list[int]:
    try:
        if "-" in text:
            a, b = (int(x) for x in text.split("-", 1))
        else:
            a = b = int(text)
    except ValueError:
        raise InputError(f"bad range {text!r}; use N or A-B") from None
    if a < 2 or b < a:
        raise InputError(f"bad range {text!r}; need 2 <= A <= B")
    return list(range(a, b + 1))


def parse_profile(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise InputError(f"bad profile {text!r}") from None


def fmt(x: float) -> str:
    return f"{x:.6f}"


# -- commands ----------------------------------------------------------------

def cmd_analyze(args, out) -> int:
    k = read_kernel(args.matrix)
    rep = analyze(k)
    json.dump(rep.to_dict(), out, indent=2)
    out.write("\n")
    log.info("l=%d polarizing=%s exponent=%.5f profile=%s",
             k.ell, rep.polarizing, rep.exponent, rep.profile)
    return EXIT_OK


def cmd_bounds(args, out) -> int:
    ells = parse_range(args.ell)
    oracle = make_oracle(args)
    rows = bounds.bound_sweep(ells, oracle)
    bounds.write_bound_csv(rows, out)
    above = [r.ell for r in rows if r.gv_lower > 0.5]
    log.info("%d rows, oracle=%s; gv_lower > 1/2 first at l=%s", len(rows), oracle.name,
             above[0] if above else "none in range")
    return EXIT_OK


def cmd_profiles(args, out) -> int:
    oracle = make_oracle(args)
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["ell", "exponent", "profile"])
    for ell in parse_range(args.ell):
        found = bounds.enumerate_profiles(ell, args.threshold, oracle)
        for p in found:
            w.writerow([ell, f"{p.exponent:.6f}", str(p)])
        log.info("l=%d: %d profiles above %g", ell, len(found), args.threshold)
    return EXIT_OK


def _write_shortening(results, out, out_dir):
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["ell", "exponent", "partial_distances", "candidates"])
    for size in sorted(results, reverse=True):
        r = results[size]
        w.writerow([size, f"{r.exponent:.6f}", str(r.profile), r.candidates])
        if out_dir:
            Path(out_dir, f"kernel_{size}.txt").write_text(r.kernel.to_text())
        log.info("l=%d exponent=%.5f", size, r.exponent)


def cmd_bch(args, out) -> int:
    if not 2 <= args.m <= 6:
        raise InputError("exact mode supports 2 <= m <= 6")
    poly = int(args.primitive_poly, 0) if args.primitive_poly else None
    try:
        b = bch_kernel(args.m, poly)
    except ValueError as e:
        raise InputError(str(e)) from e
    prof = partial_distances(b.kernel)
    log.info("m=%d l=%d chords mu=%s lengths=%s", args.m, b.kernel.ell,
             chords(args.m).mu, chords(args.m).lengths)
    log.info("design %s, exact %s, exponent %.6f", b.design_profile, prof, prof.exponent)
    if args.out_dir:
        os.makedirs(args.out_dir, exist_ok=True)
    if args.shorten_to is None:
        if args.out_dir:
            Path(args.out_dir, f"kernel_{b.kernel.ell}.txt").write_text(b.kernel.to_text())
        out.write(b.kernel.to_text())
        return EXIT_OK
    if not 1 <= args.shorten_to < b.kernel.ell:
        raise InputError(f"--shorten-to must lie in 1..{b.kernel.ell - 1}")
    results = shorten_to(b.kernel, args.shorten_to, args.strategy, args.beam,
                         profile=prof, refine_window=args.refine_window)
    _write_shortening(results, out, args.out_dir)
    return EXIT_OK


def cmd_shorten(args, out) -> int:
    k = read_kernel(args.matrix)
    if not 1 <= args.to < k.ell:
        raise InputError(f"--to must lie in 1..{k.ell - 1}")
    if args.out_dir:
        os.makedirs(args.out_dir, exist_ok=True)
    results = shorten_to(k, args.to, args.strategy, args.beam, refine_window=args.refine_window)
    _write_shortening(results, out, args.out_dir)
    return EXIT_OK


def cmd_search(args, out) -> int:
    target = parse_profile(args.profile)
    if len(target) != args.ell:
        raise InputError(f"profile has {len(target)} entries, --ell is {args.ell}")
    budget = search.SearchBudget(max_nodes=args.budget,
                                 time_limit=args.time_limit or math.inf)
    try:
        res = search.find_matrix_with_profile(args.ell, target, budget, make_oracle(args))
    except ValueError as e:
        raise InputError(str(e)) from e
    out.write(f"verdict {res.verdict}\n")
    if res.kernel is not None:
        out.write(f"profile {res.profile}\n")
        out.write(res.kernel.to_text())
    log.info("%s after %d nodes, %.1fs %s", res.verdict, res.nodes, res.seconds,
             "; ".join(res.notes))
    return EXIT_INDETERMINATE if res.verdict == search.INDETERMINATE else EXIT_OK


def cmd_polarize(args, out) -> int:
    k = read_kernel(args.matrix)
    if not 0.0 <= args.eps <= 1.0:
        raise InputError("--eps must lie in [0, 1]")
    if args.rate is not None and not 0.0 < args.rate < 1.0:
        raise InputError("--rate must lie in (0, 1)")
    try:
        poly = ambiguity_polynomials(k)
        states = bec_evolve(k, args.eps, args.levels, poly=poly, history=True)
    except ValueError as e:
        raise InputError(str(e)) from e
    betas = args.beta or []
    ens = None
    if args.paths and 0.0 < args.eps < 1.0:
        ens = mc_bounds_process(partial_distances(k), args.eps, args.levels, args.paths, args.seed)
    head = ["level", "mean_z", "conservation_residual", "unpolarized_frac"]
    head += [f"frac_beta_{b:g}" for b in betas]
    if ens is not None:
        head += [f"mc_frac_beta_{b:g}" for b in betas]
    if args.rate is not None:
        head += ["pe_lower", "pe_upper"]
    w = csv.writer(out, lineterminator="\n")
    w.writerow(head)
    for st in states:
        row = [st.level, fmt(float(st.z.mean())), f"{st.conservation_residual():.3e}",
               fmt(unpolarized_fraction(st, args.delta))]
        row += [fmt(polarization_fraction(st, b)) for b in betas]
        if ens is not None:
            row += [fmt(_mc_fraction(ens, st.level, b)) for b in betas]
        if args.rate is not None:
            if math.floor(args.rate * st.z.size) >= 1:
                lo, hi, _ = block_error_bounds(st, args.rate)
                row += [f"{lo:.6e}", f"{hi:.6e}"]
            else:
                row += ["", ""]
        w.writerow(row)
    last = states[-1]
    if args.info_set and args.rate is not None:
        _, _, info = block_error_bounds(last, args.rate)
        with open(args.info_set, "w") as f:
            iw = csv.writer(f, lineterminator="\n")
            iw.writerow(["index", "z"])
            for i in info:
                iw.writerow([int(i), repr(float(last.z[i]))])
    if args.histogram:
        _write_histograms(states, args.histogram)
    log.info("l=%d eps=%g n=%d residual=%.2e", k.ell, args.eps, args.levels,
             last.conservation_residual())
    return EXIT_OK


def _mc_fraction(ens, level: int, beta: float) -> float:
    thr = -(float(ens.ell) ** (level * beta))
    return float((ens.hi[:, level] <= thr).mean())


def _write_histograms(states, path: str) -> None:
    """level,bin_lo,bin_hi,count with unit-width bins of log2 z (z = 0 in the lowest bin)."""
    import numpy as np

    with open(path, "w") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["level", "log2z_lo", "log2z_hi", "count"])
        for st in states:
            lz = st.log2z
            finite = lz[np.isfinite(lz)]
            lo = math.floor(finite.min()) if finite.size else 0
            edges = np.arange(lo, 1)
            if edges.size < 2:
                edges = np.array([lo - 1, 0])
            counts, _ = np.histogram(np.clip(lz, edges[0], 0), bins=edges)
            for a, b, c in zip(edges[:-1], edges[1:], counts):
                if c:
                    w.writerow([st.level, int(a), int(b), int(c)])


# -- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    def common(q, suppress):
        d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
        q.add_argument("--threads", type=int, default=d(None),
                       help="cap on worker threads (numba); output does not depend on it")
        q.add_argument("--seed", type=int, default=d(0))
        q.add_argument("--dtable", default=d(None),
                       help="d(n,k) table file (default: $POLARLAB_DTABLE or the bundled table)")
        q.add_argument("-o", "--output", default=d("-"), help="output file (default stdout)")
        q.add_argument("-q", "--quiet", action="store_true", default=d(False),
                       help="no summary on stderr")

    p = argparse.ArgumentParser(prog="polarlab", description="Polarization kernel toolkit")
    common(p, False)
    shared = argparse.ArgumentParser(add_help=False)
    common(shared, True)  # the same options are accepted after the subcommand
    sub = p.add_subparsers(dest="command", required=True)

    def command(name, help):
        return sub.add_parser(name, parents=[shared], help=help)

    a = command("analyze", "partial distances, exponent and polarization test")
    a.add_argument("matrix", help="matrix file, '-' for stdin, or fixture:NAME")
    a.set_defaults(func=cmd_analyze)

    def oracle_opt(q):
        q.add_argument("--oracle", choices=["table", "analytic", "sphere"], default="table",
                       help="d(n,k) upper bound source")

    b = command("bounds", "CSV sweep of lower and upper bounds on E_l")
    b.add_argument("--ell", default="2-32", help="N or A-B")
    oracle_opt(b)
    b.set_defaults(func=cmd_bounds)

    pr = command("profiles", "admissible partial distance profiles")
    pr.add_argument("--ell", required=True, help="N or A-B")
    pr.add_argument("--threshold", type=float, default=0.5)
    oracle_opt(pr)
    pr.set_defaults(func=cmd_profiles)

    def shorten_opts(q):
        q.add_argument("--strategy", choices=["greedy", "explore-ties"], default="greedy")
        q.add_argument("--beam", type=int, default=64)
        q.add_argument("--refine-window", type=int, default=4,
                       help="flag refinement window after each step (0 disables)")
        q.add_argument("--out-dir", default=None, help="write one kernel file per size here")

    c = command("bch", "BCH kernel of length 2^m - 1, optionally shortened")
    c.add_argument("--m", type=int, required=True)
    c.add_argument("--primitive-poly", default=None, help="e.g. 0x25")
    c.add_argument("--shorten-to", type=int, default=None)
    shorten_opts(c)
    c.set_defaults(func=cmd_bch)

    s = command("shorten", "shorten a kernel column by column")
    s.add_argument("matrix")
    s.add_argument("--to", type=int, required=True)
    shorten_opts(s)
    s.set_defaults(func=cmd_shorten)

    se = command("search", "find a kernel with at least the given partial distances")
    se.add_argument("--ell", type=int, required=True)
    se.add_argument("--profile", required=True, help="d1,d2,...,dl")
    se.add_argument("--budget", type=int, default=10**9, help="node budget")
    se.add_argument("--time-limit", type=float, default=None, help="seconds")
    oracle_opt(se)
    se.set_defaults(func=cmd_search)

    po = command("polarize", "exact BEC polarization per level (CSV)")
    po.add_argument("matrix")
    po.add_argument("--eps", type=float, default=0.5)
    po.add_argument("--levels", type=int, default=10)
    po.add_argument("--beta", type=float, action="append",
                    help="rate-of-polarization exponent (repeatable)")
    po.add_argument("--rate", type=float, default=None)
    po.add_argument("--delta", type=float, default=1e-3,
                    help="z in (delta, 1-delta) counts as unpolarized")
    po.add_argument("--paths", type=int, default=0, help="Monte-Carlo bound paths")
    po.add_argument("--info-set", default=None, help="write index,z of the information set")
    po.add_argument("--histogram", default=None, help="write per-level log2 z histograms")
    po.set_defaults(func=cmd_polarize)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO,
                        format="%(message)s", stream=sys.stderr)
    if args.threads is not None:
        if args.threads < 1:
            parser.error("--threads must be positive")
        import warnings

        import numba
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")  # threading-layer probe chatter
            numba.set_num_threads(min(args.threads, numba.config.NUMBA_NUM_THREADS))
    out = sys.stdout if args.output == "-" else open(args.output, "w")
    try:
        return args.func(args, out)
    except InputError as e:
        print(f"polarlab: error: {e}", file=sys.stderr)
        return EXIT_INPUT
    finally:
        if out is not sys.stdout:
            out.close()


if __name__ == "__main__":
    sys.exit(main())
