"""Command-line front end: ``tanglekit <command> ...``.

Every command prints a table (json, csv or aligned text) together with named
checks; the exit status is 0 exactly when all checks pass.
"""

from __future__ import annotations

import argparse
import math
import sys
from collections import Counter
from fractions import Fraction

from . import measures, oracle, stats
from .cache import ResultCache, default_cache_dir
from .errors import CapExceeded, TanglekitError
from .partitions import SPECTRUM_CAP, cycle_spectrum
from .reports import Result
from .rng import Rng
from .sampling import EXACT_CAP, SamplerConfig, iter_samples
from .trees import (canonical_trees, canonicalize, catalan, generator_count, parse_tree,
                    serialize_tree)

KNOWN_T = [1, 1, 2, 13, 114, 1509, 25595, 535753, 13305590, 382728552,
           12515198465, 458621603279]
GAMMA_DIGITS = "2710416936"

EXIT_OK, EXIT_CHECK_FAILED, EXIT_ERROR = 0, 1, 2


def parse_range(text: str) -> list[int]:
    """``"7"``, ``"2..12"`` or ``"3,5,8"``."""
    try:
        if ".." in text:
            a, b = text.split("..", 1)
            lo, hi = int(a), int(b)
            if lo > hi:
                raise ValueError
            values = list(range(lo, hi + 1))
        else:
            values = [int(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid range {text!r}") from None
    if not values or min(values) < 1:
        raise argparse.ArgumentTypeError(f"invalid range {text!r}")
    return values


def _tree_arg(text: str):
    try:
        return parse_tree(text)
    except TanglekitError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


# ---------------------------------------------------------------- commands

def cmd_count(args, cache: ResultCache) -> Result:
    res = Result("count", {}, ["n", "t_n", "r_n", "r_n_minus_e^(1/8)"])
    mismatches = []
    for n in args.n:
        t = int(cache.get_or_compute("count", n, lambda n=n: str(measures.t_closed_form(n))))
        if n <= len(KNOWN_T) and t != KNOWN_T[n - 1]:
            mismatches.append(n)
        if args.verify and n <= 60 and t != measures.t_table(n)[n - 1]:
            mismatches.append(n)
        r = float(measures.asymptotic_ratio(n))
        res.rows.append([n, t, r, r - measures.E_EIGHTH])
    res.checks["known_values"] = not mismatches
    res.extra["e^(1/8)"] = measures.E_EIGHTH
    return res


def cmd_spectrum(args, cache: ResultCache) -> Result:
    res = Result("spectrum", {}, ["tree", "cycle_type", "count", "aut_size"])
    if args.tree is not None:
        trees = [canonicalize(args.tree)]
    else:
        trees = list(canonical_trees(args.n))
    ok = True
    for t in trees:
        spec = cycle_spectrum(t, cap=args.cap_spectrum)
        size = sum(spec.values())
        ok &= size == 2 ** generator_count(t)
        if args.verify:
            ok &= oracle.cycle_census(t) == {str(k): v for k, v in spec.items()}
        for lam, c in sorted(spec.items(), key=lambda kv: kv[0].parts(), reverse=True):
            res.rows.append([serialize_tree(t), str(lam), c, size])
    res.checks["spectrum_sums_to_2^g"] = bool(ok)
    return res


def cmd_tvd(args, cache: ResultCache) -> Result:
    res = Result("tvd", {}, ["n", "d_n", "d_n_float", "d_n_sqrt_n"])
    scaled = []
    for n in args.n:
        d = Fraction(cache.get_or_compute(
            "tvd", n, lambda n=n: str(measures.total_variation(n, workers=args.threads))))
        scaled.append((n, float(d) * math.sqrt(n)))
        res.rows.append([n, d, float(d), scaled[-1][1]])
    tail = [v for n, v in scaled if n >= 6]
    if len(tail) >= 3:
        # "no increasing tail": the last three values are not strictly increasing
        # and nothing after the first point exceeds it
        res.checks["no_increasing_tail"] = (not (tail[-3] < tail[-2] < tail[-1])
                                            and max(tail[1:]) <= tail[0])
        first = next(float(r[1]) for r in res.rows if r[0] >= 6)
        res.checks["d_last_below_d_first"] = float(res.rows[-1][1]) < first
    return res


def _resolve_seed(args) -> int:
    if args.seed is None:
        args.seed = Rng().seed
    return args.seed


def cmd_sample(args, cache: ResultCache) -> Result:
    seed = _resolve_seed(args)
    cfg = SamplerConfig(args.n, args.mode, seed, cap=args.cap_exact)
    samples = iter_samples(cfg, args.count)
    if not args.table:
        res = Result("sample", {}, ["tanglegram"], bare=True)
        res.rows = [[str(tg)] for tg in samples]
        return res
    counts = Counter(oracle.tanglegram_id(tg, cap=args.cap_oracle) for tg in samples)
    reps = oracle.enumerate_tanglegrams(args.n, cap=args.cap_oracle)
    expected = args.count / len(reps)
    res = Result("sample", {}, ["id", "tanglegram", "count", "expected"])
    for i, tg in enumerate(reps):
        res.rows.append([i, str(tg), counts.get(i, 0), expected])
    chi2 = sum((counts.get(i, 0) - expected) ** 2 / expected for i in range(len(reps)))
    p = float(stats.sps.chi2.sf(chi2, len(reps) - 1)) if len(reps) > 1 else 1.0
    res.extra.update({"chi_square": chi2, "p_value": p})
    if args.mode == "exact":
        res.checks["uniform_at_1e-3"] = p >= 1e-3
    return res


def cmd_stats(args, cache: ResultCache) -> Result:
    seed = _resolve_seed(args)
    n, count = args.n, args.count
    if args.statistic == "height":
        agg = stats.plane_tree_heights(n, count, seed)
        report = stats.verify_height_law(agg, n)
    elif args.statistic == "matched-cherries" and args.mode == "approximate":
        report = stats.verify_matched_cherry_law(
            stats.approximate_matched_cherries(n, count, seed), n, "approximate")
    else:
        SamplerConfig(n, args.mode, seed, cap=args.cap_exact).check()
        aggs = stats.tanglegram_statistics(n, count, seed, args.mode)
        if args.statistic == "matched-cherries":
            report = stats.verify_matched_cherry_law(aggs["matched_cherries"], n)
        elif args.statistic == "generators":
            report = stats.verify_generators_law(aggs["generators"], n)
        else:
            if args.mode == "exact":
                mean = stats.exact_tanglegram_cherry_mean(n)
                label = "uniform tanglegrams"
            else:
                mean = Fraction(n * (n - 1), 4 * n - 6) if n > 1 else Fraction(0)
                label = "unweighted plane triples"
            report = stats.verify_cherry_law(aggs["cherries"], n, mean, measure=label)
    res = Result("stats", {}, ["x", "empirical", "reference"])
    res.rows = [list(r) for r in report.rows]
    res.checks = dict(report.checks)
    res.extra["report"] = report.to_dict()
    return res


def cmd_gamma(args, cache: ResultCache) -> Result:
    value = stats.gamma_constant(args.precision)
    digits = max(1, min(args.digits, 60))
    text = stats.gamma_digits(digits)
    deeper = stats.gamma_constant(args.precision, depth=_gamma_depth(args.precision) + 2)
    res = Result("gamma", {}, ["quantity", "value"])
    res.rows = [["gamma", text], ["reference", "0." + GAMMA_DIGITS]]
    k = min(digits, len(GAMMA_DIGITS))
    res.checks["matches_reference_digits"] = text[2:2 + k] == GAMMA_DIGITS[:k]
    res.checks["stable_across_depth"] = abs(float(value - deeper)) <= 1e-10
    return res


def _gamma_depth(precision: float) -> int:
    x, k = 0.25, 0
    while x >= precision**2:
        x *= x
        k += 1
    return k


def cmd_oracle(args, cache: ResultCache) -> Result:
    n = args.n
    if n > args.cap_oracle:
        raise CapExceeded("tanglegram enumeration", n, args.cap_oracle)
    lines = cache.get_or_compute(
        "oracle", n, lambda: "".join(f"{x}\n" for x in oracle.oracle_dump(n, args.cap_oracle)))
    res = Result("oracle", {}, ["tanglegram"], bare=not args.audit)
    res.rows = [[x] for x in lines.splitlines()]
    res.checks["count_equals_t_n"] = len(res.rows) == measures.t_n(n)
    if args.audit:
        audit = oracle.automorphism_audit(n, cap=args.cap_oracle)
        res.extra["fraction_induced_only"] = str(audit["fraction_induced_only"])
        if "triple_weight_total" in audit:
            res.checks["triple_weight_equals_t_n"] = audit["triple_weight_total"] == measures.t_n(n)
            res.checks["orbit_stabiliser"] = audit["orbit_stabiliser_ok"]
    return res


def cmd_series(args, cache: ResultCache) -> Result:
    b = args.tree
    table = stats.occurrence_series(b, args.order, cap=args.cap_series)
    mu, var = (stats.subtree_occurrence_params(b) if b.size >= 2 else (None, None))
    res = Result("series", {}, ["n", "y_n(1)", "mean", "variance", "mean_over_n",
                                "variance_over_n"])
    derived = stats.occurrence_moments_by_derivatives(b, args.order)
    ok_cat = ok_der = True
    for n in range(1, args.order + 1):
        mean, variance = table.moments(n)
        ok_cat &= table.u1_slice()[n] == catalan(n)
        ok_der &= derived[n - 1] == (mean, variance)
        res.rows.append([n, table.u1_slice()[n], mean, variance, float(mean) / n,
                         float(variance) / n])
    res.checks["u1_slice_is_catalan"] = bool(ok_cat)
    res.checks["derivative_moments_agree"] = bool(ok_der)
    if mu is not None:
        res.extra.update({"mu_B": str(mu), "sigma2_B": str(var)})
    return res


COMMANDS = {"count": cmd_count, "spectrum": cmd_spectrum, "tvd": cmd_tvd,
            "sample": cmd_sample, "stats": cmd_stats, "gamma": cmd_gamma,
            "oracle": cmd_oracle, "series": cmd_series}


# ---------------------------------------------------------------- parser

def _global_options(parser: argparse.ArgumentParser, suppress: bool):
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    parser.add_argument("--seed", type=int, default=d(None), help="u64 seed")
    parser.add_argument("--cache-dir", default=d(None),
                        help="result cache directory (default: $TANGLEKIT_CACHE)")
    parser.add_argument("--format", choices=("json", "csv", "text"), default=d("text"))
    parser.add_argument("--threads", type=int, default=d(1))
    parser.add_argument("--cap-exact", type=int, default=d(EXACT_CAP))
    parser.add_argument("--cap-oracle", type=int, default=d(oracle.TANGLEGRAM_CAP))
    parser.add_argument("--cap-series", type=int, default=d(stats.SERIES_CAP))
    parser.add_argument("--cap-spectrum", type=int, default=d(SPECTRUM_CAP))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tanglekit",
                                     description="Exact counting, sampling and shape "
                                                 "statistics of random tanglegrams.")
    _global_options(parser, suppress=False)
    common = argparse.ArgumentParser(add_help=False)
    _global_options(common, suppress=True)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("count", parents=[common], help="tanglegram counts t_n and r_n")
    p.add_argument("n", type=parse_range)
    p.add_argument("--verify", action="store_true",
                   help="cross-check the closed form with the part-size recursion")

    p = sub.add_parser("spectrum", parents=[common], help="automorphism cycle spectra")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("tree", nargs="?", type=_tree_arg)
    g.add_argument("--n", type=int)
    p.add_argument("--verify", action="store_true", help="compare with brute force")

    p = sub.add_parser("tvd", parents=[common], help="exact total variation d(nu_T, nu_P)")
    p.add_argument("n", type=parse_range)

    p = sub.add_parser("sample", parents=[common], help="random tanglegrams")
    p.add_argument("n", type=int)
    p.add_argument("count", type=int)
    p.add_argument("--mode", choices=("exact", "approximate"), default="exact")
    p.add_argument("--table", action="store_true",
                   help="frequency table over all tanglegrams (small n)")

    p = sub.add_parser("stats", parents=[common], help="limit-law checks")
    p.add_argument("statistic", choices=("matched-cherries", "cherries", "height",
                                         "generators"))
    p.add_argument("n", type=int)
    p.add_argument("count", type=int)
    p.add_argument("--mode", choices=("exact", "approximate"), default="exact")

    p = sub.add_parser("gamma", parents=[common], help="the generator constant")
    p.add_argument("--precision", type=float, default=1e-12)
    p.add_argument("--digits", type=int, default=10)

    p = sub.add_parser("oracle", parents=[common], help="brute-force tanglegram list")
    p.add_argument("n", type=int)
    p.add_argument("--audit", action="store_true")

    p = sub.add_parser("series", parents=[common], help="fringe-subtree series")
    p.add_argument("tree", type=_tree_arg)
    p.add_argument("--order", type=int, default=20)
    return parser


def _config(args) -> dict:
    cfg = {}
    for k, v in sorted(vars(args).items()):
        if k == "cache_dir":
            continue  # where results are cached does not change them
        if hasattr(v, "left"):
            v = serialize_tree(v)
        cfg[k] = v
    return cfg


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    cache = ResultCache(args.cache_dir if args.cache_dir is not None else default_cache_dir())
    try:
        result = COMMANDS[args.command](args, cache)
    except TanglekitError as exc:
        print(f"tanglekit: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    result.config = _config(args)
    sys.stdout.write(result.render(args.format))
    return EXIT_OK if result.passed else EXIT_CHECK_FAILED

