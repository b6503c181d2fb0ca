"""Command-line front end.

Subcommands:

* ``simulate``     run a study config file, write the cell CSV/JSONL
* ``estimate``     eta sample paths with confidence bands from a data CSV
* ``second-order`` standalone (tau, beta) estimation from a data CSV
* ``oracle``       brute-force identity checks on small random inputs

Exit codes: 0 ok, 2 usage, 3 data problem, 4 numeric-domain problem.
"""
from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from .bias import SecondOrderParams, SecondOrderSource, default_k0, \
    estimate_second_order, reduced_bias_eta
from .copulas import replicate_generator
from .errors import DataError, NumericDomainError, ResidualDepError
from .estimators import EstimatorSpec, Margin, confidence_interval, eta_hat, m_ab
from .ingest import IngestionSpec, ingest
from .pseudo import BivariateSample, PseudoSample, TiePolicy, joint_exceedance_count
from .simulate import KstarRule, load_config, run_study, write_report

EXIT_OK = 0
EXIT_DATA = 3
EXIT_NUMERIC = 4


def _add_ingestion_flags(parser):
    parser.add_argument("--data", required=True, help="input CSV of paired observations")
    parser.add_argument("--x", required=True, help="column name of the first margin")
    parser.add_argument("--y", required=True, help="column name of the second margin")
    parser.add_argument("--date-col", default=None, help="optional ISO date column")
    parser.add_argument("--month", type=int, default=None,
                        help="keep only rows whose date falls in this month (1-12)")
    parser.add_argument("--date-from", default=None, help="earliest ISO date to keep")
    parser.add_argument("--date-to", default=None, help="latest ISO date to keep")
    parser.add_argument("--dry", type=float, default=1.0,
                        help="drop rows with either value below this (default 1.0)")
    parser.add_argument("--quantile", type=float, default=0.90,
                        help="marginal empirical quantile filter (default 0.90)")
    parser.add_argument("--either", action="store_true",
                        help="retain rows where either margin exceeds its quantile "
                             "(default: both must exceed)")
    parser.add_argument("--na", default=None,
                        help="comma-separated NA tokens overriding the default set")
    parser.add_argument("--ties", default="first_occurrence",
                        choices=[p.value for p in TiePolicy], help="tie policy for ranks")


def _ingest_from_args(args) -> tuple[BivariateSample, PseudoSample]:
    kwargs = {}
    if args.na is not None:
        kwargs["na_tokens"] = tuple(args.na.split(","))
    spec = IngestionSpec(
        path=args.data, x_col=args.x, y_col=args.y, date_col=args.date_col,
        dry_threshold=args.dry, quantile_filter=args.quantile, month=args.month,
        either=args.either, tie_policy=TiePolicy(args.ties), **kwargs,
    )
    sample = ingest(spec)
    return sample, PseudoSample.from_sample(sample, spec.tie_policy)


def _out_stream(path):
    if path in (None, "-"):
        return sys.stdout, False
    return open(path, "w", encoding="utf-8", newline=""), True


def cmd_simulate(args) -> int:
    config = load_config(args.config, master_seed=args.seed)
    report = run_study(config, workers=args.workers)
    write_report(report, args.out, args.format)
    for cell in report.flagged:
        print(f"warning: cell ({cell.estimator}, {cell.margin}, q={cell.q}, k={cell.k}) "
              f"had {cell.n_fail}/{cell.n_fail + cell.n_ok} failures", file=sys.stderr)
    return EXIT_OK


def _fmt(x) -> str:
    return "" if x is None or (isinstance(x, float) and math.isnan(x)) else repr(float(x))


def cmd_estimate(args) -> int:
    if not 0.0 < args.level < 1.0:
        raise NumericDomainError(f"--level must lie in (0, 1), got {args.level}")
    sample, pseudo = _ingest_from_args(args)
    n = sample.n
    q_list = [float(tok) for tok in args.q.split(",")]
    if 1.0 not in q_list:
        q_list.append(1.0)  # Hill reference path is always reported
    k_max = min(max(1, int(n * args.k_max)), n - 1)
    ks = list(range(1, k_max + 1))
    margin = Margin(args.margin)

    so = None
    if args.reduce_bias:
        so = _second_order_from_args(args, pseudo)
    kstar_rule = KstarRule.parse(args.kstar)

    stream, close = _out_stream(args.out)
    try:
        print("q,k,k_over_n,eta,ci_low,ci_high,margin,reduced", file=stream)
        for q in sorted(q_list):
            spec = EstimatorSpec.conjugate(q, margin=margin)
            for k in ks:
                eta = eta_hat(pseudo, k, spec)
                try:
                    low, high = confidence_interval(eta, k, spec.a, args.level)
                    ci = f"{_fmt(low)},{_fmt(high)}"
                except (NumericDomainError, ValueError):
                    ci = ","
                print(f"{q:g},{k},{k / n:g},{_fmt(eta)},{ci},{margin.value},false",
                      file=stream)
        if args.reduce_bias:
            for q in sorted(q_list):
                a = EstimatorSpec.conjugate(q).a
                for k in ks:
                    kstar = kstar_rule.resolve(n, k)
                    try:
                        est = reduced_bias_eta(pseudo, k, kstar, a, so, args.level)
                    except (ResidualDepError, ValueError):
                        continue
                    ci = f"{_fmt(est.ci_low)},{_fmt(est.ci_high)}"
                    print(f"{q:g},{k},{k / n:g},{_fmt(est.eta)},{ci},"
                          f"{Margin.FRECHET_SHIFTED.value},true", file=stream)
    finally:
        if close:
            stream.close()
    return EXIT_OK


def _second_order_from_args(args, pseudo) -> SecondOrderParams:
    if (args.tau is None) != (args.beta is None):
        raise NumericDomainError("--tau and --beta must be given together")
    if args.tau is not None:
        return SecondOrderParams(tau_hat=args.tau, beta_hat=args.beta, k0=0,
                                 source=SecondOrderSource.USER_SUPPLIED)
    return estimate_second_order(pseudo, args.k0)


def cmd_second_order(args) -> int:
    sample, pseudo = _ingest_from_args(args)
    so = estimate_second_order(pseudo, args.k0)
    stream, close = _out_stream(args.out)
    try:
        print("tau_hat,beta_hat,k0,n", file=stream)
        print(f"{_fmt(so.tau_hat)},{_fmt(so.beta_hat)},{so.k0},{sample.n}", file=stream)
    finally:
        if close:
            stream.close()
    return EXIT_OK


def _naive_m_ab(tail, k, a, b) -> float:
    # deliberate straight-line re-implementation used as the oracle
    thr = tail[0]
    total = 0.0
    for z in tail[1:]:
        ratio = z / thr
        total += math.log(ratio) if a == 0.0 else ratio ** a
    mean = total / k
    log_a = mean if a == 0.0 else math.log(mean) / a
    if b == 0.0:
        return log_a
    return (math.exp(b * log_a) - 1.0) / b


def cmd_oracle(args) -> int:
    n = args.n
    if not 2 <= n <= 1000:
        raise NumericDomainError(f"oracle needs 2 <= n <= 1000 (O(n^2) recount), got {n}")
    rng = replicate_generator(args.seed)
    sample = BivariateSample(rng.random(n), rng.random(n))
    pseudo = PseudoSample.from_sample(sample)

    failures = 0
    for m in range(1, n + 1):
        brute = joint_exceedance_count(sample, m, 1.0)
        via_t = int(np.count_nonzero(pseudo.t_sorted >= (n + 1) / m))
        if brute != via_t:
            print(f"FAIL joint-exceedance identity at m={m}: {brute} != {via_t}")
            failures += 1
    if not failures:
        print(f"ok joint-exceedance identity (all m in 1..{n})")

    grid = [(0.0, 0.0), (0.5, -0.5), (-0.5, 0.5), (1.0, -1.0), (-2.0, 2.0), (0.25, 0.75)]
    worst = 0.0
    for k in sorted({2, n // 4, n // 2, n - 1} - {0, 1}):
        tail = pseudo.t_sorted[n - k - 1:]
        for a, b in grid:
            worst = max(worst, abs(m_ab(tail, k, a, b) - _naive_m_ab(tail, k, a, b)))
    if worst <= 1e-12:
        print(f"ok power-mean kernel vs naive loop (max |diff| = {worst:.3e})")
    else:
        print(f"FAIL power-mean kernel vs naive loop: max |diff| = {worst:.3e}")
        failures += 1
    return EXIT_OK if failures == 0 else EXIT_NUMERIC


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="residualdep",
        description="Residual dependence index estimation for bivariate extremes.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run a Monte Carlo study from a config file")
    p.add_argument("--config", required=True, help="JSON study config")
    p.add_argument("--out", required=True, help="output path for the cell table")
    p.add_argument("--seed", type=int, default=None, help="override the config master seed")
    p.add_argument("--workers", type=int, default=1, help="worker processes (default 1)")
    p.add_argument("--format", default="csv", choices=["csv", "jsonl"])
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("estimate", help="eta sample paths with CIs from a data CSV")
    _add_ingestion_flags(p)
    p.add_argument("--q", default="0.5,1,1.5", help="comma-separated q values")
    p.add_argument("--k-max", type=float, default=0.3, dest="k_max",
                   help="largest top fraction k/n (default 0.3)")
    p.add_argument("--margin", default=Margin.FRECHET_SHIFTED.value,
                   choices=[m.value for m in Margin])
    p.add_argument("--reduce-bias", action="store_true", dest="reduce_bias")
    p.add_argument("--kstar", default="pow0.3", help="k* rule: powP, sqrtk, or an integer")
    p.add_argument("--tau", type=float, default=None, help="user-supplied tau")
    p.add_argument("--beta", type=float, default=None, help="user-supplied beta")
    p.add_argument("--k0", type=int, default=None,
                   help="threshold for second-order estimation (default [n^0.999])")
    p.add_argument("--level", type=float, default=0.95, help="CI level (default 0.95)")
    p.add_argument("--out", default=None, help="output CSV (default stdout)")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("second-order", help="standalone tau/beta estimation")
    _add_ingestion_flags(p)
    p.add_argument("--k0", type=int, default=None,
                   help="threshold for second-order estimation (default [n^0.999])")
    p.add_argument("--out", default=None, help="output CSV (default stdout)")
    p.set_defaults(func=cmd_second_order)

    p = sub.add_parser("oracle", help="exact identity checks on a random sample")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.set_defaults(func=cmd_oracle)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (ResidualDepError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
