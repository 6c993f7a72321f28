"""Command-line front end: enumeration reports, sampling runs, LLN curves,
moment tables, edge solving, and the verification suite.

Every emitted document embeds the tool version, a hash of the resolved
configuration, and the seed, and is byte-reproducible for fixed inputs.
Exit codes: 0 ok, 1 verification failure, 2 usage error, 3 numeric/solver error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys

from . import __version__, catalan, edge, freeprob, ldp, sampling, verification
from .errors import (
    EnumerationCapError,
    PrecisionError,
    SamplingBudgetError,
    SolverError,
    ValidationError,
)

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2
EXIT_NUMERIC = 3


class UsageError(Exception):
    pass


def _config_hash(payload: dict) -> str:
    canon = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()[:16]


def _meta(command: str, args: dict, seed: int | None) -> dict:
    return {
        "version": __version__,
        "config_hash": _config_hash({"command": command, **args}),
        "seed": seed,
    }


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dump_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


def _dump_csv(meta: dict, header: list[str], rows: list[list]) -> str:
    lines = [f"# {k}={v}" for k, v in sorted(meta.items())]
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(str(x) for x in row))
    return "\n".join(lines) + "\n"


def _load_spec(path: str) -> freeprob.CumulantSpec:
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read spec file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"spec file is not valid JSON: {exc}") from exc
    try:
        return freeprob.spec_from_json(obj)
    except (KeyError, ValueError, TypeError) as exc:
        raise UsageError(f"bad cumulant spec: {exc}") from exc


# -- subcommands -------------------------------------------------------------


def cmd_enumerate(args) -> int:
    n = args.n
    if n < 1:
        raise UsageError("enumerate needs --n >= 1")
    if n > args.cap:
        raise UsageError(f"--n {n} exceeds the enumeration cap {args.cap}")
    meta = _meta("enumerate", {"n": n, "cap": args.cap, "format": args.format}, seed=None)
    narayana_row = [catalan.narayana(n, k) for k in range(1, n + 1)]
    blocks = catalan.expected_block_count(n)
    singles = catalan.expected_singleton_count(n)
    payload = {
        "meta": meta,
        "n": n,
        "catalan": catalan.catalan_number(n),
        "narayana": narayana_row,
        "mean_blocks": str(blocks),
        "mean_blocks_float": float(blocks),
        "mean_singletons": str(singles),
        "mean_singletons_float": float(singles),
    }
    if args.format == "json":
        _emit(_dump_json(payload), args.out)
    else:
        rows = [[n, payload["catalan"], " ".join(map(str, narayana_row)), blocks, singles]]
        _emit(_dump_csv(meta, ["n", "catalan", "narayana", "mean_blocks", "mean_singletons"], rows), args.out)
    return EXIT_OK


def cmd_sample(args) -> int:
    if args.n < 1:
        raise UsageError("sample needs --n >= 1")
    if args.samples < 1:
        raise UsageError("sample needs --samples >= 1")
    meta = _meta(
        "sample",
        {"n": args.n, "samples": args.samples, "sampler": args.sampler},
        seed=args.seed,
    )
    lines = [_dump_json({"meta": meta}).rstrip("\n")]
    for i in range(args.samples):
        rng = sampling.stream_rng(args.seed, i)
        attempts = 0
        if args.sampler == "rejection":
            path, trace = sampling.sample_dyck_rejection(args.n, rng, max_attempts=args.budget)
            attempts = trace.attempts
        else:
            path = sampling.sample_dyck_cycle(args.n, rng)
        part = catalan.path_to_partition(path)
        stats = sampling.empirical_block_stats(path)
        record = {
            "seed": args.seed,
            "stream": i,
            "n": args.n,
            "sampler": args.sampler,
            "path": path.to_string(),
            "blocks": part.to_sorted_lists(),
            "lambda": {str(k): str(v) for k, v in stats.distribution.items()},
            "sigma": str(stats.mean_block_size),
            "tau": str(stats.block_density),
            "attempts": attempts,
        }
        lines.append(_dump_json(record).rstrip("\n"))
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_lln(args) -> int:
    try:
        ns = [int(x) for x in args.n_range.split(",") if x.strip()]
    except ValueError as exc:
        raise UsageError(f"bad --n-range: {exc}") from exc
    if not ns or any(n < 2 for n in ns):
        raise UsageError("--n-range needs comma-separated integers >= 2")
    reps = args.samples
    if reps < 1:
        raise UsageError("lln needs --samples >= 1")
    meta = _meta(
        "lln",
        {"n_range": ns, "samples": reps, "sampler": args.sampler},
        seed=args.seed,
    )
    geom = ldp.PmfOnN.geometric(truncation=128)
    rows = []
    warned = False
    for j, n in enumerate(ns):
        betas, sigmas, taus = [], [], []
        for r in range(reps):
            rng = sampling.stream_rng(args.seed, 10_000 * j + r)
            try:
                if args.sampler == "rejection":
                    path, _ = sampling.sample_dyck_rejection(n, rng, max_attempts=args.budget)
                else:
                    path = sampling.sample_dyck_cycle(n, rng)
            except SamplingBudgetError:
                warned = True
                continue
            stats = sampling.empirical_block_stats(path)
            betas.append(ldp.bounded_lipschitz_distance(stats.to_pmf(), geom))
            sigmas.append(float(stats.mean_block_size))
            taus.append(float(stats.block_density))
        if betas:
            rows.append(
                {
                    "n": n,
                    "runs": len(betas),
                    "mean_beta": sum(betas) / len(betas),
                    "mean_sigma": sum(sigmas) / len(sigmas),
                    "mean_tau": sum(taus) / len(taus),
                }
            )
    if warned:
        print("warning: some rejection runs exhausted the attempt budget; partial output", file=sys.stderr)
    if args.format == "json":
        _emit(_dump_json({"meta": meta, "rows": rows}), args.out)
    else:
        table = [[r["n"], r["runs"], r["mean_beta"], r["mean_sigma"], r["mean_tau"]] for r in rows]
        _emit(_dump_csv(meta, ["n", "runs", "mean_beta", "mean_sigma", "mean_tau"], table), args.out)
    return EXIT_OK


def cmd_moments(args) -> int:
    spec = _load_spec(args.spec)
    if args.n_max < 1:
        raise UsageError("moments needs --n-max >= 1")
    meta = _meta(
        "moments",
        {"spec": spec.to_json(), "n_max": args.n_max, "precision": args.precision},
        seed=None,
    )
    if args.precision == "high":
        from . import highprec

        rows = highprec.moments_high(spec, args.n_max)
    else:
        moments = freeprob.moments_from_cumulants(spec, args.n_max)
        rows = []
        for n, m in enumerate(moments):
            m = float(m)
            rows.append(
                {
                    "n": n,
                    "moment": m,
                    "log_moment_over_n": math.log(m) / n if n > 0 and m > 0 else None,
                }
            )
    if args.format == "json":
        _emit(_dump_json({"meta": meta, "rows": rows}), args.out)
    else:
        table = [[r["n"], r["moment"], r["log_moment_over_n"]] for r in rows]
        _emit(_dump_csv(meta, ["n", "moment", "log_moment_over_n"], table), args.out)
    return EXIT_OK


def cmd_edge(args) -> int:
    spec = _load_spec(args.spec)
    meta = _meta(
        "edge",
        {"spec": spec.to_json(), "trace": args.trace, "precision": args.precision},
        seed=None,
    )
    result = edge.solve_edge(spec, keep_trace=args.trace)
    payload = {
        "meta": meta,
        "log_rho": result.log_rho,
        "rho": result.rho,
        "theta_star": result.theta_star,
        "m_star": result.m_star,
        "p_star": {str(k): v for k, v in result.p_star.items()},
        "objective_residual": result.objective_residual,
        "truncation_tail_bound": result.truncation_tail_bound,
        "gradient_norm": result.gradient_norm,
        "iterations": result.iterations,
    }
    if args.trace:
        payload["scan"] = [[t, v] for t, v in result.scan]
    if args.precision == "high":
        from . import highprec

        payload["high_precision"] = highprec.edge_high(spec)
    _emit(_dump_json(payload), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    names = [x.strip() for x in args.filter.split(",")] if args.filter else None
    log = (lambda line: print(line, file=sys.stderr)) if not args.quiet else None
    try:
        results = verification.run_criteria(args.seed, names, log=log)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    meta = _meta("verify", {"filter": names}, seed=args.seed)
    report = verification.build_report(results, args.seed, meta["config_hash"])
    if args.json:
        _emit(_dump_json(report), args.out)
    else:
        lines = [f"# version={report['version']} config_hash={report['config_hash']} seed={args.seed}"]
        for c in report["criteria"]:
            lines.append(f"[{'PASS' if c['passed'] else 'FAIL'}] criterion {c['id']}: {c['name']}")
            for d in c["details"]:
                lines.append(f"    {d}")
        lines.append(f"overall: {'PASS' if report['passed'] else 'FAIL'}")
        _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK if report["passed"] else EXIT_VERIFY_FAILED


# -- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ncfree",
        description="Uniform non-crossing partitions, rate functions, and the free-cumulant support edge.",
    )
    parser.add_argument("--version", action="version", version=f"ncfree {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, seed=False, fmt=True):
        if fmt:
            p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--out", metavar="FILE", default=None, help="write output to FILE instead of stdout")
        if seed:
            p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("enumerate", help="exact counts and averages for semilength n")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--cap", type=int, default=catalan.DEFAULT_ENUMERATION_CAP)
    add_common(p)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("sample", help="draw uniform Dyck paths / non-crossing partitions (JSON lines)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--samples", type=int, default=1)
    p.add_argument("--sampler", choices=("cycle", "rejection"), default="cycle")
    p.add_argument("--budget", type=int, default=sampling.DEFAULT_ATTEMPT_BUDGET)
    add_common(p, seed=True, fmt=False)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("lln", help="averaged distance-to-geometric curves over an n range")
    p.add_argument("--n-range", default="100,1000,10000")
    p.add_argument("--samples", type=int, default=50, help="repetitions per n")
    p.add_argument("--sampler", choices=("cycle", "rejection"), default="cycle")
    p.add_argument("--budget", type=int, default=sampling.DEFAULT_ATTEMPT_BUDGET)
    add_common(p, seed=True)
    p.set_defaults(func=cmd_lln)

    p = sub.add_parser("moments", help="moment table of a cumulant spec")
    p.add_argument("--spec", required=True, metavar="FILE")
    p.add_argument("--n-max", type=int, default=20)
    p.add_argument("--precision", choices=("f64", "high"), default="f64")
    add_common(p)
    p.set_defaults(func=cmd_moments)

    p = sub.add_parser("edge", help="solve for the maximum of the support")
    p.add_argument("--spec", required=True, metavar="FILE")
    p.add_argument("--trace", action="store_true", help="include the (theta, objective) scan")
    p.add_argument("--precision", choices=("f64", "high"), default="f64")
    add_common(p, fmt=False)
    p.set_defaults(func=cmd_edge)

    p = sub.add_parser("verify", help="run the acceptance criteria")
    p.add_argument("--filter", default=None, help="comma-separated criterion names")
    p.add_argument("--json", action="store_true", help="machine-readable report")
    p.add_argument("--quiet", action="store_true", help="suppress progress on stderr")
    add_common(p, seed=True, fmt=False)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValidationError, EnumerationCapError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SolverError, PrecisionError, SamplingBudgetError, ValueError, OverflowError) as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
