"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 data or configuration error,
4 problem larger than the solver's size cap.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .bb import DEFAULT_MAX_OBJECTS, bb_solve
from .heuristics import THREADS_ENV, default_threads, fast, quick_solution_set
from .io import (
    DatasetError,
    RunReport,
    atomic_write_text,
    digest_bytes,
    dump_json,
    format_dataset,
    parse_dataset_text,
)
from .ranking import (
    MAX_ENUMERATE,
    Ranking,
    SizeLimitError,
    approx_weak_order_count,
    combined_input,
    default_labels,
    enumerate_weak_orders,
    kemeny_distance,
    kendall_tau,
    spearman_rho,
    tau_x,
)
from .simulate import ExperimentConfig, ModelSpec, Space, run_experiment, sample, sample_incomplete

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_SIZE = 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _emit(text: str, output: Optional[str]) -> None:
    if output:
        atomic_write_text(output, text)
    else:
        sys.stdout.write(text)


def _threads(args) -> int:
    return args.threads if args.threads is not None else default_threads()


def cmd_consensus(args) -> int:
    raw = Path(args.input).read_bytes()
    data = parse_dataset_text(raw.decode("utf-8"))
    ci = combined_input(data)
    if args.algorithm == "bb":
        sol = bb_solve(ci, fidelity_init=args.fidelity_init, max_objects=args.max_objects)
    elif args.algorithm == "quick":
        sol = quick_solution_set(ci)
    else:
        sol = fast(ci, args.maxiter, args.seed, threads=_threads(args))
    report = RunReport.from_solution_set(sol, ci, digest_bytes(raw), timing=not args.omit_timing)
    _emit(report.to_json(), args.output)
    if args.output:
        print(f"{len(sol)} solution(s), avg tau_x {sol.avg_tau_x:.6f}")
        for s in sol.solutions:
            print("  " + s.to_ordering())
    return EXIT_OK


def _inline_ranking(text: str, labels: Sequence[str]) -> Ranking:
    toks = text.replace(",", " ").split()
    if len(toks) != len(labels):
        raise DatasetError(f"ranking {text!r} has {len(toks)} entries for {len(labels)} labels")
    ranks = []
    for tok in toks:
        if tok == "-":
            ranks.append(None)
            continue
        try:
            ranks.append(int(tok))
        except ValueError:
            raise DatasetError(f"rank {tok!r} is not an integer") from None
    return Ranking(tuple(labels), tuple(ranks))


def cmd_metrics(args) -> int:
    if args.file:
        data = parse_dataset_text(Path(args.file).read_text(encoding="utf-8"))
        if data.n != 2:
            raise DatasetError(f"{args.file}: expected exactly 2 rankings, found {data.n}")
        r1, r2 = (r for r, _ in data.rows)
    else:
        if not (args.r1 and args.r2):
            raise UsageError("give --r1 and --r2, or --file")
        l1 = args.labels1 or args.labels
        l2 = args.labels2 or args.labels
        n1 = len(args.r1.replace(",", " ").split())
        n2 = len(args.r2.replace(",", " ").split())
        r1 = _inline_ranking(args.r1, l1.split() if l1 else default_labels(n1))
        r2 = _inline_ranking(args.r2, l2.split() if l2 else default_labels(n2))
        if set(r1.labels) != set(r2.labels):
            raise DatasetError("the two rankings are over different objects")
    print(f"kemeny={kemeny_distance(r1, r2)}")
    for name, fn in (("tau_x", tau_x), ("kendall", kendall_tau), ("spearman", spearman_rho)):
        try:
            print(f"{name}={fn(r1, r2):.12g}")
        except ValueError as exc:
            print(f"{name}=undefined ({exc})")
    return EXIT_OK


def cmd_simulate(args) -> int:
    if args.pick is not None:
        data = sample_incomplete(args.m, args.pick, args.seed)
    else:
        labels = default_labels(args.m)
        cons = tuple(int(x) for x in args.consensus.split()) if args.consensus else tuple(range(1, args.m + 1))
        spec = ModelSpec(Ranking(labels, cons), args.theta, Space(args.space))
        data = sample(spec, args.n, args.seed)
    _emit(format_dataset(data), args.output)
    return EXIT_OK


def _config_from_args(args) -> ExperimentConfig:
    if args.config:
        cfg = ExperimentConfig.from_file(args.config)
    else:
        if args.m is None:
            raise UsageError("bench needs --config or --m")
        kw = {"m": args.m, "space": args.space}
        if args.k is not None:
            kw["k"] = args.k
        if args.thetas:
            kw["thetas"] = tuple(float(x) for x in args.thetas.replace(",", " ").split())
        if args.algorithms:
            kw["algorithms"] = tuple(args.algorithms.replace(",", " ").split())
        for key in ("n", "replications", "seed", "maxiter"):
            if getattr(args, key) is not None:
                kw[key] = getattr(args, key)
        cfg = ExperimentConfig(**kw)
    cfg.threads = _threads(args)
    return cfg


def cmd_bench(args) -> int:
    try:
        cfg = _config_from_args(args)
    except SizeLimitError:
        raise
    except (ValueError, OSError, KeyError) as exc:
        raise DatasetError(f"config: {exc}") from None
    report = run_experiment(cfg, timing=not args.omit_timing)
    _emit(dump_json(report), args.output)
    if args.output:
        for level, algs in report["summary"].items():
            for alg, stats in algs.items():
                sols = stats["solutions"]
                ov = stats["overlap_with_bb"]
                t = stats["elapsed_ms"]
                line = f"theta={level} {alg:5s} solutions mean={sols['mean']:.2f}"
                if ov is not None:
                    line += f" overlap mean={ov['mean']:.2f}"
                if t is not None:
                    line += f" time mean={t['mean']:.2f}ms"
                print(line)
    return EXIT_OK


def cmd_enumerate(args) -> int:
    if not 1 <= args.m <= MAX_ENUMERATE:
        raise SizeLimitError(f"enumeration is limited to m <= {MAX_ENUMERATE}")
    orders = enumerate_weak_orders(args.m)
    if args.count:
        print(f"count={len(orders)} approx={approx_weak_order_count(args.m):.6g}")
        return EXIT_OK
    lines = [" ".join(str(v) for v in r.ranks) for r in orders]
    _emit("\n".join(lines) + "\n", args.output)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="kemedian", description=__doc__.splitlines()[0] if __doc__ else None)
    p.add_argument("--version", action="version", version=f"kemedian {__version__}")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def threads_flag(sp):
        sp.add_argument("--threads", type=int, default=None, help=f"worker threads (default ${THREADS_ENV} or 1)")

    c = sub.add_parser("consensus", help="median ranking of a dataset file")
    c.add_argument("--input", required=True)
    c.add_argument("--algorithm", choices=("bb", "quick", "fast"), required=True)
    c.add_argument("--maxiter", type=int, default=100)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--fidelity-init", action="store_true", help="start BB from the Q ranking instead of QUICK")
    c.add_argument("--max-objects", type=int, default=DEFAULT_MAX_OBJECTS)
    c.add_argument("--output")
    c.add_argument("--omit-timing", action="store_true", help="write elapsed_ms as null")
    threads_flag(c)
    c.set_defaults(func=cmd_consensus)

    mt = sub.add_parser("metrics", help="distances and correlations of two rankings")
    mt.add_argument("--r1")
    mt.add_argument("--r2")
    mt.add_argument("--labels", help="space-separated labels shared by both rankings")
    mt.add_argument("--labels1")
    mt.add_argument("--labels2")
    mt.add_argument("--file", help="dataset file with exactly two rows")
    mt.set_defaults(func=cmd_metrics)

    s = sub.add_parser("simulate", help="sample a synthetic dataset")
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--theta", type=float, default=0.0)
    s.add_argument("--n", type=int, default=200)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--space", choices=("full", "weak"), default="full")
    s.add_argument("--consensus", help="ranks of the consensus, e.g. '1 2 3'")
    s.add_argument("--pick", type=int, help="pick-k-of-m incomplete scheme with normal weights")
    s.add_argument("--output")
    s.set_defaults(func=cmd_simulate)

    b = sub.add_parser("bench", help="compare BB, QUICK and FAST on simulated data")
    b.add_argument("--config")
    b.add_argument("--m", type=int)
    b.add_argument("--space", choices=("full", "weak", "pick"), default="full")
    b.add_argument("--k", type=int)
    b.add_argument("--thetas")
    b.add_argument("--n", type=int)
    b.add_argument("--replications", type=int)
    b.add_argument("--algorithms")
    b.add_argument("--seed", type=int)
    b.add_argument("--maxiter", type=int)
    b.add_argument("--output")
    b.add_argument("--omit-timing", action="store_true")
    threads_flag(b)
    b.set_defaults(func=cmd_bench)

    e = sub.add_parser("enumerate", help="list every weak order of m objects")
    e.add_argument("--m", type=int, required=True)
    e.add_argument("--count", action="store_true")
    e.add_argument("--output")
    e.set_defaults(func=cmd_enumerate)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not getattr(args, "func", None):
        parser.print_help(sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"kemedian: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SizeLimitError as exc:
        print(f"kemedian: {exc}", file=sys.stderr)
        return EXIT_SIZE
    except (DatasetError, ValueError, OSError) as exc:
        print(f"kemedian: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
