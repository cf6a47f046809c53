"""Command-line entry point: ``overlap-backbone {extract,compare,export-dot}``."""

from __future__ import annotations

import argparse
import logging
import sys
from typing import List, Optional

from .backbone import METHODS, PRUNE_POLICIES, SKIP_BRIDGES
from .community import CommunityError
from .graph import GraphError
from .harness import AllRunsFailed, RunConfig, cmd_compare, cmd_export_dot, cmd_extract, format_table, report_json

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_ALL_FAILED = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _run_args(p: argparse.ArgumentParser, out_required: bool) -> None:
    p.add_argument("--input", required=True, help="edge list: 'src dst [weight]' per line")
    p.add_argument("--method", action="append", choices=METHODS,
                   help="backbone method; repeat for several (default: all)")
    p.add_argument("--s", type=float, default=0.3, help="backbone size as a fraction of N (default 0.3)")
    p.add_argument("--runs", type=int, default=10, help="number of SLPA runs (default 10)")
    p.add_argument("--seed", type=int, default=0, help="base seed; run i uses seed+i")
    p.add_argument("--slpa-iters", type=int, default=100, help="SLPA iterations T (default 100)")
    p.add_argument("--slpa-threshold", type=float, default=0.3, help="SLPA membership threshold r (default 0.3)")
    p.add_argument("--prune-policy", choices=PRUNE_POLICIES, default=SKIP_BRIDGES)
    p.add_argument("--alpha", type=float, default=None,
                   help="fixed disparity-filter alpha (disables tuning to the ego backbone size)")
    p.add_argument("--cover", default=None, help="precomputed cover JSON; skips community detection")
    p.add_argument("--jobs", type=int, default=1, help="parallel worker processes")
    p.add_argument("--out", required=out_required, default=None, help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="overlap-backbone", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    _run_args(sub.add_parser("extract", help="write backbone edge lists and provenance per run"), True)
    cmp_ = sub.add_parser("compare", help="compute the comparison report")
    _run_args(cmp_, False)
    cmp_.add_argument("--json", action="store_true", help="print the JSON report instead of the table")
    dot = sub.add_parser("export-dot", help="render a backbone edge list as Graphviz DOT")
    dot.add_argument("backbone", help="backbone edge list")
    dot.add_argument("--cover", default=None, help="cover JSON used for node colours")
    dot.add_argument("-o", "--output", default=None, help="write DOT here instead of stdout")
    return parser


def _config(args) -> RunConfig:
    return RunConfig(
        input=args.input,
        methods=tuple(args.method) if args.method else METHODS,
        s=args.s, runs=args.runs, seed=args.seed,
        slpa_iters=args.slpa_iters, slpa_threshold=args.slpa_threshold,
        prune_policy=args.prune_policy, alpha=args.alpha, out=args.out,
        cover=args.cover, jobs=args.jobs,
    )


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "export-dot":
            text = cmd_export_dot(args.backbone, args.cover)
            if args.output:
                with open(args.output, "w", encoding="utf-8") as fh:
                    fh.write(text)
            else:
                sys.stdout.write(text)
            return EXIT_OK
        config = _config(args)
        try:
            config.validate()
        except ValueError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_USAGE
        if args.command == "extract":
            results = cmd_extract(config)
            ok = sum(r.ok for r in results)
            print(f"{ok}/{len(results)} run(s) extracted into {config.out}")
            for r in results:
                if not r.ok:
                    print(f"run {r.run} (seed {r.seed}) failed: {r.error}", file=sys.stderr)
        else:
            report = cmd_compare(config)
            sys.stdout.write(report_json(report) if args.json else format_table(report))
        return EXIT_OK
    except AllRunsFailed as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ALL_FAILED
    except (OSError, GraphError, CommunityError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
