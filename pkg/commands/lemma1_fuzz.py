"""Fuzz the profile moment inequality over sampled admissible profiles"""
import logging
from pathlib import Path

import settings
from cli_harness import EXIT_PASS, EXIT_VIOLATION
from lemma_engine import fuzz_lemma1

DEFAULTS = settings.LEMMA1_DEFAULTS

logger = logging.getLogger(__name__)


def add_arguments(parser):
    parser.add_argument("--seeds", type=int, default=DEFAULTS["seeds"])
    parser.add_argument("--l-max", type=int, default=DEFAULTS["l_max"])
    parser.add_argument("--b-grid", type=float, nargs="+", default=DEFAULTS["b_grid"], help="values of b >= 1")
    parser.add_argument("--eta", type=float, default=DEFAULTS["eta"])
    parser.add_argument("--psi0", type=float, default=DEFAULTS["psi0"])
    parser.add_argument("--support", type=float, default=DEFAULTS["support"])
    parser.add_argument("--pieces", type=int, default=DEFAULTS["pieces"])
    parser.add_argument("--first-seed", type=int, default=0)
    parser.add_argument("--report", help="write the per-(b, l) summary to this CSV file")


def run(args):
    summary = fuzz_lemma1(
        seeds=args.seeds,
        b_grid=args.b_grid,
        l_max=args.l_max,
        eta=args.eta,
        psi0=args.psi0,
        support=args.support,
        pieces=args.pieces,
        first_seed=args.first_seed,
    )
    print(summary.to_string(index=False))
    if args.report:
        report = Path(args.report)
        report.parent.mkdir(parents=True, exist_ok=True)
        summary.to_csv(report, index=False)
        logger.info(f"wrote {report}")
    violations = int(summary["violations"].sum())
    print(f"\n{int(summary['samples'].sum())} checks, {violations} violations")
    return EXIT_PASS if violations == 0 else EXIT_VIOLATION
