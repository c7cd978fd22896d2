"""ransomtrace command-line entry point.

Exit codes:
    0  success
    1  unexpected toolkit error
    2  configuration error (bad flags, settings or campaign file)
    3  a required earlier stage has not run
    4  provider unavailable
    5  data or storage error
"""
import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

# Add src to Python path
sys.path.insert(0, str(Path(__file__).parent))

from config import settings
from src import __version__
from src.cli import run
from src.core.errors import RansomTraceError
from src.core.logging import setup_logging


logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--campaign", required=True,
                        help="campaign file, or the name of a catalog entry under the campaign directory")
    common.add_argument("--store", help=f"ledger database file (default: {settings.store_path})")
    common.add_argument("--prices", help="daily price CSV with header date,low,avg,high (classify, report)")
    common.add_argument("--provider", choices=["http", "fixture"],
                        help=f"transaction data source (default: {settings.provider})")
    common.add_argument("--fixture-dir", help=f"fixture snapshot directory (default: {settings.fixture_dir})")
    common.add_argument("--out", help=f"artifact directory (default: {settings.out_dir})")
    common.add_argument("--debug", action="store_true", help="log at DEBUG level")

    parser = argparse.ArgumentParser(
        prog="ransomtrace",
        description="Trace ransom payments: expand seed addresses, ingest histories, classify, report.",
        epilog="Exit codes: 2 config error, 3 missing earlier stage, 4 provider unavailable, 5 data/storage error.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="<command>")

    expand = sub.add_parser("expand", parents=[common], help="grow the seed addresses into a cluster")
    expand.add_argument("--rounds", type=int, help="stop after this many rounds")
    expand.add_argument("--max-size", type=int, help="fail once the cluster exceeds this many addresses")
    expand.add_argument("--no-shadow", action="store_true", help="disable shadow (change) address detection")
    expand.add_argument("--max-inputs", type=int,
                        help="skip transactions with more distinct inputs than this (mixer guard)")

    ingest = sub.add_parser("ingest", parents=[common], help="store the cluster's transaction histories")
    ingest.add_argument("--rate-limit", type=float,
                        help=f"http requests per second (default: {settings.rate_limit})")
    ingest.add_argument("--retries", type=int, help=f"retries after a failed request (default: {settings.max_retries})")
    ingest.add_argument("--parallelism", type=int,
                        help=f"concurrent address fetches (default: {settings.parallelism})")
    ingest.add_argument("--page-size", type=int, help=f"transactions per page (default: {settings.page_size})")

    classify = sub.add_parser("classify", parents=[common], help="classify cluster payments as ransom or not")
    classify.add_argument("--fee-band-mode", choices=["fee_to_usd", "gross_band"],
                          help=f"fee handling for USD demands (default: {settings.fee_band_mode})")

    report = sub.add_parser("report", parents=[common], help="write summary, daily, per-address and CDF CSVs")
    report.add_argument("--dense", action="store_true", help="zero-fill days without ransoms in daily.csv")

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Run one subcommand and return its exit status."""
    args = build_parser().parse_args(argv)
    setup_logging("DEBUG" if args.debug else None)
    try:
        return run(args)
    except RansomTraceError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
