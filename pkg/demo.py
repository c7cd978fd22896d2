"""
ransomtrace - Interactive Demo

Walks the bundled demo snapshot through every stage, in process and offline:
1. Cluster expansion round by round, with and without shadow detection
2. Ingestion into an in-memory ledger store
3. Ransom classification, comparing the two fee band modes
4. Campaign report: summary, daily series, per-address CDF
"""
import sys
import tempfile
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

from src.classify import FeeBandMode, classify_cluster, load_campaign
from src.cluster import ExpansionConfig, ShadowDetection, expand
from src.core.errors import ClusterSizeExceeded
from src.core.logging import setup_logging
from src.core.model import btc_display, format_usd
from src.db import all_transactions, open_store
from src.ingest import FixtureProvider, ingest_cluster, load_price_series
from src.report import CdfMetric, cdf, daily_series, format_fraction, per_address, summarize, write_report


DEMO_DIR = Path(__file__).parent / "fixtures" / "demo"
COLORS = {
    'HEADER': '\033[95m',
    'BLUE': '\033[94m',
    'CYAN': '\033[96m',
    'GREEN': '\033[92m',
    'YELLOW': '\033[93m',
    'RED': '\033[91m',
    'END': '\033[0m',
    'BOLD': '\033[1m',
}


def print_banner():
    """Print a welcome banner."""
    print(f"""
{COLORS['CYAN']}{COLORS['BOLD']}
╔════════════════════════════════════════════════════════════════════╗
║                                                                    ║
║                 RANSOMTRACE - INTERACTIVE DEMO                     ║
║                                                                    ║
║  Follows ransom money on a four-address synthetic snapshot:        ║
║  • Multi-input and shadow address clustering                       ║
║  • Ledger store with payment events                                ║
║  • Ransom classification against a demand schedule                 ║
║  • Campaign reports with exact USD totals                          ║
║                                                                    ║
╚════════════════════════════════════════════════════════════════════╝
{COLORS['END']}""")


def print_section(title: str, color: str = 'BLUE'):
    """Print a formatted section header."""
    width = 70
    print(f"\n{COLORS[color]}{COLORS['BOLD']}")
    print("=" * width)
    print(f"  {title}")
    print("=" * width)
    print(COLORS['END'])


def print_success(message: str):
    print(f"{COLORS['GREEN']}✓ {message}{COLORS['END']}")


def print_info(message: str):
    print(f"{COLORS['CYAN']}ℹ {message}{COLORS['END']}")


def print_warning(message: str):
    print(f"{COLORS['YELLOW']}⚠ {message}{COLORS['END']}")


class DemoRun:
    """State shared by the demo steps."""

    def __init__(self):
        self.campaign = load_campaign(DEMO_DIR / "campaign.json")
        self.prices = load_price_series(DEMO_DIR / "prices.csv")
        self.provider = FixtureProvider(DEMO_DIR)
        self.store = open_store(":memory:")
        self.cluster = None
        self.result = None

    def close(self):
        self.store.close()


def demo_expansion(run: DemoRun):
    """Demo 1: Cluster expansion."""
    print_section("Demo 1: Cluster Expansion", 'HEADER')
    print_info(f"Seeds: {', '.join(run.campaign.seeds)}")

    for limit in (1, 2, None):
        cluster = expand(run.campaign.seeds, run.provider, ExpansionConfig(max_rounds=limit))
        label = f"after {limit} round(s)" if limit else "to fixed point"
        print(f"  {label:>18}: {len(cluster)} addresses")

    run.cluster = expand(run.campaign.seeds, run.provider, campaign=run.campaign.name)
    print(f"\n{COLORS['BOLD']}Members:{COLORS['END']}")
    for member in run.cluster.members:
        print(f"  round {member.discovery_round}  {member.provenance.value:<12} {member.address}")
    print_success(f"{len(run.cluster)} addresses in {run.cluster.rounds} rounds (the last round found nothing)")

    no_shadow = expand(run.campaign.seeds, run.provider, ExpansionConfig(shadow_detection=ShadowDetection.DISABLED))
    print_info(f"Without shadow detection: {len(no_shadow)} addresses")

    try:
        expand(run.campaign.seeds, run.provider, ExpansionConfig(max_cluster_size=2))
    except ClusterSizeExceeded as e:
        print_warning(f"max_cluster_size=2 stops early: {e} (partial cluster of {len(e.partial)})")


def demo_ingestion(run: DemoRun):
    """Demo 2: Ingestion."""
    print_section("Demo 2: Ingestion", 'HEADER')
    report = ingest_cluster(run.provider, run.store, run.cluster, parallelism=2)
    print_success(
        f"{report.addresses} addresses: {report.tx_seen} transactions seen, "
        f"{report.tx_new} stored, {report.payments_new} payment events"
    )
    again = ingest_cluster(run.provider, run.store, run.cluster)
    print_info(f"Second pass stores {again.tx_new} new transactions ({len(all_transactions(run.store))} in total)")


def demo_classification(run: DemoRun):
    """Demo 3: Ransom classification."""
    print_section("Demo 3: Ransom Classification", 'HEADER')
    run.result = classify_cluster(run.store, run.cluster, run.campaign, run.prices)

    print(f"{COLORS['BOLD']}Ransoms:{COLORS['END']}")
    for c in run.result.ransoms:
        print(f"  {c.payment.gmt_date}  {btc_display(c.payment.amount):>14} BTC  "
              f"{c.rule_label:<8} {c.matched_branch.value:<14} ${format_usd(c.usd_value_avg)}")
    print(f"\n{COLORS['BOLD']}Not ransom:{COLORS['END']}")
    for p in run.result.non_ransoms:
        print(f"  {p.gmt_date}  {btc_display(p.amount):>14} BTC")
    for u in run.result.unclassifiable:
        print_warning(f"{u.payment.gmt_date} {btc_display(u.payment.amount)} BTC unclassifiable: {u.reason.value}")

    gross = classify_cluster(run.store, run.cluster, run.campaign, run.prices, FeeBandMode.GROSS_BAND)
    print_info(f"fee_to_usd: {len(run.result.ransoms)} ransoms, gross_band: {len(gross.ransoms)} "
               f"(the demo schedule is BTC-only, so both agree)")


def demo_report(run: DemoRun):
    """Demo 4: Campaign report."""
    print_section("Demo 4: Campaign Report", 'HEADER')
    summary = summarize(run.result, run.prices)
    for scope in ("overall", "ransom", "non_ransom", "unclassifiable"):
        totals = getattr(summary, scope)
        print(f"  {scope:<15} {totals.payments:>3} payments  {btc_display(totals.btc):>14} BTC  "
              f"${format_usd(totals.usd_avg):>10}")

    print(f"\n{COLORS['BOLD']}Ransoms per address (CDF):{COLORS['END']}")
    for count, fraction in cdf(per_address(run.result), CdfMetric.COUNT):
        print(f"  <= {count}: {format_fraction(fraction)}")

    with tempfile.TemporaryDirectory() as out:
        written = write_report(summary, daily_series(run.result), per_address(run.result), out)
        print_success(f"Wrote {', '.join(sorted(written))}")


def run_all_demos():
    """Run all demonstration scenarios."""
    print_banner()
    run = DemoRun()
    try:
        demo_expansion(run)
        demo_ingestion(run)
        demo_classification(run)
        demo_report(run)
    finally:
        run.close()

    print_section("Demo Complete!", 'GREEN')
    print("Run the same pipeline from the command line:")
    print("  python main.py expand   --campaign fixtures/demo/campaign.json")
    print("  python main.py ingest   --campaign fixtures/demo/campaign.json")
    print("  python main.py classify --campaign fixtures/demo/campaign.json --prices fixtures/demo/prices.csv")
    print("  python main.py report   --campaign fixtures/demo/campaign.json --prices fixtures/demo/prices.csv")


def main():
    """Main entry point."""
    if len(sys.argv) > 1:
        if sys.argv[1] in ('--help', '-h'):
            print("Usage: python demo.py [OPTIONS]")
            print("\nOptions:")
            print("  (none)        Run all demos")
            print("  -v, --verbose Show library logging")
            print("  -h, --help    Show this help message")
            return
        if sys.argv[1] not in ('--verbose', '-v'):
            print_warning(f"Unknown option: {sys.argv[1]}")
            print("Use --help for usage information")
            return
        setup_logging("DEBUG")
    else:
        setup_logging("WARNING")
    run_all_demos()


if __name__ == "__main__":
    main()
