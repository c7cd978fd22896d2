"""Subcommand implementations; each returns a process exit status."""
import argparse
import logging
from pathlib import Path

from pydantic import ValidationError

from config import settings
from src.classify.campaign import CampaignConfig, campaign_digest, load_campaign, resolve_campaign_path
from src.classify.classifier import FeeBandMode, classify_cluster
from src.cluster.expand import ExpansionConfig, ShadowDetection, expand
from src.core.errors import ClusterSizeExceeded, ConfigError
from src.core.model import PriceSeries, btc_display, format_usd
from src.core.orchestrator import PipelineOrchestrator, RunManifest
from src.db.database import StoreMode, open_store
from src.ingest.ingest import ingest_cluster
from src.ingest.prices import load_price_series
from src.ingest.provider import Provider, ProviderKind, ProviderSpec, make_provider
from src.report.aggregate import daily_series, per_address, summarize
from src.report.writers import write_report
from .artifacts import read_classification, read_cluster, write_classification, write_cluster


logger = logging.getLogger(__name__)


class StageContext:
    """What every subcommand resolves before doing its work."""

    def __init__(self, args: argparse.Namespace, stage: str):
        self.args = args
        self.campaign_path = resolve_campaign_path(args.campaign, settings.campaign_dir)
        self.campaign: CampaignConfig = load_campaign(self.campaign_path)
        self.out_dir = Path(args.out or settings.out_dir)
        self.out_dir.mkdir(parents=True, exist_ok=True)
        self.store_path = Path(args.store or settings.store_path)
        self.orchestrator = PipelineOrchestrator(self.out_dir, self.store_path)
        self.orchestrator.advance(stage)

    def manifest(self, **fields) -> RunManifest:
        return self.orchestrator.start_manifest(
            campaign=self.campaign.name,
            config_hash=campaign_digest(self.campaign_path),
            store=str(self.store_path),
            **fields,
        )

    def provider_spec(self) -> ProviderSpec:
        args = self.args
        kind = ProviderKind(args.provider or settings.provider)
        location = settings.api_base if kind == ProviderKind.HTTP else (args.fixture_dir or settings.fixture_dir)
        try:
            return ProviderSpec(
                kind=kind,
                base_url_or_dir=location,
                rate_limit=_pick(getattr(args, "rate_limit", None), settings.rate_limit),
                max_retries=_pick(getattr(args, "retries", None), settings.max_retries),
                page_size=_pick(getattr(args, "page_size", None), settings.page_size),
            )
        except ValidationError as e:
            raise ConfigError(f"provider settings: {e.errors()[0]['loc'][0]}: {e.errors()[0]['msg']}") from None

    def prices(self) -> PriceSeries:
        if not self.args.prices:
            raise ConfigError("--prices is required for this stage")
        path = Path(self.args.prices)
        if not path.is_file():
            raise ConfigError(f"price file not found: {path}")
        return load_price_series(path)


def _pick(flag, default):
    return default if flag is None else flag


def cmd_expand(args: argparse.Namespace) -> int:
    ctx = StageContext(args, "expand")
    spec = ctx.provider_spec()
    manifest = ctx.manifest(provider=spec.model_dump(mode="json"))
    try:
        config = ExpansionConfig(
            max_rounds=args.rounds,
            max_cluster_size=args.max_size,
            shadow_detection=ShadowDetection.DISABLED if args.no_shadow else ShadowDetection.ENABLED,
            max_inputs_per_tx=args.max_inputs,
        )
    except ValidationError as e:
        raise ConfigError(f"expansion limits: {e.errors()[0]['loc'][0]}: {e.errors()[0]['msg']}") from None

    provider: Provider = make_provider(spec)
    with provider:
        try:
            cluster = expand(ctx.campaign.seeds, provider, config, campaign=ctx.campaign.name)
        except ClusterSizeExceeded as e:
            if e.partial is not None:
                path = write_cluster(e.partial, ctx.out_dir, name="cluster.partial.csv")
                logger.error(f"Partial cluster of {len(e.partial)} addresses written to {path}")
            raise

    path = write_cluster(cluster, ctx.out_dir)
    ctx.orchestrator.finish(manifest, {path.name: path})
    print(f"{ctx.campaign.name}: {len(cluster)} addresses in {cluster.rounds} rounds -> {path}")
    return 0


def cmd_ingest(args: argparse.Namespace) -> int:
    ctx = StageContext(args, "ingest")
    spec = ctx.provider_spec()
    manifest = ctx.manifest(provider=spec.model_dump(mode="json"))
    cluster = read_cluster(ctx.out_dir, ctx.campaign.name)

    parallelism = _pick(args.parallelism, settings.parallelism)
    if parallelism < 1:
        raise ConfigError("--parallelism must be at least 1")
    with open_store(ctx.store_path, StoreMode.READ_WRITE) as store, make_provider(spec) as provider:
        report = ingest_cluster(provider, store, cluster, parallelism=parallelism)

    ctx.orchestrator.finish(manifest)
    print(
        f"{ctx.campaign.name}: {report.tx_seen} txs seen, {report.tx_new} new, "
        f"{report.payments_new} new payments -> {ctx.store_path}"
    )
    return 0


def cmd_classify(args: argparse.Namespace) -> int:
    ctx = StageContext(args, "classify")
    prices = ctx.prices()
    manifest = ctx.manifest(prices=str(args.prices))
    cluster = read_cluster(ctx.out_dir, ctx.campaign.name)
    try:
        mode = FeeBandMode(args.fee_band_mode or settings.fee_band_mode)
    except ValueError:
        raise ConfigError(f"unknown fee band mode {args.fee_band_mode!r}") from None

    with open_store(ctx.store_path, StoreMode.READ_ONLY) as store:
        result = classify_cluster(store, cluster, ctx.campaign, prices, fee_band_mode=mode)

    outputs = write_classification(result, ctx.out_dir)
    ctx.orchestrator.finish(manifest, outputs)
    print(
        f"{ctx.campaign.name}: {len(result.ransoms)} ransoms ({btc_display(result.ransom_btc)} BTC), "
        f"{result.non_ransom_count} non-ransom, {len(result.unclassifiable)} unclassifiable"
    )
    return 0


def cmd_report(args: argparse.Namespace) -> int:
    ctx = StageContext(args, "report")
    prices = ctx.prices()
    manifest = ctx.manifest(prices=str(args.prices))
    result = read_classification(ctx.out_dir)

    summary = summarize(result, prices)
    outputs = write_report(summary, daily_series(result, dense=args.dense), per_address(result), ctx.out_dir)
    ctx.orchestrator.finish(manifest, outputs)
    print(
        f"{ctx.campaign.name}: overall {summary.overall.payments} payments / {btc_display(summary.overall.btc)} BTC; "
        f"ransom {summary.ransom.payments} / {btc_display(summary.ransom.btc)} BTC / "
        f"USD {format_usd(summary.ransom.usd_avg)}"
    )
    return 0


COMMANDS = {
    "expand": cmd_expand,
    "ingest": cmd_ingest,
    "classify": cmd_classify,
    "report": cmd_report,
}


def run(args: argparse.Namespace) -> int:
    return COMMANDS[args.command](args)
