"""Ransom payment classification."""
from .campaign import CampaignConfig, campaign_digest, list_catalog, load_campaign, parse_campaign, resolve_campaign_path
from .classifier import (
    ClassificationResult,
    FeeBandMode,
    UnclassifiablePayment,
    UnclassifiableReason,
    classify_cluster,
    classify_payment,
    classify_payments,
    transaction_fee,
    usd_value,
)

__all__ = [
    "CampaignConfig",
    "campaign_digest",
    "list_catalog",
    "load_campaign",
    "parse_campaign",
    "resolve_campaign_path",
    "ClassificationResult",
    "FeeBandMode",
    "UnclassifiablePayment",
    "UnclassifiableReason",
    "classify_cluster",
    "classify_payment",
    "classify_payments",
    "transaction_fee",
    "usd_value",
]
