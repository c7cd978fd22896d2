"""Campaign configs: seeds plus the ransom demand schedule."""
import hashlib
import logging
from datetime import date
from decimal import Decimal
from pathlib import Path
from typing import List, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from config import settings
from src.core.errors import ConfigError
from src.core.model import AddressId, Denomination, RansomRule, parse_btc


logger = logging.getLogger(__name__)


class CampaignConfig(BaseModel):
    """One campaign. Rules may overlap in time; the first declared match wins."""
    name: str = Field(min_length=1)
    seeds: Tuple[AddressId, ...] = Field(min_length=1)
    rules: Tuple[RansomRule, ...] = ()
    notes: Optional[str] = None

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def _unique_labels(self) -> "CampaignConfig":
        labels = [r.label for r in self.rules]
        if len(labels) != len(set(labels)):
            raise ValueError(f"campaign {self.name!r}: rule labels must be unique")
        return self


class RuleEntry(BaseModel):
    """A rule as written in a campaign file: BTC amounts in BTC, USD in dollars."""
    label: str
    denomination: Denomination
    amount: Decimal
    start_date: date
    end_date: date

    model_config = ConfigDict(extra="forbid")

    def to_rule(self) -> RansomRule:
        amount = parse_btc(self.amount) if self.denomination == Denomination.BTC else self.amount
        return RansomRule(
            label=self.label,
            denomination=self.denomination,
            amount=amount,
            start_date=self.start_date,
            end_date=self.end_date,
        )


class CampaignFile(BaseModel):
    name: str
    seeds: List[str]
    rules: List[RuleEntry] = []
    notes: Optional[str] = None

    model_config = ConfigDict(extra="forbid")


def resolve_campaign_path(ref: Union[str, Path], campaign_dir: Optional[Union[str, Path]] = None) -> Path:
    """A campaign file path, or the name of a catalog entry (`<campaign_dir>/<name>.json`)."""
    path = Path(ref)
    if path.is_file():
        return path
    catalog = Path(campaign_dir or settings.campaign_dir) / f"{ref}.json"
    if catalog.is_file():
        return catalog
    raise ConfigError(f"campaign {ref!r} is neither a file nor a catalog entry in {catalog.parent}")


def parse_campaign(text: Union[str, bytes], source: str = "<campaign>") -> CampaignConfig:
    try:
        raw = CampaignFile.model_validate_json(text)
        return CampaignConfig(
            name=raw.name,
            seeds=tuple(raw.seeds),
            rules=tuple(r.to_rule() for r in raw.rules),
            notes=raw.notes,
        )
    except ValidationError as e:
        first = e.errors()[0]
        where = ".".join(str(part) for part in first["loc"])
        raise ConfigError(f"{source}: {where}: {first['msg']}") from None
    except ValueError as e:
        raise ConfigError(f"{source}: {e}") from None


def load_campaign(ref: Union[str, Path], campaign_dir: Optional[Union[str, Path]] = None) -> CampaignConfig:
    """Load and validate a campaign file or catalog entry."""
    path = resolve_campaign_path(ref, campaign_dir)
    config = parse_campaign(path.read_bytes(), str(path))
    logger.debug(f"Loaded campaign {config.name} from {path}: {len(config.seeds)} seeds, {len(config.rules)} rules")
    return config


def campaign_digest(path: Union[str, Path]) -> str:
    """SHA-256 of the campaign file bytes."""
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def list_catalog(campaign_dir: Optional[Union[str, Path]] = None) -> List[str]:
    """Names of the campaigns shipped in the catalog directory."""
    return sorted(p.stem for p in Path(campaign_dir or settings.campaign_dir).glob("*.json"))
