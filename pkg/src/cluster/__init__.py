"""Address clustering."""
from .expand import ExpansionConfig, ShadowDetection, expand
from .heuristics import detect_shadow, multi_input_addresses

__all__ = ["ExpansionConfig", "ShadowDetection", "expand", "detect_shadow", "multi_input_addresses"]
