"""Command-line stages."""
from .commands import COMMANDS, run

__all__ = ["COMMANDS", "run"]
