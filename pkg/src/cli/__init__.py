"""Command line interface for liedim."""
from src.cli.commands import build_parser, run
from src.cli.parser import PresentationFile, format_presentation, parse_presentation

__all__ = ["build_parser", "run", "PresentationFile", "format_presentation", "parse_presentation"]
