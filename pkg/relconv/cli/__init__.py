"""
Command-line interface for relconv.
"""

from relconv.cli.main import cli, main

__all__ = ["cli", "main"]
