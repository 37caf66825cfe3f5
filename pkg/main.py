#!/usr/bin/env python3
"""
Truncated Exponential Extrema - Main Entry Point

Runs the command-line interface: solve, table, series, min, verify and
version subcommands.
"""

import sys
import os

# Add src directory to path
sys.path.append(os.path.join(os.path.dirname(__file__), 'src'))

from src.cli import cli


def main():
    """Main entry point for the command-line tool."""
    cli()


if __name__ == "__main__":
    main()
