#!/usr/bin/env python3
"""Main entry point for coxhess.

Usage:
    python main.py certify H3
    python main.py tables H3 H4 F4 E6
    python main.py certify E8 --numerator paper-table
    python main.py molien F4 --class vector
    python main.py orbit E6

Configuration is loaded from config/config.json and environment variables.
See config/config.template.json for available options.
"""

import sys

from src.cli import main

if __name__ == "__main__":
    sys.exit(main())
