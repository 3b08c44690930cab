#!/usr/bin/env python3
"""Regenerate fig1..fig4 from artifact CSV outputs: see kyfrog_tools.plots."""

import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent / "src"))

from kyfrog_tools.plots import main

if __name__ == "__main__":
    sys.exit(main())
