#!/usr/bin/env python
"""Entry point for the fockspace command line."""
from __future__ import annotations

import sys

from fockspace.cli import main

if __name__ == "__main__":
    sys.exit(main())
