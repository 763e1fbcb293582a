#!/usr/bin/env python3
"""
Photon-added detection simulator

Runs the pad-sim command group without installing the package:

    python app.py rates --rate 0.1 --p-max 4 --format json
"""

import sys

from app.cli import main

if __name__ == "__main__":
    sys.exit(main())
