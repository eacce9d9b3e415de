#!/usr/bin/env python3
"""Mesoscopic-pump squeezing saturation study (bundled preset ``fig5``).

Writes dominant-supermode squeezing/antisqueezing (with and without 4%
detection loss), signal purity, and signal/pump entanglement entropy to
results/fig5/series.csv.  Expect a few minutes of runtime.  Extra CLI
flags are passed through.
"""

import sys

from gifsqueeze.cli import main

if __name__ == "__main__":
    sys.exit(main(["--preset", "fig5", "--out", "results/fig5"]
                  + sys.argv[1:]))
