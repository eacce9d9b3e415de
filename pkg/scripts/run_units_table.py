#!/usr/bin/env python3
"""Print the unit-conversion table for a waveguide parameter set.

Defaults match a state-of-the-art thin-film lithium-niobate waveguide;
override with e.g. ``--set units.eta_w_cm2=500``.
"""

import sys

from gifsqueeze.cli import main

if __name__ == "__main__":
    sys.exit(main(["units", "--out", "results/units"] + sys.argv[1:]))
