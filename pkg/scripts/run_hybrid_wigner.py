#!/usr/bin/env python3
"""Hybrid signal/pump mode Wigner functions (bundled preset ``fig7``).

Stops a mesoscopic-pump run early and writes frame Wigner grids of the
dominant signal supermode and of the hybrid mode
cos(phi) a_0 + e^{i theta} sin(phi) b_0 to results/fig7/.  Extra CLI flags
are passed through.
"""

import sys

from gifsqueeze.cli import main

if __name__ == "__main__":
    sys.exit(main(["--preset", "fig7", "--out", "results/fig7"]
                  + sys.argv[1:]))
