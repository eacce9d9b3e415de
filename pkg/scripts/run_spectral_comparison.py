#!/usr/bin/env python3
"""Few-photon multimode comparison (bundled preset ``fig3``).

Writes depletion curves and final-time signal spectral densities for the
undepleted, Gaussian-frame, and non-Gaussian models, plus the
dominant-supermode Wigner grid, to results/fig3/.  Extra CLI flags are
passed through.
"""

import sys

from gifsqueeze.cli import main

if __name__ == "__main__":
    sys.exit(main(["--preset", "fig3", "--out", "results/fig3"]
                  + sys.argv[1:]))
