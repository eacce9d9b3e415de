#!/usr/bin/env python3
"""Single-mode pump-depletion comparison (bundled preset ``fig2``).

Writes R(t) for the full two-mode quantum model, the depleted
Gaussian-interaction-frame model, and the undepleted baseline, plus the
t^2/2 asymptote, to results/fig2/series.csv.  Extra CLI flags are passed
through, e.g. ``--set single.delta=-1.0``.
"""

import sys

from gifsqueeze.cli import main

if __name__ == "__main__":
    sys.exit(main(["--preset", "fig2", "--out", "results/fig2"]
                  + sys.argv[1:]))
