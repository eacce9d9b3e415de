"""Pulsed squeezed-light simulator built around a Gaussian interaction frame.

Semiclassical Gaussian dynamics (with pump depletion factored out) are
integrated as Green's-function ODEs; residual non-Gaussian quantum evolution is
truncated to a few dynamically chosen principal supermodes and validated
against brute-force full-quantum oracles on tiny grids.
"""

__version__ = "0.1.0"
