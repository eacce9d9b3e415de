"""Lab-frame observables derived from frame trajectories and truncated states.

Quadrature convention: X = (a + a†)/sqrt(2), vacuum variance 1/2.  A supermode
with squeezing parameter lambda maps frame variances to the lab by
<X^2>_lab = e^{+2 lambda} <X^2>_frame and <P^2>_lab = e^{-2 lambda} <P^2>_frame;
the corresponding Wigner transform is the unit-Jacobian axis rescaling
W_lab(x, p) = W_frame(x e^{-lambda}, p e^{+lambda}).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .fock import (
    DensityMatrix,
    FockState,
    ModeLayout,
    WignerGrid,
    build_mode_operators,
    entanglement_entropy,
    partial_trace,
    purity,
    wigner_single_mode,
)
from .multimode import WavegridConfig
from .supermodes import NonGaussianSample, SupermodeBasis, decompose_supermodes

VACUUM_VARIANCE = 0.5


def variance_to_db(variance: float) -> float:
    """Quadrature variance relative to vacuum, in dB (negative = squeezed)."""
    if variance <= 0:
        raise ValueError("variance must be positive")
    return 10.0 * np.log10(variance / VACUUM_VARIANCE)


def apply_discrete_loss(variance: float, eta: float) -> float:
    """Quadrature variance after a beam-splitter loss of transmissivity eta."""
    if not 0.0 <= eta <= 1.0:
        raise ValueError("eta must lie in [0, 1]")
    return eta * variance + (1.0 - eta) * VACUUM_VARIANCE


@dataclass
class SqueezingReport:
    """Per-supermode quadrature variances at one time."""

    time: float
    lambdas: np.ndarray          # squeezing parameters at the sample time
    x2_frame: np.ndarray         # residual (non-Gaussian) frame variances
    p2_frame: np.ndarray
    x2_lab: np.ndarray           # e^{+2 lambda} x2_frame
    p2_lab: np.ndarray           # e^{-2 lambda} p2_frame
    x2_gaussian: np.ndarray      # pure-Gaussian prediction e^{+2 lambda}/2
    p2_gaussian: np.ndarray

    def antisqueezing_db(self) -> np.ndarray:
        return np.array([variance_to_db(v) for v in self.x2_lab])

    def squeezing_db(self) -> np.ndarray:
        return np.array([variance_to_db(v) for v in self.p2_lab])


def frame_quadratures(state_i: FockState, mode: int) -> tuple[float, float]:
    """Second moments <X^2>, <P^2> of one mode of a truncated frame state."""
    a = build_mode_operators(state_i.layout, force_sparse=True)[mode]
    v = a @ state_i.amplitudes
    n = float(np.real(np.vdot(v, v)))
    a2 = complex(np.vdot(state_i.amplitudes, a @ v))
    return np.real(a2) + n + 0.5, -np.real(a2) + n + 0.5


def squeezing_report(sample: NonGaussianSample,
                     config: WavegridConfig) -> SqueezingReport:
    """Lab-frame supermode squeezing from a non-Gaussian trajectory sample.

    The squeezing parameters are re-extracted from the exact Green's matrices
    at the sample time; the residual frame moments come from the truncated
    state in the (one-refresh-old, sign-aligned) trajectory basis.
    """
    fresh = decompose_supermodes(sample.gif, sample.basis.m_fh, config,
                                 prev=sample.basis)
    m_fh = fresh.m_fh
    x2f = np.empty(m_fh)
    p2f = np.empty(m_fh)
    for m in range(m_fh):
        x2f[m], p2f[m] = frame_quadratures(sample.state, m)
    lam = fresh.lambdas
    return SqueezingReport(
        time=sample.gif.time,
        lambdas=lam,
        x2_frame=x2f,
        p2_frame=p2f,
        x2_lab=np.exp(2.0 * lam) * x2f,
        p2_lab=np.exp(-2.0 * lam) * p2f,
        x2_gaussian=np.exp(2.0 * lam) * VACUUM_VARIANCE,
        p2_gaussian=np.exp(-2.0 * lam) * VACUUM_VARIANCE,
    )


def gaussian_squeezing_report(basis: SupermodeBasis, time: float) -> SqueezingReport:
    """Pure-Gaussian squeezing (vacuum frame state) for a decomposed basis."""
    lam = basis.lambdas
    vac = np.full(lam.shape, VACUUM_VARIANCE)
    return SqueezingReport(time, lam, vac.copy(), vac.copy(),
                           np.exp(2 * lam) * vac, np.exp(-2 * lam) * vac,
                           np.exp(2 * lam) * vac, np.exp(-2 * lam) * vac)


def wigner_frame_transform(grid: WignerGrid, lam: float) -> WignerGrid:
    """Frame -> lab Wigner transform of one supermode: axis rescaling.

    W_lab(x, p) = W_frame(x e^{-lambda}, p e^{+lambda}); the map has unit
    Jacobian so the values are carried over unchanged on stretched axes.
    """
    return WignerGrid(grid.xs * np.exp(lam), grid.ps * np.exp(-lam),
                      grid.values, frame="lab")


def supermode_wigner(sample: NonGaussianSample, mode: int,
                     xs: np.ndarray, ps: np.ndarray,
                     frame: str = "lab") -> WignerGrid:
    """Wigner function of one retained signal supermode on the given axes.

    ``frame='gif'`` gives the residual (non-Gaussian) frame state;
    ``frame='lab'`` includes the Gaussian squeezing via the axis rescaling, so
    the returned grid is sampled exactly on (xs, ps) in lab coordinates.
    """
    if frame not in ("gif", "lab"):
        raise ValueError(f"unknown frame {frame!r}")
    rho = partial_trace(sample.state, [mode])
    if frame == "gif":
        return wigner_single_mode(rho, xs, ps, frame="gif")
    lam = float(sample.basis.lambdas[mode])
    inner = wigner_single_mode(rho, np.asarray(xs) * np.exp(-lam),
                               np.asarray(ps) * np.exp(lam), frame="gif")
    return WignerGrid(np.asarray(xs, float), np.asarray(ps, float),
                      inner.values, frame="lab")


def signal_purity(sample: NonGaussianSample) -> float:
    """Purity of the reduced state of all retained signal supermodes."""
    rho = partial_trace(sample.state, list(range(sample.basis.m_fh)))
    return purity(rho)


def signal_pump_entropy(sample: NonGaussianSample) -> float:
    """Entanglement entropy (nats) across the signal/pump supermode cut."""
    return entanglement_entropy(sample.state, list(range(sample.basis.m_fh)))


def _density_partial_trace(rho: np.ndarray, cutoffs: tuple[int, int],
                           keep: int) -> np.ndarray:
    d0, d1 = cutoffs
    r = rho.reshape(d0, d1, d0, d1)
    if keep == 0:
        return np.einsum("ikjk->ij", r)
    return np.einsum("kikj->ij", r)


def hybrid_supermode_state(sample: NonGaussianSample, phi: float,
                           theta: float = 0.0) -> DensityMatrix:
    """Reduced state of the hybrid mode cos(phi) a_0 + e^{i theta} sin(phi) b_0.

    Applies the passive mixing U = exp(phi (e^{i theta} a† b - e^{-i theta}
    a b†)) to the reduced (dominant signal, dominant pump) supermode pair and
    traces out the pump side.
    """
    m_fh = sample.basis.m_fh
    pair = partial_trace(sample.state, [0, m_fh])
    ca, cb = pair.cutoffs
    a, b = build_mode_operators(ModeLayout((ca, cb)))
    g = np.exp(1j * theta) * (a.conj().T @ b) - np.exp(-1j * theta) * (a @ b.conj().T)
    u = expm(phi * g)
    mixed = u @ pair.matrix @ u.conj().T
    return DensityMatrix(_density_partial_trace(mixed, (ca, cb), keep=0), (ca,))


def pearson(x, y) -> float:
    """Pearson correlation coefficient of two equal-length sequences."""
    return float(np.corrcoef(np.asarray(x, float), np.asarray(y, float))[0, 1])
