"""Brute-force full-quantum reference on tiny wavenumber grids.

Evolves the complete discretized three-wave-mixing Hamiltonian in a truncated
Fock space with no frame transformation, no supermode truncation, and no
Gaussian factorization.  Used to validate the frame pipeline end to end: pump
depletion curves, spectral densities, and dominant-supermode quadratures must
agree within stated tolerances on grids small enough to brute-force.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from .fock import (
    FockState,
    ModeLayout,
    build_mode_operators,
    coherent_amplitudes,
    evolve_schrodinger,
    product_state,
)
from .integrate import IntegratorOptions
from .multimode import PumpProfile, WavegridConfig


def oracle_layout(config: WavegridConfig, signal_cutoffs: Sequence[int],
                  pump_cutoffs: Sequence[int]) -> ModeLayout:
    """Modes ordered [signal grid modes..., pump grid modes...]."""
    if len(signal_cutoffs) != config.m or len(pump_cutoffs) != 2 * config.m - 1:
        raise ValueError("cutoff lists must match the grid sizes")
    return ModeLayout(tuple(signal_cutoffs) + tuple(pump_cutoffs))


def build_tiny_hamiltonian(config: WavegridConfig, layout: ModeLayout):
    """Full lab Hamiltonian on the truncated product space.

    H = (sqrt(ds)/2) sum_{j,k} b_{j+k}† a_j a_k + H.c.
        + sum_j gamma_j a_j† a_j + sum_M delta_M b_M† b_M
    """
    m = config.m
    ops = build_mode_operators(layout, force_sparse=True)
    a = ops[:m]
    b = ops[m:]
    h = sp.csr_matrix((layout.dim, layout.dim), dtype=complex)
    half = sp.csr_matrix((layout.dim, layout.dim), dtype=complex)
    for j in range(m):
        for k in range(m):
            half = half + b[j + k].conj().T @ (a[j] @ a[k])
    half = 0.5 * np.sqrt(config.ds) * half
    h = half + half.conj().T
    for j, g in enumerate(config.gamma_signal):
        h = h + g * (a[j].conj().T @ a[j])
    for mm, d in enumerate(config.delta_pump):
        h = h + d * (b[mm].conj().T @ b[mm])
    return h.tocsr()


def initial_oracle_state(config: WavegridConfig, pump: PumpProfile,
                         layout: ModeLayout) -> FockState:
    """Vacuum signal modes, coherent pump modes with the discrete amplitudes."""
    m = config.m
    vectors = []
    worst_deficit = 0.0
    for j in range(m):
        v = np.zeros(layout.cutoffs[j], dtype=complex)
        v[0] = 1.0
        vectors.append(v)
    for mm in range(2 * m - 1):
        v, deficit = coherent_amplitudes(layout.cutoffs[m + mm],
                                         pump.amplitudes[mm])
        worst_deficit = max(worst_deficit, deficit)
        vectors.append(v)
    if worst_deficit > 1e-6:
        raise ValueError(
            f"coherent pump truncation deficit {worst_deficit:.2e}; "
            "raise the pump cutoffs")
    return product_state(layout, vectors)


@dataclass
class OracleSample:
    """Lab-frame observables of the brute-force state at one time."""

    state: FockState
    time: float
    n_pump: float
    n_signal: float
    spectral_density: np.ndarray  # <a_j† a_j> / ds over the signal grid
    leakage: float                # worst top-Fock-level population


def oracle_evolve(
    config: WavegridConfig,
    pump: PumpProfile,
    t_final: float,
    sample_times: Sequence[float],
    signal_cutoffs: Sequence[int],
    pump_cutoffs: Sequence[int],
    options: IntegratorOptions | None = None,
) -> list[OracleSample]:
    layout = oracle_layout(config, signal_cutoffs, pump_cutoffs)
    h = build_tiny_hamiltonian(config, layout)
    state0 = initial_oracle_state(config, pump, layout)
    states = evolve_schrodinger(state0, lambda t: h, (0.0, t_final),
                                sample_times, options)
    m = config.m
    ops = build_mode_operators(layout, force_sparse=True)
    number_a = [op.conj().T @ op for op in ops[:m]]
    number_b = [op.conj().T @ op for op in ops[m:]]
    out = []
    for st in states:
        n_j = np.array([st.expectation(num).real for num in number_a])
        n_pump = sum(st.expectation(num).real for num in number_b)
        out.append(OracleSample(
            state=st,
            time=st.time,
            n_pump=float(n_pump),
            n_signal=float(n_j.sum()),
            spectral_density=n_j / config.ds,
            leakage=st.top_level_population(),
        ))
    return out


def depletion_curve(samples: Sequence[OracleSample], n_sh0: float) -> np.ndarray:
    return np.array([1.0 - s.n_pump / n_sh0 for s in samples])


def lab_mode_quadratures(state: FockState, weights: np.ndarray,
                         mode_offset: int = 0) -> tuple[float, float]:
    """<X^2>, <P^2> of the lab mode f = sum_j w_j a_{j+offset}, sum|w|^2 = 1.

    X = (f + f†)/sqrt(2); for zero-mean states these are the quadrature
    variances.
    """
    ops = build_mode_operators(state.layout, force_sparse=True)
    dim = state.layout.dim
    f = sp.csr_matrix((dim, dim), dtype=complex)
    for j, w in enumerate(weights):
        if w != 0:
            f = f + w * ops[mode_offset + j]
    fv = f @ state.amplitudes
    n_f = float(np.real(np.vdot(fv, fv)))
    f2 = complex(np.vdot(state.amplitudes, f @ fv))
    x2 = np.real(f2) + n_f + 0.5
    p2 = -np.real(f2) + n_f + 0.5
    return float(x2), float(p2)
