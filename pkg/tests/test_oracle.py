"""Tests for the brute-force full-quantum reference model."""

import numpy as np
import pytest

from gifsqueeze.fock import build_mode_operators
from gifsqueeze.multimode import WavegridConfig, make_gaussian_pump
from gifsqueeze.oracle import (
    build_tiny_hamiltonian,
    depletion_curve,
    initial_oracle_state,
    lab_mode_quadratures,
    oracle_evolve,
    oracle_layout,
)


def test_layout_validation():
    cfg = WavegridConfig(m=3, s_max=0.8)
    with pytest.raises(ValueError):
        oracle_layout(cfg, [4, 4], [2, 2, 2, 2, 2])
    layout = oracle_layout(cfg, [4, 4, 4], [2, 2, 8, 2, 2])
    assert layout.dim == 4**3 * 2**4 * 8


def test_hamiltonian_is_hermitian_and_conserves_manley_rowe():
    cfg = WavegridConfig(m=2, s_max=0.5, d0=0.1, d2=0.2)
    layout = oracle_layout(cfg, [4, 4], [3, 6, 3])
    h = build_tiny_hamiltonian(cfg, layout).toarray()
    assert np.allclose(h, h.conj().T)
    ops = build_mode_operators(layout, force_sparse=True)
    n_op = sum((op.conj().T @ op).toarray() for op in ops[:2])
    n_op = n_op + 2.0 * sum((op.conj().T @ op).toarray() for op in ops[2:])
    assert np.max(np.abs(h @ n_op - n_op @ h)) < 1e-10


def test_initial_state_rejects_undersized_pump_cutoffs():
    cfg = WavegridConfig(m=1, s_max=1.0)
    pump = make_gaussian_pump(cfg, 4.0, min_coverage=0.5)  # |alpha| = 2
    layout = oracle_layout(cfg, [4], [3])
    with pytest.raises(ValueError):
        initial_oracle_state(cfg, pump, layout)


def test_single_point_oracle_matches_direct_lab_evolution():
    """M=1 oracle equals the dedicated single-mode two-mode lab model."""
    from gifsqueeze.single_mode import SingleModeParams, evolve_lab_full

    cfg = WavegridConfig(m=1, s_max=1.0, d0=-0.5)
    pump = make_gaussian_pump(cfg, 1.0, min_coverage=0.5)
    ts = [0.25, 0.5]
    samples = oracle_evolve(cfg, pump, 0.5, ts, [14], [12])
    params = SingleModeParams(delta=-0.5, beta0=complex(pump.amplitudes[0]),
                              t_final=0.5, sample_times=tuple(ts))
    lab = evolve_lab_full(params, cutoffs=(14, 12))
    a, b = build_mode_operators(lab[0].layout, force_sparse=True)
    n_a, n_b = (a.conj().T @ a).tocsr(), (b.conj().T @ b).tocsr()
    for smp, lab_state in zip(samples, lab):
        assert smp.n_signal == pytest.approx(
            lab_state.expectation(n_a).real, abs=1e-9)
        assert smp.n_pump == pytest.approx(
            lab_state.expectation(n_b).real, abs=1e-9)


def test_manley_rowe_and_depletion_curve():
    cfg = WavegridConfig(m=2, s_max=0.5, d2=0.1)
    pump = make_gaussian_pump(cfg, 1.0, min_coverage=0.9)
    ts = [0.2, 0.4]
    samples = oracle_evolve(cfg, pump, 0.4, ts, [6, 6], [3, 12, 3])
    totals = [smp.n_signal + 2.0 * smp.n_pump for smp in samples]
    # conserved along the trajectory (the truncated coherent pump starts a
    # few 1e-8 below the ideal photon number, so compare samples pairwise)
    assert max(totals) - min(totals) < 1e-9
    assert totals[0] == pytest.approx(2.0 * pump.n_sh0, abs=1e-6)
    for smp in samples:
        assert np.all(smp.spectral_density >= -1e-14)
    r = depletion_curve(samples, pump.n_sh0)
    assert np.all(np.diff(np.concatenate([[0.0], r])) > 0)


def test_vacuum_quadratures_of_lab_mode():
    cfg = WavegridConfig(m=2, s_max=0.5)
    pump = make_gaussian_pump(cfg, 0.5, min_coverage=0.9)
    layout = oracle_layout(cfg, [4, 4], [3, 10, 3])
    state = initial_oracle_state(cfg, pump, layout)
    w = np.array([1.0, 1.0]) / np.sqrt(2.0)
    x2, p2 = lab_mode_quadratures(state, w, mode_offset=0)
    assert x2 == pytest.approx(0.5)
    assert p2 == pytest.approx(0.5)
