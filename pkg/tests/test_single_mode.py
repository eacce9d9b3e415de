"""Tests for the single-mode frame dynamics."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gifsqueeze.integrate import IntegratorOptions
from gifsqueeze.single_mode import (
    SingleModeParams,
    asymptotic_r_single,
    depletion_ratio,
    evolve_gif_full,
    evolve_lab_full,
    integrate_gif_single,
    reconstruct_lab_moments,
)


def _params(delta=-0.5, beta0=1.0, t_final=0.5, n=5):
    ts = tuple(np.linspace(0, t_final, n + 1)[1:])
    return SingleModeParams(delta=delta, beta0=complex(beta0),
                            t_final=t_final, sample_times=ts)


def test_undepleted_pump_is_free_rotation():
    params = _params(delta=-0.7, beta0=1.3, t_final=1.0)
    traj = integrate_gif_single(params, mode="undepleted")
    for g in traj:
        expected = 1.3 * np.exp(-1j * -0.7 * g.time)
        assert abs(g.beta - expected) < 1e-9


@given(st.floats(-1.0, 1.0), st.floats(0.3, 1.5), st.floats(0.1, 1.2))
@settings(max_examples=20, deadline=None)
def test_bogoliubov_constraint_holds(delta, beta0, t_final):
    params = _params(delta=delta, beta0=beta0, t_final=t_final, n=3)
    traj = integrate_gif_single(params)
    for g in traj:
        assert g.bogoliubov_defect() < 1e-9


@given(st.floats(-1.0, 1.0), st.floats(0.3, 1.5))
@settings(max_examples=15, deadline=None)
def test_generalized_particle_number_conserved(delta, beta0):
    params = _params(delta=delta, beta0=beta0, t_final=1.0, n=4)
    traj = integrate_gif_single(params)
    n0 = 2.0 * beta0**2
    for g in traj:
        assert abs(g.generalized_particle_number() / n0 - 1.0) < 1e-9


def test_undepleted_signal_strictly_increasing():
    params = _params(t_final=1.2, n=12)
    traj = integrate_gif_single(params, mode="undepleted")
    ns = [abs(g.s) ** 2 for g in traj]
    assert all(b > a for a, b in zip(ns, ns[1:]))


def test_small_time_asymptote():
    params = _params(t_final=0.05, n=1)
    g = integrate_gif_single(params)[-1]
    r = depletion_ratio(abs(g.beta) ** 2, 1.0)
    assert r / asymptotic_r_single(0.05) == pytest.approx(1.0, abs=0.05)


def test_frame_reconstruction_matches_lab_evolution():
    params = _params(t_final=0.8, n=4)
    lab = evolve_lab_full(params, cutoffs=(40, 20))
    gif = evolve_gif_full(params, cutoffs=(40, 20))
    from gifsqueeze.fock import build_mode_operators

    a, b = build_mode_operators(lab[0].layout, force_sparse=True)
    n_a = (a.conj().T @ a).tocsr()
    n_b = (b.conj().T @ b).tocsr()
    for lab_state, (g, psi) in zip(lab, gif):
        mom = reconstruct_lab_moments(g, psi, params.delta)
        assert mom["n_signal"] == pytest.approx(
            lab_state.expectation(n_a).real, abs=1e-7)
        assert mom["n_pump"] == pytest.approx(
            lab_state.expectation(n_b).real, abs=1e-7)


def test_depleted_pump_loses_photons():
    params = _params(t_final=1.5, n=10)
    traj = integrate_gif_single(params)
    ns = [abs(g.beta) ** 2 for g in traj]
    assert ns[-1] < ns[0]
    assert all(b <= a + 1e-12 for a, b in zip(ns, ns[1:]))


def test_fixed_step_matches_adaptive():
    params = _params(t_final=0.6, n=3)
    adaptive = integrate_gif_single(params)
    fixed = integrate_gif_single(
        params, options=IntegratorOptions(fixed_step=1e-3))
    for g_a, g_f in zip(adaptive, fixed):
        assert abs(g_a.beta - g_f.beta) < 1e-8
        assert abs(g_a.s - g_f.s) < 1e-8


def test_invalid_mode_rejected():
    with pytest.raises(ValueError):
        integrate_gif_single(_params(), mode="bogus")
