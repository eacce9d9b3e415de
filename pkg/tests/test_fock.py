"""Tests for the truncated Fock-space core."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gifsqueeze.fock import (
    DensityMatrix,
    ModeLayout,
    NormDriftError,
    build_mode_operators,
    coherent_amplitudes,
    entanglement_entropy,
    evolve_schrodinger,
    partial_trace,
    product_state,
    purity,
    vacuum_state,
    wigner_single_mode,
)


def _dense(op):
    return op.toarray() if hasattr(op, "toarray") else np.asarray(op)


def test_single_mode_ladder_matrix_elements():
    (a,) = build_mode_operators(ModeLayout((5,)))
    a = _dense(a)
    for n in range(1, 5):
        assert a[n - 1, n] == pytest.approx(np.sqrt(n))
    # commutator equals identity except the truncation corner
    comm = a @ a.conj().T - a.conj().T @ a
    assert np.allclose(np.diag(comm)[:-1], 1.0)
    assert comm[-1, -1] == pytest.approx(1 - 5)


def test_multimode_operators_commute_across_modes():
    layout = ModeLayout((3, 4, 2))
    ops = build_mode_operators(layout, force_sparse=True)
    assert layout.dim == 24
    for i in range(3):
        for j in range(i + 1, 3):
            ai, aj = _dense(ops[i]), _dense(ops[j])
            assert np.allclose(ai @ aj - aj @ ai, 0.0)
            assert np.allclose(ai @ aj.conj().T - aj.conj().T @ ai, 0.0)


def test_number_operator_on_product_state():
    layout = ModeLayout((4, 4))
    v0 = np.zeros(4, dtype=complex)
    v0[2] = 1.0  # two excitations in mode 0
    v1 = np.zeros(4, dtype=complex)
    v1[0] = 1.0
    state = product_state(layout, [v0, v1])
    a0, a1 = build_mode_operators(layout, force_sparse=True)
    assert state.expectation(a0.conj().T @ a0).real == pytest.approx(2.0)
    assert state.expectation(a1.conj().T @ a1).real == pytest.approx(0.0)


@given(st.floats(-1.5, 1.5), st.floats(-1.5, 1.5))
@settings(max_examples=25, deadline=None)
def test_coherent_amplitudes_match_poisson(re, im):
    alpha = complex(re, im)
    vec, deficit = coherent_amplitudes(40, alpha)
    assert np.linalg.norm(vec) == pytest.approx(1.0)
    assert deficit < 1e-8
    if abs(alpha) > 1e-12:
        # mean photon number of the (renormalized) truncation
        n = np.arange(40)
        mean = float(np.sum(n * np.abs(vec) ** 2))
        assert mean == pytest.approx(abs(alpha) ** 2, rel=1e-6)


def test_schrodinger_evolution_matches_expm():
    from scipy.linalg import expm

    layout = ModeLayout((6, 5))
    a, b = build_mode_operators(layout, force_sparse=True)
    h = (a.conj().T @ b + b.conj().T @ a).tocsr()
    state0 = vacuum_state(layout)
    vec = np.zeros(5, dtype=complex)
    vec[1] = 1.0
    v0 = np.zeros(6, dtype=complex)
    v0[0] = 1.0
    state0 = product_state(layout, [v0, vec])
    t = 0.7
    out = evolve_schrodinger(state0, lambda _: h, (0.0, t), [t])
    expected = expm(-1j * t * h.toarray()) @ state0.amplitudes
    assert np.allclose(out[0].amplitudes, expected, atol=1e-9)


def test_norm_drift_detected_for_nonhermitian_generator():
    layout = ModeLayout((4,))
    (a,) = build_mode_operators(layout, force_sparse=True)
    vec = np.zeros(4, dtype=complex)
    vec[1] = 1.0
    state0 = product_state(layout, [vec])
    with pytest.raises(NormDriftError):
        evolve_schrodinger(state0, lambda _: (1j * a).tocsr(), (0.0, 2.0), [2.0])


def test_partial_trace_of_product_state_is_pure():
    layout = ModeLayout((3, 4))
    v0 = np.array([1.0, 1.0, 0.0], dtype=complex) / np.sqrt(2)
    v1 = np.array([0.0, 1.0, 0.0, 0.0], dtype=complex)
    state = product_state(layout, [v0, v1])
    rho = partial_trace(state, [0])
    assert rho.trace == pytest.approx(1.0)
    assert purity(rho) == pytest.approx(1.0)
    assert np.allclose(rho.matrix, np.outer(v0, v0.conj()))
    assert entanglement_entropy(state, [0]) == pytest.approx(0.0, abs=1e-12)


def test_entanglement_entropy_of_bell_pair():
    layout = ModeLayout((2, 2))
    amp = np.zeros(4, dtype=complex)
    amp[0] = amp[3] = 1.0 / np.sqrt(2)  # |00> + |11>
    from gifsqueeze.fock import FockState

    state = FockState(layout, amp, 0.0)
    assert entanglement_entropy(state, [0]) == pytest.approx(np.log(2))
    assert purity(partial_trace(state, [0])) == pytest.approx(0.5)


def test_wigner_vacuum_and_fock_one():
    xs = np.linspace(-5, 5, 121)
    rho_vac = DensityMatrix(np.diag([1.0, 0.0, 0.0]).astype(complex), (3,))
    g = wigner_single_mode(rho_vac, xs, xs)
    expected = np.exp(-xs[None, :] ** 2 - xs[:, None] ** 2) / np.pi
    assert np.max(np.abs(g.values - expected)) < 1e-12
    assert g.riemann_norm() == pytest.approx(1.0, abs=1e-6)

    rho1 = DensityMatrix(np.diag([0.0, 1.0, 0.0]).astype(complex), (3,))
    g1 = wigner_single_mode(rho1, xs, xs)
    # W_{|1>}(0,0) = -1/pi
    i0 = len(xs) // 2
    assert g1.values[i0, i0] == pytest.approx(-1.0 / np.pi)
    assert g1.min_value() == pytest.approx(-1.0 / np.pi)
    assert g1.riemann_norm() == pytest.approx(1.0, abs=1e-6)


def test_wigner_warns_on_truncated_grid():
    rho_vac = DensityMatrix(np.array([[1.0 + 0j]]), (1,))
    xs = np.linspace(-0.5, 0.5, 11)
    with pytest.warns(UserWarning):
        wigner_single_mode(rho_vac, xs, xs)


def test_layout_dimension_cap():
    from gifsqueeze.fock import DimensionError

    with pytest.raises(DimensionError):
        build_mode_operators(ModeLayout((10_000, 10_000)))
