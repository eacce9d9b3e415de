"""Single-mode squeezing dynamics: lab-frame full-quantum evolution, the
undepleted-pump baseline, the Gaussian-interaction-frame (GIF) ODE system, and
reconstruction of lab observables from the frame.

Conventions: signal mode ``a`` couples to pump mode ``b`` through
H = (a^2 b† + a†^2 b)/2 + delta b†b.  The frame is parameterized by the pump
amplitude beta(t) and Bogoliubov Green's functions C(t), S(t) with C(0)=1,
S(0)=0, so that a -> C a + S a† and b -> e^{-i delta t} b + beta.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .fock import (
    FockState,
    ModeLayout,
    build_mode_operators,
    coherent_amplitudes,
    product_state,
    vacuum_state,
)
from .integrate import IntegratorOptions, integrate_complex

BOGOLIUBOV_TOL = 1e-8


@dataclass(frozen=True)
class SingleModeParams:
    delta: float
    beta0: complex
    t_final: float
    sample_times: tuple[float, ...]

    def __post_init__(self):
        ts = np.asarray(self.sample_times, dtype=float)
        if ts.size == 0 or np.any(np.diff(ts) <= 0):
            raise ValueError("sample_times must be nonempty and strictly increasing")
        if ts[0] < 0 or ts[-1] > self.t_final + 1e-12:
            raise ValueError("sample_times must lie within [0, t_final]")


@dataclass
class SingleGifState:
    beta: complex
    c: complex
    s: complex
    time: float

    def bogoliubov_defect(self) -> float:
        return abs(abs(self.c) ** 2 - abs(self.s) ** 2 - 1.0)

    def generalized_particle_number(self) -> float:
        """Manley-Rowe invariant N = |S|^2 + 2|beta|^2 of the GIF approximation."""
        return abs(self.s) ** 2 + 2.0 * abs(self.beta) ** 2


def _gif_rhs(delta: float, depleted: bool):
    def rhs(t, y):
        beta, c, s = y
        dbeta = -1j * delta * beta
        if depleted:
            dbeta = dbeta - 0.5j * c * s
        dc = -1j * beta * np.conj(s)
        ds = -1j * beta * np.conj(c)
        return np.array([dbeta, dc, ds])
    return rhs


def integrate_gif_single(
    params: SingleModeParams,
    mode: str = "depleted",
    options: IntegratorOptions | None = None,
) -> list[SingleGifState]:
    """Integrate the frame ODEs for beta, C, S.

    ``mode='depleted'`` solves d beta/dt = -i delta beta - (i/2) C S jointly
    with the Green's-function ODEs; ``mode='undepleted'`` drops the depletion
    term so beta(t) = e^{-i delta t} beta(0), sharing the same code path.
    """
    if mode not in ("depleted", "undepleted"):
        raise ValueError(f"unknown mode {mode!r}")
    y0 = np.array([params.beta0, 1.0, 0.0], dtype=complex)
    ys = integrate_complex(
        _gif_rhs(params.delta, mode == "depleted"),
        y0, (0.0, params.t_final), params.sample_times, options)
    traj = [SingleGifState(y[0], y[1], y[2], float(t))
            for t, y in zip(params.sample_times, ys)]
    tol = (options or IntegratorOptions()).tolerance_scale()
    worst = max(g.bogoliubov_defect() for g in traj)
    if worst > max(10.0 * tol, BOGOLIUBOV_TOL):
        raise RuntimeError(f"Bogoliubov constraint drift {worst:.3e}")
    return traj


def two_mode_layout(signal_cutoff: int, pump_cutoff: int) -> ModeLayout:
    return ModeLayout((signal_cutoff, pump_cutoff))


def lab_hamiltonian(layout: ModeLayout, delta: float):
    a, b = build_mode_operators(layout, force_sparse=True)
    h = 0.5 * (a @ a @ b.conj().T + a.conj().T @ a.conj().T @ b) \
        + delta * (b.conj().T @ b)
    return h.tocsr()


def initial_lab_state(layout: ModeLayout, beta0: complex) -> FockState:
    pump_vec, _ = coherent_amplitudes(layout.cutoffs[1], beta0)
    signal_vec = np.zeros(layout.cutoffs[0], dtype=complex)
    signal_vec[0] = 1.0
    return product_state(layout, [signal_vec, pump_vec])


def evolve_lab_full(
    params: SingleModeParams,
    cutoffs: tuple[int, int] = (30, 14),
    options: IntegratorOptions | None = None,
) -> list[FockState]:
    """Direct two-mode Schroedinger evolution from vacuum signal and coherent pump."""
    from .fock import evolve_schrodinger

    layout = two_mode_layout(*cutoffs)
    h = lab_hamiltonian(layout, params.delta)
    state0 = initial_lab_state(layout, params.beta0)
    return evolve_schrodinger(state0, lambda t: h, (0.0, params.t_final),
                              params.sample_times, options)


def _gif_interaction_ops(layout: ModeLayout, sparse: bool = True):
    a, b = build_mode_operators(layout, force_sparse=sparse)
    ad, bd = a.conj().T, b.conj().T
    ops = (bd @ ad @ ad, bd @ ad @ a, bd @ a @ a)
    return tuple(op.tocsr() if sparse else op for op in ops)


def build_h_gif_single(
    gif_at: Callable[[float], SingleGifState],
    delta: float,
    layout: ModeLayout,
):
    """Interaction-frame Hamiltonian H_GIF(t) as a matrix-valued function.

    H_GIF(t) = (e^{i delta t}/2) b† (S^2 a†^2 + 2 C S a† a + C^2 a^2) + H.c.
    """
    o1, o2, o3 = _gif_interaction_ops(layout)

    def h(t: float):
        g = gif_at(t)
        phase = np.exp(1j * delta * t)
        half = 0.5 * phase * (g.s**2 * o1 + 2.0 * g.c * g.s * o2 + g.c**2 * o3)
        return half + half.conj().T

    return h


def evolve_gif_full(
    params: SingleModeParams,
    cutoffs: tuple[int, int] = (16, 10),
    options: IntegratorOptions | None = None,
) -> list[tuple[SingleGifState, FockState]]:
    """Co-integrate the GIF frame (beta, C, S) with the interaction-frame state.

    The interaction-frame state starts in two-mode vacuum and evolves under
    H_GIF(t) whose coefficients are taken from the co-integrated frame, so no
    trajectory interpolation is needed.
    """
    layout = two_mode_layout(*cutoffs)
    o1, o2, o3 = _gif_interaction_ops(layout)
    o1d, o2d, o3d = (o.conj().T.tocsr() for o in (o1, o2, o3))
    delta = params.delta
    gauss_rhs = _gif_rhs(delta, depleted=True)

    psi0 = vacuum_state(layout).amplitudes
    y0 = np.concatenate([[params.beta0, 1.0, 0.0], psi0])

    def rhs(t, y):
        g = y[:3]
        psi = y[3:]
        dg = gauss_rhs(t, g)
        _, c, s = g
        phase = np.exp(1j * delta * t)
        k1 = 0.5 * phase * s * s
        k2 = phase * c * s
        k3 = 0.5 * phase * c * c
        hpsi = (k1 * (o1 @ psi) + k2 * (o2 @ psi) + k3 * (o3 @ psi)
                + np.conj(k1) * (o1d @ psi) + np.conj(k2) * (o2d @ psi)
                + np.conj(k3) * (o3d @ psi))
        return np.concatenate([dg, -1j * hpsi])

    ys = integrate_complex(rhs, y0, (0.0, params.t_final), params.sample_times,
                           options)
    out = []
    for t, y in zip(params.sample_times, ys):
        gif = SingleGifState(y[0], y[1], y[2], float(t))
        out.append((gif, FockState(layout, y[3:], float(t))))
    return out


def reconstruct_lab_moments(gif: SingleGifState, state_i: FockState,
                            delta: float = 0.0) -> dict:
    """Lab-frame moments from an interaction-frame state by operator substitution.

    Substitutes a -> C a + S a† and b -> e^{-i delta t} b + beta into the lab
    observables.  Quadrature entries are second moments; for vacuum squeezing
    <a> = 0 so they coincide with variances.
    """
    layout = state_i.layout
    a, b = build_mode_operators(layout, force_sparse=True)
    n_a = state_i.expectation(a.conj().T @ a).real
    m_a = state_i.expectation(a @ a)
    mean_a = state_i.expectation(a)
    n_b = state_i.expectation(b.conj().T @ b).real
    mean_b = state_i.expectation(b)

    c, s, beta = gif.c, gif.s, gif.beta
    rot = np.exp(-1j * delta * gif.time)
    n_a_lab = (abs(c) ** 2 * n_a + abs(s) ** 2 * (n_a + 1.0)
               + 2.0 * np.real(np.conj(c) * s * np.conj(m_a)))
    a2_lab = c * c * m_a + s * s * np.conj(m_a) + c * s * (2.0 * n_a + 1.0)
    x2 = 0.5 * (2.0 * np.real(a2_lab) + 2.0 * n_a_lab + 1.0)
    p2 = 0.5 * (-2.0 * np.real(a2_lab) + 2.0 * n_a_lab + 1.0)

    return {
        "n_signal": float(n_a_lab),
        "n_pump": float(n_b + abs(beta) ** 2
                        + 2.0 * np.real(np.conj(beta) * rot * mean_b)),
        "mean_signal": c * mean_a + s * np.conj(mean_a),
        "mean_pump": rot * mean_b + beta,
        "x2_signal": float(x2),
        "p2_signal": float(p2),
    }


def asymptotic_r_single(t: float) -> float:
    """Small-t pump-depletion asymptote of the single-mode GIF approximation."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    return 0.5 * t * t


def depletion_ratio(n_sh_t: float, n_sh_0: float) -> float:
    if n_sh_0 <= 0:
        raise ValueError("initial pump photon number must be positive")
    return 1.0 - n_sh_t / n_sh_0
