"""Truncated Fock-space linear algebra.

States live on a tensor product of per-mode truncated number spaces.  The
module provides mode operators, time-dependent Schroedinger evolution, partial
traces, purity/entropy, and a single-mode Wigner transform.  Everything here is
frame-agnostic; the interaction-frame machinery lives in the dynamics modules.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
import scipy.sparse as sp

from .integrate import IntegratorOptions, integrate_complex

# Dense matrices below this total dimension, sparse above.
DENSE_DIM_LIMIT = 4096
# Hard cap guarding against accidental exponential blowup.
DEFAULT_DIM_CAP = 2_000_000


class DimensionError(ValueError):
    """Total truncated dimension exceeds the configured hard cap."""


class NormDriftError(RuntimeError):
    """State norm drifted beyond 10x the integrator tolerance."""


@dataclass(frozen=True)
class ModeLayout:
    """Per-mode photon-number cutoffs of a truncated multimode space.

    ``cutoffs[k]`` is the dimension of mode ``k`` (Fock levels 0..cutoffs[k]-1).
    """

    cutoffs: tuple[int, ...]

    def __post_init__(self):
        if not self.cutoffs or any(c < 1 for c in self.cutoffs):
            raise ValueError("every cutoff must be >= 1")

    @property
    def mode_count(self) -> int:
        return len(self.cutoffs)

    @property
    def dim(self) -> int:
        return math.prod(self.cutoffs)

    def check_cap(self, cap: int = DEFAULT_DIM_CAP) -> None:
        if self.dim > cap:
            raise DimensionError(f"dimension {self.dim} exceeds cap {cap}")


def _single_mode_destroy(cutoff: int) -> np.ndarray:
    a = np.zeros((cutoff, cutoff), dtype=complex)
    for n in range(1, cutoff):
        a[n - 1, n] = np.sqrt(n)
    return a


def build_mode_operators(layout: ModeLayout, cap: int = DEFAULT_DIM_CAP,
                         force_sparse: bool | None = None):
    """Annihilation operators for each mode on the full tensor-product space.

    Returns dense arrays below ``DENSE_DIM_LIMIT`` total dimension and CSR
    sparse matrices above it; ``force_sparse`` overrides the heuristic (the
    evolution paths always want sparse, observables prefer dense).
    """
    layout.check_cap(cap)
    sparse = layout.dim > DENSE_DIM_LIMIT if force_sparse is None else force_sparse
    ops = []
    for k, cutoff in enumerate(layout.cutoffs):
        a_k = sp.csr_matrix(_single_mode_destroy(cutoff))
        left = math.prod(layout.cutoffs[:k])
        right = math.prod(layout.cutoffs[k + 1:])
        op = sp.kron(sp.identity(left, format="csr"),
                     sp.kron(a_k, sp.identity(right, format="csr"), format="csr"),
                     format="csr")
        ops.append(op if sparse else op.toarray())
    return ops


@dataclass
class FockState:
    """Complex amplitude vector over the truncated multimode number basis."""

    layout: ModeLayout
    amplitudes: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if self.amplitudes.shape != (self.layout.dim,):
            raise ValueError("amplitude vector does not match layout dimension")

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def as_tensor(self) -> np.ndarray:
        return self.amplitudes.reshape(self.layout.cutoffs)

    def top_level_population(self) -> float:
        """Largest total population in any mode's highest Fock level.

        Used as the truncation-leakage diagnostic: runs are flagged when this
        exceeds 1e-4.
        """
        tensor = np.abs(self.as_tensor()) ** 2
        worst = 0.0
        for k in range(self.layout.mode_count):
            top = np.take(tensor, self.layout.cutoffs[k] - 1, axis=k)
            worst = max(worst, float(top.sum()))
        return worst

    def expectation(self, op) -> complex:
        return complex(np.vdot(self.amplitudes, op @ self.amplitudes))


def vacuum_state(layout: ModeLayout, time: float = 0.0) -> FockState:
    amps = np.zeros(layout.dim, dtype=complex)
    amps[0] = 1.0
    return FockState(layout, amps, time)


def coherent_amplitudes(cutoff: int, alpha: complex) -> tuple[np.ndarray, float]:
    """Truncated coherent-state vector, renormalized.

    Returns (vector, truncation deficit), where the deficit is the probability
    weight lost to levels at or above the cutoff.
    """
    alpha = complex(alpha)
    n = np.arange(cutoff)
    log_fact = np.concatenate(([0.0], np.cumsum(np.log(np.arange(1, cutoff)))))
    amps = np.exp(-0.5 * abs(alpha) ** 2 + n * np.log(alpha) - 0.5 * log_fact) \
        if alpha != 0 else np.eye(cutoff, 1, dtype=complex).ravel()
    amps = np.asarray(amps, dtype=complex)
    weight = float(np.sum(np.abs(amps) ** 2))
    deficit = 1.0 - weight
    return amps / np.sqrt(weight), deficit


def product_state(layout: ModeLayout, vectors: Sequence[np.ndarray],
                  time: float = 0.0) -> FockState:
    amps = np.array([1.0 + 0j])
    for v in vectors:
        amps = np.kron(amps, np.asarray(v, dtype=complex))
    return FockState(layout, amps, time)


def evolve_schrodinger(
    state: FockState,
    hamiltonian: Callable[[float], object],
    t_span: tuple[float, float],
    sample_times: Sequence[float],
    options: IntegratorOptions | None = None,
) -> list[FockState]:
    """Solve i d|phi>/dt = H(t)|phi> and return states at the sample times.

    ``hamiltonian(t)`` must return an object supporting ``@`` on the amplitude
    vector (dense, sparse, or LinearOperator) and be Hermitian at every t.
    Aborts with :class:`NormDriftError` when the norm drifts by more than 10x
    the integrator tolerance.
    """
    options = options or IntegratorOptions()

    def rhs(t, y):
        return -1j * (hamiltonian(t) @ y)

    ys = integrate_complex(rhs, state.amplitudes, t_span, sample_times, options)
    tol = options.tolerance_scale()
    out = []
    for t, y in zip(sample_times, ys):
        drift = abs(np.linalg.norm(y) - 1.0)
        if drift > 10.0 * max(tol, 1e-12):
            raise NormDriftError(
                f"norm drift {drift:.3e} at t={t:g} exceeds 10x tolerance {tol:.1e}")
        out.append(FockState(state.layout, y, float(t)))
    return out


@dataclass
class DensityMatrix:
    """Hermitian positive reduced state on a subset of modes."""

    matrix: np.ndarray
    cutoffs: tuple[int, ...]

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix, dtype=complex)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def trace(self) -> float:
        return float(np.real(np.trace(self.matrix)))


def partial_trace(state: FockState, keep: Sequence[int]) -> DensityMatrix:
    """Reduced density matrix on the kept modes (order as given in ``keep``)."""
    keep = list(keep)
    if not keep or any(k < 0 or k >= state.layout.mode_count for k in keep):
        raise ValueError("keep must be a nonempty subset of layout modes")
    if len(set(keep)) != len(keep):
        raise ValueError("duplicate modes in keep")
    traced = [k for k in range(state.layout.mode_count) if k not in keep]
    tensor = state.as_tensor()
    perm = keep + traced
    a = np.transpose(tensor, perm)
    d_keep = math.prod(state.layout.cutoffs[k] for k in keep)
    a = a.reshape(d_keep, -1)
    rho = a @ a.conj().T
    return DensityMatrix(rho, tuple(state.layout.cutoffs[k] for k in keep))


def purity(rho: DensityMatrix) -> float:
    return float(np.real(np.sum(rho.matrix * rho.matrix.T)))


def entanglement_entropy(state: FockState, bipartition: Sequence[int]) -> float:
    """Von Neumann entropy (nats) of the reduced state of one side of a pure state.

    ``bipartition`` lists the modes of one side; the other side is the rest.
    """
    side = sorted(bipartition)
    rest = [k for k in range(state.layout.mode_count) if k not in side]
    if not side or not rest:
        raise ValueError("bipartition must split the modes into two nonempty sets")
    tensor = np.transpose(state.as_tensor(), side + rest)
    d_side = math.prod(state.layout.cutoffs[k] for k in side)
    svals = np.linalg.svd(tensor.reshape(d_side, -1), compute_uv=False)
    p = svals**2
    p = p[p > 1e-300]
    return float(-np.sum(p * np.log(p)))


@dataclass
class WignerGrid:
    """Wigner function sampled on a rectangular phase-space grid.

    ``values[i, j]`` is W(xs[j], ps[i]).  Vacuum convention: W has variance 1/2
    in both quadratures, i.e. W_vac = exp(-x^2 - p^2)/pi.
    """

    xs: np.ndarray
    ps: np.ndarray
    values: np.ndarray
    frame: str = "lab"

    def riemann_norm(self) -> float:
        dx = self.xs[1] - self.xs[0]
        dp = self.ps[1] - self.ps[0]
        return float(np.sum(self.values) * dx * dp)

    def min_value(self) -> float:
        return float(self.values.min())


def wigner_single_mode(rho: DensityMatrix, xs: np.ndarray, ps: np.ndarray,
                       frame: str = "lab", norm_tol: float = 1e-3) -> WignerGrid:
    """Wigner function of a single-mode density matrix.

    Uses the standard iterative (Clenshaw-style) recursion over Fock matrix
    elements.  Warns when the Riemann-sum normalization misses 1 by more than
    ``norm_tol`` (grid too coarse or too narrow).
    """
    if len(rho.cutoffs) != 1:
        raise ValueError("wigner_single_mode requires a single-mode density matrix")
    xs = np.asarray(xs, dtype=float)
    ps = np.asarray(ps, dtype=float)
    m = rho.dim
    x, p = np.meshgrid(xs, ps)
    a = (x + 1j * p) / np.sqrt(2.0)
    wlist = np.empty((m,) + a.shape, dtype=complex)
    wlist[0] = np.exp(-2.0 * np.abs(a) ** 2) / np.pi
    w = np.real(rho.matrix[0, 0]) * np.real(wlist[0])
    for n in range(1, m):
        wlist[n] = (2.0 * a * wlist[n - 1]) / np.sqrt(n)
        w = w + 2.0 * np.real(rho.matrix[0, n] * wlist[n])
    for k in range(1, m):
        temp = wlist[k].copy()
        wlist[k] = (2.0 * np.conj(a) * temp - np.sqrt(k) * wlist[k - 1]) / np.sqrt(k)
        w = w + np.real(rho.matrix[k, k] * wlist[k])
        for n in range(k + 1, m):
            temp2 = (2.0 * a * wlist[n - 1] - np.sqrt(k) * temp) / np.sqrt(n)
            temp = wlist[n].copy()
            wlist[n] = temp2
            w = w + 2.0 * np.real(rho.matrix[k, n] * wlist[n])
    grid = WignerGrid(xs, ps, w, frame)
    deficit = abs(grid.riemann_norm() - 1.0)
    if deficit > norm_tol:
        warnings.warn(
            f"Wigner normalization deficit {deficit:.2e} exceeds {norm_tol:.0e}; "
            "grid may be too coarse or too narrow", stacklevel=2)
    return grid
