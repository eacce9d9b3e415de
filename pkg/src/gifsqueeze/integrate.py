"""Shared ODE integration for complex-valued systems.

All trajectory integrations in the package go through :func:`integrate_complex`,
so adaptive tolerances and the deterministic fixed-step mode have the same
semantics everywhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import solve_ivp


class IntegrationError(RuntimeError):
    """Raised when the integrator cannot meet the requested tolerance."""


@dataclass(frozen=True)
class IntegratorOptions:
    rtol: float = 1e-11
    atol: float = 1e-13
    method: str = "DOP853"
    fixed_step: float | None = None  # classic RK4 with this dt when set

    def tolerance_scale(self) -> float:
        """Representative tolerance used by norm-drift and constraint monitors.

        Fixed-step RK4 is a determinism mode whose error is set by the step,
        not by rtol, so its monitors only guard against gross blowup.
        """
        if self.fixed_step is not None:
            return max(self.rtol, 1e-4)
        return self.rtol


def _rk4_step(rhs, t, y, dt):
    k1 = rhs(t, y)
    k2 = rhs(t + 0.5 * dt, y + 0.5 * dt * k1)
    k3 = rhs(t + 0.5 * dt, y + 0.5 * dt * k2)
    k4 = rhs(t + dt, y + dt * k3)
    return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def integrate_complex(
    rhs: Callable[[float, np.ndarray], np.ndarray],
    y0: np.ndarray,
    t_span: tuple[float, float],
    sample_times: Sequence[float],
    options: IntegratorOptions | None = None,
) -> np.ndarray:
    """Integrate ``dy/dt = rhs(t, y)`` and return ``y`` at each sample time.

    Sample times must be sorted and lie inside ``t_span``.  Returns an array of
    shape ``(len(sample_times), len(y0))``.
    """
    options = options or IntegratorOptions()
    t0, t1 = t_span
    samples = np.asarray(sample_times, dtype=float)
    if samples.size and (samples[0] < t0 - 1e-12 or samples[-1] > t1 + 1e-12):
        raise ValueError("sample times outside integration span")
    if np.any(np.diff(samples) <= 0):
        raise ValueError("sample times must be strictly increasing")
    y0 = np.asarray(y0, dtype=complex)

    if options.fixed_step is not None:
        return _integrate_fixed(rhs, y0, t0, t1, samples, options.fixed_step)

    sol = solve_ivp(
        rhs,
        (t0, t1),
        y0,
        method=options.method,
        t_eval=samples,
        rtol=options.rtol,
        atol=options.atol,
        dense_output=False,
    )
    if not sol.success:
        raise IntegrationError(f"adaptive integration failed: {sol.message}")
    return sol.y.T.copy()


def _integrate_fixed(rhs, y0, t0, t1, samples, dt):
    """Deterministic RK4 with steps snapped so every sample time is hit exactly."""
    if dt <= 0:
        raise ValueError("fixed step must be positive")
    out = np.empty((len(samples), len(y0)), dtype=complex)
    y = y0.copy()
    t = t0
    for i, ts in enumerate(samples):
        if ts <= t + 1e-15:
            out[i] = y
            continue
        n_steps = max(1, int(np.ceil((ts - t) / dt - 1e-12)))
        h = (ts - t) / n_steps
        for _ in range(n_steps):
            y = _rk4_step(rhs, t, y, h)
            t += h
        t = ts
        out[i] = y
    return out
