"""Bridge from normalized simulation units to laboratory quantities.

The single-photon nonlinear length L = cbrt(|k''| / (hbar w eta)^2) converts
the dimensionless propagation time of the dynamics modules into a physical
waveguide length; the enhancement factor r rescales it to the distance over
which multi-photon dynamics develop.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.constants import c as SPEED_OF_LIGHT
from scipy.constants import hbar as HBAR

# laboratory-unit conversion factors
PER_W_CM2 = 1e4          # W^-1 cm^-2 -> W^-1 m^-2
FS2_PER_MM = 1e-30 / 1e-3  # fs^2/mm -> s^2/m
NM = 1e-9


@dataclass(frozen=True)
class PhysicalParams:
    """Waveguide parameters in SI units.

    lambda_sh: pump carrier wavelength [m]; eta: normalized small-signal
    conversion efficiency [W^-1 m^-2]; k2_fh: signal group-velocity dispersion
    magnitude [s^2/m]; r: dimensionless peak-intensity enhancement factor;
    l_loss: 3 dB power attenuation length [m].
    """

    lambda_sh: float
    eta: float
    k2_fh: float
    r: float = 0.18
    l_loss: float = 1.0

    def __post_init__(self):
        for name in ("lambda_sh", "eta", "k2_fh", "r", "l_loss"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")

    @classmethod
    def from_lab_units(cls, lambda_sh_nm: float, eta_per_w_cm2: float,
                       k2_fs2_per_mm: float, r: float = 0.18,
                       l_loss_m: float = 1.0) -> "PhysicalParams":
        """Construct from the units customary in the nanophotonics literature."""
        return cls(lambda_sh=lambda_sh_nm * NM,
                   eta=eta_per_w_cm2 * PER_W_CM2,
                   k2_fh=k2_fs2_per_mm * FS2_PER_MM,
                   r=r, l_loss=l_loss_m)

    @property
    def omega_sh(self) -> float:
        return 2.0 * np.pi * SPEED_OF_LIGHT / self.lambda_sh


def nonlinear_length(params: PhysicalParams) -> tuple[float, float]:
    """(L_chi2, L_eff) in meters.

    L_chi2 = cbrt(|k''_FH| / (hbar omega_SH eta)^2) is the single-photon
    nonlinear length; L_eff = r L_chi2 is the distance over which mesoscopic
    non-Gaussian features develop.
    """
    l_chi2 = np.cbrt(params.k2_fh / (HBAR * params.omega_sh * params.eta) ** 2)
    return float(l_chi2), float(params.r * l_chi2)


def loss_over_length(params: PhysicalParams, length: float) -> float:
    """Power loss fraction over ``length`` for a 3 dB attenuation length l_loss."""
    if length < 0:
        raise ValueError("length must be nonnegative")
    return 1.0 - 2.0 ** (-length / params.l_loss)


def wavelength_scaling(lambda_ratio: float) -> tuple[float, float]:
    """(eta scale, L_chi2 scale) for a wavelength scaled by ``lambda_ratio``.

    Geometric scaling of the waveguide with the operating wavelength gives
    eta ~ lambda^-4 and L_chi2 ~ lambda^{10/3}.
    """
    if lambda_ratio <= 0:
        raise ValueError("lambda_ratio must be positive")
    return lambda_ratio ** -4.0, lambda_ratio ** (10.0 / 3.0)


def summary_table(params: PhysicalParams) -> str:
    """Human-readable table used by the ``units`` CLI subcommand."""
    l_chi2, l_eff = nonlinear_length(params)
    loss = loss_over_length(params, l_eff)
    lines = [
        f"lambda_SH        {params.lambda_sh / NM:10.2f} nm",
        f"eta              {params.eta / PER_W_CM2:10.2f} W^-1 cm^-2",
        f"|k''_FH|         {params.k2_fh / FS2_PER_MM:10.3f} fs^2/mm",
        f"r                {params.r:10.3f}",
        f"L_loss (3 dB)    {params.l_loss * 100:10.2f} cm",
        f"L_chi2           {l_chi2 * 100:10.3f} cm",
        f"L_eff            {l_eff * 100:10.3f} cm",
        f"loss over L_eff  {loss * 100:10.3f} %",
    ]
    return "\n".join(lines)
