"""Tests for the laboratory-unit bridge."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gifsqueeze.units import (
    PhysicalParams,
    loss_over_length,
    nonlinear_length,
    summary_table,
    wavelength_scaling,
)

REFERENCE = PhysicalParams.from_lab_units(
    lambda_sh_nm=456.5, eta_per_w_cm2=330.0, k2_fs2_per_mm=1.0,
    r=0.18, l_loss_m=1.0)


def test_reference_nonlinear_length():
    l_chi2, l_eff = nonlinear_length(REFERENCE)
    assert l_chi2 * 100 == pytest.approx(7.857, rel=5e-3)
    assert l_eff * 100 == pytest.approx(1.414, rel=5e-3)
    assert l_eff == pytest.approx(0.18 * l_chi2)


def test_reference_loss():
    _, l_eff = nonlinear_length(REFERENCE)
    loss = loss_over_length(REFERENCE, l_eff)
    assert loss == pytest.approx(0.00975, abs=2e-4)
    assert loss_over_length(REFERENCE, 0.0) == 0.0
    assert loss_over_length(REFERENCE, 1.0) == pytest.approx(0.5)  # 3 dB
    with pytest.raises(ValueError):
        loss_over_length(REFERENCE, -1.0)


@given(st.floats(0.2, 5.0), st.floats(0.2, 5.0))
@settings(max_examples=30, deadline=None)
def test_wavelength_scaling_is_homogeneous(r1, r2):
    e1, l1 = wavelength_scaling(r1)
    e2, l2 = wavelength_scaling(r2)
    e12, l12 = wavelength_scaling(r1 * r2)
    assert e12 == pytest.approx(e1 * e2, rel=1e-12)
    assert l12 == pytest.approx(l1 * l2, rel=1e-12)
    assert wavelength_scaling(1.0) == (1.0, 1.0)


def test_wavelength_scaling_exponents():
    e, l = wavelength_scaling(2.0)
    assert e == pytest.approx(2.0**-4)
    assert l == pytest.approx(2.0 ** (10.0 / 3.0))


@given(st.floats(0.2, 5.0))
@settings(max_examples=30, deadline=None)
def test_nonlinear_length_scales_with_wavelength(ratio):
    """Scaling the wavelength with the geometric eta scaling reproduces the
    predicted L_chi2 power law."""
    e_scale, l_scale = wavelength_scaling(ratio)
    scaled = PhysicalParams(lambda_sh=REFERENCE.lambda_sh * ratio,
                            eta=REFERENCE.eta * e_scale,
                            k2_fh=REFERENCE.k2_fh, r=REFERENCE.r)
    l0, _ = nonlinear_length(REFERENCE)
    l1, _ = nonlinear_length(scaled)
    assert l1 / l0 == pytest.approx(l_scale, rel=1e-10)


def test_parameter_validation():
    with pytest.raises(ValueError):
        PhysicalParams(lambda_sh=-1.0, eta=1.0, k2_fh=1.0)
    with pytest.raises(ValueError):
        wavelength_scaling(0.0)


def test_summary_table_contains_key_figures():
    table = summary_table(REFERENCE)
    assert "7.857" in table
    assert "1.414" in table
    assert "0.975" in table
