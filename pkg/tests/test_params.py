import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fanopdc.params import (
    ExperimentParams,
    PhysicalParams,
    l_pdc,
    normalize,
    shg_mean_field,
)

ETA_PERCENT_TO_SI = 1e2  # 1 %/(W cm^2) = 1e2 / (W m^2)
FS2_PER_MM = 1e-30 / 1e-3  # s^2/m


def test_identity_point():
    n = normalize(PhysicalParams(g=1.0, d_a=0.5, d_b=0.5, L=1.0))
    assert n.kappa == pytest.approx(1.0, abs=1e-14)
    assert n.xi == 0.0
    assert n.epsilon == pytest.approx(1.0, abs=1e-14)
    assert n.beta == 1.0
    assert n.zeta == pytest.approx(1.0, abs=1e-14)
    assert not n.time_reversed


def test_xi_is_delta_over_kappa():
    base = normalize(PhysicalParams(g=1.0, d_a=0.5, d_b=0.5, L=1.0))
    n = normalize(PhysicalParams(g=1.0, d_a=0.5, d_b=0.5, delta=2.0 * base.kappa, L=1.0))
    assert n.xi == pytest.approx(2.0, rel=1e-14)


def test_epsilon_sets_window_length():
    # eps = 1/30 corresponds to L = 30 zeta
    n = normalize(PhysicalParams(g=1.0, d_a=0.5 / 30**1.5, d_b=0.0, L=30.0))
    assert n.epsilon == pytest.approx(1.0 / 30.0, rel=1e-12)
    assert n.zeta == pytest.approx(1.0, rel=1e-12)


def test_negative_dispersion_remap():
    n = normalize(PhysicalParams(g=1.2, d_a=-0.5, d_b=-0.2, delta=1.0, mu=0.3, L=2.0))
    m = normalize(PhysicalParams(g=1.2, d_a=0.5, d_b=0.2, delta=-1.0, mu=-0.3, L=2.0))
    assert n.time_reversed and not m.time_reversed
    assert n.kappa == m.kappa
    assert n.xi == m.xi
    assert n.gamma == m.gamma
    assert n.beta == pytest.approx(0.4, rel=1e-14)
    assert n.epsilon == m.epsilon


def test_degenerate_inputs_rejected():
    with pytest.raises(ValueError, match="no nonlinearity"):
        normalize(PhysicalParams(g=0.0, d_a=0.5))
    with pytest.raises(ValueError, match="singular"):
        normalize(PhysicalParams(g=1.0, d_a=0.0))
    with pytest.raises(ValueError):
        normalize(PhysicalParams(g=1.0, d_a=0.5, L=0.0))


@given(
    ratio=st.floats(1.1, 20.0),
    d2=st.floats(0.05, 5.0),
    g2=st.floats(0.2, 5.0),
    delta=st.floats(-3.0, 3.0),
    mu_l=st.floats(-2.0, 2.0),
)
@settings(max_examples=40, deadline=None)
def test_scale_consistency(ratio, d2, g2, delta, mu_l):
    # Fix the window-independent combinations d_a L^2, d_b L^2, mu L and
    # g sqrt(L); rescaling L must leave kappa, xi, zeta, gamma, beta
    # unchanged and shrink epsilon like 1/L.
    def build(L):
        return normalize(PhysicalParams(
            g=g2 / np.sqrt(L), d_a=d2 / L**2, d_b=0.7 * d2 / L**2,
            delta=delta, mu=mu_l / L, L=L))

    a, b = build(1.0), build(ratio)
    assert b.kappa == pytest.approx(a.kappa, rel=1e-10)
    assert b.xi == pytest.approx(a.xi, rel=1e-10, abs=1e-12)
    assert b.zeta == pytest.approx(a.zeta, rel=1e-10)
    assert b.gamma == pytest.approx(a.gamma, rel=1e-10, abs=1e-12)
    assert b.beta == pytest.approx(a.beta, rel=1e-12)
    assert b.epsilon == pytest.approx(a.epsilon / ratio, rel=1e-10)


def test_characteristic_length_quoted_values():
    ln_like = ExperimentParams(eta=2600 * ETA_PERCENT_TO_SI,
                               lambda_carrier=1.5e-6, gvd=5 * FS2_PER_MM)
    assert l_pdc(ln_like) == pytest.approx(3.5, rel=0.10)
    ingap_like = ExperimentParams(eta=47000 * ETA_PERCENT_TO_SI,
                                  lambda_carrier=2.0e-6, gvd=5 * FS2_PER_MM)
    assert l_pdc(ingap_like) == pytest.approx(0.60, rel=0.10)


def test_characteristic_length_scaling_and_monotonicity():
    base = ExperimentParams(eta=1e5, lambda_carrier=1.5e-6, gvd=5e-27)
    assert l_pdc(ExperimentParams(eta=8e5, lambda_carrier=1.5e-6, gvd=5e-27)) \
        == pytest.approx(l_pdc(base) / 4.0, rel=1e-12)
    assert l_pdc(ExperimentParams(eta=2e5, lambda_carrier=1.5e-6, gvd=5e-27)) < l_pdc(base)
    assert l_pdc(ExperimentParams(eta=1e5, lambda_carrier=3e-6, gvd=5e-27)) > l_pdc(base)
    assert l_pdc(ExperimentParams(eta=1e5, lambda_carrier=1.5e-6, gvd=1e-26)) > l_pdc(base)
    with pytest.raises(ValueError):
        l_pdc(ExperimentParams(eta=-1.0, lambda_carrier=1.5e-6, gvd=5e-27))


def test_shg_boundary_values():
    a, b = shg_mean_field(2.0, 1.0, 0.0)
    assert a == pytest.approx(2.0) and b == 0.0
    a, b = shg_mean_field(2.0, 1.0, 50.0)
    assert abs(a) < 1e-12
    assert b == pytest.approx(-1j * 2.0 / np.sqrt(2.0), abs=1e-12)


@given(alpha0=st.floats(0.0, 10.0), g=st.floats(0.01, 5.0),
       t=st.floats(0.0, 20.0))
@settings(max_examples=60, deadline=None)
def test_shg_photon_number_conserved(alpha0, g, t):
    a, b = shg_mean_field(alpha0, g, t)
    assert abs(a) ** 2 + 2.0 * abs(b) ** 2 == pytest.approx(alpha0**2, abs=1e-12 * max(1.0, alpha0**2))


def test_shg_array_input():
    t = np.linspace(0.0, 5.0, 7)
    a, b = shg_mean_field(1.5, 2.0, t)
    assert a.shape == t.shape and b.shape == t.shape
    np.testing.assert_allclose(np.abs(a) ** 2 + 2 * np.abs(b) ** 2, 1.5**2, atol=1e-12)
