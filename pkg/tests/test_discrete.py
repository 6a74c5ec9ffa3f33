import numpy as np
import pytest

from fanopdc.continuum import pump_population_series
from fanopdc.discrete import (
    build_single_photon_hamiltonian,
    default_p_max,
    evolve,
    pump_population,
    pump_state,
)
from oracles import general_single_hamiltonian


def test_small_matrix_layout():
    h = build_single_photon_hamiltonian(0.0, 1.0, 2, check_band=False)
    # p=0 degenerate pair carries the 1/sqrt(2) Bose-statistics factor;
    # p>=1 pairs couple with the bare eps^(1/2).
    expected = np.array([
        [0.0, 2**-0.5, 1.0, 1.0],
        [2**-0.5, 0.0, 0.0, 0.0],
        [1.0, 0.0, 1.0, 0.0],
        [1.0, 0.0, 0.0, 4.0],
    ])
    np.testing.assert_allclose(h.matrix, expected, rtol=0.0, atol=1e-15)
    assert h.dim == 4
    assert h.labels[0] == ("pump", 0)
    assert h.labels[1] == ("pair", 0)


def test_matrix_entries_and_symmetry():
    eps = 1.0 / 30.0
    h = build_single_photon_hamiltonian(2.0, eps)
    p_max = h.dim - 2
    assert p_max == default_p_max(2.0, eps)
    assert np.array_equal(h.matrix, h.matrix.T)
    assert h.matrix[0, 0] == 2.0
    assert h.matrix[0, 2] == pytest.approx(np.sqrt(eps), rel=1e-15)
    assert h.matrix[0, 2] == pytest.approx(0.18257, abs=5e-6)
    assert h.matrix[-1, -1] == pytest.approx((eps * p_max) ** 2, rel=1e-15)


def test_band_containment_rejected():
    # band edge must reach max(4|xi|, 16)
    with pytest.raises(ValueError, match="band edge"):
        build_single_photon_hamiltonian(0.0, 1.0 / 30.0, 100)
    with pytest.raises(ValueError):
        build_single_photon_hamiltonian(0.0, -1.0, 10)
    with pytest.raises(ValueError):
        build_single_photon_hamiltonian(0.0, 5.0, 0)


def test_evolve_initial_and_decoupled():
    h = build_single_photon_hamiltonian(2.0, 1.0 / 5.0, 25)
    psi = pump_state(h.dim)
    res = evolve(h, psi, [0.0, 1.0])
    np.testing.assert_allclose(res.amplitudes[0], psi, atol=1e-14)

    diagonal = np.diag(np.diag(h.matrix))
    res = evolve(type(h)(labels=h.labels, matrix=diagonal), psi, [0.0, 0.7, 2.0])
    np.testing.assert_allclose(np.abs(res.amplitudes[:, 0]), 1.0, atol=1e-14)
    assert res.amplitudes[1, 0] == pytest.approx(np.exp(-2.0j * 0.7), abs=1e-13)


def test_evolve_validation():
    h = build_single_photon_hamiltonian(0.0, 0.5, 9)
    with pytest.raises(ValueError, match="dimension"):
        evolve(h, np.zeros(3, complex), [0.0])
    bad = np.zeros(h.dim, complex)
    bad[0] = 0.7
    with pytest.raises(ValueError, match="normalized"):
        evolve(h, bad, [0.0])
    with pytest.raises(ValueError, match="sorted"):
        evolve(h, pump_state(h.dim), [1.0, 0.5])


def test_unitarity_and_energy_conservation():
    h = build_single_photon_hamiltonian(-3.0, 1.0 / 10.0, 80)
    res = evolve(h, pump_state(h.dim), np.linspace(0.0, 10.0, 31))
    assert res.norm_error < 1e-10
    energies = [np.real(np.vdot(a, h.matrix @ a)) for a in res.amplitudes]
    assert np.max(np.abs(np.array(energies) - energies[0])) < 1e-10


def test_matches_continuum_analytics():
    taus = np.linspace(0.0, 5.0, 51)
    h = build_single_photon_hamiltonian(2.0, 1.0 / 30.0)
    nb_d = pump_population(evolve(h, pump_state(h.dim), taus))
    nb_a = pump_population_series(2.0, taus)
    assert np.max(np.abs(nb_d - nb_a)) < 0.02


def test_band_truncation_converges_like_inverse_p_max():
    # Dropped far modes shift the pump level by ~1/(eps p_max), so the
    # population error halves per doubling; a 1e-6 doubling criterion
    # would need p_max ~ 1e8 and is not a property of this matrix family.
    xi, eps, tau = 2.0, 1.0 / 30.0, 3.0
    base = default_p_max(xi, eps)
    vals = []
    for p in (base, 2 * base, 4 * base):
        h = build_single_photon_hamiltonian(xi, eps, p)
        vals.append(pump_population(evolve(h, pump_state(h.dim), [tau]))[0])
    d1, d2 = abs(vals[1] - vals[0]), abs(vals[2] - vals[1])
    assert 1.5 < d1 / d2 < 2.7


def test_shifted_pump_momentum_reduces_to_shifted_detuning():
    # A pump photon at even momentum ell sees the same chain after
    # removing the constant pair offset (eps*ell/2)^2 from the diagonal
    # and shifting xi by the pump dispersion terms minus that offset.
    xi, gamma, beta, eps, ell, p_max = 1.3, 0.4, 2.0, 0.2, 4, 30
    gen = general_single_hamiltonian(xi, gamma, beta, eps, ell, p_max)
    offset = (eps * ell / 2.0) ** 2
    xi_eff = xi + gamma * eps * ell + 0.5 * beta * eps**2 * ell**2 - offset
    ref = build_single_photon_hamiltonian(xi_eff, eps, p_max).matrix
    np.testing.assert_allclose(gen - np.eye(p_max + 2) * offset, ref, atol=1e-12)


def test_odd_pump_momentum_has_half_integer_ladder():
    xi, eps, ell, p_max = 0.5, 0.25, 3, 12
    gen = general_single_hamiltonian(xi, 0.0, 0.0, eps, ell, p_max)
    # no degenerate pair: every coupling is the bare eps^(1/2)
    np.testing.assert_allclose(gen[0, 1:], np.sqrt(eps), atol=1e-15)
    # pair diagonal at splitting p+1/2 above the common offset
    offset = (eps * ell / 2.0) ** 2
    p = np.arange(p_max + 1)
    np.testing.assert_allclose(np.diag(gen)[1:] - offset,
                               eps**2 * (p + 0.5) ** 2, atol=1e-13)
