"""End-to-end acceptance gate.

Each criterion below runs against its stated tolerance and runtime
budget and emits exactly one [PASS]/[FAIL] line on the real stdout so
the gate can be read off a captured pytest log.  Operating points
(grids, cutoffs, fit windows) match the module test suites, which hold
the finer-grained versions of these checks.
"""

import functools
import math
import time

import numpy as np
import pytest

import conftest

from fanopdc import cli
from fanopdc.biphoton import signal_norm, spatial_correlation
from fanopdc.continuum import (
    asymptotic_population,
    completeness as pdc_completeness,
    find_depletion_point,
    meson_solution,
    pump_amplitude,
    pump_population_series,
)
from fanopdc.coupled import (
    CoupledParams,
    build_coupled_discrete,
    completeness as coupled_completeness,
    coupled_pump_population,
    coupled_pump_state,
    excitation_spectrum,
)
from fanopdc.discrete import (
    build_single_photon_hamiltonian,
    evolve,
    pump_population,
    pump_state,
)
from fanopdc import multiphoton as mp
from fanopdc.params import ExperimentParams, l_pdc, shg_mean_field
from fanopdc.tpg import (
    TpgParams,
    completeness as tpg_completeness,
    tpg_discrete_population,
    tpg_pump_population,
)


def _criterion(num, label):
    """Record one summary line per criterion, pass or fail; the conftest
    terminal-summary hook prints the collected lines after the run."""

    def wrap(fn):
        @functools.wraps(fn)
        def run(*args, **kwargs):
            t0 = time.perf_counter()
            try:
                detail = fn(*args, **kwargs) or ""
            except BaseException as exc:
                conftest.acceptance_lines.append(
                    "[FAIL] criterion %2d: %s (%s)" % (num, label, exc))
                raise
            elapsed = time.perf_counter() - t0
            conftest.acceptance_lines.append(
                "[PASS] criterion %2d: %s (%s%.1f s)"
                % (num, label, detail and detail + ", ", elapsed))
        return run
    return wrap


@_criterion(1, "bound-state closed form at zero detuning")
def test_criterion_01():
    meson_solution(0.5)  # warm the solver path before timing
    t0 = time.perf_counter()
    ms = meson_solution(0.0)
    elapsed = time.perf_counter() - t0
    assert abs(ms.lambda_m - (np.pi / 2.0) ** (2.0 / 3.0)) < 1e-10
    assert abs(ms.c_m_sq - 2.0 / 3.0) < 1e-10
    assert elapsed < 1e-3, "solve took %.2e s" % elapsed
    return "%.0f us" % (elapsed * 1e6)


@_criterion(2, "completeness sums across all three systems")
def test_criterion_02():
    t0 = time.perf_counter()
    worst = 0.0
    for xi in (-6.0, -4.0, -2.0, 0.0, 2.0, 4.0, 6.0):
        worst = max(worst, abs(pdc_completeness(xi) - 1.0))
    coupled_sets = (
        CoupledParams(2.0, 2.0, np.pi / 4.0, np.pi),   # BIC carries weight
        CoupledParams(1.7, 2.0, np.pi / 3.0, 1.0),
        CoupledParams(-1.0, -3.0, 0.2, 2.0),           # two bound states
    )
    for cp in coupled_sets:
        worst = max(worst, abs(coupled_completeness(cp) - 1.0))
    for xi in (-6.0, -4.0, -2.0, 0.0, 2.0, 4.0, 6.0):
        worst = max(worst, abs(tpg_completeness(xi, 5.0) - 1.0))
    # narrow band, where a second discrete level carries 55% of the norm
    worst = max(worst, abs(tpg_completeness(4.0, 2.0) - 1.0))
    elapsed = time.perf_counter() - t0
    assert worst < 1e-8, "worst completeness deviation %.2e" % worst
    assert elapsed < 10.0
    return "max dev %.1e" % worst


@_criterion(3, "analytic vs discrete population and depletion point")
def test_criterion_03():
    t0 = time.perf_counter()
    taus = np.linspace(0.0, 5.0, 51)
    worst = 0.0
    for xi in (-4.0, -2.0, 0.0, 2.0, 4.0):
        analytic = pump_population_series(xi, taus)
        ham = build_single_photon_hamiltonian(xi, 1.0 / 30.0)
        res = evolve(ham, pump_state(ham.matrix.shape[0]), taus)
        worst = max(worst, float(np.max(np.abs(analytic
                                               - pump_population(res)))))
    assert worst < 0.02, "worst route deviation %.3f" % worst
    xi_f, tau_f = find_depletion_point()
    assert abs(xi_f - 1.90) < 0.02 and abs(tau_f - 1.32) < 0.02
    depth = abs(pump_amplitude(xi_f, tau_f)) ** 2
    assert depth < 1e-6
    assert time.perf_counter() - t0 < 60.0
    return "dev %.1e, zero at (%.3f, %.3f)" % (worst, xi_f, tau_f)


@_criterion(4, "large-detuning asymptotics, both regimes")
def test_criterion_04():
    t0 = time.perf_counter()
    errs = [abs(asymptotic_population(16.0, t, "dissipative")
                - abs(pump_amplitude(16.0, t)) ** 2)
            for t in np.linspace(0.5, 4.0, 15)]
    assert max(errs) < 0.03

    # the dispersive closed form must oscillate at 2 pi/|xi| with a
    # 1/sqrt(tau) envelope; measure both off its own output
    xi = -8.0
    taus = np.arange(0.5, 40.0, 0.005)
    vals = np.array([asymptotic_population(xi, t, "dispersive")
                     for t in taus])
    idx = [i for i in range(1, len(vals) - 1)
           if vals[i] > vals[i - 1] and vals[i] > vals[i + 1]]
    period = float(np.mean(np.diff(taus[idx])))
    want = 2.0 * np.pi / abs(xi)
    assert abs(period - want) / want < 0.05
    floor = np.median(vals)
    slope = np.polyfit(np.log(taus[idx]),
                       np.log(vals[idx] - floor), 1)[0]
    assert abs(slope - (-0.5)) < 0.1
    assert time.perf_counter() - t0 < 30.0
    return "diss err %.3f, period %.4f, slope %.3f" % (max(errs), period,
                                                       slope)


@_criterion(5, "pair-correlation transport, envelope and closure")
def test_criterion_05():
    t0 = time.perf_counter()
    grid = np.linspace(0.5, 7.0, 651)
    peaks = {}
    for tau in (4.0, 8.0):
        field = spatial_correlation(4.0, tau, grid)
        peaks[tau] = grid[np.argmax(np.abs(field.values) ** 2)]
    speed = (peaks[8.0] - peaks[4.0]) / 4.0
    want_speed = np.sqrt(4.0) / np.pi
    assert abs(speed - want_speed) / want_speed < 0.10

    ms = meson_solution(-4.0)
    ugrid = np.linspace(0.05, 0.30, 11)
    field = spatial_correlation(-4.0, 300.0, ugrid)
    slope = np.polyfit(ugrid, np.log(np.abs(field.values)), 1)[0]
    want_decay = 2.0 * np.pi * np.sqrt(ms.lambda_m)
    assert abs(-slope - want_decay) / want_decay < 0.05

    worst = 0.0
    for tau in (0.0, 1.0, 2.0):
        nb = abs(pump_amplitude(4.0, tau)) ** 2
        worst = max(worst, abs(signal_norm(4.0, tau) + nb - 1.0))
    assert worst < 1e-6
    assert time.perf_counter() - t0 < 120.0
    return "speed %.4f, decay %.3f, closure dev %.1e" % (speed, -slope,
                                                         worst)


@_criterion(6, "coupled waveguides: BIC, rates, spectral hole, reduction")
def test_criterion_06():
    t0 = time.perf_counter()
    taus = np.linspace(0.0, 10.0, 11)
    bic = CoupledParams(2.0, 2.0, np.pi / 4.0, np.pi)
    n_analytic = coupled_pump_population(bic, taus)
    assert np.max(np.abs(n_analytic - 1.0)) < 1e-6

    ham = build_coupled_discrete(2.0, 2.0, 1.0 / 30.0)
    res = evolve(ham, coupled_pump_state(ham.dim, np.pi / 4.0, np.pi), taus)
    n_disc = (np.abs(res.amplitudes[:, 0]) ** 2
              + np.abs(res.amplitudes[:, 1]) ** 2)
    assert n_disc.min() >= 0.999

    short = np.linspace(0.0, 5.0, 11)
    rates = {}
    for ph in (0.0, np.pi / 2.0, np.pi):
        n = coupled_pump_population(CoupledParams(1.7, 2.0, np.pi / 4.0, ph),
                                    short)
        rates[ph] = -np.polyfit(short, np.log(n), 1)[0]
    assert rates[0.0] > rates[np.pi / 2.0] > rates[np.pi]

    hole = excitation_spectrum(CoupledParams(1.7, 2.0, 0.0, 0.0),
                               np.array([2.0]))
    assert hole.values[0] < 1e-10

    reduction = np.linspace(0.0, 6.0, 7)
    worst = 0.0
    for xi in (1.0, -2.0):
        n = coupled_pump_population(CoupledParams(xi, xi, np.pi / 4.0, 0.0),
                                    reduction)
        ref = pump_population_series(2.0 ** (2.0 / 3.0) * xi,
                                     2.0 ** (-2.0 / 3.0) * reduction)
        worst = max(worst, float(np.max(np.abs(n - ref))))
    assert worst < 1e-4
    assert time.perf_counter() - t0 < 120.0
    return "BIC min %.4f, reduction dev %.1e" % (n_disc.min(), worst)


def _ladder_amplitudes(state, m_max):
    """One pump photon converts into a signal pair: amplitudes of every
    reachable state, computed from bare ladder operators."""
    out = {}
    for ell in set(state.pump):
        pump_after = list(state.pump)
        pump_after.remove(ell)
        amp_b = math.sqrt(state.pump.count(ell))
        for m in range(-m_max, m_max + 1):
            n = ell - m
            if not -m_max <= n <= m_max:
                continue
            sig_after = list(state.signal)
            amp = 0.5 * amp_b
            amp *= math.sqrt(sig_after.count(n) + 1)
            sig_after.append(n)
            amp *= math.sqrt(sig_after.count(m) + 1)
            sig_after.append(m)
            target = mp.BasisState(tuple(sig_after), tuple(pump_after))
            out[target] = out.get(target, 0.0) + amp
    return out


@_criterion(7, "many-pump sector: reduction, factors, charges, depletion")
def test_criterion_07():
    t0 = time.perf_counter()
    eps = 1.0 / 30.0

    # (a) single-pump sector against the dedicated discrete builder
    basis1 = mp.enumerate_basis(1, 0, 8)
    h1 = mp.build_hamiltonian(basis1, 2.0, 0.0, 0.0, eps).matrix.toarray()
    ref = build_single_photon_hamiltonian(2.0, eps, p_max=8,
                                          check_band=False).matrix
    assert np.max(np.abs(h1 - ref)) < 1e-10

    # (b) every off-diagonal element against the ladder-operator oracle
    for n_pump, m_max in ((1, 4), (2, 4), (3, 3)):
        basis = mp.enumerate_basis(n_pump, 0, m_max)
        h = mp.build_hamiltonian(basis, 1.3, 0.0, 0.0, eps).matrix.tocoo()
        elems = {}
        for i, j, v in zip(h.row, h.col, h.data):
            if i != j:
                elems[(i, j)] = v
        seen = set()
        for j, st in enumerate(basis.states):
            for target, amp in _ladder_amplitudes(st, m_max).items():
                i = basis.index[(target.signal, target.pump)]
                want = np.sqrt(eps) * amp
                assert abs(elems[(i, j)] - want) < 1e-12
                seen.add((i, j))
                seen.add((j, i))
        assert seen == set(elems)

    # (c) conserved charges along a full-basis trajectory
    basis = mp.enumerate_basis(2, 0, 8)
    ham = mp.build_hamiltonian(basis, 2.0, 0.3, 0.7, eps)
    res = mp.evolve_sparse(ham, mp.initial_pump_index(basis),
                           np.linspace(0.0, 10.0, 6))
    drift = 0.0
    for vec in res.amplitudes:
        n_exp, m_exp = mp.number_expectations(vec, basis)
        drift = max(drift, abs(n_exp - 2.0), abs(m_exp))
    assert drift < 1e-10

    # (d) pump dispersion drains the moving pump modes
    terminal = []
    for beta in (1.0, 10.0, 100.0, 1000.0):
        ham = mp.build_hamiltonian(basis, 0.0, 0.0, beta, eps)
        res = mp.evolve_sparse(ham, mp.initial_pump_index(basis),
                               np.array([0.0, 10.0]))
        pops = mp.pump_mode_populations(res.amplitudes[-1], basis)
        terminal.append(sum(v for ell, v in pops.items() if ell != 0))
    assert all(a > b for a, b in zip(terminal, terminal[1:]))
    core_elapsed = time.perf_counter() - t0
    assert core_elapsed < 300.0

    # (e) degenerate-subspace depletion at scale, two cutoffs per size
    t1 = time.perf_counter()
    taus = np.array([0.0, 45.0, 46.25, 47.5, 48.75, 50.0])
    means = {}
    for n_pump, cutoffs in ((2, (80, 160)), (3, (80, 120))):
        for m_max in cutoffs:
            basis = mp.enumerate_basis(n_pump, 0, m_max, dc_only=True)
            ham = mp.build_hamiltonian(basis, 4.0, 0.0, 0.0, 1.0 / 20.0)
            res = mp.evolve_sparse(ham, mp.initial_pump_index(basis), taus)
            frac = [mp.pump_photon_number(v, basis) / n_pump
                    for v in res.amplitudes[1:]]
            means[(n_pump, m_max)] = float(np.mean(frac))
            assert means[(n_pump, m_max)] < 0.02
    assert abs(means[(2, 80)] - means[(2, 160)]) < 1e-3
    assert abs(means[(3, 80)] - means[(3, 120)]) < 1e-3
    assert time.perf_counter() - t1 < 900.0
    return ("charge drift %.1e, terminal fractions N=2: %.4f, N=3: %.4f"
            % (drift, means[(2, 160)], means[(3, 120)]))


@_criterion(8, "triplet generation, discrete vs analytic")
def test_criterion_08():
    t0 = time.perf_counter()
    taus = np.linspace(0.0, 5.0, 26)
    worst = 0.0
    for xi in (-2.0, 0.0, 2.0, 4.0):
        analytic = tpg_pump_population(xi, 5.0, taus)
        numeric = tpg_discrete_population(TpgParams(xi, 1.0 / 100.0, 5.0),
                                          taus)
        worst = max(worst, float(np.max(np.abs(analytic - numeric))))
    assert worst < 0.02, "worst deviation %.4f" % worst
    assert time.perf_counter() - t0 < 300.0
    return "max dev %.1e" % worst


@_criterion(9, "experimental figures of merit")
def test_criterion_09():
    t0 = time.perf_counter()
    ln_like = ExperimentParams(eta=2600.0 * 1e2, lambda_carrier=1.5e-6,
                               gvd=5e-27)
    assert abs(l_pdc(ln_like) - 3.5) / 3.5 < 0.10
    ingap_like = ExperimentParams(eta=47000.0 * 1e2, lambda_carrier=2.0e-6,
                                  gvd=5e-27)
    assert abs(l_pdc(ingap_like) - 0.60) / 0.60 < 0.10
    alpha, beta = shg_mean_field(2.0, 1.3, np.linspace(0.0, 3.0, 7))
    worst = np.max(np.abs(np.abs(alpha) ** 2 + 2.0 * np.abs(beta) ** 2
                          - 4.0))
    assert worst < 1e-12
    elapsed = time.perf_counter() - t0
    assert elapsed < 1e-3
    return "%.0f us" % (elapsed * 1e6)


@_criterion(10, "deterministic command-line output")
def test_criterion_10(tmp_path):
    pairs = []
    for name, args in (("spectrum", ["single-spectrum", "--xi", "2",
                                     "--lam-steps", "50"]),
                       ("fom", ["fom", "--eta-percent-per-w-cm2", "2600",
                                "--lambda-um", "1.5",
                                "--gvd-fs2-per-mm", "5",
                                "--format", "json"])):
        a = tmp_path / (name + "_a.out")
        b = tmp_path / (name + "_b.out")
        assert cli.main(args + ["--out", str(a)]) == 0
        assert cli.main(args + ["--out", str(b)]) == 0
        pairs.append(a.read_bytes() == b.read_bytes())
    assert all(pairs)
    return "2 commands byte-identical"


@pytest.mark.extended
@pytest.mark.skipif("not config.getoption('--run-extended', default=False)",
                    reason="resource-capped extended depletion sizes")
def test_extended_depletion_larger_sectors():
    """Depletion claim probed at N=4 under a reduced cutoff.

    The terminal fraction keeps falling with pump number; the cutoff is
    capped at 40 to hold the run in the minutes range.
    """
    taus = np.array([0.0, 45.0, 47.5, 50.0])
    basis = mp.enumerate_basis(4, 0, 40, dc_only=True)
    ham = mp.build_hamiltonian(basis, 4.0, 0.0, 0.0, 1.0 / 20.0)
    res = mp.evolve_sparse(ham, mp.initial_pump_index(basis), taus)
    frac = [mp.pump_photon_number(v, basis) / 4.0
            for v in res.amplitudes[1:]]
    assert float(np.mean(frac)) < 0.02
