"""Analytic solution of the single-pump discrete-continuum problem.

In the infinite-window limit the pump level |b0> at detuning xi couples
to the half-line continuum of signal pairs with density-weighted
strength 1/(2 sqrt(lam)).  Exact diagonalization gives one bound state
(the "meson", eigenvalue -lambda_m below the band for every xi) plus
scattering states with a Lorentzian-like pump weight c_lambda_sq
centered near lam = xi.  The pump amplitude is then a single Fourier
integral over the spectral weight,

    C(tau) = c_m_sq + exp(-i lambda_m tau) *
             integral_0^inf c_lambda_sq(lam) exp(-i lam tau) dlam,

and everything observable here (population decay, revivals, the
finite-time depletion point) follows from it.
"""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq, minimize

from fanopdc.quadrature import check_tolerance, fourier_integral, powerlaw_cutoff


@dataclass(frozen=True)
class MesonState:
    """Bound state below the pair continuum, solved at detuning xi.

    The eigenvalue is -lambda_m (lambda_m > 0 for every real xi);
    c_m_sq is the pump weight of the bound state.
    """

    xi: float
    lambda_m: float
    c_m_sq: float


@dataclass(frozen=True)
class ContinuumWeight:
    """Scattering-state data at energy lam.

    w is the resonance function 2 sqrt(lam) (lam - xi); c_lambda_sq the
    pump weight density 2 sqrt(lam)/(w^2 + pi^2); delta_phase the Fano
    scattering phase on the branch continuous across w = 0,
    arctan(w/pi) - pi/2 in (-pi, 0).  That branch agrees with
    -arctan(pi/w) away from w = 0 and takes the limiting value -pi/2
    there; continuity is what the spatial-correlation cosine transform
    relies on.
    """

    lam: float
    w: float
    c_lambda_sq: float
    delta_phase: float


def meson_solution(xi):
    """Solve pi/(2 sqrt(lam)) - lam = xi for the unique bound state.

    The left side decreases strictly from +inf to -inf, so the root is
    unique and the bracket (0, |xi| + pi + 1] always straddles it.
    The pump weight follows in closed form:
    c_m_sq = 1/(1 + pi/(4 lambda_m^(3/2))).
    """

    def lhs(lam):
        return np.pi / (2.0 * np.sqrt(lam)) - lam - xi

    lam = brentq(lhs, 1e-24, abs(xi) + np.pi + 1.0,
                 xtol=1e-300, rtol=4.0 * np.finfo(float).eps)
    resid = abs(lhs(lam))
    if resid > 1e-12 * max(1.0, abs(xi)):
        raise RuntimeError(
            "bound-state residual %.2e too large at xi=%g" % (resid, xi))
    c_m_sq = 1.0 / (1.0 + np.pi / (4.0 * lam ** 1.5))
    return MesonState(xi=xi, lambda_m=lam, c_m_sq=c_m_sq)


def continuum_weight(xi, lam):
    """Evaluate the scattering-state weight and phase at energy lam >= 0."""
    if lam < 0.0:
        raise ValueError("lam must be >= 0")
    w = 2.0 * np.sqrt(lam) * (lam - xi)
    c_lambda_sq = 2.0 * np.sqrt(lam) / (w * w + np.pi ** 2)
    delta_phase = np.arctan(w / np.pi) - 0.5 * np.pi
    return ContinuumWeight(lam=lam, w=w, c_lambda_sq=c_lambda_sq,
                           delta_phase=delta_phase)


def _c2(lam, xi):
    # scalar fast path of continuum_weight(...).c_lambda_sq for quadrature;
    # improper tails probe lam large enough to overflow w*w, where the
    # correct limit 0.0 comes out anyway
    w = 2.0 * np.sqrt(lam) * (lam - xi)
    with np.errstate(over="ignore"):
        return 2.0 * np.sqrt(lam) / (w * w + np.pi ** 2)


def spectral_breakpoints(xi, tail_tol=1e-9):
    """Segment ends for integrals of c_lambda_sq against oscillations.

    Isolates the resonance peak at lam = xi (full width pi/sqrt(xi))
    when it sits inside the band, then runs to the cutoff where the
    c_lambda_sq <= 2 lam^(-5/2) tail bound drops below tail_tol.
    """
    pts = [0.0]
    if xi > 0.0:
        hw = 3.0 * np.pi / np.sqrt(xi)
        if xi - hw > 0.0:
            pts.append(xi - hw)
        # For small xi the "peak" is as wide as its distance to the band
        # edge and xi + hw can be astronomically far out; only isolate it
        # while the edge stays inside the generic [0, 50] head segment.
        if xi - hw > 0.0 or xi + hw <= 50.0:
            pts.append(xi + hw)
    # the lam^{-5/2} envelope holds for lam beyond both 2|xi| and ~50
    base = max(2.0 * abs(xi), 50.0, pts[-1] * 1.5)
    pts.append(base)
    pts.append(max(powerlaw_cutoff(2.0, 2.5, tail_tol), 2.0 * base))
    return pts


def pump_amplitude(xi, tau, epsabs=1e-9):
    """Pump amplitude C(tau); the pump population is |C|^2.

    Conjugate-symmetric in tau.  Raises QuadratureError if the summed
    quadrature error estimate (plus the dropped-tail bound) exceeds
    1e-8.
    """
    ms = meson_solution(xi)
    tail_tol = min(epsabs, 1e-9)
    val, err = fourier_integral(lambda l: _c2(l, xi), tau,
                                spectral_breakpoints(xi, tail_tol),
                                epsabs=epsabs)
    check_tolerance(err + tail_tol, 1e-8,
                    "pump_amplitude(xi=%g, tau=%g)" % (xi, tau))
    return ms.c_m_sq + np.exp(-1j * ms.lambda_m * tau) * val


def pump_population_series(xi, tau_grid):
    """N_b(tau) = |C(tau)|^2 on each grid point, no smoothing."""
    return np.array([abs(pump_amplitude(xi, t)) ** 2 for t in tau_grid])


def completeness(xi):
    """c_m_sq + integral of c_lambda_sq over the half line (equals 1)."""
    ms = meson_solution(xi)
    pts = spectral_breakpoints(xi, 1e-13)[:-1] + [np.inf]
    val, _ = fourier_integral(lambda l: _c2(l, xi), 0.0, pts, epsabs=1e-12)
    return ms.c_m_sq + val.real


def asymptotic_population(xi, tau, regime):
    """Closed-form large-|xi| approximations to the pump population.

    regime "dissipative" (xi > 0): exp(-tau/tau_d), tau_d = sqrt(xi)/pi.
    regime "dispersive" (xi < 0):
        |1 - pi/(4 (-xi)^(3/2))
           + (sqrt(pi)/(2 xi^2 sqrt(tau))) exp(i (xi tau - pi/4))|^2,
    which is singular at tau = 0 (the stationary-phase tail has not
    formed yet) and therefore rejected there.
    """
    if regime == "dissipative":
        if xi <= 0.0:
            raise ValueError("dissipative regime requires xi > 0")
        tau_d = np.sqrt(xi) / np.pi
        return float(np.exp(-tau / tau_d))
    if regime == "dispersive":
        if xi >= 0.0:
            raise ValueError("dispersive regime requires xi < 0")
        if tau == 0.0:
            raise ValueError("dispersive asymptote is singular at tau = 0")
        amp = (1.0 - np.pi / (4.0 * (-xi) ** 1.5)
               + (np.sqrt(np.pi) / (2.0 * xi ** 2 * np.sqrt(tau)))
               * np.exp(1j * (xi * tau - 0.25 * np.pi)))
        return float(abs(amp) ** 2)
    raise ValueError("regime must be 'dissipative' or 'dispersive'")


def find_depletion_point(xi_range=(0.5, 4.0), tau_range=(0.5, 3.0)):
    """Locate the earliest (xi, tau) where the pump amplitude crosses zero.

    The zero set of C(xi, tau) consists of isolated points and the box can
    contain more than one of them, so a single global minimisation is not
    enough: a coarse grid is scanned, every local basin is polished with
    Nelder-Mead, and among the polished points that are genuinely deep
    (|C|^2 < 1e-6) the one with the smallest tau is returned.  Finding no
    deep zero at all indicates a quadrature or bracketing defect and raises.
    """

    def objective(v):
        x = min(max(v[0], xi_range[0]), xi_range[1])
        t = min(max(v[1], tau_range[0]), tau_range[1])
        return abs(pump_amplitude(x, t)) ** 2

    xs = np.linspace(xi_range[0], xi_range[1], 13)
    ts = np.linspace(tau_range[0], tau_range[1], 11)
    grid = np.array([[objective((x, t)) for t in ts] for x in xs])

    # Local minima of the coarse grid (interior in the 8-neighbour sense,
    # or on the box edge), each a candidate basin.
    candidates = []
    for i in range(len(xs)):
        for j in range(len(ts)):
            v = grid[i, j]
            neigh = grid[max(i - 1, 0):i + 2, max(j - 1, 0):j + 2]
            if v <= neigh.min():
                candidates.append((i, j))

    zeros = []
    for i, j in candidates:
        res = minimize(objective, [xs[i], ts[j]], method="Nelder-Mead",
                       options={"xatol": 1e-9, "fatol": 1e-18,
                                "maxiter": 500})
        x = float(min(max(res.x[0], xi_range[0]), xi_range[1]))
        t = float(min(max(res.x[1], tau_range[0]), tau_range[1]))
        if objective((x, t)) < 1e-6:
            zeros.append((t, x))
    if not zeros:
        raise RuntimeError(
            "depletion search found no zero with |C|^2 < 1e-6 in the box")
    tau_f, xi_f = min(zeros)
    return xi_f, tau_f
