"""Two pump states sharing one signal continuum: interference and BIC.

Two waveguides with detunings xi1, xi2 downconvert into a common signal
band.  The discrete-continuum problem then has a 2x2 structure: up to
two bound states below the band, a continuum whose weights carry Fano
lineshapes, and a spectral "hole" at lambda* = (xi1+xi2)/2 where the
on-shell weight w_+ diverges.  At exact degeneracy (xi1 = xi2) and
lambda* >= 0 the antisymmetric pump combination (1, -1)/sqrt(2)
decouples entirely: a bound state in the continuum that never
downconverts.

Population dynamics N_+(tau) = |C_1|^2 + |C_2|^2 follow from the
eigenbasis expansion; the continuum integrals develop a peak of width
~(dxi)^2 beside the hole as the detunings approach each other, which
the quadrature resolves with a geometric ladder of segments closing in
on lambda* until the innermost shell stops mattering.
"""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from fanopdc.continuum import meson_solution
from fanopdc.quadrature import (
    check_tolerance,
    edge_ladder,
    fourier_integral,
    powerlaw_cutoff,
)

BIC_TOL = 1e-9


@dataclass(frozen=True)
class CoupledParams:
    """Initial condition cos(theta) |b1> + e^{i phi} sin(theta) |b2>."""

    xi1: float
    xi2: float
    theta: float
    phi: float

    def __post_init__(self):
        if not 0.0 <= self.theta <= 0.5 * np.pi:
            raise ValueError("theta must lie in [0, pi/2]")
        if not 0.0 <= self.phi < 2.0 * np.pi:
            raise ValueError("phi must lie in [0, 2 pi)")


@dataclass(frozen=True)
class CoupledBoundState:
    lambda_b: float
    c1_b: float
    c2_b: float
    s_b: float


@dataclass(frozen=True)
class CoupledContinuum:
    lam: float
    w_plus: float
    c1_lambda: float
    c2_lambda: float
    s_lambda: float


@dataclass(frozen=True)
class BicReport:
    exists: bool
    lambda_star: float
    protected_state: tuple


@dataclass(frozen=True)
class ExcitationSpectrum:
    """|F_lambda|^2 samples plus the delta-function weight at lambda*.

    The BIC is not part of the continuum expansion, so its weight cannot
    appear as a sample; it is reported separately (zero without a BIC).
    """

    lambda_grid: np.ndarray
    values: np.ndarray
    bic_weight: float


def _secular(lam, xi1, xi2):
    return (np.pi * (xi1 + xi2) / (8.0 * np.sqrt(lam))
            + np.pi * np.sqrt(lam) / 4.0
            - (lam + xi1) * (lam + xi2))


def bound_states(xi1, xi2):
    """All bound solutions below the band, deepest last.

    Two roots exist when xi1 + xi2 < 0, one otherwise.  Finding a
    different count than that rule is an internal error, not a user
    mistake, hence RuntimeError.
    """
    hi = max(abs(xi1), abs(xi2)) + np.pi + 2.0
    s = xi1 + xi2
    expected = 2 if s < 0.0 else 1

    # sign-scan on a composite grid: log-spaced near zero where the
    # 1/sqrt(lam) term dominates, linear across the root scale.  As
    # the detuning sum approaches zero from below, the second root
    # sinks toward the band edge like min(|s|/2, (pi s/(8 xi1 xi2))^2),
    # so the log tail has to reach below that scale
    lo = 1e-24
    if s < 0.0:
        b_abs = 8.0 * abs(xi1 * xi2) / np.pi
        shallow = min(0.5 * abs(s), (abs(s) / max(b_abs, 1e-30)) ** 2)
        lo = max(1e-300, min(lo, 1e-2 * shallow))
    n_log = max(23, int(4.0 * np.log10(1e-2 / lo)))
    grid = np.concatenate([np.geomspace(lo, 1e-2, n_log),
                           np.linspace(1e-2, hi, 400)])
    vals = _secular(grid, xi1, xi2)
    roots = []
    for a, b, fa, fb in zip(grid[:-1], grid[1:], vals[:-1], vals[1:]):
        if fa == 0.0:
            roots.append(a)
        elif fa * fb < 0.0:
            roots.append(brentq(_secular, a, b, args=(xi1, xi2),
                                xtol=1e-300, rtol=8.9e-16, maxiter=200))
    if vals[-1] == 0.0:
        roots.append(grid[-1])
    if len(roots) != expected:
        raise RuntimeError(
            "secular root scan found %d bound states, expected %d for "
            "xi1+xi2=%g" % (len(roots), expected, s))

    out = []
    for lam in sorted(roots):
        resid = _secular(lam, xi1, xi2)
        scale = max(1.0, abs(xi1), abs(xi2)) ** 2
        # backward-error fallback: near the band edge the secular slope
        # is ~ 1/sqrt(lam) huge, so an absolute residual criterion would
        # reject perfectly converged roots (s/lam stays O(1) there,
        # which keeps this slope expression out of underflow)
        slope = abs(-(np.pi / 16.0) * (s / lam) / np.sqrt(lam)
                    + np.pi / (8.0 * np.sqrt(lam)) - (2.0 * lam + s))
        if abs(resid) > 1e-10 * scale and abs(resid) > 1e-12 * slope:
            raise RuntimeError("secular residual %.3e too large" % resid)
        if (abs(xi1 - xi2) < BIC_TOL
                and abs(lam + 0.5 * (xi1 + xi2)) < 1e-8 * np.sqrt(scale)):
            # at exact degeneracy with xi < 0 the antisymmetric pump
            # combination decouples and sits at lambda_b = -xi with no
            # continuum tail; the weight formula is 0/0 there, so use
            # its limit
            inv = 1.0 / np.sqrt(2.0)
            out.append(CoupledBoundState(lambda_b=lam, c1_b=inv,
                                         c2_b=-inv, s_b=0.0))
            continue
        # ratio form of pi/(16 lam^1.5) * (2 lam + s)^2: dividing before
        # squaring keeps shallow roots clear of intermediate underflow
        ratio = (2.0 * lam + xi1 + xi2) / lam ** 0.75
        s_b = ((lam + xi1) ** 2 + (lam + xi2) ** 2
               + np.pi / 16.0 * ratio * ratio)
        out.append(CoupledBoundState(
            lambda_b=lam,
            c1_b=(lam + xi2) / np.sqrt(s_b),
            c2_b=(lam + xi1) / np.sqrt(s_b),
            s_b=s_b,
        ))
    return out


def coupled_continuum(xi1, xi2, lam):
    """Continuum weights at energy lam >= 0 (rejecting the hole)."""
    lam_star = 0.5 * (xi1 + xi2)
    if lam < 0.0:
        raise ValueError("continuum energies start at the band edge 0")
    if lam == lam_star:
        raise ValueError(
            "continuum hole: no scattering solution exists at "
            "lambda = (xi1+xi2)/2")
    if lam == 0.0:
        return CoupledContinuum(lam=0.0, w_plus=0.0, c1_lambda=0.0,
                                c2_lambda=0.0, s_lambda=np.inf)
    denom = 2.0 * lam - (xi1 + xi2)
    w_plus = 8.0 * np.sqrt(lam) * (lam - xi1) * (lam - xi2) / denom
    s_lam = (np.pi ** 2 + w_plus ** 2) * denom ** 2 / (8.0 * np.sqrt(lam))
    return CoupledContinuum(
        lam=lam,
        w_plus=w_plus,
        c1_lambda=(lam - xi2) / np.sqrt(s_lam),
        c2_lambda=(lam - xi1) / np.sqrt(s_lam),
        s_lambda=s_lam,
    )


def detect_bic(xi1, xi2):
    lam_star = 0.5 * (xi1 + xi2)
    exists = abs(xi1 - xi2) < BIC_TOL and lam_star >= 0.0
    state = (1.0 / np.sqrt(2.0), -1.0 / np.sqrt(2.0)) if exists else ()
    return BicReport(exists=exists, lambda_star=lam_star,
                     protected_state=state)


def _bic_overlap(params):
    # projection of the initial state onto the antisymmetric (1,-1)/sqrt2
    return (np.cos(params.theta)
            - np.exp(1j * params.phi) * np.sin(params.theta)) / np.sqrt(2.0)


def excitation_spectrum(params, lambda_grid):
    """|F_lambda|^2 on the grid, hole-adjacent points dropped.

    Points inside the BIC tolerance window around lambda* are excluded
    (there is no continuum state to sample there); the returned grid
    reflects the exclusion.  The delta-function weight sitting at
    lambda* when a BIC exists is returned in bic_weight.
    """
    lam_star = 0.5 * (params.xi1 + params.xi2)
    grid = np.asarray(lambda_grid, dtype=float)
    keep = np.abs(grid - lam_star) >= BIC_TOL
    grid = grid[keep]
    ct, st = np.cos(params.theta), np.sin(params.theta)
    ph = np.exp(1j * params.phi)
    vals = np.empty(grid.size)
    for k, lam in enumerate(grid):
        cc = coupled_continuum(params.xi1, params.xi2, lam)
        vals[k] = abs(ct * cc.c1_lambda + ph * st * cc.c2_lambda) ** 2
    bic = detect_bic(params.xi1, params.xi2)
    weight = abs(_bic_overlap(params)) ** 2 if bic.exists else 0.0
    return ExcitationSpectrum(lambda_grid=grid, values=vals,
                              bic_weight=weight)


# ---------------------------------------------------------------------------
# continuum quadrature for the dynamics


def _pair_products(xi1, xi2):
    """The three real spectral densities c1^2, c1 c2, c2^2 of lambda."""

    def p11(lam):
        cc = coupled_continuum(xi1, xi2, lam)
        return cc.c1_lambda ** 2

    def p12(lam):
        cc = coupled_continuum(xi1, xi2, lam)
        return cc.c1_lambda * cc.c2_lambda

    def p22(lam):
        cc = coupled_continuum(xi1, xi2, lam)
        return cc.c2_lambda ** 2

    return p11, p12, p22


def _continuum_breakpoints(xi1, xi2, tail_tol):
    """Segment skeleton away from the hole, hole shells handled apart.

    Returns (parts, lam_star, h0): parts is a list of breakpoint lists
    that jointly cover [0, cutoff] minus the gap (lam_star - h0,
    lam_star + h0) when the hole lies inside the band; each part is
    integrated separately so no segment straddles the hole.
    """
    # the band-edge behaviour is sqrt(lam) (or 1/sqrt(lam) when the hole
    # sits exactly at the edge) so a short ladder at 0 is always cheap
    # insurance
    cutoff = powerlaw_cutoff(0.125, 2.5, tail_tol)
    lam_star = 0.5 * (xi1 + xi2)
    pts = set(edge_ladder(0.0, 0.01, 1e-10))
    pts.add(0.0)
    pts.add(50.0)
    pts.add(cutoff)
    v = 500.0
    while v < cutoff:
        pts.add(v)
        v *= 10.0
    for x in (xi1, xi2, lam_star):
        for off in (-0.5, -0.1, 0.1, 0.5):
            p = x + off
            if 1e-9 < p < 50.0:
                pts.add(p)
    if lam_star > 1e-9:
        # keep the gap inside the band when the hole sits near the edge
        h0 = min(1e-3 * max(1.0, abs(lam_star)), 0.5 * lam_star)
        pts = {p for p in pts if abs(p - lam_star) > h0}
        left = sorted(p for p in pts if p < lam_star) + [lam_star - h0]
        right = [lam_star + h0] + sorted(p for p in pts if p > lam_star)
        return [left, right], lam_star, h0
    return [sorted(pts)], lam_star, None


def _continuum_integrals(xi1, xi2, tau, epsabs=1e-9):
    """(I11, I12, I22): integral p_ij(lam) exp(-i lam tau) dlam over the band.

    The hole at lambda* is approached by geometric shells from both
    sides; shells keep being added (h -> h/10) until the latest pair
    contributes less than the tolerance, which bounds what the remaining
    gap can hold.  This is where the near-BIC resonance weight lives, so
    the loop is the difference between catching the protected population
    and silently losing it.
    """
    funcs = _pair_products(xi1, xi2)
    parts, lam_star, h0 = _continuum_breakpoints(xi1, xi2, epsabs / 10.0)
    vals = []
    errs = 0.0
    for f in funcs:
        v = 0.0 + 0.0j
        for pts in parts:
            vp, e = fourier_integral(f, tau, pts, epsabs=epsabs / 4.0)
            v += vp
            errs += e
        vals.append(v)

    if h0 is not None:
        h = h0
        for _ in range(40):
            hin = h / 10.0
            shell_mag = 0.0
            for k, f in enumerate(funcs):
                for a, b in ((lam_star - h, lam_star - hin),
                             (lam_star + hin, lam_star + h)):
                    v, e = fourier_integral(f, tau, [a, b],
                                            epsabs=epsabs / 8.0)
                    vals[k] += v
                    errs += e
                    shell_mag = max(shell_mag, abs(v))
            h = hin
            if shell_mag < epsabs / 4.0:
                break
        else:
            raise RuntimeError(
                "hole shells did not converge; peak weight at lambda* "
                "not resolved")
        # what remains inside the final gap is bounded by the peak value
        # times the gap width, both shrinking with h
        errs += 6.0 * shell_mag
    check_tolerance(errs, 50.0 * epsabs, "coupled continuum integral")
    return vals[0], vals[1], vals[2]


def coupled_pump_population(params, tau_grid, epsabs=1e-9):
    """N_+(tau) = |C_1|^2 + |C_2|^2 on the given time grid.

    Each C_i collects the bound states (rotating as exp(+i lambda_B
    tau)), the continuum integral, and, at exact degeneracy, the
    non-decaying BIC component.
    """
    taus = np.asarray(tau_grid, dtype=float)
    if taus.ndim != 1 or taus.size == 0:
        raise ValueError("tau_grid must be a nonempty 1D sequence")
    xi1, xi2 = params.xi1, params.xi2
    ct, st = np.cos(params.theta), np.sin(params.theta)
    ph = np.exp(1j * params.phi)

    bounds = bound_states(xi1, xi2)
    bic = detect_bic(xi1, xi2)
    f_bic = _bic_overlap(params) if bic.exists else 0.0

    out = np.empty(taus.size)
    for k, tau in enumerate(taus):
        i11, i12, i22 = _continuum_integrals(xi1, xi2, tau, epsabs)
        c1 = ct * i11 + ph * st * i12
        c2 = ct * i12 + ph * st * i22
        for b in bounds:
            f_b = ct * b.c1_b + ph * st * b.c2_b
            rot = np.exp(1j * b.lambda_b * tau)
            c1 += b.c1_b * f_b * rot
            c2 += b.c2_b * f_b * rot
        if bic.exists:
            rot = np.exp(-1j * bic.lambda_star * tau)
            c1 += bic.protected_state[0] * f_bic * rot
            c2 += bic.protected_state[1] * f_bic * rot
        out[k] = abs(c1) ** 2 + abs(c2) ** 2
    return out


def completeness(params, epsabs=1e-9):
    """Total weight of the initial state across the eigenbasis.

    Bound projections + band integral of |F_lambda|^2 + BIC weight;
    unity by completeness of the spectral decomposition.
    """
    xi1, xi2 = params.xi1, params.xi2
    ct, st = np.cos(params.theta), np.sin(params.theta)
    cphi = np.cos(params.phi)
    i11, i12, i22 = _continuum_integrals(xi1, xi2, 0.0, epsabs)
    total = (ct ** 2 * i11.real + st ** 2 * i22.real
             + 2.0 * ct * st * cphi * i12.real)
    for b in bound_states(xi1, xi2):
        total += abs(ct * b.c1_b + np.exp(1j * params.phi) * st * b.c2_b) ** 2
    bic = detect_bic(xi1, xi2)
    if bic.exists:
        total += abs(_bic_overlap(params)) ** 2
    return total


# ---------------------------------------------------------------------------
# finite-band cross-validation


def build_coupled_discrete(xi1, xi2, epsilon, p_max=None, check_band=True):
    """Finite matrix twin: two pump rows over one shared signal band.

    Layout: index 0 = pump of waveguide 1, index 1 = pump of waveguide
    2, then the band p = 0..p_max.  Couplings are eps^(1/2)/2, with the
    p = 0 entry reduced by sqrt(2) for the same operator-ordering reason
    as in the single-waveguide matrix.
    """
    from fanopdc.discrete import DiscreteHamiltonian, default_p_max

    if epsilon <= 0.0:
        raise ValueError("epsilon must be positive")
    xi_scale = max(abs(xi1), abs(xi2))
    if p_max is None:
        p_max = default_p_max(xi_scale, epsilon)
    p_max = int(p_max)
    if p_max < 1:
        raise ValueError("p_max must be at least 1")
    if check_band and (epsilon * p_max) ** 2 < max(4.0 * xi_scale, 16.0):
        raise ValueError(
            "band edge (epsilon*p_max)^2 = %.3g does not cover the "
            "dynamics scale %.3g; raise p_max or pass check_band=False"
            % ((epsilon * p_max) ** 2, max(4.0 * xi_scale, 16.0)))

    dim = 2 + p_max + 1
    h = np.zeros((dim, dim))
    h[0, 0] = xi1
    h[1, 1] = xi2
    coup = 0.5 * np.sqrt(epsilon)
    for p in range(p_max + 1):
        j = 2 + p
        h[j, j] = (epsilon * p) ** 2
        c = coup / np.sqrt(2.0) if p == 0 else coup
        h[0, j] = h[j, 0] = c
        h[1, j] = h[j, 1] = c
    labels = ["pump1", "pump2"] + ["s%d" % p for p in range(p_max + 1)]
    return DiscreteHamiltonian(labels=labels, matrix=h)


def coupled_pump_state(dim, theta, phi):
    """Initial vector cos(theta) e_0 + e^{i phi} sin(theta) e_1."""
    if dim < 3:
        raise ValueError("need two pump rows plus at least one signal mode")
    v = np.zeros(dim, dtype=complex)
    v[0] = np.cos(theta)
    v[1] = np.exp(1j * phi) * np.sin(theta)
    return v
