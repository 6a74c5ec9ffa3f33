"""Oscillatory and principal-value quadrature on physics-chosen segments.

Every spectral integral in this package has the Fourier form

    I(tau) = integral f(lam) exp(-i lam tau) dlam

with f real and smooth away from known features (a resonance peak, a
band edge, a spectral hole) whose locations are available in closed
form.  The strategy throughout: the caller supplies a breakpoint list
isolating those features, and each segment goes to QUADPACK's
oscillatory rule (cos/sin weights), whose Chebyshev-moment treatment
makes the cost insensitive to the number of cycles on a segment.  Error
estimates are summed across segments and can be checked against a
contract tolerance with `check_tolerance`.

Principal-value integrals use the Cauchy-weight rule on a symmetric
window around the pole; the caller handles the remainder of the range
with `fourier_integral` as usual.
"""

import numpy as np
from scipy.integrate import quad


class QuadratureError(RuntimeError):
    """An integral could not be certified to the requested tolerance.

    Carries the error bound actually achieved so callers can report how
    far off the computation landed.
    """

    def __init__(self, message, achieved=None, requested=None):
        super().__init__(message)
        self.achieved = achieved
        self.requested = requested


def check_tolerance(err, epsabs, what):
    if err > epsabs:
        raise QuadratureError(
            "%s: quadrature error estimate %.3e exceeds the requested %.3e"
            % (what, err, epsabs),
            achieved=err,
            requested=epsabs,
        )


def _quad(f, a, b, **kw):
    # full_output suppresses the convergence warning; the unconverged
    # error estimate still comes back and is handled by the caller.
    out = quad(f, a, b, full_output=1, **kw)
    return out[0], out[1]


def complex_quad(f, a, b, epsabs=1e-11, limit=400):
    """Adaptive quadrature of a complex-valued integrand on [a, b].

    Thin wrapper over QUADPACK's complex path; returns (value, error).
    For strongly oscillatory integrands prefer `fourier_integral` with
    the oscillation factored out.
    """
    out = quad(f, a, b, complex_func=True, full_output=1,
               epsabs=epsabs, epsrel=1e-12, limit=limit)
    err = out[1]
    if isinstance(err, complex):
        err = abs(err.real) + abs(err.imag)
    return out[0], err


def fourier_integral(f, tau, breakpoints, epsabs=1e-11, limit=400):
    """integral of f(lam) exp(-i lam tau) over [breakpoints[0], breakpoints[-1]].

    f must be real-valued and smooth on each open segment.  The final
    breakpoint may be np.inf only when tau = 0 (no oscillation).  For
    tau < 0 the conjugate of the tau > 0 value is returned.

    Returns (value, error_estimate); the estimate is the sum of the
    per-segment QUADPACK bounds and is not checked here.
    """
    pts = [float(b) for b in breakpoints]
    if len(pts) < 2:
        raise ValueError("need at least two breakpoints")
    if any(b <= a for a, b in zip(pts, pts[1:])):
        raise ValueError("breakpoints must be strictly increasing")
    if tau < 0.0:
        val, err = fourier_integral(f, -tau, pts, epsabs=epsabs, limit=limit)
        return np.conj(val), err

    per_seg = epsabs / (len(pts) - 1)
    total = 0.0 + 0.0j
    errsum = 0.0
    for a, b in zip(pts[:-1], pts[1:]):
        if tau == 0.0:
            v, e = _quad(f, a, b, epsabs=per_seg, epsrel=1e-12, limit=limit)
            total += v
            errsum += e
        else:
            if not np.isfinite(b):
                raise ValueError("an infinite segment requires tau = 0")
            re, e1 = _quad(f, a, b, weight="cos", wvar=tau,
                           epsabs=per_seg, epsrel=1e-12, limit=limit)
            im, e2 = _quad(f, a, b, weight="sin", wvar=tau,
                           epsabs=per_seg, epsrel=1e-12, limit=limit)
            total += re - 1j * im
            errsum += e1 + e2
    return total, errsum


def pv_fourier_integral(f, tau, pole, halfwidth, epsabs=1e-11, limit=400):
    """Principal value of integral f(lam) exp(-i lam tau) / (lam - pole)
    over [pole - halfwidth, pole + halfwidth].

    The oscillation is folded into the numerator, so keep halfwidth
    moderate when tau is large (a few cycles across the window is fine).
    Returns (value, error_estimate).
    """
    if halfwidth <= 0.0:
        raise ValueError("halfwidth must be positive")
    if tau < 0.0:
        val, err = pv_fourier_integral(f, -tau, pole, halfwidth, epsabs, limit)
        return np.conj(val), err
    a, b = pole - halfwidth, pole + halfwidth
    re, e1 = _quad(lambda x: f(x) * np.cos(x * tau), a, b,
                   weight="cauchy", wvar=pole,
                   epsabs=epsabs, epsrel=1e-12, limit=limit)
    im, e2 = _quad(lambda x: f(x) * np.sin(x * tau), a, b,
                   weight="cauchy", wvar=pole,
                   epsabs=epsabs, epsrel=1e-12, limit=limit)
    return re - 1j * im, e1 + e2


def powerlaw_cutoff(coeff, power, tol):
    """Cutoff R making integral_R^inf coeff * lam^(-power) dlam < tol."""
    if power <= 1.0:
        raise ValueError("tail must decay faster than 1/lam")
    return (coeff / (tol * (power - 1.0))) ** (1.0 / (power - 1.0))


def edge_ladder(edge, far, inner, ratio=10.0):
    """Breakpoints accumulating geometrically at `edge`, starting at `far`.

    Successive distances to the edge shrink by `ratio` until they fall
    below `inner`; the edge itself is excluded.  Useful for integrable
    singularities (band-edge logs, sharp spectral holes).  Returned
    sorted ascending.
    """
    d = abs(far - edge)
    if d <= inner:
        return [float(far)]
    sgn = 1.0 if far > edge else -1.0
    out = []
    while d > inner:
        out.append(edge + sgn * d)
        d /= ratio
    out.append(edge + sgn * inner)
    out.sort()
    return out
