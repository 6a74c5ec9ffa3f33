"""Parameter normalization and experimental figures of merit.

Physical inputs are the nonlinear coupling rate g, the quadratic
dispersion rates d_a (signal) and d_b (pump), the phase-mismatch
detuning delta, the group-velocity-mismatch rate mu (all angular rates
in 1/s) and the quantization window length L in meters.  Every solver
downstream consumes only the dimensionless combinations

    kappa = (g**4 / (2 d_a))**(1/3)     collective rate, units of 1/s
    xi    = delta / kappa               normalized detuning
    eps   = (2 d_a / g)**(2/3)          window-size parameter, ~ 1/L
    zeta  = eps * L                     signal correlation length, m
    gamma = mu / (2 d_a g**2)**(1/3)    normalized group-velocity mismatch
    beta  = d_b / d_a                   dispersion ratio

Only d_a > 0 is analyzed directly; a negative d_a input is mapped onto
the equivalent positive-d_a problem (delta and mu flip sign, evolution
runs backwards in time) and the returned parameter set carries a
``time_reversed`` flag so callers can negate their time grids.
"""

from dataclasses import dataclass

import numpy as np

# CODATA 2018 values, fixed here so figure-of-merit outputs are
# reproducible across environments.
HBAR = 1.054571817e-34  # J s
C_LIGHT = 2.99792458e8  # m/s


@dataclass(frozen=True)
class PhysicalParams:
    """Raw waveguide parameters, SI units throughout."""

    g: float
    d_a: float
    d_b: float = 0.0
    delta: float = 0.0
    mu: float = 0.0
    L: float = 1.0


@dataclass(frozen=True)
class NormalizedParams:
    """Dimensionless parameter set consumed by the solvers.

    ``time_reversed`` is True when the input had d_a < 0; in that case
    the fields describe the sign-flipped problem and populations at
    time tau of the original problem equal populations at tau of the
    remapped one (amplitudes pick up conjugation, which no observable
    here depends on).
    """

    kappa: float
    xi: float
    epsilon: float
    zeta: float
    gamma: float
    beta: float
    time_reversed: bool = False


@dataclass(frozen=True)
class ExperimentParams:
    """Figure-of-merit inputs, SI units.

    eta is the SHG slope conversion efficiency in 1/(W m^2).  Quoted
    experimental values in %/(W cm^2) convert via a factor 1e2 (done by
    the CLI, not here).  v is the signal group velocity; it is carried
    for completeness of the parameter record but does not enter the
    characteristic-length formula.
    """

    eta: float
    lambda_carrier: float
    gvd: float
    v: float = C_LIGHT


def normalize(p):
    """Map PhysicalParams onto NormalizedParams.

    Raises ValueError for d_a = 0 (singular normalization) and a
    distinct ValueError for g = 0 (no nonlinearity, kappa would vanish
    and xi be undefined).
    """
    if p.g == 0.0:
        raise ValueError("g = 0: no nonlinearity, normalized units undefined")
    if p.d_a == 0.0:
        raise ValueError("d_a = 0: normalization is singular (epsilon undefined)")
    if p.L <= 0.0:
        raise ValueError("window length L must be positive")

    d_a, delta, mu = p.d_a, p.delta, p.mu
    time_reversed = False
    if d_a < 0.0:
        # Equivalent positive-dispersion problem: flip delta and mu,
        # run time backwards.  beta = d_b/d_a is invariant under the
        # joint sign flip of d_a and d_b.
        d_a, delta, mu = -d_a, -delta, -mu
        time_reversed = True

    g = abs(p.g)
    kappa = (g**4 / (2.0 * d_a)) ** (1.0 / 3.0)
    epsilon = (2.0 * d_a / g) ** (2.0 / 3.0)
    gamma = mu / (2.0 * d_a * g**2) ** (1.0 / 3.0)
    return NormalizedParams(
        kappa=kappa,
        xi=delta / kappa,
        epsilon=epsilon,
        zeta=epsilon * p.L,
        gamma=gamma,
        beta=p.d_b / p.d_a,
        time_reversed=time_reversed,
    )


def l_pdc(e):
    """Characteristic propagation length for single-photon-pump PDC.

        L_pdc = (lambda^2 |k_a''| / (4 hbar^2 c^2 eta^2))**(1/3)

    with eta the SHG slope efficiency in 1/(W m^2).  Stronger
    nonlinearity (larger eta) shortens the length like eta^(-2/3).
    """
    if not (e.eta > 0.0 and e.lambda_carrier > 0.0 and e.gvd > 0.0):
        raise ValueError("eta, lambda_carrier and gvd must all be positive")
    num = e.lambda_carrier**2 * e.gvd
    den = 4.0 * HBAR**2 * C_LIGHT**2 * e.eta**2
    return (num / den) ** (1.0 / 3.0)


def shg_mean_field(alpha0, g, t):
    """Mean-field amplitudes for degenerate upconversion of a coherent seed.

    Returns (alpha, beta) at time t for signal seed amplitude alpha0:

        alpha(t) = alpha0 sech(alpha0 g t / sqrt(2))
        beta(t)  = -i (alpha0/sqrt(2)) tanh(alpha0 g t / sqrt(2))

    Photon number is conserved exactly: |alpha|^2 + 2|beta|^2 = alpha0^2.
    t may be an array.
    """
    if alpha0 < 0.0:
        raise ValueError("alpha0 must be a nonnegative real amplitude")
    arg = alpha0 * g * np.asarray(t, dtype=float) / np.sqrt(2.0)
    alpha = alpha0 / np.cosh(arg)
    beta = -1j * (alpha0 / np.sqrt(2.0)) * np.tanh(arg)
    if np.ndim(t) == 0:
        return complex(alpha), complex(beta)
    return alpha.astype(complex), beta
