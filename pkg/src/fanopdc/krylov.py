"""Krylov short-time exponential propagation for large sparse systems.

exp(-i H dt) acting on a vector is approximated in the Lanczos subspace
span{v, Hv, ..., H^(m-1) v}; the tridiagonal projection is exponentiated
by exact eigendecomposition.  Steps adapt: the residual-style estimate
beta_m * |last subspace amplitude| must stay below the per-step
tolerance or the step is halved and retried.  Hermitian input is
assumed, not checked (the builders construct Hermitian matrices).
"""

import numpy as np
from scipy.linalg import eigh_tridiagonal

_KRYLOV_DIM = 32
_MIN_STEP = 1e-8


class PropagationError(RuntimeError):
    """The stepper could not reach the requested per-step tolerance."""


def _lanczos_step(matrix, psi, dt, m):
    """One exp(-i*matrix*dt) psi approximation, with an error estimate."""
    nrm = np.linalg.norm(psi)
    v = psi / nrm
    n = psi.shape[0]
    m = min(m, n)
    basis = np.empty((m, n), dtype=complex)
    alphas = np.empty(m)
    betas = np.empty(m)
    basis[0] = v
    w = matrix @ v
    alphas[0] = np.vdot(v, w).real
    w = w - alphas[0] * v
    k = 1
    beta_tail = 0.0
    for j in range(1, m):
        beta = np.linalg.norm(w)
        if beta < 1e-13:
            # happy breakdown: the Krylov space is exact
            break
        basis[j] = w / beta
        betas[j - 1] = beta
        w = matrix @ basis[j] - beta * basis[j - 1]
        alphas[j] = np.vdot(basis[j], w).real
        w = w - alphas[j] * basis[j]
        k = j + 1
        beta_tail = np.linalg.norm(w)

    evals, evecs = eigh_tridiagonal(alphas[:k], betas[:k - 1])
    u = evecs @ (np.exp(-1j * evals * dt) * evecs[0])
    out = nrm * (basis[:k].T @ u)
    err = beta_tail * abs(u[-1]) if k == m else 0.0
    return out, err


def propagate(matrix, psi0, tau_grid, tol=1e-9, krylov_dim=_KRYLOV_DIM):
    """Amplitudes of exp(-i*matrix*tau) psi0 at each grid time.

    tau_grid must ascend and start at >= 0; psi0 is taken as the state
    at tau = 0.  Returns (amplitudes, norm_error, step_error) where
    norm_error is the worst deviation of the state norm from its
    initial value and step_error accumulates the per-step estimates.
    """
    taus = np.asarray(tau_grid, dtype=float)
    if taus.ndim != 1 or taus.size == 0:
        raise ValueError("tau_grid must be a nonempty 1D sequence")
    if np.any(np.diff(taus) <= 0.0) or taus[0] < 0.0:
        raise ValueError("tau_grid must be strictly increasing and >= 0")

    psi = np.asarray(psi0, dtype=complex)
    nrm0 = np.linalg.norm(psi)
    amps = np.empty((taus.size, psi.size), dtype=complex)
    t = 0.0
    dt_try = 0.1
    step_error = 0.0
    norm_error = 0.0
    for idx, target in enumerate(taus):
        while t < target:
            dt = min(dt_try, target - t)
            out, err = _lanczos_step(matrix, psi, dt, krylov_dim)
            if err > tol:
                if dt <= _MIN_STEP:
                    raise PropagationError(
                        "step error %.3e above tolerance %.3e at the "
                        "minimum step size" % (err, tol))
                dt_try = 0.5 * dt
                continue
            psi = out
            t += dt
            step_error += err
            if err < 0.05 * tol and dt == dt_try:
                dt_try = 1.5 * dt
        amps[idx] = psi
        norm_error = max(norm_error, abs(np.linalg.norm(psi) - nrm0))
    return amps, norm_error, step_error
