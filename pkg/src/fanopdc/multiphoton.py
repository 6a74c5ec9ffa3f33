"""Exact sparse dynamics of N pump photons downconverting in one band.

Each basis state is a pair of multisets: signal momenta m (one entry
per photon) and pump momenta l.  Within a sector both the photon-number
combination N = J + |signal|/2 and the total momentum M are conserved,
so the Hamiltonian block-diagonalizes over (N, M) and a sector basis is
finite once |m|, |l| <= m_max.

Diagonal energies, per photon and in units of the collective rate:
(epsilon^2/2) m^2 for signal, xi + gamma*epsilon*l + (beta*epsilon^2/2)
l^2 for pump.  Off-diagonal elements connect states whose pump count
differs by one, with bosonic multiplicity factors computed either by
the compiled kernel lane or its pure-Python twin (see _kernels).

The dc subspace keeps only pump photons at l = 0 and signal photons in
(p, -p) pairs; it exists at M = 0 only and is exponentially smaller,
which is what makes N > 3 reachable at all.
"""

from collections import Counter
from dataclasses import dataclass, field
from itertools import chain, combinations_with_replacement

import numpy as np
from scipy.sparse import coo_matrix, diags

from fanopdc import _kernels, _kernels_py, krylov
from fanopdc.discrete import EvolutionResult

DIM_CAP = 3_000_000


@dataclass(frozen=True)
class BasisState:
    """One occupation configuration; multisets stored sorted ascending."""

    signal: tuple
    pump: tuple

    def __post_init__(self):
        object.__setattr__(self, "signal", tuple(sorted(self.signal)))
        object.__setattr__(self, "pump", tuple(sorted(self.pump)))


@dataclass(frozen=True)
class Basis:
    N: int
    M: int
    m_max: int
    dc_only: bool
    states: list
    index: dict
    pump_counts: np.ndarray = field(repr=False)

    @property
    def dim(self):
        return len(self.states)


@dataclass(frozen=True)
class SparseHamiltonian:
    dim: int
    matrix: object


def default_m_max(xi, epsilon, n_pump=1):
    """Cutoff covering the pair resonance; doubled for N >= 3.

    Unlike the single-photon default this does not widen the band
    further, because sector dimensions grow like m_max^(2N-1); runs that
    need certified accuracy should do an explicit convergence check
    against a larger cutoff instead.
    """
    base = int(np.ceil(np.sqrt(max(4.0 * abs(xi), 16.0)) / epsilon))
    return 2 * base if n_pump >= 3 else base


def _bounded_multisets(count, lo, hi, total):
    """Nondecreasing tuples of `count` ints in [lo, hi] summing to total."""
    if count == 0:
        if total == 0:
            yield ()
        return
    for v in range(lo, hi + 1):
        rest = total - v
        if rest < (count - 1) * v:
            break
        if rest > (count - 1) * hi:
            continue
        for tail in _bounded_multisets(count - 1, v, hi, rest):
            yield (v,) + tail


def _energy_key(ms):
    return tuple(sorted(((abs(x), x) for x in ms)))


def enumerate_basis(N, M, m_max, dc_only=False, dim_cap=DIM_CAP):
    """All states of the (N, M) sector, canonically ordered.

    Order: remaining pump photons J descending (so the all-pump state
    comes first and the N = 1 sector lays out exactly like the
    single-photon chain), then pump and signal multisets by increasing
    kinetic energy.  Enumeration refuses once dim_cap states are found,
    reporting the count reached.
    """
    if N < 1:
        raise ValueError("N must be at least 1")
    if m_max < 1:
        raise ValueError("m_max must be at least 1")
    if dc_only and M != 0:
        raise ValueError("the dc subspace exists only in the M = 0 sector")

    found = []
    for J in range(N, -1, -1):
        n_pairs = N - J
        if dc_only:
            pumps = [(0,) * J]
        else:
            pumps = combinations_with_replacement(range(-m_max, m_max + 1), J)
        for pump in pumps:
            if dc_only:
                sig_iter = (
                    tuple(sorted(chain.from_iterable((p, -p) for p in ps)))
                    for ps in combinations_with_replacement(
                        range(m_max + 1), n_pairs))
            else:
                sig_iter = _bounded_multisets(
                    2 * n_pairs, -m_max, m_max, M - sum(pump))
            for sig in sig_iter:
                found.append((N - J, _energy_key(pump), _energy_key(sig),
                              sig, pump))
                if len(found) > dim_cap:
                    raise ValueError(
                        "sector dimension exceeds the cap: at least %d "
                        "states (dim_cap=%d)" % (len(found), dim_cap))
    found.sort(key=lambda rec: rec[:3])

    states = [BasisState(signal=sig, pump=pump) for *_, sig, pump in found]
    index = {(st.signal, st.pump): i for i, st in enumerate(states)}
    if len(index) != len(states):
        raise RuntimeError("duplicate states in enumeration")
    pump_counts = np.fromiter((len(st.pump) for st in states),
                              dtype=np.int32, count=len(states))
    return Basis(N=N, M=M, m_max=m_max, dc_only=dc_only, states=states,
                 index=index, pump_counts=pump_counts)


def transition_amplitude(state_a, state_b):
    """Downconversion matrix element between two states, in units of
    sqrt(epsilon) (the builder multiplies the epsilon dependence in).

    Nonzero only when the pump counts differ by one and the state with
    fewer pump photons carries exactly the extra signal pair (m, n)
    with m + n equal to the removed pump momentum.  Zero otherwise,
    including for states from different sectors.
    """
    if abs(len(state_a.pump) - len(state_b.pump)) != 1:
        return 0.0
    hi, lo = ((state_a, state_b) if len(state_a.pump) > len(state_b.pump)
              else (state_b, state_a))
    pdiff = Counter(hi.pump)
    pdiff.subtract(lo.pump)
    extra = [k for k, c in pdiff.items() if c != 0]
    if len(extra) != 1 or pdiff[extra[0]] != 1:
        return 0.0
    ell = extra[0]
    sdiff = Counter(lo.signal)
    sdiff.subtract(hi.signal)
    if any(c < 0 for c in sdiff.values()):
        return 0.0
    pair = sorted(sdiff.elements())
    if len(pair) != 2 or pair[0] + pair[1] != ell:
        return 0.0
    mt, nt = pair
    mult = hi.pump.count(ell)
    n_mt = hi.signal.count(mt)
    if mt == nt:
        return 0.5 * np.sqrt(mult * (n_mt + 1.0) * (n_mt + 2.0))
    n_nt = hi.signal.count(nt)
    return float(np.sqrt(mult * (n_mt + 1.0) * (n_nt + 1.0)))


def _flat_buffers(basis):
    dim = basis.dim
    counts = np.fromiter(
        (len(st.signal) + len(st.pump) for st in basis.states),
        dtype=np.int64, count=dim)
    offs = np.zeros(dim + 1, dtype=np.int64)
    np.cumsum(counts, out=offs[1:])
    buf = np.empty(offs[-1], dtype=np.int32)
    nsig = np.empty(dim, dtype=np.int32)
    for i, st in enumerate(basis.states):
        o = offs[i]
        ns = len(st.signal)
        buf[o:o + ns] = st.signal
        buf[o + ns:offs[i + 1]] = st.pump
        nsig[i] = ns
    return buf, offs, nsig


def build_hamiltonian(basis, xi, gamma, beta, epsilon, lane=None):
    """Sector Hamiltonian in units of the collective rate, CSR storage.

    lane overrides the kernel selection ("cython" or "python"); by
    default the FANOPDC_KERNELS environment variable decides.
    """
    if epsilon <= 0.0:
        raise ValueError("epsilon must be positive")
    buf, offs, nsig = _flat_buffers(basis)

    # per-photon diagonal, summed per state
    x = buf.astype(np.float64)
    pos = np.arange(buf.size, dtype=np.int64)
    state_of = np.searchsorted(offs[1:], pos, side="right")
    is_signal = pos < (offs[state_of] + nsig[state_of])
    w = np.where(is_signal,
                 0.5 * epsilon ** 2 * x ** 2,
                 xi + gamma * epsilon * x + 0.5 * beta * epsilon ** 2 * x ** 2)
    diag = np.add.reduceat(w, offs[:-1])

    keys = [_kernels_py.pack_key(st.signal, st.pump, basis.m_max)
            for st in basis.states]
    packable = (max(keys) < 2 ** 62) if keys else True
    kernel = _kernels.select_lane(packable, override=lane)
    if kernel is _kernels_py:
        key_arr = keys
    else:
        key_arr = np.asarray(keys, dtype=np.int64)
    rows, cols, vals = kernel.assemble_offdiag(
        buf, offs, nsig, key_arr, basis.m_max, float(np.sqrt(epsilon)))

    mat = coo_matrix((vals, (rows, cols)),
                     shape=(basis.dim, basis.dim)).tocsr()
    mat = mat + diags(diag, format="csr")
    return SparseHamiltonian(dim=basis.dim, matrix=mat)


def initial_pump_index(basis):
    """Index of the all-pump state |b_0^N>, the standard launch state."""
    key = ((), (0,) * basis.N)
    if key not in basis.index:
        raise ValueError("basis does not contain the all-pump dc state")
    return basis.index[key]


def evolve_sparse(ham, initial, tau_grid, tol=1e-9):
    """Krylov propagation; initial may be a basis index or a vector."""
    matrix = ham.matrix if isinstance(ham, SparseHamiltonian) else ham
    dim = matrix.shape[0]
    if np.isscalar(initial):
        psi0 = np.zeros(dim, dtype=complex)
        psi0[int(initial)] = 1.0
    else:
        psi0 = np.asarray(initial, dtype=complex)
        if abs(np.linalg.norm(psi0) - 1.0) > 1e-12:
            raise ValueError("initial vector must be normalized")
    taus = np.asarray(tau_grid, dtype=float)
    amps, norm_error, step_error = krylov.propagate(matrix, psi0, taus,
                                                    tol=tol)
    if norm_error > 1e-8:
        raise krylov.PropagationError(
            "norm drift %.3e exceeds the 1e-8 propagation contract"
            % norm_error)
    return EvolutionResult(tau_grid=taus, amplitudes=amps,
                           norm_error=norm_error, step_error=step_error)


def pump_mode_populations(state_vec, basis):
    """Expected pump photon number per momentum index l."""
    amps2 = np.abs(np.asarray(state_vec)) ** 2
    pops = {ell: 0.0 for ell in range(-basis.m_max, basis.m_max + 1)}
    for a2, st in zip(amps2, basis.states):
        if a2 == 0.0:
            continue
        for ell in st.pump:
            pops[ell] += a2
    return pops


def pump_photon_number(state_vec, basis):
    """Total pump number expectation <N_b>."""
    amps2 = np.abs(np.asarray(state_vec)) ** 2
    return float(amps2 @ basis.pump_counts)


def number_expectations(state_vec, basis):
    """(<N_hat>, <M_hat>): conserved photon-number and momentum charges.

    N_hat counts a pump photon as one and a signal photon as one half,
    so both stay constant along any trajectory in a fixed sector.
    """
    amps2 = np.abs(np.asarray(state_vec)) ** 2
    n_exp = 0.0
    m_exp = 0.0
    for a2, st in zip(amps2, basis.states):
        n_exp += a2 * (len(st.pump) + 0.5 * len(st.signal))
        m_exp += a2 * (sum(st.signal) + sum(st.pump))
    return n_exp, m_exp
