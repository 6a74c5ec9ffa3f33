"""Reference implementation of the sparse-assembly hot loop.

The compiled twin in _kernels_cy.pyx follows this module line for line;
any change here must be mirrored there.  States arrive as a flat photon
buffer (per state: signal momenta ascending, then pump momenta
ascending) plus integer keys that encode each state uniquely, so both
lanes share one calling convention.

Key encoding: each photon momentum x becomes the digit x + m_max + 1 in
base 2*m_max + 2, the signal digits come first, then a zero separator
digit, then the pump digits.  Python integers make this exact at any
size; the compiled lane additionally requires the key to fit in 62 bits
and the dispatcher falls back here when it does not.
"""

import numpy as np


def pack_key(signal, pump, m_max):
    """Integer key of a canonical (signal, pump) multiset pair."""
    base = 2 * m_max + 2
    shift = m_max + 1
    key = 0
    for x in signal:
        key = key * base + (x + shift)
    key *= base
    for x in pump:
        key = key * base + (x + shift)
    return key


def assemble_offdiag(buf, offs, nsig, keys, m_max, sqrt_eps):
    """COO triplets of every downconversion edge, both orientations.

    buf, offs, nsig describe the states (see module docstring); keys[i]
    is the packed key of state i.  Each edge is discovered once, from
    the side with more pump photons, and emitted symmetrically.  A
    missing target means the basis is not closed under the coupling,
    which is an assembly bug, not a user error.
    """
    buf = [int(v) for v in buf]
    offs = [int(v) for v in offs]
    nsig = [int(v) for v in nsig]
    index = {int(k): i for i, k in enumerate(keys)}
    base = 2 * m_max + 2
    shift = m_max + 1
    rows, cols, vals = [], [], []

    for i in range(len(nsig)):
        s0 = offs[i]
        s1 = s0 + nsig[i]
        p1 = offs[i + 1]
        if s1 == p1:
            continue
        sig = buf[s0:s1]
        pump = buf[s1:p1]
        k = 0
        while k < len(pump):
            ell = pump[k]
            mult = 1
            while k + mult < len(pump) and pump[k + mult] == ell:
                mult += 1
            for mt in range(max(-m_max, ell - m_max), ell // 2 + 1):
                nt = ell - mt
                # signal multiset with the new pair, kept ascending
                merged = list(sig)
                merged.insert(_insert_at(merged, mt), mt)
                merged.insert(_insert_at(merged, nt), nt)
                key = 0
                for x in merged:
                    key = key * base + (x + shift)
                key *= base
                skipped = False
                for x in pump:
                    if x == ell and not skipped:
                        skipped = True
                        continue
                    key = key * base + (x + shift)
                j = index.get(key)
                if j is None:
                    raise ValueError(
                        "downconversion target missing from basis "
                        "(state %d, pump %d -> pair (%d, %d))"
                        % (i, ell, mt, nt))
                n_mt = sig.count(mt)
                if mt == nt:
                    factor = 0.5 * np.sqrt(
                        mult * (n_mt + 1.0) * (n_mt + 2.0))
                else:
                    n_nt = sig.count(nt)
                    factor = np.sqrt(mult * (n_mt + 1.0) * (n_nt + 1.0))
                val = factor * sqrt_eps
                rows.append(i)
                cols.append(j)
                vals.append(val)
                rows.append(j)
                cols.append(i)
                vals.append(val)
            k += mult

    return (np.asarray(rows, dtype=np.int64),
            np.asarray(cols, dtype=np.int64),
            np.asarray(vals, dtype=np.float64))


def _insert_at(seq, value):
    lo, hi = 0, len(seq)
    while lo < hi:
        mid = (lo + hi) // 2
        if seq[mid] < value:
            lo = mid + 1
        else:
            hi = mid
    return lo
