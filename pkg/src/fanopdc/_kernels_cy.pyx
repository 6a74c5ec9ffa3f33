# cython: boundscheck=False, wraparound=False, cdivision=False
"""Compiled twin of _kernels_py.assemble_offdiag.

Same calling convention and same emission order as the reference lane;
keys must fit int64 (the dispatcher guarantees this).  cdivision stays
off so that ell // 2 keeps Python floor semantics for negative pump
momenta.
"""

from cython.operator cimport dereference as deref
from libc.math cimport sqrt
from libcpp.unordered_map cimport unordered_map
from libcpp.vector cimport vector

import numpy as np

cimport numpy as cnp

cnp.import_array()


def assemble_offdiag(cnp.int32_t[::1] buf, cnp.int64_t[::1] offs,
                     cnp.int32_t[::1] nsig, cnp.int64_t[::1] keys,
                     long m_max, double sqrt_eps):
    cdef Py_ssize_t n = nsig.shape[0]
    cdef unordered_map[long long, long] index
    cdef Py_ssize_t i
    index.reserve(2 * n)
    for i in range(n):
        index[keys[i]] = i

    cdef long long base = 2 * m_max + 2
    cdef long long shift = m_max + 1
    cdef vector[long long] rows, cols
    cdef vector[double] vals
    cdef long merged[64]
    cdef Py_ssize_t s0, s1, p1, k, t, pos, nmerged
    cdef long ell, mt, nt, mult, n_mt, n_nt, x
    cdef long long key
    cdef double factor
    cdef bint skipped
    cdef unordered_map[long long, long].iterator it

    for i in range(n):
        s0 = offs[i]
        s1 = s0 + nsig[i]
        p1 = offs[i + 1]
        if s1 == p1:
            continue
        k = s1
        while k < p1:
            ell = buf[k]
            mult = 1
            while k + mult < p1 and buf[k + mult] == ell:
                mult += 1
            mt = ell - m_max
            if mt < -m_max:
                mt = -m_max
            while 2 * mt <= ell:
                nt = ell - mt
                # merge the new pair into the sorted signal run
                nmerged = 0
                t = s0
                while t < s1 and buf[t] < mt:
                    merged[nmerged] = buf[t]
                    nmerged += 1
                    t += 1
                merged[nmerged] = mt
                nmerged += 1
                while t < s1 and buf[t] < nt:
                    merged[nmerged] = buf[t]
                    nmerged += 1
                    t += 1
                merged[nmerged] = nt
                nmerged += 1
                while t < s1:
                    merged[nmerged] = buf[t]
                    nmerged += 1
                    t += 1
                key = 0
                for t in range(nmerged):
                    key = key * base + (merged[t] + shift)
                key *= base
                skipped = False
                for t in range(s1, p1):
                    x = buf[t]
                    if x == ell and not skipped:
                        skipped = True
                        continue
                    key = key * base + (x + shift)
                it = index.find(key)
                if it == index.end():
                    raise ValueError(
                        "downconversion target missing from basis "
                        "(state %d, pump %d -> pair (%d, %d))"
                        % (i, ell, mt, nt))
                pos = deref(it).second
                n_mt = 0
                for t in range(s0, s1):
                    if buf[t] == mt:
                        n_mt += 1
                if mt == nt:
                    factor = 0.5 * sqrt(mult * (n_mt + 1.0) * (n_mt + 2.0))
                else:
                    n_nt = 0
                    for t in range(s0, s1):
                        if buf[t] == nt:
                            n_nt += 1
                    factor = sqrt(mult * (n_mt + 1.0) * (n_nt + 1.0))
                rows.push_back(i)
                cols.push_back(pos)
                vals.push_back(factor * sqrt_eps)
                rows.push_back(pos)
                cols.push_back(i)
                vals.push_back(factor * sqrt_eps)
                mt += 1
            k += mult

    cdef cnp.ndarray[cnp.int64_t, ndim=1] out_r = np.empty(rows.size(),
                                                           dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] out_c = np.empty(cols.size(),
                                                           dtype=np.int64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out_v = np.empty(vals.size(),
                                                             dtype=np.float64)
    for t in range(<Py_ssize_t> rows.size()):
        out_r[t] = rows[t]
        out_c[t] = cols[t]
        out_v[t] = vals[t]
    return out_r, out_c, out_v
