# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled propagation kernel. Mirrors _kernels_py.expand_wave exactly:
same arc order, same comparison epsilon, same tie rule, so both backends
produce identical labels."""

import numpy as np

DEF EPS = 1e-12


def expand_wave(object indptr_o, object nbr_o, object ecode_o, object disc_o,
                double beta, object frontier_o, object nh_o, object hh_o):
    cdef long long[::1] indptr = indptr_o
    cdef int[::1] nbr = nbr_o
    cdef unsigned char[::1] ecode = ecode_o
    cdef unsigned char[::1] disc = disc_o
    cdef int[::1] frontier = frontier_o
    cdef int[::1] nh = nh_o
    cdef int[::1] hh = hh_o

    cdef double unit = 1.0 - beta
    cdef Py_ssize_t n = nh.shape[0]
    improved_arr = np.zeros(n, dtype=np.uint8)
    cdef unsigned char[::1] improved = improved_arr

    cdef Py_ssize_t i, e
    cdef int u, v, bn, bh, nn, hn, vn, vh
    cdef unsigned char c
    cdef double new_cost, cur_cost
    cdef bint take

    for i in range(frontier.shape[0]):
        u = frontier[i]
        bn = nh[u]
        bh = hh[u]
        for e in range(indptr[u], indptr[u + 1]):
            v = nbr[e]
            c = ecode[e]
            if c and disc[c]:
                nn = bn
                hn = bh + 1
            else:
                nn = bn + 1
                hn = bh
            vn = nh[v]
            if vn < 0:
                take = True
            else:
                vh = hh[v]
                new_cost = nn + unit * hn
                cur_cost = vn + unit * vh
                take = new_cost < cur_cost - EPS or (
                    new_cost < cur_cost + EPS and hn < vh)
            if take:
                nh[v] = nn
                hh[v] = hn
                improved[v] = 1
    return np.nonzero(improved_arr)[0].astype(np.int32)
