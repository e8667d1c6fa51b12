"""Pure-Python propagation kernel. Reference implementation; the Cython
kernel in _kernels.pyx must match it improvement for improvement.

State per node is a pair of hop counters: nh full-cost hops and hh discounted
hierarchy hops, with nh < 0 meaning unreached. The cost of a label is
nh + (1 - beta) * hh. A label improves on another when its cost is smaller,
or equal (within a small epsilon to absorb float noise) with fewer hierarchy
hops; the tie rule keeps the backends and repeated runs byte-identical.
"""

from __future__ import annotations

import numpy as np

EPS = 1e-12


def expand_wave(indptr, nbr, ecode, disc, beta, frontier, nh, hh):
    """Relax every arc leaving the frontier. Mutates nh/hh in place and
    returns the ascending dense indices of nodes whose label improved."""
    unit = 1.0 - beta
    improved = np.zeros(len(nh), dtype=np.uint8)
    ind = indptr
    for u in frontier.tolist():
        bn = int(nh[u])
        bh = int(hh[u])
        for e in range(ind[u], ind[u + 1]):
            v = int(nbr[e])
            c = ecode[e]
            if c and disc[c]:
                nn = bn
                hn = bh + 1
            else:
                nn = bn + 1
                hn = bh
            vn = int(nh[v])
            if vn < 0:
                take = True
            else:
                vh = int(hh[v])
                new_cost = nn + unit * hn
                cur_cost = vn + unit * vh
                take = new_cost < cur_cost - EPS or (
                    new_cost < cur_cost + EPS and hn < vh)
            if take:
                nh[v] = nn
                hh[v] = hn
                improved[v] = 1
    return np.nonzero(improved)[0].astype(np.int32)
