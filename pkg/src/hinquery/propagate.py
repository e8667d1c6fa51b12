"""Single-source closeness propagation with provable bounds.

A WaveSearch grows shortest-cost labels outward from one source, one
synchronized wave per call. Labels are integer hop pairs (nh normal hops,
hh discounted hierarchy hops) with cost nh + (1 - beta) * hh, so repeated
runs and both kernel backends agree bit for bit.

After t waves the search knows two admissible facts about any node it has
not settled yet:

* every path of t + 1 or more waves costs at least (t + 1) * u, where u is
  the cheapest arc for this source (1 - beta when the source discounts some
  hierarchy type present in the graph, else 1), and
* every improvement still to come must extend a current frontier label, so
  it costs at least min(frontier cost) + u.

A node whose current cost is at or below both thresholds can never improve
again and is settled; its closeness alpha^cost is final. The frontier-based
threshold guarantees at least one new settlement per wave, so a search
settles everything it can reach within |V| waves.
"""

from __future__ import annotations

import numpy as np

from . import backend

SETTLE_EPS = 1e-12


class WaveSearch:
    def __init__(self, csr, source_dense, discount_types, params):
        self.csr = csr
        self.params = params
        self.source = int(source_dense)
        self.disc = csr.discount_mask(discount_types)
        applicable = any(self.disc[c] for c in csr.codes_present if c)
        self.unit = 1.0 - params.beta if applicable else 1.0
        self.applicable = applicable

        n = len(csr)
        self.nh = np.full(n, -1, dtype=np.int32)
        self.hh = np.zeros(n, dtype=np.int32)
        self.cost = np.full(n, np.inf, dtype=np.float64)
        self.settled = np.zeros(n, dtype=bool)
        self.nh[self.source] = 0
        self.cost[self.source] = 0.0
        self.settled[self.source] = True
        self.frontier = np.array([self.source], dtype=np.int32)
        self.t = 0
        self.exhausted = False
        self.frozen = False
        # exponent of the unseen-node closeness bound; inf once exhausted
        self.unseen_exp = self.unit

    @property
    def active(self):
        return not (self.exhausted or self.frozen)

    def freeze(self):
        """Stop expanding; all current bounds stay valid and fixed."""
        self.frozen = True

    def advance(self):
        """Run one wave. Returns (labels processed, newly settled indices)."""
        if not self.active:
            return 0, np.empty(0, dtype=np.int64)
        processed = len(self.frontier)
        improved = backend.expand_wave(
            self.csr.indptr, self.csr.nbr, self.csr.ecode, self.disc,
            self.params.beta, self.frontier, self.nh, self.hh)
        self.t += 1
        if len(improved) == 0:
            self.exhausted = True
            self.unseen_exp = np.inf
        else:
            unit_beta = 1.0 - self.params.beta
            self.cost[improved] = self.nh[improved] + unit_beta * self.hh[improved]
            band = float(self.cost[improved].min()) + self.unit
            self.unseen_exp = max(self.t * self.unit, band)
        self.frontier = improved
        newly = np.nonzero(~self.settled & (self.cost <= self.unseen_exp + SETTLE_EPS))[0]
        self.settled[newly] = True
        return processed, newly

    def run_until(self, want_settled):
        """Advance until the given dense index is settled or nothing is left
        to explore. Returns the settled cost (may be inf for unreachable)."""
        w = int(want_settled)
        while not self.settled[w] and self.active:
            self.advance()
        return float(self.cost[w])

    def closeness_at(self, dense):
        c = self.cost[dense]
        return float(self.params.alpha ** c) if np.isfinite(c) else 0.0

    def lower_at(self, idx):
        """alpha^cost for reached nodes, 0 for unreached. Never decreases."""
        c = self.cost[idx]
        out = np.where(np.isfinite(c), self.params.alpha ** np.where(np.isfinite(c), c, 0.0), 0.0)
        return out

    def upper_at(self, idx):
        """Admissible closeness upper bound. Never increases wave to wave."""
        c = self.cost[idx]
        eff = np.where(self.settled[idx], c, np.minimum(c, self.unseen_exp))
        out = np.where(np.isfinite(eff), self.params.alpha ** np.where(np.isfinite(eff), eff, 0.0), 0.0)
        return out
