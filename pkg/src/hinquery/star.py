"""Top-k engine for star queries.

One WaveSearch per anchor advances in lockstep. A candidate whose closeness
is settled for every anchor has an exact score and is offered to the top-k
queue. While candidates are in flight the engine keeps per-anchor closeness
intervals whose sums bound the final score; once the queue is full, any
candidate whose score upper bound falls strictly below the queue's k-th
lower bound can never enter the top k and is dropped from the live set.

Pruning never blocks propagation. A dropped candidate still forwards waves,
because it may sit on the only short path from one anchor to a candidate
that scores well through another anchor; cutting it would corrupt other
candidates' scores. Savings come from dropping candidates, idling anchors
whose remaining work cannot affect the live set, and stopping early once
the live set is empty.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .csr import get_csr
from .model import Arity, QueryError, classify_query, resolve_anchors
from .propagate import WaveSearch
from .scoring import ScoringParams


@dataclass(frozen=True)
class QueueEntry:
    node_id: int
    score: float
    lower: float
    upper: float


class TopKQueue:
    """Fixed-capacity result queue ordered by (score desc, node id asc)."""

    def __init__(self, k):
        if k < 1:
            raise ValueError(f"k must be positive, got {k}")
        self.k = k
        self.entries = []

    @property
    def full(self):
        return len(self.entries) == self.k

    @property
    def kth_lower(self):
        """Least score lower bound across entries; 0 while not full."""
        if not self.full:
            return 0.0
        return min(e.lower for e in self.entries)

    def insert(self, entry):
        self.entries.append(entry)
        self.entries.sort(key=lambda e: (-e.score, e.node_id))
        if len(self.entries) > self.k:
            raise RuntimeError("queue overfull; evict before inserting")

    def replace_tail(self, entry):
        self.entries.pop()
        self.insert(entry)

    def tail(self):
        return self.entries[-1]

    def ranking(self):
        return [(e.node_id, e.score) for e in self.entries]


def consider_candidate(queue, entry, live):
    """Emergence test for one candidate against the queue.

    Returns one of "inserted", "replaced", "pruned", "kept". A candidate
    whose score upper bound cannot reach the k-th lower bound is removed
    from the live set; one that beats the current tail on (score, id)
    evicts it. Callers pass exact scores for decided candidates, so an
    exact tie at the tail resolves toward the smaller id even when the
    bounds leave no slack.
    """
    if not queue.full:
        queue.insert(entry)
        return "inserted"
    tail = queue.tail()
    if entry.upper < queue.kth_lower:
        live.discard(entry.node_id)
        return "pruned"
    beats_tail = entry.score > tail.score or (
        entry.score == tail.score and entry.node_id < tail.node_id)
    if beats_tail:
        queue.replace_tail(entry)
        return "replaced"
    return "kept"


def check_convergence(live_count, messages_pending):
    """The engine is done when no candidate is undecided or no search can
    still produce an update."""
    return live_count == 0 or not messages_pending


@dataclass(frozen=True)
class VertexState:
    sd: float        # best known path cost
    hd: int          # discounted hierarchy hops on that path
    r: float         # closeness at the current cost, 0 if unreached
    r_lower: float
    r_upper: float
    settled: bool


class VertexStateTable:
    """Read view over the per-anchor search state, keyed by node id."""

    def __init__(self, csr, anchor_ids, searches):
        self._csr = csr
        self.anchor_ids = tuple(anchor_ids)
        self._searches = dict(zip(self.anchor_ids, searches))

    def entry(self, node_id, anchor_qid):
        s = self._searches[anchor_qid]
        d = self._csr.index[node_id]
        cost = float(s.cost[d])
        r = s.closeness_at(d)
        return VertexState(
            sd=cost,
            hd=int(s.hh[d]) if np.isfinite(cost) else 0,
            r=r,
            r_lower=float(s.lower_at(np.array([d]))[0]),
            r_upper=float(s.upper_at(np.array([d]))[0]),
            settled=bool(s.settled[d]),
        )

    def bounds(self, anchor_qid):
        """(node ids, lower array, upper array) snapshot for one anchor."""
        s = self._searches[anchor_qid]
        idx = np.arange(len(self._csr))
        return self._csr.ids.copy(), s.lower_at(idx), s.upper_at(idx)


@dataclass
class StarStats:
    iterations: int = 0
    visited_nodes: int = 0
    pruned_nodes: int = 0
    settled_nodes: int = 0

    def as_dict(self):
        return {
            "iterations": self.iterations,
            "visitedNodes": self.visited_nodes,
            "prunedNodes": self.pruned_nodes,
            "settledNodes": self.settled_nodes,
        }


@dataclass
class StarResult:
    ranking: list            # (node_id, score), score desc then id asc
    stats: StarStats
    table: VertexStateTable
    params: ScoringParams
    k: int


@dataclass
class IterationTrace:
    t: int
    bounds: dict             # anchor qid -> (lower copy, upper copy) dense arrays
    live: np.ndarray         # dense indices still undecided
    queue: list              # ranking snapshot


class _LiveSet:
    """Live candidates as a dense boolean mask plus an id-level discard API
    so the queue op can prune through it."""

    def __init__(self, csr, dense_indices):
        self.csr = csr
        self.mask = np.zeros(len(csr), dtype=bool)
        self.mask[dense_indices] = True
        self.count = int(len(dense_indices))

    def discard_dense(self, dense_indices):
        dropped = self.mask[dense_indices]
        self.mask[dense_indices] = False
        self.count -= int(np.count_nonzero(dropped))

    def discard(self, node_id):
        d = self.csr.index.get(node_id)
        if d is not None and self.mask[d]:
            self.mask[d] = False
            self.count -= 1

    def indices(self):
        return np.nonzero(self.mask)[0]


def star_topk(graph, schema, query, k, params=None, pruning=True,
              exclude=(), trace=None):
    """Exact top-k candidates for a star query.

    exclude lists extra node ids barred from the candidate set (used when a
    star is solved as part of a larger query whose other anchors must not be
    reused). When trace is a list, a per-iteration bounds snapshot is
    appended to it; meant for small graphs only.
    """
    params = params or ScoringParams()
    if k < 1:
        raise ValueError(f"k must be positive, got {k}")
    qclass = classify_query(query, schema)
    if qclass.arity is not Arity.STAR:
        raise QueryError("star engine expects exactly one query node")
    anchors = resolve_anchors(query, graph)
    _, target_type = query.query_nodes[0]

    csr = get_csr(graph)
    anchor_qids = [q for q, _, _ in query.specific_nodes]
    anchor_nodes = [anchors[q] for q in anchor_qids]
    barred = set(anchor_nodes) | set(exclude)
    cand = csr.candidates_of_type(target_type, exclude=barred)

    searches = []
    for (q, a_type, _), node in zip(query.specific_nodes, anchor_nodes):
        disc_types = schema.inherited_for(a_type)
        searches.append(WaveSearch(csr, csr.index[node], disc_types, params))

    live = _LiveSet(csr, cand)
    settle_count = np.zeros(len(csr), dtype=np.int16)
    for s in searches:
        settle_count[s.settled] += 1

    queue = TopKQueue(k)
    stats = StarStats()
    n_anchors = len(searches)
    alpha = params.alpha
    t = 0

    while True:
        pending = any(s.active for s in searches)
        if check_convergence(live.count, pending):
            break
        t += 1
        if t > 2 * len(csr) + 4:
            raise RuntimeError("propagation failed to terminate; this is a bug")

        for s in searches:
            processed, newly = s.advance()
            stats.visited_nodes += processed
            settle_count[newly] += 1

        done = np.nonzero(live.mask & (settle_count == n_anchors))[0]
        if len(done):
            costs = np.stack([s.cost[done] for s in searches])
            closeness = np.where(np.isfinite(costs),
                                 alpha ** np.where(np.isfinite(costs), costs, 0.0),
                                 0.0)
            scores = closeness.sum(axis=0)
            live.discard_dense(done)
            stats.settled_nodes += int(len(done))
            for d, score in zip(done.tolist(), scores.tolist()):
                if score > 0.0:
                    node_id = int(csr.ids[d])
                    consider_candidate(
                        queue, QueueEntry(node_id, score, score, score), live)

        if pruning and queue.full and live.count:
            idx = live.indices()
            upper = np.zeros(len(idx))
            for s in searches:
                upper += s.upper_at(idx)
            drop = idx[upper < queue.kth_lower]
            if len(drop):
                live.discard_dense(drop)
                stats.pruned_nodes += int(len(drop))

        if pruning and live.count:
            idx = live.indices()
            for s in searches:
                if s.active and bool(np.all(s.settled[idx])):
                    s.freeze()

        if trace is not None:
            idx_all = np.arange(len(csr))
            trace.append(IterationTrace(
                t=t,
                bounds={q: (s.lower_at(idx_all), s.upper_at(idx_all))
                        for q, s in zip(anchor_qids, searches)},
                live=live.indices(),
                queue=queue.ranking(),
            ))

    stats.iterations = t
    table = VertexStateTable(csr, anchor_qids, searches)
    return StarResult(ranking=queue.ranking(), stats=stats, table=table,
                      params=params, k=k)
