"""Top-k engine for general (multi-query-node) queries.

Three phases. Decompose splits the query into one star per query node plus
the query-node to query-node edges, which are deferred to the end. Each
anchored star is then solved with the star engine at a widened depth k_s
(between k and 2k by default; the wider the lists, the better the recall of
the final top k). Last, candidate selection runs a depth-first
branch-and-bound over the per-star lists: levels are ordered by how much
their list scores spread, partial assignments carry exact scores, and an
optimistic completion bound against the running k-th best score prunes
subtrees. Because lists are sorted, a failed bound on a candidate's star
score also rules out the rest of its level, so whole level tails are cut.

Query nodes with no adjacent specific have no star of their own; their
candidates are discovered during selection, from propagation anchored at
the data nodes already assigned to neighboring query nodes.
"""

from __future__ import annotations

import time
from bisect import insort
from dataclasses import dataclass, field

import numpy as np

from .csr import get_csr
from .model import Arity, Match, QueryError, QueryGraph, classify_query, resolve_anchors
from .propagate import WaveSearch
from .scoring import ScoringParams
from .star import StarStats, star_topk


@dataclass(frozen=True)
class Star:
    center: object           # query id of the query node
    query: QueryGraph        # the star: center plus its adjacent specifics


@dataclass
class StarDecomposition:
    stars: list              # one Star per query node, in query-node order
    deferred_edges: list     # query-node to query-node edges, input order
    anchor_edges: list       # specific to specific edges; constant, not scored
    anchorless: tuple        # centers whose star has no specific node


def decompose(query, schema):
    """Split a general query into per-query-node stars plus deferred edges.

    The schema parameter is part of the signature for symmetry with the
    other phases; decomposition itself is purely structural.
    """
    spec_ids = set(query.specific_ids())
    spec_by_id = {q: (q, t, l) for q, t, l in query.specific_nodes}
    stars = []
    anchorless = []
    for qid, qtype in query.query_nodes:
        adj_specs = [n for n in query.neighbors(qid) if n in spec_ids]
        ordered = [spec_by_id[q] for q, _, _ in query.specific_nodes if q in adj_specs]
        stars.append(Star(
            center=qid,
            query=QueryGraph(
                specific_nodes=tuple(ordered),
                query_nodes=((qid, qtype),),
                edges=tuple((qid, q) for q, _, _ in ordered),
            ),
        ))
        if not ordered:
            anchorless.append(qid)
    deferred = [(a, b) for a, b in query.edges
                if a not in spec_ids and b not in spec_ids]
    anchor = [(a, b) for a, b in query.edges
              if a in spec_ids and b in spec_ids]
    return StarDecomposition(stars=stars, deferred_edges=deferred,
                             anchor_edges=anchor, anchorless=tuple(anchorless))


@dataclass
class CandidateLists:
    """Per-star candidate lists, each sorted by (star score desc, id asc)."""

    lists: dict  # center qid -> list of (node_id, star_score)

    def spread(self, qid):
        row = self.lists.get(qid, [])
        if len(row) < 2:
            return 0.0
        return row[0][1] - row[-1][1]


@dataclass
class GeneralStats:
    decompose_seconds: float = 0.0
    star_seconds: float = 0.0
    select_seconds: float = 0.0
    bnb_expanded: int = 0
    bnb_pruned: int = 0
    star_stats: list = field(default_factory=list)

    def as_dict(self):
        return {
            "decomposeSeconds": self.decompose_seconds,
            "starSeconds": self.star_seconds,
            "selectSeconds": self.select_seconds,
            "bnbExpanded": self.bnb_expanded,
            "bnbPruned": self.bnb_pruned,
            "starStats": [s.as_dict() for s in self.star_stats],
        }


@dataclass
class GeneralResult:
    matches: list            # Match rows, score desc then assignment asc
    stats: GeneralStats
    lists: CandidateLists
    params: ScoringParams
    k: int
    k_s: int


class EdgeSearches:
    """Pairwise closeness between data nodes, engine side.

    One resumable WaveSearch per (source node, discount set). A cost query
    advances the search just far enough to settle the target; a discovery
    query advances until the best cap nodes of a type are provably final.
    """

    def __init__(self, graph, schema, params):
        self.csr = get_csr(graph)
        self.schema = schema
        self.params = params
        self._searches = {}
        self._top_cache = {}

    def _search(self, source_id, disc_key):
        key = (source_id, disc_key)
        s = self._searches.get(key)
        if s is None:
            s = WaveSearch(self.csr, self.csr.index[source_id], disc_key, self.params)
            self._searches[key] = s
        return s

    def closeness(self, x, y, disc_key):
        if x == y:
            return 1.0
        s = self._search(x, disc_key)
        dy = self.csr.index[y]
        if not s.settled[dy]:
            s.run_until(dy)
        return s.closeness_at(dy)

    def top_of_type(self, x, disc_key, node_type, cap, barred):
        """Up to cap nodes of node_type by closeness from x, (id, closeness),
        sorted closeness desc then id asc. Only provably final entries."""
        key = (x, disc_key, node_type, cap, barred)
        hit = self._top_cache.get(key)
        if hit is not None:
            return hit
        s = self._search(x, disc_key)
        csr = self.csr
        cand = csr.candidates_of_type(node_type, exclude=barred)
        if len(cand) == 0:
            return []
        while s.active:
            costs = s.cost[cand]
            settled = s.settled[cand]
            nsett = int(np.count_nonzero(settled))
            if nsett >= len(cand):
                break
            if nsett >= cap:
                # strict margin so no unseen node can tie into the cut
                kth = np.sort(costs[settled])[cap - 1]
                if kth < s.unseen_exp - 1e-12:
                    break
            s.advance()
        costs = s.cost[cand]
        reachable = np.isfinite(costs)
        pairs = sorted(
            ((float(c), int(csr.ids[d])) for c, d in zip(costs[reachable], cand[reachable])),
            key=lambda t: (t[0], t[1]))
        alpha = self.params.alpha
        out = [(n, alpha ** c) for c, n in pairs[:cap]]
        self._top_cache[key] = out
        return out


def candidate_selection(lists, deferred_edges, graph, schema, params, k, *,
                        query, anchorless=(), k_s=None, barred=frozenset(),
                        stats=None, edge_closeness=None, discover=None):
    """Branch-and-bound assembly of top-k assignments from candidate lists.

    edge_closeness and discover default to engine propagation; tests may
    stub them. Returns Match rows sorted (score desc, assignment asc).
    """
    stats = stats if stats is not None else GeneralStats()
    qtype_of = dict(query.query_nodes)
    order_out = [qid for qid, _ in query.query_nodes]

    searches = None
    if edge_closeness is None or discover is None:
        searches = EdgeSearches(graph, schema, params)
    if edge_closeness is None:
        edge_closeness = lambda x, y, dk: searches.closeness(x, y, dk)
    if discover is None:
        discover = lambda x, dk, t, cap, bar: searches.top_of_type(x, dk, t, cap, bar)

    def disc_key(qa, qb):
        return schema.discounts_between(qtype_of[qa], qtype_of[qb])

    anchorless = set(anchorless)
    anchored = [q for q in order_out if q not in anchorless]
    # Order levels to close deferred edges as early as possible: every open
    # edge loosens the completion bound by a full edge_cap, so adjacency to
    # already-placed levels beats raw list spread.
    levels = []
    remaining = set(anchored)
    while remaining:
        placed = set(levels)
        pick = min(remaining, key=lambda q: (
            -sum(1 for nq in query.neighbors(q) if nq in placed),
            -lists.spread(q), str(q)))
        levels.append(pick)
        remaining.remove(pick)
    floating = [q for q in order_out if q in anchorless]
    while floating:
        placed = None
        for q in floating:
            if any(n in levels for n in query.neighbors(q)):
                placed = q
                break
        if placed is None:
            placed = floating[0]  # disconnected from anchored part; hopeless but legal
        levels.append(placed)
        floating.remove(placed)

    pos = {q: i for i, q in enumerate(levels)}
    future_max = [0.0] * (len(levels) + 1)
    for i in range(len(levels) - 1, -1, -1):
        row = lists.lists.get(levels[i], [])
        best = row[0][1] if row else 0.0
        future_max[i] = future_max[i + 1] + (best if levels[i] not in anchorless else 0.0)

    closes_at = {}
    for a, b in deferred_edges:
        closes_at.setdefault(max(pos[a], pos[b]), []).append((a, b))
    # per edge: (early endpoint, late endpoint, their levels)
    opens = []
    for a, b in deferred_edges:
        lo_q, hi_q = (a, b) if pos[a] < pos[b] else (b, a)
        opens.append((lo_q, hi_q, pos[lo_q], pos[hi_q]))
    edge_cap = params.alpha ** (1.0 - params.beta)

    edge_best_cache = {}

    def edge_best(x, lo_q, hi_q):
        """Cap on the closeness an open edge can still contribute once its
        early endpoint is pinned to x. Maxes over the late level's candidate
        list; injectivity keeps x itself out of reach, so edge_cap holds."""
        if hi_q in anchorless:
            return edge_cap
        dk = disc_key(lo_q, hi_q)
        key = (x, hi_q, dk)
        v = edge_best_cache.get(key)
        if v is None:
            v = 0.0
            for node, _ in lists.lists.get(hi_q, []):
                if node == x:
                    continue
                c = edge_closeness(x, node, dk)
                if c > v:
                    v = c
            v = min(v, edge_cap)
            edge_best_cache[key] = v
        return v

    def frame_slack(i, assign):
        """Bound on edges still open after level i, before choosing its
        candidate: pinned early endpoints use their real reach, the rest
        fall back to the one-hop cap."""
        total = 0.0
        for lo_q, hi_q, lo_l, hi_l in opens:
            if hi_l <= i:
                continue
            if lo_l < i:
                total += edge_best(assign[lo_q], lo_q, hi_q)
            else:
                total += edge_cap
        return total

    def child_slack(i, node, qid, assign):
        total = 0.0
        for lo_q, hi_q, lo_l, hi_l in opens:
            if hi_l <= i:
                continue
            if lo_l < i:
                total += edge_best(assign[lo_q], lo_q, hi_q)
            elif lo_l == i:
                total += edge_best(node, qid, hi_q)
            else:
                total += edge_cap
        return total

    best_rows = []  # sorted (key, assignment dict); key = (-score, id vector)

    def kth_score():
        return -best_rows[k - 1][0][0] if len(best_rows) >= k else -1.0

    def record(assign, score):
        ids = tuple(assign[q] for q in order_out)
        key = (-score, ids)
        if len(best_rows) < k:
            insort(best_rows, (key, dict(assign)))
        elif key < best_rows[-1][0]:
            insort(best_rows, (key, dict(assign)))
            best_rows.pop()

    def closing_values(i, qid, node, assign):
        # exact closeness for deferred edges whose later endpoint is level i
        total = 0.0
        for a, b in closes_at.get(i, []):
            other_q = b if a == qid else a
            total += edge_closeness(assign[other_q], node, disc_key(qid, other_q))
        return total

    def level_candidates(i, qid, assign, used):
        if qid not in anchorless:
            return lists.lists.get(qid, [])
        cap = k_s if k_s is not None else max(len(graph), 1)
        found = {}
        for nq in query.neighbors(qid):
            if nq not in pos or pos[nq] >= i or nq not in assign:
                continue
            src = assign[nq]
            for node, _ in discover(src, disc_key(qid, nq), qtype_of[qid], cap, barred):
                found.setdefault(node, 0.0)
        pad = [n for n in graph.nodes_of_type(qtype_of[qid])
               if n not in barred and n not in found]
        for node in pad[:max(cap - len(found), 0)]:
            found[node] = 0.0
        rows = []
        for node in sorted(found):
            if node in used:
                continue
            rows.append((node, closing_values(i, qid, node, assign)))
        rows.sort(key=lambda t: (-t[1], t[0]))
        return rows

    def descend(i, assign, used, exact):
        if i == len(levels):
            record(assign, exact)
            return
        qid = levels[i]
        floating_level = qid in anchorless
        rows = level_candidates(i, qid, assign, used)
        tail_bound = future_max[i + 1] + frame_slack(i, assign)
        closing_cap = 0.0
        if not floating_level:
            for a, b in closes_at.get(i, []):
                other_q = b if a == qid else a
                closing_cap += edge_best(assign[other_q], other_q, qid)
        for j, (node, head) in enumerate(rows):
            # head is the sort key of the level: star score for anchored
            # levels, exact closing-edge sum for discovered levels. The
            # optimistic bound is monotone in it, so one failure cuts the
            # whole remaining tail.
            optimistic = exact + head + closing_cap + tail_bound
            if len(best_rows) >= k and optimistic < kth_score():
                stats.bnb_pruned += len(rows) - j
                break
            if node in used:
                continue
            if floating_level:
                child_exact = exact + head
            else:
                child_exact = exact + head + closing_values(i, qid, node, assign)
            if len(best_rows) >= k:
                bound = child_exact + future_max[i + 1] + child_slack(i, node, qid, assign)
                if bound < kth_score():
                    stats.bnb_pruned += 1
                    continue
            stats.bnb_expanded += 1
            assign[qid] = node
            used.add(node)
            descend(i + 1, assign, used, child_exact)
            used.discard(node)
            del assign[qid]

    descend(0, {}, set(), 0.0)
    return [Match(assignment=tuple((q, row[1][q]) for q in order_out),
                  score=-row[0][0]) for row in best_rows]


def general_topk(graph, schema, query, k, k_s=None, params=None, pruning=True):
    """Exact-star, wide-list top-k for general queries.

    k_s controls star list depth: an int (at least k), None for the 2k
    default, or "all" for exhaustive lists (exact final ranking at the cost
    of scale).
    """
    params = params or ScoringParams()
    if k < 1:
        raise ValueError(f"k must be positive, got {k}")
    qclass = classify_query(query, schema)
    anchors = resolve_anchors(query, graph)

    if qclass.arity is Arity.STAR:
        center = query.query_nodes[0][0]
        res = star_topk(graph, schema, query, k, params=params, pruning=pruning)
        stats = GeneralStats(star_stats=[res.stats])
        matches = [Match(assignment=((center, n),), score=s) for n, s in res.ranking]
        lists = CandidateLists(lists={center: list(res.ranking)})
        return GeneralResult(matches=matches, stats=stats, lists=lists,
                             params=params, k=k, k_s=k)

    csr = get_csr(graph)
    barred = frozenset(anchors.values())
    if k_s is None:
        k_s_eff = 2 * k
    elif k_s == "all":
        k_s_eff = len(graph)
    else:
        k_s_eff = int(k_s)
        if k_s_eff < k:
            raise ValueError(f"k_s ({k_s_eff}) must be at least k ({k})")

    stats = GeneralStats()
    t0 = time.perf_counter()
    dec = decompose(query, schema)
    stats.decompose_seconds = time.perf_counter() - t0

    t0 = time.perf_counter()
    lists = {}
    for s in dec.stars:
        if s.center in dec.anchorless:
            continue
        qtype = dict(query.query_nodes)[s.center]
        cand = csr.candidates_of_type(qtype, exclude=barred)
        if len(cand) == 0:
            lists[s.center] = []
            continue
        depth = min(k_s_eff, len(cand))
        res = star_topk(graph, schema, s.query, depth, params=params,
                        pruning=pruning, exclude=barred)
        stats.star_stats.append(res.stats)
        row = list(res.ranking)
        if len(row) < depth:
            have = {n for n, _ in row}
            for d in cand.tolist():
                node = int(csr.ids[d])
                if node not in have:
                    row.append((node, 0.0))
                    if len(row) == depth:
                        break
        lists[s.center] = row
    clists = CandidateLists(lists=lists)
    stats.star_seconds = time.perf_counter() - t0

    t0 = time.perf_counter()
    matches = candidate_selection(
        clists, dec.deferred_edges, graph, schema, params, k,
        query=query, anchorless=dec.anchorless,
        k_s=k_s_eff, barred=barred, stats=stats)
    stats.select_seconds = time.perf_counter() - t0
    return GeneralResult(matches=matches, stats=stats, lists=clists,
                         params=params, k=k, k_s=k_s_eff)
