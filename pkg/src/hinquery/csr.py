"""Compact adjacency for the propagation engines.

Both edge kinds are laid out as directed arcs in CSR form. Hierarchy edges
are traversable in both directions; each arc carries a code telling which
inherited type's hierarchy it belongs to (0 means a normal edge), so a
per-anchor discount mask can be applied without touching the arrays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class CSRGraph:
    ids: np.ndarray        # dense index -> node id, ascending
    index: dict            # node id -> dense index
    indptr: np.ndarray     # int64, len n + 1
    nbr: np.ndarray        # int32 arc targets (dense indices)
    ecode: np.ndarray      # uint8 arc codes, 0 normal, j + 1 hierarchy of hier_types[j]
    hier_types: tuple      # inherited types that carry hierarchy edges, sorted
    type_names: tuple      # all node types present, sorted
    type_code: np.ndarray  # int16 per dense node
    codes_present: frozenset  # arc codes that actually occur

    def __len__(self):
        return len(self.ids)

    def dense_of(self, node_ids):
        return np.fromiter((self.index[i] for i in node_ids), dtype=np.int32,
                           count=len(node_ids))

    def candidates_of_type(self, node_type, exclude=()):
        """Dense indices of nodes of the given type, ascending, minus exclusions."""
        if node_type not in self.type_names:
            return np.empty(0, dtype=np.int32)
        code = self.type_names.index(node_type)
        mask = self.type_code == code
        for node_id in exclude:
            dense = self.index.get(node_id)
            if dense is not None:
                mask[dense] = False
        return np.nonzero(mask)[0].astype(np.int32)

    def discount_mask(self, discount_types):
        """Arc-code mask: 1 where the code's hierarchy type is discounted."""
        mask = np.zeros(len(self.hier_types) + 1, dtype=np.uint8)
        for j, t in enumerate(self.hier_types):
            if t in discount_types:
                mask[j + 1] = 1
        return mask


def build_csr(graph):
    ids = np.array(sorted(i for i, _, _ in graph.nodes), dtype=np.int64)
    index = {int(i): d for d, i in enumerate(ids)}
    n = len(ids)

    type_names = tuple(sorted({t for _, t, _ in graph.nodes}))
    tcode = {t: c for c, t in enumerate(type_names)}
    type_code = np.zeros(n, dtype=np.int16)
    for i, t, _ in graph.nodes:
        type_code[index[i]] = tcode[t]

    node_type = {i: t for i, t, _ in graph.nodes}
    hier_types = tuple(sorted({node_type[u] for u, _ in graph.hierarchy_edges}))
    hcode = {t: j + 1 for j, t in enumerate(hier_types)}

    m = 2 * (len(graph.normal_edges) + len(graph.hierarchy_edges))
    src = np.empty(m, dtype=np.int32)
    dst = np.empty(m, dtype=np.int32)
    code = np.empty(m, dtype=np.uint8)
    pos = 0
    for u, v in graph.normal_edges:
        du, dv = index[u], index[v]
        src[pos], dst[pos], code[pos] = du, dv, 0
        src[pos + 1], dst[pos + 1], code[pos + 1] = dv, du, 0
        pos += 2
    for u, v in graph.hierarchy_edges:
        du, dv = index[u], index[v]
        c = hcode[node_type[u]]
        src[pos], dst[pos], code[pos] = du, dv, c
        src[pos + 1], dst[pos + 1], code[pos + 1] = dv, du, c
        pos += 2

    order = np.lexsort((code, dst, src))
    src, dst, code = src[order], dst[order], code[order]
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(indptr, src + 1, 1)
    np.cumsum(indptr, out=indptr)

    return CSRGraph(ids=ids, index=index, indptr=indptr, nbr=dst, ecode=code,
                    hier_types=hier_types, type_names=type_names, type_code=type_code,
                    codes_present=frozenset(int(c) for c in np.unique(code)))


def get_csr(graph):
    """CSR view of a graph, cached on the graph instance."""
    cached = getattr(graph, "_csr_cache", None)
    if cached is None:
        cached = build_csr(graph)
        graph._csr_cache = cached
    return cached
