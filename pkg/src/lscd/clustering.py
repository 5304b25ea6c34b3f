"""Correlation clustering of word usage graphs.

Edge weights are shifted by a relatedness threshold (default 2.5, the
midpoint of the 1-4 judgment scale).  A partition is scored by

    loss = sum of |w'| over within-cluster edges with w' < 0
         + sum of  w'  over between-cluster edges with w' > 0

and the optimizer minimizes this loss.  Graphs with at most
``exact_limit`` non-isolated nodes are solved exactly by branch-and-bound
over set partitions; larger graphs use simulated annealing with restarts
followed by greedy descent.  Ties are broken toward fewer clusters, then
toward the lexicographically smallest canonical label vector.  Isolated
nodes become singleton clusters after optimization.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .wug import WordUsageGraph


@dataclass
class ClusterParams:
    threshold: float = 2.5
    restarts: int = 20
    max_iters: int = 200   # annealing sweeps per restart
    seed: int = 0
    method: str = "auto"   # auto | exact | anneal
    exact_limit: int = 10
    initial_temp: float = 2.0
    final_temp: float = 0.01


@dataclass
class Clustering:
    lemma: str
    assignment: dict = field(default_factory=dict)  # usage id -> dense label
    loss: float = 0.0
    normalized_loss: float = 0.0
    n_clusters: int = 0
    method: str = "exact"


def _neg(w: float) -> float:
    return -w if w < 0 else 0.0


def _pos(w: float) -> float:
    return w if w > 0 else 0.0


def partition_loss(edges: list, labels) -> float:
    """Loss of a labelling; edges are (i, j, shifted_weight) index triples."""
    loss = 0.0
    for i, j, w in edges:
        if labels[i] == labels[j]:
            if w < 0:
                loss -= w
        elif w > 0:
            loss += w
    return loss


def clustering_loss(graph: WordUsageGraph, assignment: dict,
                    threshold: float = 2.5) -> tuple[float, float]:
    """(loss, normalized loss) of an arbitrary assignment on a graph."""
    ids = graph.node_ids()
    index = {uid: k for k, uid in enumerate(ids)}
    edges = [(index[a], index[b], w - threshold) for (a, b), w in graph.edges.items()]
    labels = [assignment[uid] for uid in ids]
    loss = partition_loss(edges, labels)
    denom = sum(abs(w) for _, _, w in edges)
    return loss, (loss / denom if denom > 0 else 0.0)


def _canonical(labels) -> tuple:
    """Relabel by order of first occurrence (restricted growth form)."""
    mapping = {}
    out = []
    for lab in labels:
        if lab not in mapping:
            mapping[lab] = len(mapping)
        out.append(mapping[lab])
    return tuple(out)


def _key(labels, edges) -> tuple:
    canon = _canonical(labels)
    return (partition_loss(edges, canon), len(set(canon)), canon)


def _positive_components(n: int, edges: list) -> list:
    """Initial partition: connected components of the positive-weight subgraph."""
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i, j, w in edges:
        if w > 0:
            ri, rj = find(i), find(j)
            if ri != rj:
                parent[ri] = rj
    return [find(i) for i in range(n)]


def _exact_search(n: int, edges: list) -> tuple:
    """Branch-and-bound over set partitions in restricted-growth order."""
    inc = [[] for _ in range(n)]  # edges back to already-assigned nodes
    for i, j, w in edges:
        lo, hi = (i, j) if i < j else (j, i)
        inc[hi].append((lo, w))

    # a decent greedy solution gives the initial pruning bound
    start = list(_canonical(_positive_components(n, edges)))
    adj = [[] for _ in range(n)]
    for i, j, w in edges:
        adj[i].append((j, w))
        adj[j].append((i, w))
    _greedy_descent(start, adj)
    _merge_pass(start, edges)
    best_key = _key(start, edges)

    labels = [0] * n

    def recurse(node: int, used: int, partial: float):
        nonlocal best_key
        if partial > best_key[0]:
            return
        if node == n:
            key = (partial, used, tuple(labels))
            if key < best_key:
                best_key = key
            return
        for lab in range(used + 1):
            delta = 0.0
            for other, w in inc[node]:
                if labels[other] == lab:
                    if w < 0:
                        delta -= w
                elif w > 0:
                    delta += w
            if partial + delta > best_key[0]:
                continue
            labels[node] = lab
            recurse(node + 1, max(used, lab + 1), partial + delta)
        labels[node] = 0

    recurse(0, 0, 0.0)
    return best_key


def _greedy_descent(labels: list, adj: list) -> None:
    """Move single nodes to their best cluster until no strict improvement."""
    n = len(labels)
    improved = True
    while improved:
        improved = False
        for v in range(n):
            current = labels[v]
            score: dict[int, float] = {}
            total_pos = 0.0
            for u, w in adj[v]:
                lab = labels[u]
                score[lab] = score.get(lab, 0.0) + _neg(w) - _pos(w)
                total_pos += _pos(w)
            fresh = max(labels) + 1
            best_lab, best_cost = current, score.get(current, 0.0)
            for lab, s in sorted(score.items()):
                if s < best_cost - 1e-12:
                    best_lab, best_cost = lab, s
            if 0.0 < best_cost - 1e-12 and fresh != current:
                # moving to a fresh singleton costs only the positive cut
                best_lab, best_cost = fresh, 0.0
            if best_lab != current:
                labels[v] = best_lab
                improved = True


def _merge_pass(labels: list, edges: list) -> None:
    """Merge cluster pairs while the loss does not increase.

    Zero-delta merges (including pairs with no connecting edges) are
    applied too: they keep the loss and reduce the cluster count,
    matching the fewer-clusters tie-break.
    """
    while True:
        present = sorted(set(labels))
        between = {(a, b): 0.0 for i, a in enumerate(present) for b in present[i + 1:]}
        for i, j, w in edges:
            a, b = labels[i], labels[j]
            if a != b:
                pair = (a, b) if a < b else (b, a)
                between[pair] += _neg(w) - _pos(w)
        candidates = [(delta, pair) for pair, delta in between.items() if delta <= 1e-12]
        if not candidates:
            return
        delta, (a, b) = min(candidates, key=lambda t: (t[0], t[1]))
        for v in range(len(labels)):
            if labels[v] == b:
                labels[v] = a


def _anneal(n: int, edges: list, params: ClusterParams) -> tuple:
    """Simulated annealing with geometric cooling and restarts."""
    adj = [[] for _ in range(n)]
    for i, j, w in edges:
        adj[i].append((j, w))
        adj[j].append((i, w))
    rng = np.random.default_rng(params.seed)
    cool = (params.final_temp / params.initial_temp) ** (1.0 / max(1, params.max_iters))
    best_key = None
    for restart in range(max(1, params.restarts)):
        if restart == 0:
            labels = list(_canonical(_positive_components(n, edges)))
        else:
            labels = rng.integers(0, n, size=n).tolist()
        temp = params.initial_temp
        for _ in range(params.max_iters):
            order = rng.integers(0, n, size=n)
            offers = rng.integers(0, n + 1, size=n)  # n means "fresh cluster"
            accept = rng.random(size=n)
            for v, offer, a in zip(order, offers, accept):
                current = labels[v]
                target = max(labels) + 1 if offer == n else int(offer)
                if target == current:
                    continue
                delta = 0.0
                for u, w in adj[v]:
                    lab = labels[u]
                    if lab == current:
                        delta -= _neg(w) - _pos(w)
                    if lab == target:
                        delta += _neg(w) - _pos(w)
                if delta <= 0 or a < np.exp(-delta / temp):
                    labels[v] = target
            temp *= cool
        _greedy_descent(labels, adj)
        _merge_pass(labels, edges)
        key = _key(labels, edges)
        if best_key is None or key < best_key:
            best_key = key
    return best_key


def cluster_wug(graph: WordUsageGraph, params: ClusterParams | None = None) -> Clustering:
    """Cluster a word usage graph into senses by correlation clustering."""
    params = params or ClusterParams()
    if params.method not in ("auto", "exact", "anneal"):
        raise ValidationError(f"unknown clustering method {params.method!r}")
    ids = graph.node_ids()
    if not ids:
        raise ValidationError("cannot cluster an empty graph")
    index = {uid: k for k, uid in enumerate(ids)}
    all_edges = [(index[a], index[b], w - params.threshold)
                 for (a, b), w in sorted(graph.edges.items())]
    touched = set()
    for i, j, _ in all_edges:
        touched.add(i)
        touched.add(j)
    active = sorted(touched)
    remap = {orig: k for k, orig in enumerate(active)}
    edges = [(remap[i], remap[j], w) for i, j, w in all_edges]
    m = len(active)

    if m == 0:
        loss, canon = 0.0, ()
        method = "exact"
    else:
        if params.method == "exact" or (params.method == "auto" and m <= params.exact_limit):
            loss, _, canon = _exact_search(m, edges)
            method = "exact"
        else:
            loss, _, canon = _anneal(m, edges, params)
            method = "anneal"

    assignment = {}
    next_label = max(canon) + 1 if canon else 0
    for k, uid in enumerate(ids):
        if k in remap:
            assignment[uid] = canon[remap[k]]
        else:
            assignment[uid] = next_label
            next_label += 1
    # canonical dense labels over all nodes in id order
    relabel = {}
    for uid in ids:
        lab = assignment[uid]
        if lab not in relabel:
            relabel[lab] = len(relabel)
        assignment[uid] = relabel[lab]

    denom = sum(abs(w) for _, _, w in edges)
    normalized = loss / denom if denom > 0 else 0.0
    return Clustering(lemma=graph.lemma, assignment=assignment, loss=loss,
                      normalized_loss=normalized,
                      n_clusters=len(set(assignment.values())) if assignment else 0,
                      method=method)
