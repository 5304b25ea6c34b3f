"""Word usage graphs.

Nodes are usages of one lemma across both periods; edges carry the
median of human relatedness judgments on the 1-4 scale (4 identical,
3 closely related, 2 distantly related, 1 unrelated).  The value 0 marks
"cannot decide" and is excluded before taking medians; pairs judged only
0 produce no edge.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass, field

from .corpus import Usage, norm_lemma
from .errors import FormatError, IntegrityError, ValidationError
from .formats import read_tsv_dicts, write_tsv

JUDGMENT_VALUES = (0, 1, 2, 3, 4)
CANNOT_DECIDE = 0


@dataclass(frozen=True)
class Judgment:
    usage1: str
    usage2: str
    annotator: str
    value: int
    comment: str = ""

    def __post_init__(self):
        if self.value not in JUDGMENT_VALUES:
            raise ValidationError(
                f"judgment value must be in {JUDGMENT_VALUES}, got {self.value}")
        if self.usage1 == self.usage2:
            raise ValidationError(f"self-judgment on usage {self.usage1!r}")

    @property
    def pair(self) -> tuple[str, str]:
        return tuple(sorted((self.usage1, self.usage2)))


@dataclass
class WordUsageGraph:
    lemma: str
    nodes: dict = field(default_factory=dict)      # usage id -> Usage
    edges: dict = field(default_factory=dict)      # sorted id pair -> median weight
    edge_counts: dict = field(default_factory=dict)  # sorted id pair -> n judgments kept
    judged_pairs: int = 0     # pairs with at least one judgment, 0s included
    total_judgments: int = 0  # individual judgments, 0s included

    def node_ids(self) -> list[str]:
        return sorted(self.nodes)

    def nodes_in_period(self, period: str) -> list[str]:
        return [i for i in self.node_ids() if self.nodes[i].period == period]


@dataclass
class ConnectivityReport:
    connected: bool
    missing_pairs: list  # unordered cluster label pairs with no judged edge


@dataclass
class SenseFrequencyDistribution:
    period: str
    counts: list

    @property
    def total(self) -> int:
        return sum(self.counts)


def aggregate_judgments(judgments: list[Judgment]) -> dict:
    """Median judgment per usage pair, excluding 0 ("cannot decide").

    Pairs whose judgments are all 0 are dropped.  The result maps sorted
    id pairs to medians in [1, 4]; order of judgments and annotator
    identity do not matter.
    """
    by_pair: dict[tuple, list[int]] = {}
    for j in judgments:
        by_pair.setdefault(j.pair, []).append(j.value)
    out = {}
    for pair, values in by_pair.items():
        kept = [v for v in values if v != CANNOT_DECIDE]
        if kept:
            out[pair] = float(statistics.median(kept))
    return out


def build_wug(usages: list[Usage], edges: dict,
              lemma: str | None = None) -> WordUsageGraph:
    """Assemble the graph for one lemma from usages and an aggregated edge map.

    Edge keys are usage id pairs, values median weights in [1, 4].  Edges
    referencing unknown usages, self-loops, duplicate usage ids and
    out-of-range weights raise errors.
    """
    if lemma is not None:
        lemma = norm_lemma(lemma)
        usages = [u for u in usages if u.lemma == lemma]
    lemmas = {u.lemma for u in usages}
    if not usages:
        raise ValidationError("no usages for graph")
    if len(lemmas) > 1:
        raise IntegrityError(f"usages span multiple lemmas: {sorted(lemmas)}")
    lemma = next(iter(lemmas))
    nodes = {}
    for u in usages:
        if u.identifier in nodes:
            raise IntegrityError(f"duplicate usage identifier {u.identifier!r}")
        nodes[u.identifier] = u
    clean = {}
    for (a, b), weight in edges.items():
        if a == b:
            raise IntegrityError(f"self-loop on usage {a!r}")
        missing = [i for i in (a, b) if i not in nodes]
        if missing:
            raise IntegrityError(f"edge references unknown usages: {missing}")
        if not 1.0 <= weight <= 4.0:
            raise ValidationError(f"edge weight {weight} outside [1, 4]")
        clean[tuple(sorted((a, b)))] = float(weight)
    graph = WordUsageGraph(lemma=lemma, nodes=nodes)
    graph.edges = clean
    graph.judged_pairs = len(clean)
    return graph


def build_wug_from_judgments(usages: list[Usage], judgments: list[Judgment],
                             lemma: str | None = None) -> WordUsageGraph:
    """Aggregate raw judgments and build the graph, keeping annotation-effort stats."""
    if lemma is not None:
        key = norm_lemma(lemma)
        usages = [u for u in usages if u.lemma == key]
    ids = {u.identifier for u in usages}
    for j in judgments:
        missing = [i for i in (j.usage1, j.usage2) if i not in ids]
        if missing:
            raise IntegrityError(f"judgment references unknown usages: {missing}")
    graph = build_wug(usages, aggregate_judgments(judgments), lemma)
    seen_pairs: dict[tuple, int] = {}
    kept_counts: dict[tuple, int] = {}
    for j in judgments:
        seen_pairs[j.pair] = seen_pairs.get(j.pair, 0) + 1
        if j.value != CANNOT_DECIDE:
            kept_counts[j.pair] = kept_counts.get(j.pair, 0) + 1
    graph.judged_pairs = len(seen_pairs)
    graph.total_judgments = sum(seen_pairs.values())
    graph.edge_counts = {pair: kept_counts[pair] for pair in graph.edges}
    return graph


def group_by_lemma(usages: list[Usage], judgments: list[Judgment]) -> dict:
    """Split pooled usage and judgment lists into per-lemma groups."""
    id_to_lemma = {}
    groups: dict[str, tuple[list, list]] = {}
    for u in usages:
        if u.identifier in id_to_lemma and id_to_lemma[u.identifier] != u.lemma:
            raise IntegrityError(f"identifier {u.identifier!r} used by two lemmas")
        id_to_lemma[u.identifier] = u.lemma
        groups.setdefault(u.lemma, ([], []))[0].append(u)
    for j in judgments:
        lemmas = {id_to_lemma.get(j.usage1), id_to_lemma.get(j.usage2)}
        if None in lemmas:
            missing = [i for i in (j.usage1, j.usage2) if i not in id_to_lemma]
            raise IntegrityError(f"judgment references unknown usages: {missing}")
        if len(lemmas) > 1:
            raise IntegrityError(
                f"judgment pairs usages of different lemmas: {sorted(lemmas)}")
        groups[lemmas.pop()][1].append(j)
    return {lm: {"usages": us, "judgments": js} for lm, (us, js) in groups.items()}


def check_cluster_connectivity(graph: WordUsageGraph, assignment: dict) -> ConnectivityReport:
    """Whether every cluster is reachable from every other through judged edges.

    ``missing_pairs`` lists all unordered cluster pairs with no direct
    judged edge between them, whether or not the meta-graph is connected.
    """
    labels = sorted(set(assignment.values()))
    linked = set()
    for (a, b) in graph.edges:
        la, lb = assignment.get(a), assignment.get(b)
        if la is None or lb is None:
            raise IntegrityError("assignment does not cover all judged usages")
        if la != lb:
            linked.add((min(la, lb), max(la, lb)))
    missing = [(a, b) for i, a in enumerate(labels) for b in labels[i + 1:]
               if (a, b) not in linked]
    if len(labels) <= 1:
        return ConnectivityReport(True, missing)
    adjacency = {lab: set() for lab in labels}
    for a, b in linked:
        adjacency[a].add(b)
        adjacency[b].add(a)
    seen = {labels[0]}
    frontier = [labels[0]]
    while frontier:
        nxt = frontier.pop()
        for other in adjacency[nxt]:
            if other not in seen:
                seen.add(other)
                frontier.append(other)
    return ConnectivityReport(len(seen) == len(labels), missing)


def split_distributions(graph: WordUsageGraph, assignment: dict
                        ) -> tuple[SenseFrequencyDistribution, SenseFrequencyDistribution]:
    """Per-period cluster frequency distributions (sense counts D1, D2)."""
    missing = [i for i in graph.nodes if i not in assignment]
    if missing:
        raise IntegrityError(f"assignment misses {len(missing)} usages, e.g. {missing[:3]}")
    k = max(assignment[i] for i in graph.nodes) + 1
    d1 = [0] * k
    d2 = [0] * k
    for uid, usage in graph.nodes.items():
        target = d1 if usage.period == "C1" else d2
        target[assignment[uid]] += 1
    return (SenseFrequencyDistribution("C1", d1),
            SenseFrequencyDistribution("C2", d2))


JUDGMENT_COLUMNS = ["identifier1", "identifier2", "annotator", "judgment", "comment"]


def write_judgments(path, judgments: list[Judgment], version: str, seed=None) -> None:
    rows = [[j.usage1, j.usage2, j.annotator, j.value, j.comment] for j in judgments]
    write_tsv(path, JUDGMENT_COLUMNS, rows, version, seed)


def read_judgments(path) -> list[Judgment]:
    """Read a judgment TSV; values like "4.0" are accepted for integer judgments."""
    out = []
    for row in read_tsv_dicts(path):
        line = row.get("__line__")
        for col in ("identifier1", "identifier2", "annotator", "judgment"):
            if col not in row:
                raise FormatError(f"missing column {col!r}", path=path, line=line)
        raw = row["judgment"].strip()
        try:
            value = float(raw)
        except ValueError:
            raise FormatError(f"bad judgment {raw!r}", path=path, line=line) from None
        if not value.is_integer() or int(value) not in JUDGMENT_VALUES:
            raise FormatError(f"judgment {raw!r} outside scale 0-4", path=path, line=line)
        try:
            out.append(Judgment(row["identifier1"], row["identifier2"],
                                row["annotator"], int(value), row.get("comment", "")))
        except ValidationError as exc:
            raise FormatError(str(exc), path=path, line=line) from None
    return out


def write_clustering(path, assignment: dict, version: str, seed=None) -> None:
    rows = [[uid, assignment[uid]] for uid in sorted(assignment)]
    write_tsv(path, ["identifier", "cluster"], rows, version, seed)


def read_clustering(path) -> dict:
    out = {}
    for row in read_tsv_dicts(path):
        line = row.get("__line__")
        if "identifier" not in row or "cluster" not in row:
            raise FormatError("missing identifier/cluster column", path=path, line=line)
        try:
            out[row["identifier"]] = int(row["cluster"])
        except ValueError:
            raise FormatError(f"bad cluster label {row['cluster']!r}",
                              path=path, line=line) from None
    return out


EDGE_COLUMNS = ["lemma", "identifier1", "identifier2", "median", "judgments"]


def write_edges(path, graphs: list, version: str, seed=None) -> None:
    """Write aggregated edge lists of several graphs into one TSV."""
    rows = []
    for graph in graphs:
        for (a, b) in sorted(graph.edges):
            rows.append([graph.lemma, a, b, graph.edges[(a, b)],
                         graph.edge_counts.get((a, b), "")])
    write_tsv(path, EDGE_COLUMNS, rows, version, seed)


def read_edges(path) -> dict:
    """Read an aggregated edge TSV back into per-lemma edge/count maps."""
    out: dict[str, dict] = {}
    for row in read_tsv_dicts(path):
        line = row.get("__line__")
        for col in ("lemma", "identifier1", "identifier2", "median"):
            if col not in row:
                raise FormatError(f"missing column {col!r}", path=path, line=line)
        pair = tuple(sorted((row["identifier1"], row["identifier2"])))
        if pair[0] == pair[1]:
            raise FormatError(f"self-edge on {pair[0]!r}", path=path, line=line)
        try:
            median = float(row["median"])
        except ValueError:
            raise FormatError(f"bad median {row['median']!r}",
                              path=path, line=line) from None
        if not 1.0 <= median <= 4.0 or (median * 2) != int(median * 2):
            raise FormatError(f"median {median} not on the half-step 1-4 scale",
                              path=path, line=line)
        entry = out.setdefault(row["lemma"], {"edges": {}, "counts": {}})
        if pair in entry["edges"]:
            raise FormatError(f"duplicate edge {pair}", path=path, line=line)
        entry["edges"][pair] = median
        raw_count = row.get("judgments", "")
        if raw_count:
            try:
                entry["counts"][pair] = int(raw_count)
            except ValueError:
                raise FormatError(f"bad judgment count {raw_count!r}",
                                  path=path, line=line) from None
    return out
