"""Gold change scores derived from clustered word usage graphs.

- graded change: Jensen-Shannon distance between the two periods'
  normalized sense frequency distributions
- binary change / sense gain / sense loss: low-frequency (k) and
  established-sense (n) thresholds on raw cluster counts
- negated comparability: minus the mean of cross-period edge medians
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import FormatError, UndefinedStatisticError, ValidationError
from .formats import parse_float, parse_int, read_tsv_dicts, write_tsv
from .wug import WordUsageGraph, split_distributions


@dataclass
class ChangeScores:
    lemma: str
    graded: float | None = None
    compare_negated: float | None = None
    binary: int | None = None
    gain: int | None = None
    loss: int | None = None
    k: Fraction | None = None
    n: Fraction | None = None


def kn_thresholds(usage_count: int, rounding: bool = False) -> tuple[Fraction, Fraction]:
    """Thresholds for the gain/loss tests from a period's usage count.

    k = clamp(0.01 * count, 1, 3) and n = clamp(0.1 * count, 3, 5), kept
    as exact rationals so fractional thresholds compare correctly against
    integer cluster counts.  ``rounding=True`` rounds both to integers.
    """
    if usage_count < 1:
        raise ValidationError("usage count must be >= 1")
    k = min(max(Fraction(usage_count, 100), Fraction(1)), Fraction(3))
    n = min(max(Fraction(usage_count, 10), Fraction(3)), Fraction(5))
    if rounding:
        k, n = Fraction(round(k)), Fraction(round(n))
    return k, n


def jsd_distance(p, q) -> float:
    """Jensen-Shannon distance (square root of the base-2 divergence).

    Both arguments must be probability vectors of equal length; terms
    with zero probability contribute nothing (0 * log 0 = 0).
    """
    if len(p) != len(q):
        raise ValidationError(f"length mismatch: {len(p)} vs {len(q)}")
    for vec in (p, q):
        if any(x < 0 for x in vec):
            raise ValidationError("negative probability")
        if abs(sum(vec) - 1.0) > 1e-9:
            raise ValidationError(f"probabilities sum to {sum(vec)}, not 1")
    div = 0.0
    for pi, qi in zip(p, q):
        mi = 0.5 * (pi + qi)
        if pi > 0:
            div += 0.5 * pi * math.log2(pi / mi)
        if qi > 0:
            div += 0.5 * qi * math.log2(qi / mi)
    return math.sqrt(min(max(div, 0.0), 1.0))


def _counts(dist) -> list:
    return list(dist.counts) if hasattr(dist, "counts") else list(dist)


def graded_change(d1, d2) -> float:
    """JSD between normalized sense counts; undefined if a period is empty."""
    c1, c2 = _counts(d1), _counts(d2)
    t1, t2 = sum(c1), sum(c2)
    if t1 <= 0 or t2 <= 0:
        raise UndefinedStatisticError("graded change needs usages in both periods")
    return jsd_distance([c / t1 for c in c1], [c / t2 for c in c2])


def binary_scores(d1, d2, k, n) -> tuple[int, int, int]:
    """(binary, gain, loss) labels from raw cluster counts and thresholds.

    gain: some cluster is at most k in period 1 and at least n in period 2;
    loss is the mirror image; binary = gain or loss.
    """
    c1, c2 = _counts(d1), _counts(d2)
    if len(c1) != len(c2):
        raise ValidationError(f"length mismatch: {len(c1)} vs {len(c2)}")
    gain = int(any(a <= k and b >= n for a, b in zip(c1, c2)))
    loss = int(any(b <= k and a >= n for a, b in zip(c1, c2)))
    return (gain | loss, gain, loss)


def binary_scores_per_period(d1, d2, rounding: bool = False) -> tuple[int, int, int, Fraction, Fraction]:
    """Binary labels with k, n derived from each period's own usage count.

    The gain test reads "rare in period 1 (k from |U1|), established in
    period 2 (n from |U2|)"; loss mirrors it.  Returns labels plus the
    (k, n) pair of the smaller period, which is what gets reported; with
    the symmetric samples of the annotation design both pairs coincide.
    """
    c1, c2 = _counts(d1), _counts(d2)
    if len(c1) != len(c2):
        raise ValidationError(f"length mismatch: {len(c1)} vs {len(c2)}")
    t1, t2 = sum(c1), sum(c2)
    if t1 <= 0 or t2 <= 0:
        raise UndefinedStatisticError("binary labels need usages in both periods")
    k1, n1 = kn_thresholds(t1, rounding)
    k2, n2 = kn_thresholds(t2, rounding)
    gain = int(any(a <= k1 and b >= n2 for a, b in zip(c1, c2)))
    loss = int(any(b <= k2 and a >= n1 for a, b in zip(c1, c2)))
    k, n = kn_thresholds(min(t1, t2), rounding)
    return (gain | loss, gain, loss, k, n)


def compare_score(graph: WordUsageGraph) -> float:
    """Minus the mean of median edge weights over cross-period edges.

    Within-period edges are ignored entirely; a graph without judged
    cross-period pairs has no defined value.
    """
    weights = []
    for (a, b), w in graph.edges.items():
        if graph.nodes[a].period != graph.nodes[b].period:
            weights.append(w)
    if not weights:
        raise UndefinedStatisticError("no judged cross-period pairs")
    return -sum(weights) / len(weights)


def derive_change_scores(graph: WordUsageGraph, assignment: dict,
                         rounding: bool = False) -> ChangeScores:
    """All gold scores for one word from its graph and sense clustering.

    Undefined components (empty period, no cross-period judgments) are
    left as None rather than coerced to 0.
    """
    d1, d2 = split_distributions(graph, assignment)
    scores = ChangeScores(lemma=graph.lemma)
    try:
        scores.graded = graded_change(d1, d2)
    except UndefinedStatisticError:
        pass
    try:
        scores.binary, scores.gain, scores.loss, scores.k, scores.n = \
            binary_scores_per_period(d1, d2, rounding)
    except UndefinedStatisticError:
        pass
    try:
        scores.compare_negated = compare_score(graph)
    except UndefinedStatisticError:
        pass
    return scores


GOLD_COLUMNS = ["lemma", "change_graded", "change_binary", "gain", "loss", "compare"]


def write_gold(path, scores: dict, version: str, seed=None) -> None:
    """Write a lemma -> ChangeScores map as the gold TSV (missing values empty)."""
    rows = []
    for lemma in sorted(scores):
        s = scores[lemma]
        rows.append([lemma, s.graded, s.binary, s.gain, s.loss, s.compare_negated])
    write_tsv(path, GOLD_COLUMNS, rows, version, seed)


def read_gold(path) -> dict:
    out = {}
    for row in read_tsv_dicts(path):
        line = row.get("__line__")
        for col in GOLD_COLUMNS:
            if col not in row:
                raise FormatError(f"missing column {col!r}", path=path, line=line)
        lemma = row["lemma"]
        if lemma in out:
            raise FormatError(f"duplicate lemma {lemma!r}", path=path, line=line)
        s = ChangeScores(lemma=lemma)
        if row["change_graded"] != "":
            s.graded = parse_float(row["change_graded"], path, line)
        if row["change_binary"] != "":
            s.binary = parse_int(row["change_binary"], path, line)
        if row["gain"] != "":
            s.gain = parse_int(row["gain"], path, line)
        if row["loss"] != "":
            s.loss = parse_int(row["loss"], path, line)
        if row["compare"] != "":
            s.compare_negated = parse_float(row["compare"], path, line)
        for label in (s.binary, s.gain, s.loss):
            if label is not None and label not in (0, 1):
                raise FormatError(f"label {label} not in {{0,1}}", path=path, line=line)
        out[lemma] = s
    return out
