"""Baseline change-detection systems.

1. SGNS embeddings per period, Orthogonal Procrustes alignment, cosine
   distance (training lives in sgns.py; alignment and scoring here).
2. Normalized log-frequency difference.
3. Grammatical-profile cosine distance over CoNLL-U morphology and
   dependency relations.
4. Minority class (label everything changed).
5. Uniform random scores and labels.

Plus the two binarization rules used to turn graded scores into labels:
mean-plus-standard-deviation thresholding and two-segment change-point
splitting.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .corpus import Corpus, VocabStats, norm_lemma
from .errors import ValidationError
from .sgns import EmbeddingMatrix


@dataclass
class PredictionSet:
    task: str  # graded | compare | binary | gain | loss
    values: dict = field(default_factory=dict)  # lemma -> score or label
    skipped: list = field(default_factory=list)  # lemmas without a defined value

    def __post_init__(self):
        if self.task not in ("graded", "compare", "binary", "gain", "loss"):
            raise ValidationError(f"unknown task {self.task!r}")
        for lemma, v in self.values.items():
            if self.task in ("binary", "gain", "loss"):
                if v not in (0, 1):
                    raise ValidationError(f"non-binary label {v!r} for {lemma!r}")
            elif not math.isfinite(v):
                raise ValidationError(f"non-finite score {v!r} for {lemma!r}")


@dataclass
class GrammaticalProfile:
    lemma: str
    period: str
    feature_counts: dict = field(default_factory=dict)


def _preprocess_rows(matrix: np.ndarray) -> np.ndarray:
    """Length-normalize rows, then mean-center columns (alignment preprocessing)."""
    out = np.asarray(matrix, dtype=np.float64)
    norms = np.linalg.norm(out, axis=1, keepdims=True)
    norms[norms == 0] = 1.0
    out = out / norms
    return out - out.mean(axis=0, keepdims=True)


def procrustes_rotation(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Orthogonal Q minimizing ||a Q - b||_F, via SVD of a^T b."""
    u, _, vt = np.linalg.svd(a.T @ b)
    return u @ vt


def orthogonal_procrustes(source: EmbeddingMatrix,
                          target: EmbeddingMatrix) -> EmbeddingMatrix:
    """Rotate the full source space onto the target space.

    The rotation is estimated on the shared vocabulary after
    length-normalizing and mean-centering both matrices; the returned
    matrix is the raw source (all rows) times that rotation, so cosine
    comparisons against the unmodified target are meaningful.
    """
    if source.dim != target.dim:
        raise ValidationError(f"dim mismatch: {source.dim} vs {target.dim}")
    shared = [w for w in source.vocab if w in target]
    if not shared:
        raise ValidationError("no shared vocabulary to align on")
    s = _preprocess_rows(np.stack([source.vector(w) for w in shared]))
    t = _preprocess_rows(np.stack([target.vector(w) for w in shared]))
    q = procrustes_rotation(s, t)
    rotated = np.asarray(source.vectors, dtype=np.float64) @ q
    return EmbeddingMatrix(vocab=list(source.vocab), vectors=rotated)


def cosine_change_scores(e1_aligned: EmbeddingMatrix, e2: EmbeddingMatrix,
                         targets: list) -> PredictionSet:
    """1 - cosine similarity per target; words missing a vector are skipped
    and reported, never silently dropped."""
    values = {}
    skipped = []
    for lemma in targets:
        key = norm_lemma(lemma)
        if key not in e1_aligned or key not in e2:
            skipped.append(key)
            continue
        v1, v2 = e1_aligned.vector(key), e2.vector(key)
        denom = np.linalg.norm(v1) * np.linalg.norm(v2)
        if denom == 0:
            skipped.append(key)
            continue
        values[key] = float(1.0 - np.dot(v1, v2) / denom)
    return PredictionSet(task="graded", values=values, skipped=skipped)


def freq_diff_scores(stats1: VocabStats, stats2: VocabStats, targets: list,
                     normalization: str = "log_ratio") -> PredictionSet:
    """Absolute difference of normalized log frequencies.

    Default reading: x_i = log(freq_i) / log(total_i).  The alternative
    reading x_i = freq_i / log(total_i) sits behind
    ``normalization="freq_over_log"``.  Words unattested in a period are
    skipped and reported.
    """
    if normalization not in ("log_ratio", "freq_over_log"):
        raise ValidationError(f"unknown normalization {normalization!r}")
    for stats in (stats1, stats2):
        if stats.total_tokens < 2:
            raise ValidationError("corpus too small for log normalization")
    values = {}
    skipped = []
    for lemma in targets:
        key = norm_lemma(lemma)
        f1 = stats1.counts.get(key, 0)
        f2 = stats2.counts.get(key, 0)
        if f1 == 0 or f2 == 0:
            skipped.append(key)
            continue
        if normalization == "log_ratio":
            x1 = math.log(f1) / math.log(stats1.total_tokens)
            x2 = math.log(f2) / math.log(stats2.total_tokens)
        else:
            x1 = f1 / math.log(stats1.total_tokens)
            x2 = f2 / math.log(stats2.total_tokens)
        values[key] = abs(x1 - x2)
    return PredictionSet(task="graded", values=values, skipped=skipped)


def signed_freq_shift(stats1: VocabStats, stats2: VocabStats, lemma: str,
                      normalization: str = "log_ratio") -> float | None:
    """Signed version of the frequency score (period 2 minus period 1)."""
    key = norm_lemma(lemma)
    f1, f2 = stats1.counts.get(key, 0), stats2.counts.get(key, 0)
    if f1 == 0 or f2 == 0:
        return None
    if normalization == "log_ratio":
        return (math.log(f2) / math.log(stats2.total_tokens)
                - math.log(f1) / math.log(stats1.total_tokens))
    return f2 / math.log(stats2.total_tokens) - f1 / math.log(stats1.total_tokens)


def grammatical_profile(corpus: Corpus, lemma: str,
                        include: str = "both") -> GrammaticalProfile:
    """Counts of morphological feature values and dependency relations.

    ``include`` selects "morph", "deprel" or "both" feature families.
    """
    if include not in ("morph", "deprel", "both"):
        raise ValidationError(f"unknown profile mode {include!r}")
    key = norm_lemma(lemma)
    counts: dict[str, int] = {}
    for sent in corpus.sentences:
        for tok in sent.tokens:
            if tok.lemma is None or norm_lemma(tok.lemma) != key:
                continue
            if include in ("morph", "both"):
                for feat, value in tok.morph.items():
                    fk = f"{feat}={value}"
                    counts[fk] = counts.get(fk, 0) + 1
            if include in ("deprel", "both") and tok.deprel is not None:
                fk = f"deprel={tok.deprel}"
                counts[fk] = counts.get(fk, 0) + 1
    return GrammaticalProfile(lemma=key, period=corpus.period, feature_counts=counts)


def profile_change_scores(conllu1: Corpus, conllu2: Corpus, targets: list,
                          include: str = "both") -> PredictionSet:
    """Cosine distance between a word's grammatical profiles in the two periods."""
    if "conllu" not in conllu1.layers or "conllu" not in conllu2.layers:
        raise ValidationError("grammatical profiles need CoNLL-U corpora")
    values = {}
    skipped = []
    for lemma in targets:
        p1 = grammatical_profile(conllu1, lemma, include)
        p2 = grammatical_profile(conllu2, lemma, include)
        if not p1.feature_counts or not p2.feature_counts:
            skipped.append(norm_lemma(lemma))
            continue
        keys = sorted(set(p1.feature_counts) | set(p2.feature_counts))
        v1 = np.array([p1.feature_counts.get(k, 0) for k in keys], dtype=np.float64)
        v2 = np.array([p2.feature_counts.get(k, 0) for k in keys], dtype=np.float64)
        sim = float(np.dot(v1, v2) / (np.linalg.norm(v1) * np.linalg.norm(v2)))
        values[norm_lemma(lemma)] = 1.0 - sim
    return PredictionSet(task="graded", values=values, skipped=skipped)


def binarize_mean_std(pred: PredictionSet) -> PredictionSet:
    """Label 1 strictly above mean + population standard deviation."""
    scores = pred.values
    if len(scores) < 2:
        raise ValidationError("mean+std binarization needs at least 2 scores")
    arr = np.array(list(scores.values()), dtype=np.float64)
    threshold = float(arr.mean() + arr.std())
    labels = {w: int(s > threshold) for w, s in scores.items()}
    return PredictionSet(task="binary", values=labels, skipped=list(pred.skipped))


def binarize_changepoint(pred: PredictionSet) -> PredictionSet:
    """Two-segment change-point split on the sorted score list.

    Scores are sorted ascending and split at the index minimizing the
    total within-segment sum of squared deviations; the upper segment is
    labeled 1.  Ties prefer the latest split, so an all-equal list marks
    only its final element.  Labels depend only on score order and gaps.
    """
    scores = pred.values
    if len(scores) < 3:
        raise ValidationError("change-point binarization needs at least 3 scores")
    items = sorted(scores.items(), key=lambda kv: (kv[1], kv[0]))
    values = np.array([v for _, v in items], dtype=np.float64)
    n = len(values)
    csum = np.concatenate(([0.0], np.cumsum(values)))
    csq = np.concatenate(([0.0], np.cumsum(values ** 2)))

    def sse(lo, hi):  # half-open [lo, hi)
        total = csum[hi] - csum[lo]
        sq = csq[hi] - csq[lo]
        return sq - total * total / (hi - lo)

    best_split, best_cost = 1, math.inf
    for split in range(1, n):
        cost = sse(0, split) + sse(split, n)
        if cost <= best_cost + 1e-12:
            best_split, best_cost = split, min(best_cost, cost)
    labels = {w: int(i >= best_split) for i, (w, _) in enumerate(items)}
    return PredictionSet(task="binary", values=labels, skipped=list(pred.skipped))


def trivial_baselines(targets: list, mode: str, seed: int = 0) -> dict:
    """Minority-class and uniform-random baselines.

    Returns a dict of PredictionSets per task.  Minority: label 1 for
    binary/gain/loss on every word.  Random: uniform [0,1] graded and
    compare scores plus fair-coin labels, reproducible by seed.
    """
    keys = [norm_lemma(t) for t in targets]
    if len(set(keys)) != len(keys):
        raise ValidationError("duplicate target lemmas")
    if mode == "minority":
        ones = {w: 1 for w in keys}
        return {task: PredictionSet(task=task, values=dict(ones))
                for task in ("binary", "gain", "loss")}
    if mode == "random":
        rng = np.random.default_rng(seed)
        out = {}
        for task in ("graded", "compare"):
            draws = rng.random(len(keys))
            out[task] = PredictionSet(task=task,
                                      values={w: float(d) for w, d in zip(keys, draws)})
        for task in ("binary", "gain", "loss"):
            draws = rng.integers(0, 2, size=len(keys))
            out[task] = PredictionSet(task=task,
                                      values={w: int(d) for w, d in zip(keys, draws)})
        return out
    raise ValidationError(f"unknown trivial baseline mode {mode!r}")


def freq_gain_loss(binary: PredictionSet, shifts: dict) -> tuple[PredictionSet, PredictionSet]:
    """Gain/loss labels for the frequency baseline.

    A word flagged as changed counts as loss when its signed frequency
    shift is negative, as gain when positive.
    """
    gain, loss = {}, {}
    for w, label in binary.values.items():
        shift = shifts.get(w)
        if shift is None:
            continue
        gain[w] = int(label == 1 and shift > 0)
        loss[w] = int(label == 1 and shift < 0)
    return (PredictionSet(task="gain", values=gain),
            PredictionSet(task="loss", values=loss))
