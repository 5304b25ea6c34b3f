"""Scoring of submissions against gold change data.

Phase 1 (graded) requires a graded ranking and scores it by Spearman
rank correlation; phase 2 (binary) requires binary labels and scores
F1/precision/recall with positive class 1.  Optional subtask files
(compare, gain, loss) are scored when present.  Submissions must cover
every gold word; a lenient mode intersects instead for exploratory use.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import stats as _scipy_stats

from .change import read_gold
from .errors import (FormatError, MissingValueError, UndefinedStatisticError,
                     ValidationError)
from .formats import read_tsv_rows

SUBTASKS = ("graded", "binary", "compare", "gain", "loss")
OBLIGATORY = {1: "graded", 2: "binary"}


@dataclass
class GoldSet:
    words: dict  # lemma -> ChangeScores
    split: str = "evaluation"

    def __post_init__(self):
        for lemma, s in self.words.items():
            if s.graded is None or s.binary is None:
                raise ValidationError(
                    f"gold entry {lemma!r} lacks graded or binary value")

    def component(self, task: str) -> dict:
        """Gold values for one subtask, words with missing values omitted."""
        attr = {"graded": "graded", "binary": "binary", "compare": "compare_negated",
                "gain": "gain", "loss": "loss"}[task]
        return {lm: getattr(s, attr) for lm, s in self.words.items()
                if getattr(s, attr) is not None}


@dataclass
class EvalReport:
    phase: int
    results: dict = field(default_factory=dict)   # task -> metric dict
    coverage: dict = field(default_factory=dict)  # task -> fraction of gold covered
    files_found: list = field(default_factory=list)
    notes: list = field(default_factory=list)


def load_gold_set(path, split: str = "evaluation") -> GoldSet:
    return GoldSet(words=read_gold(path), split=split)


def spearman_values(x, y) -> float:
    """Spearman correlation of two equal-length vectors, average ranks for ties."""
    if len(x) != len(y):
        raise ValidationError(f"length mismatch: {len(x)} vs {len(y)}")
    if len(x) < 2:
        raise UndefinedStatisticError("need at least two points")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", _scipy_stats.ConstantInputWarning)
        rho = _scipy_stats.spearmanr(x, y).statistic
    if math.isnan(rho):
        raise UndefinedStatisticError("correlation undefined (constant input)")
    return float(rho)


def _require_coverage(gold: dict, pred: dict, what: str, lenient: bool) -> list:
    missing = sorted(set(gold) - set(pred))
    if missing and not lenient:
        shown = ", ".join(missing[:10]) + ("..." if len(missing) > 10 else "")
        raise MissingValueError(
            f"{what} submission misses {len(missing)} gold words: {shown}")
    return sorted(set(gold) & set(pred))


def spearman(gold: dict, pred: dict, lenient: bool = False) -> float:
    """Spearman over the gold words; missing submissions are a hard error."""
    common = _require_coverage(gold, pred, "graded", lenient)
    if len(common) < 3:
        raise ValidationError(f"need at least 3 common words, got {len(common)}")
    gvals = [gold[w] for w in common]
    if len(set(gvals)) < 2:
        raise UndefinedStatisticError("gold scores are constant")
    return spearman_values(gvals, [pred[w] for w in common])


def binary_metrics(gold: dict, pred: dict, lenient: bool = False
                   ) -> tuple[float, float, float]:
    """(f1, precision, recall) with positive class 1.

    No predicted positives gives precision 0; no gold positives makes
    recall (and thus the whole triple) undefined; F1 is 0 when both
    precision and recall are 0.
    """
    common = _require_coverage(gold, pred, "binary", lenient)
    for source, name in ((gold, "gold"), (pred, "prediction")):
        for w in common:
            if source[w] not in (0, 1):
                raise FormatError(f"non-binary {name} label {source[w]!r} for {w!r}")
    tp = sum(1 for w in common if gold[w] == 1 and pred[w] == 1)
    fp = sum(1 for w in common if gold[w] == 0 and pred[w] == 1)
    fn = sum(1 for w in common if gold[w] == 1 and pred[w] == 0)
    if tp + fn == 0:
        raise UndefinedStatisticError("no gold positives, recall undefined")
    precision = tp / (tp + fp) if tp + fp > 0 else 0.0
    recall = tp / (tp + fn)
    f1 = 0.0 if precision + recall == 0 else 2 * precision * recall / (precision + recall)
    return f1, precision, recall


def read_predictions(path, kind: str = "float") -> dict:
    """Read a two-column lemma/value prediction TSV (no header row)."""
    out = {}
    for lineno, (lemma, raw) in read_tsv_rows(path, 2):
        if lemma in out:
            raise FormatError(f"duplicate lemma {lemma!r}", path=path, line=lineno)
        try:
            value = float(raw)
        except ValueError:
            raise FormatError(f"bad value {raw!r}", path=path, line=lineno) from None
        if not math.isfinite(value):
            raise FormatError(f"non-finite value {raw!r}", path=path, line=lineno)
        if kind == "label":
            if value not in (0.0, 1.0):
                raise FormatError(f"non-binary label {raw!r}", path=path, line=lineno)
            value = int(value)
        out[lemma] = value
    return out


def write_predictions(path, values: dict, version: str, seed=None) -> None:
    from .formats import provenance_line
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(provenance_line(version, seed) + "\n")
        for lemma in sorted(values):
            fh.write(f"{lemma}\t{values[lemma]}\n")


def score_submission(gold: GoldSet, submission_dir, phase: int = 1,
                     lenient: bool = False) -> EvalReport:
    """Score a submission directory (graded/binary/compare/gain/loss.tsv).

    The phase's obligatory file must exist; optional files are scored
    when present.  Notes record undefined statistics and skipped files.
    """
    if phase not in OBLIGATORY:
        raise ValidationError(f"phase must be 1 or 2, got {phase}")
    submission_dir = Path(submission_dir)
    report = EvalReport(phase=phase)
    paths = {task: submission_dir / f"{task}.tsv" for task in SUBTASKS}
    must = OBLIGATORY[phase]
    if not paths[must].exists():
        raise MissingValueError(
            f"phase {phase} submission lacks obligatory file {must}.tsv")
    for task in SUBTASKS:
        if not paths[task].exists():
            report.notes.append(f"{task}.tsv absent, subtask skipped")
            continue
        report.files_found.append(f"{task}.tsv")
        kind = "label" if task in ("binary", "gain", "loss") else "float"
        pred = read_predictions(paths[task], kind)
        gold_part = gold.component(task)
        if not gold_part:
            report.notes.append(f"{task}: no gold values, skipped")
            continue
        covered = len(set(gold_part) & set(pred))
        report.coverage[task] = covered / len(gold_part)
        try:
            if task in ("graded", "compare"):
                rho = spearman(gold_part, pred, lenient)
                report.results[task] = {"spearman": rho}
            else:
                f1, precision, recall = binary_metrics(gold_part, pred, lenient)
                report.results[task] = {"f1": f1, "precision": precision,
                                        "recall": recall}
        except UndefinedStatisticError as exc:
            report.results[task] = {}
            report.notes.append(f"{task}: undefined ({exc})")
    return report


def threshold_sweep(gold_binary: dict, graded_pred: dict,
                    percentiles=None) -> list[tuple[float, float]]:
    """F1 of percentile-threshold binarizations of a graded ranking.

    At percentile p the top p% of scores (ties on the boundary included)
    are labeled 1.  Default grid: 0 to 100 in steps of 5.
    """
    if percentiles is None:
        percentiles = list(range(0, 101, 5))
    common = _require_coverage(gold_binary, graded_pred, "sweep", lenient=False)
    scores = sorted((graded_pred[w] for w in common), reverse=True)
    n = len(scores)
    curve = []
    for p in percentiles:
        if not 0 <= p <= 100:
            raise ValidationError(f"percentile {p} outside [0, 100]")
        take = math.ceil(p * n / 100)
        if take == 0:
            labels = {w: 0 for w in common}
        else:
            cut = scores[take - 1]
            labels = {w: int(graded_pred[w] >= cut) for w in common}
        f1, _, _ = binary_metrics({w: gold_binary[w] for w in common}, labels)
        curve.append((float(p), f1))
    return curve


def random_performance(gold: GoldSet, reps: int = 100, seed: int = 0) -> dict:
    """Average performance of the uniform-random baseline over repetitions.

    Returns mean Spearman on graded gold and mean F1/P/R on binary gold;
    repetitions are seeded deterministically from ``seed``.
    """
    from .baselines import trivial_baselines

    gold_graded = gold.component("graded")
    gold_binary = gold.component("binary")
    words = sorted(gold.words)
    rhos, f1s, precisions, recalls = [], [], [], []
    for rep in range(reps):
        preds = trivial_baselines(words, mode="random", seed=seed + rep)
        try:
            rhos.append(spearman(gold_graded, preds["graded"].values))
        except UndefinedStatisticError:
            pass
        try:
            f1, precision, recall = binary_metrics(gold_binary, preds["binary"].values)
        except UndefinedStatisticError:
            continue
        f1s.append(f1)
        precisions.append(precision)
        recalls.append(recall)
    out = {"reps": reps}
    if rhos:
        out["mean_spearman"] = float(np.mean(rhos))
    if f1s:
        out["mean_f1"] = float(np.mean(f1s))
        out["mean_precision"] = float(np.mean(precisions))
        out["mean_recall"] = float(np.mean(recalls))
    return out
