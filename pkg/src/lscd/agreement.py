"""Inter-annotator agreement and the agreement-based word exclusion rule.

Units are usage pairs, values the 1-4 relatedness judgments; 0 ("cannot
decide") is excluded before anything is computed.  Krippendorff's alpha
comes in two flavours: the usual one, and a pooled variant whose
expected-disagreement term (and, for the ordinal metric, the distance
function itself) is computed from a global judgment pool rather than the
word's own data.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import UndefinedStatisticError, ValidationError
from .evaluation import spearman_values
from .wug import CANNOT_DECIDE, Judgment


@dataclass
class WordAgreement:
    alpha_local: float | None = None
    alpha_pooled: float | None = None
    spearman: float | None = None
    judgment_count: int = 0


@dataclass
class AgreementReport:
    per_word: dict = field(default_factory=dict)  # lemma -> WordAgreement
    overall: WordAgreement = field(default_factory=WordAgreement)


def _units(judgments: list[Judgment]) -> dict:
    """Pairable value lists per usage pair, 0-judgments dropped."""
    units: dict[tuple, list[int]] = {}
    for j in judgments:
        if j.value != CANNOT_DECIDE:
            units.setdefault(j.pair, []).append(j.value)
    return {pair: vals for pair, vals in units.items() if len(vals) >= 2}


def _coincidences(units: dict) -> dict:
    """Marginal value frequencies of the coincidence matrix.

    The row sums of the coincidence matrix reduce to plain value counts
    over all pairable values, which is all the distance and expectation
    terms need.
    """
    marginals: dict[int, float] = {}
    for vals in units.values():
        for v in vals:
            marginals[v] = marginals.get(v, 0.0) + 1.0
    return marginals


def _distance_fn(metric: str, marginals: dict):
    values = sorted(marginals)
    if metric == "interval":
        return lambda c, k: float(c - k) ** 2
    if metric == "ordinal":
        def dist(c, k):
            lo, hi = (c, k) if c <= k else (k, c)
            run = sum(marginals.get(g, 0.0) for g in values if lo <= g <= hi)
            return (run - (marginals.get(lo, 0.0) + marginals.get(hi, 0.0)) / 2.0) ** 2
        return dist
    raise ValidationError(f"unknown alpha metric {metric!r}")


def krippendorff_alpha(judgments: list[Judgment], metric: str = "ordinal",
                       expected_from: str = "local",
                       pool: list[Judgment] | None = None) -> float:
    """Krippendorff's alpha over usage-pair units.

    ``expected_from="pooled"`` takes the value distribution driving the
    expected-disagreement term (and the ordinal distance function) from
    ``pool`` instead of the scored judgments themselves.  Degenerate
    inputs (no co-judged pairs, zero expected disagreement) raise
    UndefinedStatisticError.
    """
    if expected_from not in ("local", "pooled"):
        raise ValidationError("expected_from must be local or pooled")
    units = _units(judgments)
    if not units:
        raise UndefinedStatisticError("no usage pair with two or more judgments")
    if expected_from == "pooled":
        if pool is None:
            raise ValidationError("pooled mode needs a judgment pool")
        ref_units = _units(pool)
        if not ref_units:
            raise UndefinedStatisticError("judgment pool has no co-judged pairs")
    else:
        ref_units = units
    ref_marginals = _coincidences(ref_units)
    dist = _distance_fn(metric, ref_marginals)

    n_local = sum(len(v) for v in units.values())
    d_obs = 0.0
    for vals in units.values():
        m = len(vals)
        for i in range(m):
            for j in range(m):
                if i != j:
                    d_obs += dist(vals[i], vals[j]) / (m - 1)
    d_obs /= n_local

    n_ref = sum(ref_marginals.values())
    d_exp = 0.0
    for c, nc in ref_marginals.items():
        for k, nk in ref_marginals.items():
            d_exp += nc * nk * dist(c, k)
    d_exp /= n_ref * (n_ref - 1)
    if d_exp <= 0.0:
        raise UndefinedStatisticError("zero expected disagreement (all values identical)")
    return 1.0 - d_obs / d_exp


def pairwise_spearman_mean(judgments: list[Judgment]) -> float:
    """Mean pairwise Spearman between annotators, weighted by overlap size.

    Each annotator pair contributes the rank correlation of their
    co-judged usage pairs (at least two required); pairs whose
    correlation is undefined (a constant value vector) are skipped.
    """
    by_annotator: dict[str, dict] = {}
    for j in judgments:
        if j.value != CANNOT_DECIDE:
            by_annotator.setdefault(j.annotator, {}).setdefault(j.pair, []).append(j.value)
    names = sorted(by_annotator)
    total_weight = 0.0
    acc = 0.0
    for i, a in enumerate(names):
        for b in names[i + 1:]:
            shared = sorted(set(by_annotator[a]) & set(by_annotator[b]))
            if len(shared) < 2:
                continue
            va = [sum(by_annotator[a][p]) / len(by_annotator[a][p]) for p in shared]
            vb = [sum(by_annotator[b][p]) / len(by_annotator[b][p]) for p in shared]
            try:
                rho = spearman_values(va, vb)
            except UndefinedStatisticError:
                continue
            acc += len(shared) * rho
            total_weight += len(shared)
    if total_weight == 0:
        raise UndefinedStatisticError("no annotator pair with enough shared judgments")
    return acc / total_weight


def compute_agreement(judgments_by_word: dict, metric: str = "ordinal") -> AgreementReport:
    """Per-word and overall agreement statistics; undefined values stay None."""
    pool = [j for js in judgments_by_word.values() for j in js]
    report = AgreementReport()

    def stats(judgs, pooled_against=None):
        w = WordAgreement(judgment_count=len(judgs))
        try:
            w.alpha_local = krippendorff_alpha(judgs, metric)
        except UndefinedStatisticError:
            pass
        if pooled_against is not None:
            try:
                w.alpha_pooled = krippendorff_alpha(
                    judgs, metric, expected_from="pooled", pool=pooled_against)
            except UndefinedStatisticError:
                pass
        try:
            w.spearman = pairwise_spearman_mean(judgs)
        except UndefinedStatisticError:
            pass
        return w

    for lemma in sorted(judgments_by_word):
        report.per_word[lemma] = stats(judgments_by_word[lemma], pooled_against=pool)
    report.overall = stats(pool)
    report.overall.alpha_pooled = report.overall.alpha_local
    return report


def filter_words_by_agreement(report: AgreementReport,
                              threshold: float = 0.3) -> tuple[list, list]:
    """Split words into kept/discarded by the dual-alpha exclusion rule.

    A word is discarded only when BOTH its plain and its pooled alpha
    fall below the threshold; an undefined alpha counts as below only
    when both are undefined.
    """
    kept, discarded = [], []
    for lemma in sorted(report.per_word):
        w = report.per_word[lemma]
        if w.alpha_local is None and w.alpha_pooled is None:
            discarded.append(lemma)
        elif (w.alpha_local is not None and w.alpha_local < threshold
              and w.alpha_pooled is not None and w.alpha_pooled < threshold):
            discarded.append(lemma)
        else:
            kept.append(lemma)
    return kept, discarded
