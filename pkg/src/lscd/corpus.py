"""Diachronic corpus ingestion.

A corpus is one time period of text, loadable in several layers:

- ``raw``    one sentence per line, untokenized
- ``token``  one sentence per line, whitespace-separated surface forms
- ``lemma``  one sentence per line, whitespace-separated lemmas
- ``pos``    one sentence per line, whitespace-separated UPOS tags
- ``conllu`` 10-column CoNLL-U with blank-line sentence separation

Layers of the same period can be combined; sentences are matched by
position and must agree in token count.  Lemma comparisons are
case-insensitive after NFC normalization throughout.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import FormatError, IntegrityError, ValidationError
from .formats import read_tsv_dicts

PERIODS = ("C1", "C2")
CONTENT_POS = frozenset({"NOUN", "VERB", "ADJ", "ADV"})
LAYERS = ("raw", "token", "lemma", "pos", "conllu")

_GROUPING_TO_PERIOD = {"1": "C1", "2": "C2", "C1": "C1", "C2": "C2"}
_PERIOD_TO_GROUPING = {"C1": "1", "C2": "2"}


def norm_lemma(text: str) -> str:
    """NFC-normalize and lowercase, the comparison key for all lemma matching."""
    return unicodedata.normalize("NFC", text).lower()


def _is_punct(text: str) -> bool:
    return bool(text) and all(unicodedata.category(ch).startswith("P") for ch in text)


@dataclass
class Token:
    surface: str | None = None
    lemma: str | None = None
    pos: str | None = None
    morph: dict = field(default_factory=dict)
    deprel: str | None = None

    def form(self) -> str:
        """Best available written form (surface, falling back to lemma)."""
        return self.surface if self.surface is not None else (self.lemma or "")


@dataclass
class SentenceRecord:
    sentence_id: str
    tokens: list[Token]
    raw_text: str | None = None


@dataclass
class Corpus:
    period: str
    sentences: list[SentenceRecord]
    layers: frozenset = frozenset()

    def __post_init__(self):
        if self.period not in PERIODS:
            raise ValidationError(f"period must be one of {PERIODS}, got {self.period!r}")

    @property
    def n_tokens(self) -> int:
        return sum(len(s.tokens) for s in self.sentences)


@dataclass
class VocabStats:
    period: str
    counts: dict
    total_tokens: int
    pos_filter: frozenset | None = None


@dataclass
class Usage:
    lemma: str
    period: str
    identifier: str
    context: str
    start: int
    end: int
    sentence_id: str = ""
    pos: str = ""
    surface: str | None = None  # known exact form when sampled from a corpus

    @property
    def span_text(self) -> str:
        return self.context[self.start:self.end]


@dataclass
class ValidationResult:
    status: str  # ok | corrected_span | mismatch
    span: tuple[int, int] | None
    reason: str = ""


@dataclass
class SampleResult:
    usages: list[Usage]
    requested: int
    available: int

    @property
    def undersampled(self) -> bool:
        return self.available < self.requested


def _read_lines(path) -> list[str]:
    path = Path(path)
    if not path.exists():
        raise FormatError("file not found", path=path)
    with open(path, encoding="utf-8") as fh:
        return fh.read().splitlines()


def _parse_line_layer(path, layer: str) -> list[SentenceRecord]:
    lines = _read_lines(path)
    # tool-written layer files open with a provenance comment; skip it
    while lines and lines[0].startswith("# lscd"):
        lines = lines[1:]
    sentences = []
    for i, line in enumerate(lines, start=1):
        sid = f"s{i}"
        if layer == "raw":
            sentences.append(SentenceRecord(sid, [], raw_text=line))
            continue
        items = line.split()
        if layer == "token":
            toks = [Token(surface=it) for it in items]
        elif layer == "lemma":
            toks = [Token(lemma=it) for it in items]
        else:  # pos
            toks = [Token(pos=it) for it in items]
        sentences.append(SentenceRecord(sid, toks))
    return sentences


def _parse_conllu(path) -> list[SentenceRecord]:
    sentences = []
    tokens: list[Token] = []
    sent_id = None
    count = 0

    def flush():
        nonlocal tokens, sent_id, count
        if tokens:
            count += 1
            sentences.append(SentenceRecord(sent_id or f"s{count}", tokens))
        tokens, sent_id = [], None

    for lineno, line in enumerate(_read_lines(path), start=1):
        if not line.strip():
            flush()
            continue
        if line.startswith("#"):
            if line[1:].strip().startswith("sent_id"):
                _, _, value = line.partition("=")
                sent_id = value.strip()
            continue
        cols = line.split("\t")
        if len(cols) != 10:
            raise FormatError(f"expected 10 columns, got {len(cols)}", path=path, line=lineno)
        tid, form, lemma, upos, _xpos, feats, _head, deprel, _deps, _misc = cols
        if "-" in tid or "." in tid:
            continue  # multiword ranges and empty nodes carry no counts
        morph = {}
        if feats not in ("_", ""):
            for item in feats.split("|"):
                if "=" not in item:
                    raise FormatError(f"bad FEATS item {item!r}", path=path, line=lineno)
                key, _, value = item.partition("=")
                morph[key] = value
        tokens.append(Token(surface=form, lemma=None if lemma == "_" else lemma,
                            pos=None if upos == "_" else upos, morph=morph,
                            deprel=None if deprel == "_" else deprel))
    flush()
    return sentences


def load_corpus(path, layer: str, period: str = "C1") -> Corpus:
    """Load a single layer file as a Corpus."""
    if layer not in LAYERS:
        raise ValidationError(f"unknown layer {layer!r}, expected one of {LAYERS}")
    if layer == "conllu":
        sentences = _parse_conllu(path)
    else:
        sentences = _parse_line_layer(path, layer)
    return Corpus(period=period, sentences=sentences, layers=frozenset({layer}))


def combine_layers(corpora: list[Corpus]) -> Corpus:
    """Merge single-layer corpora of the same period into one multi-layer corpus.

    Sentences are aligned by position; differing sentence or token counts
    raise IntegrityError naming the offending sentence.
    """
    if not corpora:
        raise ValidationError("no corpora to combine")
    period = corpora[0].period
    if any(c.period != period for c in corpora):
        raise IntegrityError("cannot combine corpora from different periods")
    lengths = {len(c.sentences) for c in corpora}
    if len(lengths) != 1:
        raise IntegrityError(f"sentence counts differ across layers: {sorted(lengths)}")

    base = None
    for c in corpora:
        if "raw" in c.layers and len(c.layers) == 1:
            continue
        if base is None:
            base = [SentenceRecord(s.sentence_id, [Token() for _ in s.tokens], None)
                    for s in c.sentences]
        for idx, (dst, src) in enumerate(zip(base, c.sentences)):
            if len(dst.tokens) != len(src.tokens):
                raise IntegrityError(
                    f"token count mismatch in sentence {idx + 1} "
                    f"({len(dst.tokens)} vs {len(src.tokens)})")
            for t_dst, t_src in zip(dst.tokens, src.tokens):
                if t_src.surface is not None:
                    t_dst.surface = t_src.surface
                if t_src.lemma is not None:
                    t_dst.lemma = t_src.lemma
                if t_src.pos is not None:
                    t_dst.pos = t_src.pos
                if t_src.morph:
                    t_dst.morph = dict(t_src.morph)
                if t_src.deprel is not None:
                    t_dst.deprel = t_src.deprel
    raw = next((c for c in corpora if "raw" in c.layers), None)
    if base is None:
        base = [SentenceRecord(s.sentence_id, [], s.raw_text) for s in raw.sentences]
    elif raw is not None:
        for dst, src in zip(base, raw.sentences):
            dst.raw_text = src.raw_text
    layers = frozenset().union(*(c.layers for c in corpora))
    return Corpus(period=period, sentences=base, layers=layers)


def load_layers(paths: dict, period: str = "C1") -> Corpus:
    """Load and combine several layer files, e.g. {"lemma": ..., "pos": ...}."""
    return combine_layers([load_corpus(p, layer, period) for layer, p in paths.items()])


def frequency_counts(corpus: Corpus, pos_filter=None) -> VocabStats:
    """Count lemma frequencies, optionally restricted to a POS set.

    ``pos_filter`` may be None (count everything), the string "content"
    (NOUN/VERB/ADJ/ADV), or an explicit set of UPOS tags.  Punctuation
    tokens never enter the lemma counts; ``total_tokens`` counts every
    token regardless.
    """
    if "lemma" not in corpus.layers and "conllu" not in corpus.layers:
        raise ValidationError("frequency_counts needs a lemma or conllu layer")
    if pos_filter == "content":
        pos_filter = CONTENT_POS
    elif pos_filter is not None:
        pos_filter = frozenset(pos_filter)
    if pos_filter is not None and "pos" not in corpus.layers and "conllu" not in corpus.layers:
        raise ValidationError("POS filtering needs a pos or conllu layer")

    counts: dict[str, int] = {}
    total = 0
    for sent in corpus.sentences:
        for tok in sent.tokens:
            total += 1
            if tok.lemma is None:
                continue
            if tok.pos == "PUNCT" or _is_punct(tok.lemma):
                continue
            if pos_filter is not None and tok.pos not in pos_filter:
                continue
            key = norm_lemma(tok.lemma)
            counts[key] = counts.get(key, 0) + 1
    return VocabStats(period=corpus.period, counts=counts, total_tokens=total,
                      pos_filter=pos_filter)


def proportional_threshold(min1: int, stats1: VocabStats, stats2: VocabStats) -> int:
    """Scale a period-1 frequency threshold to period 2 by total token counts."""
    if stats1.total_tokens <= 0:
        raise ValidationError("period-1 corpus has no tokens")
    return round(min1 * stats2.total_tokens / stats1.total_tokens)


def select_targets(stats1: VocabStats, stats2: VocabStats,
                   min1: int, min2: int) -> list[str]:
    """Lemmas meeting both per-period frequency thresholds, sorted lexicographically."""
    if min1 < 1 or min2 < 1:
        raise ValidationError("frequency thresholds must be >= 1")
    picked = [lm for lm, c in stats1.counts.items()
              if c >= min1 and stats2.counts.get(lm, 0) >= min2]
    return sorted(picked)


def sample_usages(corpus: Corpus, lemma: str, count: int, seed: int) -> SampleResult:
    """Sample usages of a lemma uniformly without replacement.

    If fewer than ``count`` occurrences exist, all are returned and the
    result's ``undersampled`` flag is set.  Deterministic under ``seed``;
    returned usages keep corpus order.
    """
    if count < 1:
        raise ValidationError("sample count must be >= 1")
    if "lemma" not in corpus.layers and "conllu" not in corpus.layers:
        raise ValidationError("sampling needs a lemma or conllu layer")
    key = norm_lemma(lemma)
    occurrences = []
    for si, sent in enumerate(corpus.sentences):
        for ti, tok in enumerate(sent.tokens):
            if tok.lemma is not None and norm_lemma(tok.lemma) == key:
                occurrences.append((si, ti))
    if len(occurrences) > count:
        rng = np.random.default_rng(seed)
        idx = sorted(rng.choice(len(occurrences), size=count, replace=False).tolist())
        chosen = [occurrences[i] for i in idx]
    else:
        chosen = occurrences
    usages = []
    for si, ti in chosen:
        sent = corpus.sentences[si]
        forms = [t.form() for t in sent.tokens]
        start = sum(len(f) + 1 for f in forms[:ti])
        end = start + len(forms[ti])
        usages.append(Usage(
            lemma=key, period=corpus.period,
            identifier=f"{key}-{_PERIOD_TO_GROUPING[corpus.period]}-{sent.sentence_id}-{ti}",
            context=" ".join(forms), start=start, end=end,
            sentence_id=sent.sentence_id, pos=sent.tokens[ti].pos or "",
            surface=forms[ti]))
    return SampleResult(usages=usages, requested=count, available=len(occurrences))


def _strip_trailing_punct(text: str) -> str:
    while text and _is_punct(text[-1]):
        text = text[:-1]
    return text


def _lemma_compatible(core: str, usage: Usage) -> bool:
    f = norm_lemma(core)
    if usage.surface is not None:
        # sampled usages know their exact form, so the check is exact
        return f == norm_lemma(_strip_trailing_punct(usage.surface))
    lm = norm_lemma(usage.lemma)
    return f == lm or f.startswith(lm) or lm.startswith(f)


def validate_target_index(usage: Usage) -> ValidationResult:
    """Check that a usage's character span picks out its target token.

    Returns ``ok`` when the span covers a whitespace-delimited token (or
    that token minus its trailing punctuation) whose form is compatible
    with the lemma; ``corrected_span`` with a tightened span when the
    recorded span drags in trailing punctuation; ``mismatch`` otherwise.
    The form/lemma compatibility test is a shared-prefix heuristic, so
    suppletive inflection can be flagged spuriously; sampled usages carry
    their exact surface form and are immune.
    """
    ctx, start, end = usage.context, usage.start, usage.end
    if not (0 <= start < end <= len(ctx)):
        return ValidationResult("mismatch", None, "span out of bounds")
    if (start > 0 and not ctx[start - 1].isspace()) or ctx[start].isspace():
        return ValidationResult("mismatch", None, "span does not start at a token boundary")
    tok_end = start
    while tok_end < len(ctx) and not ctx[tok_end].isspace():
        tok_end += 1
    if end > tok_end:
        return ValidationResult("mismatch", None, "span crosses a token boundary")
    span = ctx[start:end]
    core = _strip_trailing_punct(span)
    if not core:
        return ValidationResult("mismatch", None, "span is only punctuation")
    remainder = ctx[end:tok_end]
    if remainder and not _is_punct(remainder):
        return ValidationResult("mismatch", None, "span covers only part of a token")
    if not _lemma_compatible(core, usage):
        return ValidationResult(
            "mismatch", None,
            f"span text {core!r} does not look like a form of {usage.lemma!r}")
    if len(core) < len(span):
        return ValidationResult("corrected_span", (start, start + len(core)),
                                "trailing punctuation stripped")
    return ValidationResult("ok", (start, end))


USAGE_COLUMNS = ["lemma", "pos", "grouping", "identifier", "context",
                 "indexes_target_token"]


def write_usages(path, usages: list[Usage], version: str, seed=None) -> None:
    from .formats import write_tsv
    rows = []
    for u in usages:
        if "\t" in u.context or "\n" in u.context:
            raise ValidationError(
                f"context of usage {u.identifier} contains tab/newline")
        rows.append([u.lemma, u.pos, _PERIOD_TO_GROUPING[u.period], u.identifier,
                     u.context, f"{u.start}:{u.end}"])
    write_tsv(path, USAGE_COLUMNS, rows, version, seed)


def read_usages(path) -> list[Usage]:
    """Read a usage TSV.  Extra columns are tolerated; required ones are not."""
    out = []
    for row in read_tsv_dicts(path):
        line = row.get("__line__")
        for col in USAGE_COLUMNS:
            if col not in row:
                raise FormatError(f"missing column {col!r}", path=path, line=line)
        grouping = row["grouping"].strip()
        if grouping not in _GROUPING_TO_PERIOD:
            raise FormatError(f"bad grouping {grouping!r}", path=path, line=line)
        spec = row["indexes_target_token"].strip()
        first = spec.split(",")[0]  # tolerate multi-span lists; target is the first
        if ":" not in first:
            raise FormatError(f"bad index spec {spec!r}", path=path, line=line)
        s, _, e = first.partition(":")
        try:
            start, end = int(s), int(e)
        except ValueError:
            raise FormatError(f"bad index spec {spec!r}", path=path, line=line) from None
        out.append(Usage(lemma=norm_lemma(row["lemma"]),
                         period=_GROUPING_TO_PERIOD[grouping],
                         identifier=row["identifier"], context=row["context"],
                         start=start, end=end, pos=row["pos"]))
    return out
