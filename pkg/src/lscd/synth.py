"""Synthetic diachronic corpus pairs with planted sense changes.

Two topics generate sentences from disjoint Zipf-weighted vocabularies;
every sentence belongs to one topic, so words co-occur only within
their topic.  Planted words switch topics between the two periods,
which swaps their entire context distribution, the cleanest possible
semantic change signal.  Everything is driven by one seeded generator,
so a fixed seed reproduces the corpora byte for byte.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .corpus import Corpus, SentenceRecord, Token
from .errors import ValidationError
from .formats import provenance_line, write_tsv

_SYLLABLES = ("ba", "ce", "di", "fo", "gu", "la", "me", "ni",
              "po", "ru", "sa", "te", "vi", "xo", "zu")
_POS_TAGS = ("NOUN", "VERB", "ADJ", "ADV")
_POS_WEIGHTS = (0.5, 0.25, 0.15, 0.1)

# topic-conditioned grammatical flavour for the optional CoNLL-U layer
_CASE_P = {0: 0.75, 1: 0.25}      # P(Case=Nom | topic)
_NUMBER_P = {0: 0.65, 1: 0.35}    # P(Number=Sing | topic)
_DEPRELS = ("nsubj", "obj", "obl")
_DEPREL_P = {0: (0.55, 0.3, 0.15), 1: (0.15, 0.3, 0.55)}


@dataclass
class SynthConfig:
    vocab_size: int = 500
    sentences_per_period: int = 2000
    sentence_len: tuple = (5, 12)
    n_planted: int = 5
    seed: int = 0
    emit_conllu: bool = False
    zipf_exponent: float = 0.9
    planted_rank: int = 12   # frequency rank planted words take inside their topic

    def validate(self) -> None:
        if self.vocab_size < 20:
            raise ValidationError("vocabulary must have at least 20 words")
        if not 0 <= self.n_planted <= self.vocab_size // 4:
            raise ValidationError("planted count must be between 0 and vocab/4")
        lo, hi = self.sentence_len
        if not 2 <= lo <= hi:
            raise ValidationError(f"bad sentence length range {self.sentence_len}")
        if self.sentences_per_period < 1:
            raise ValidationError("need at least one sentence per period")


@dataclass
class SynthResult:
    config: SynthConfig
    corpora: dict                      # "C1"/"C2" -> Corpus
    planted: list                      # lemmas whose topic flips
    vocab: list
    pos_of: dict = field(default_factory=dict)
    topics: dict = field(default_factory=dict)  # lemma -> (topic C1, topic C2)


def _word_name(index: int) -> str:
    """Pronounceable unique lemma from the index written in syllable digits."""
    base = len(_SYLLABLES)
    digits = []
    n = index
    while n:
        digits.append(n % base)
        n //= base
    while len(digits) < 2:
        digits.append(0)
    return "".join(_SYLLABLES[d] for d in reversed(digits))


def _zipf_cdf(weights: np.ndarray) -> np.ndarray:
    return np.cumsum(weights / weights.sum())


def generate_synthetic(config: SynthConfig | None = None) -> SynthResult:
    """Build both periods of a synthetic corpus pair in memory."""
    config = config or SynthConfig()
    config.validate()
    rng = np.random.default_rng(config.seed)

    vocab = [_word_name(i) for i in range(config.vocab_size)]
    pos_idx = rng.choice(len(_POS_TAGS), size=config.vocab_size, p=_POS_WEIGHTS)
    pos_of = {w: _POS_TAGS[k] for w, k in zip(vocab, pos_idx)}

    # even indices start in topic 0, odd in topic 1; planted words are the
    # first of each topic in turn, so flips go both directions
    home = np.arange(config.vocab_size) % 2
    order = rng.permutation(config.vocab_size)
    planted_ids = [int(i) for i in order[:config.n_planted]]
    planted = sorted(vocab[i] for i in planted_ids)

    topic_by_period = {}
    for period, flip in (("C1", False), ("C2", True)):
        topic = home.copy()
        if flip:
            for i in planted_ids:
                topic[i] = 1 - topic[i]
        topic_by_period[period] = topic

    topics = {vocab[i]: (int(topic_by_period["C1"][i]), int(topic_by_period["C2"][i]))
              for i in range(config.vocab_size)}

    corpora = {}
    lo, hi = config.sentence_len
    feat_rng = np.random.default_rng((config.seed, 1)) if config.emit_conllu else None
    for period in ("C1", "C2"):
        topic = topic_by_period[period]
        members = {t: np.flatnonzero(topic == t) for t in (0, 1)}
        cdfs = {}
        for t, ids in members.items():
            ranks = np.arange(1, len(ids) + 1, dtype=np.float64)
            weights = 1.0 / ranks ** config.zipf_exponent
            # planted words jump to a mid-ranked slot so they stay well attested
            for k, i in enumerate(ids):
                if int(i) in planted_ids:
                    weights[k] = 1.0 / config.planted_rank ** config.zipf_exponent
            cdfs[t] = (_zipf_cdf(weights), ids)
        sentences = []
        for s in range(config.sentences_per_period):
            t = int(rng.random() < 0.5)
            length = int(rng.integers(lo, hi + 1))
            cdf, ids = cdfs[t]
            words = ids[np.searchsorted(cdf, rng.random(length))]
            tokens = []
            for w in words:
                lemma = vocab[int(w)]
                tok = Token(surface=lemma, lemma=lemma, pos=pos_of[lemma])
                tokens.append(tok)
            if feat_rng is not None:
                _attach_features(tokens, t, feat_rng)
            sentences.append(SentenceRecord(f"s{s + 1}", tokens))
        layers = {"token", "lemma", "pos"}
        if config.emit_conllu:
            layers.add("conllu")
        corpora[period] = Corpus(period=period, sentences=sentences,
                                 layers=frozenset(layers))
    return SynthResult(config=config, corpora=corpora, planted=planted,
                       vocab=vocab, pos_of=pos_of, topics=topics)


def _attach_features(tokens, topic: int, rng) -> None:
    n = len(tokens)
    case_draw = rng.random(n) < _CASE_P[topic]
    number_draw = rng.random(n) < _NUMBER_P[topic]
    deprel_draw = rng.choice(len(_DEPRELS), size=n, p=_DEPREL_P[topic])
    for k, tok in enumerate(tokens):
        tok.morph = {"Case": "Nom" if case_draw[k] else "Acc",
                     "Number": "Sing" if number_draw[k] else "Plur"}
        tok.deprel = "root" if k == 0 else _DEPRELS[deprel_draw[k]]


def _write_line_layer(path: Path, corpus: Corpus, attr: str, version: str,
                      seed) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(provenance_line(version, seed) + "\n")
        for sent in corpus.sentences:
            fh.write(" ".join(getattr(t, attr) for t in sent.tokens) + "\n")


def _write_conllu(path: Path, corpus: Corpus, version: str, seed) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(provenance_line(version, seed) + "\n")
        for sent in corpus.sentences:
            fh.write(f"# sent_id = {sent.sentence_id}\n")
            for i, tok in enumerate(sent.tokens, start=1):
                feats = "|".join(f"{k}={v}" for k, v in sorted(tok.morph.items()))
                head = 0 if tok.deprel == "root" else 1
                fh.write("\t".join([str(i), tok.surface, tok.lemma, tok.pos, "_",
                                    feats or "_", str(head), tok.deprel or "_",
                                    "_", "_"]) + "\n")
            fh.write("\n")


def write_synthetic(result: SynthResult, out_dir, version: str) -> dict:
    """Write layer files and the planted-word manifest; returns the path map."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    seed = result.config.seed
    paths = {}
    for period, tag in (("C1", "c1"), ("C2", "c2")):
        corpus = result.corpora[period]
        for layer, attr in (("token", "surface"), ("lemma", "lemma"), ("pos", "pos")):
            p = out_dir / f"{tag}_{layer}.txt"
            _write_line_layer(p, corpus, attr, version, seed)
            paths[f"{tag}_{layer}"] = p
        if result.config.emit_conllu:
            p = out_dir / f"{tag}.conllu"
            _write_conllu(p, corpus, version, seed)
            paths[f"{tag}_conllu"] = p
    manifest = out_dir / "manifest.tsv"
    rows = [[w, result.topics[w][0], result.topics[w][1]] for w in result.planted]
    write_tsv(manifest, ["lemma", "topic_c1", "topic_c2"], rows, version, seed)
    paths["manifest"] = manifest
    return paths
