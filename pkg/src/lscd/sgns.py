"""Skip-gram with negative sampling, trained from scratch.

Follows the classic formulation: input vectors are updated for context
words against the center word's output vector plus sampled noise words,
with a dynamically shrunk window, frequent-word subsampling, a
unigram^0.75 noise distribution and a linearly decaying learning rate.
Training is deterministic for a fixed seed in single-worker mode;
multi-worker mode interleaves unlocked updates on the shared matrices
and gives up determinism, as asynchronous SGD does.
"""

from __future__ import annotations

import struct
import threading
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.special import expit

from .corpus import Corpus, norm_lemma
from .errors import FormatError, ValidationError

_MAGIC = b"EMB\x01"


@dataclass
class SgnsParams:
    dim: int = 100
    window: int = 10
    epochs: int = 5
    negatives: int = 5
    subsample: float = 0.001
    lr_initial: float = 0.025
    lr_final: float = 0.0001
    min_count: int = 1
    workers: int = 1


@dataclass
class EmbeddingMatrix:
    vocab: list
    vectors: np.ndarray
    epoch_losses: list | None = None
    _index: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if len(self.vocab) != self.vectors.shape[0]:
            raise ValidationError("vocab size does not match vector row count")
        if not np.all(np.isfinite(self.vectors)):
            raise ValidationError("embedding matrix contains non-finite entries")
        self._index = {w: i for i, w in enumerate(self.vocab)}

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def __contains__(self, lemma) -> bool:
        return lemma in self._index

    def vector(self, lemma) -> np.ndarray:
        return self.vectors[self._index[lemma]]


def _sentences_as_ids(corpus: Corpus, word_to_id: dict) -> list:
    out = []
    for sent in corpus.sentences:
        ids = [word_to_id[norm_lemma(t.lemma)] for t in sent.tokens
               if t.lemma is not None and norm_lemma(t.lemma) in word_to_id]
        if ids:
            out.append(np.array(ids, dtype=np.int64))
    return out


def _keep_probabilities(counts: np.ndarray, subsample: float) -> np.ndarray:
    """Classic subsampling curve: keep prob (sqrt(z/s)+1)*s/z for z=relative freq."""
    if subsample <= 0:
        return np.ones(len(counts))
    z = counts / counts.sum()
    keep = (np.sqrt(z / subsample) + 1.0) * (subsample / z)
    return np.minimum(keep, 1.0)


class _Trainer:
    def __init__(self, sentences, counts, params: SgnsParams, seed: int):
        self.sentences = sentences
        self.params = params
        v = len(counts)
        rng = np.random.default_rng(seed)
        self.syn0 = ((rng.random((v, params.dim)) - 0.5) / params.dim).astype(np.float32)
        self.syn1 = np.zeros((v, params.dim), dtype=np.float32)
        noise = counts.astype(np.float64) ** 0.75
        self.noise_cdf = np.cumsum(noise / noise.sum())
        self.keep = _keep_probabilities(counts, params.subsample)
        self.total_words = int(sum(len(s) for s in sentences))
        self.processed = 0
        self.seed = seed

    def lr(self) -> float:
        p = self.params
        horizon = max(1, self.total_words * max(1, p.epochs))
        frac = min(1.0, self.processed / horizon)
        return max(p.lr_final, p.lr_initial * (1.0 - frac))

    def sample_noise(self, rng, size) -> np.ndarray:
        return np.searchsorted(self.noise_cdf, rng.random(size))

    def train_sentence(self, sent, rng) -> None:
        p = self.params
        kept = sent[rng.random(len(sent)) < self.keep[sent]]
        self.processed += len(sent)
        n = len(kept)
        if n < 2:
            return
        lr = self.lr()
        windows = rng.integers(1, p.window + 1, size=n)
        syn0, syn1 = self.syn0, self.syn1
        for t in range(n):
            b = windows[t]
            ctx = np.concatenate((kept[max(0, t - b):t], kept[t + 1:t + 1 + b]))
            if len(ctx) == 0:
                continue
            center = kept[t]
            neg = self.sample_noise(rng, (len(ctx), p.negatives))
            valid = neg != center  # a noise draw equal to the target is skipped
            in_vecs = syn0[ctx]
            out_pos = syn1[center].copy()
            out_neg = syn1[neg]
            g_pos = (1.0 - expit(in_vecs @ out_pos)) * lr
            g_neg = -expit(np.einsum("cd,ckd->ck", in_vecs, out_neg)) * lr * valid
            grad_in = g_pos[:, None] * out_pos + np.einsum("ck,ckd->cd", g_neg, out_neg)
            syn1[center] += (g_pos[:, None] * in_vecs).sum(axis=0)
            np.add.at(syn1, neg.reshape(-1),
                      (g_neg[:, :, None] * in_vecs[:, None, :]).reshape(-1, p.dim))
            np.add.at(syn0, ctx, grad_in)


def _probe_pairs(sentences, trainer: _Trainer, limit: int = 512):
    """A fixed set of (input, output, negatives) triples for loss monitoring."""
    rng = np.random.default_rng(trainer.seed + 7919)
    inputs, outputs = [], []
    for sent in sentences:
        for t in range(len(sent) - 1):
            inputs.append(sent[t + 1])
            outputs.append(sent[t])
            if len(inputs) >= limit:
                break
        if len(inputs) >= limit:
            break
    if not inputs:
        return None
    negs = trainer.sample_noise(rng, (len(inputs), trainer.params.negatives))
    return np.array(inputs), np.array(outputs), negs


def _probe_loss(trainer: _Trainer, probe) -> float:
    inputs, outputs, negs = probe
    in_vecs = trainer.syn0[inputs]
    pos = np.sum(in_vecs * trainer.syn1[outputs], axis=1)
    neg = np.einsum("cd,ckd->ck", in_vecs, trainer.syn1[negs])
    eps = 1e-10
    loss = -(np.log(expit(pos) + eps) + np.log(expit(-neg) + eps).sum(axis=1))
    return float(loss.mean())


def train_sgns(corpus: Corpus, params: SgnsParams | None = None, seed: int = 0,
               track_loss: bool = False) -> EmbeddingMatrix:
    """Train skip-gram negative-sampling embeddings on a lemma corpus."""
    params = params or SgnsParams()
    if "lemma" not in corpus.layers and "conllu" not in corpus.layers:
        raise ValidationError("SGNS training needs a lemma or conllu layer")
    counts: dict[str, int] = {}
    for sent in corpus.sentences:
        for tok in sent.tokens:
            if tok.lemma is not None:
                key = norm_lemma(tok.lemma)
                counts[key] = counts.get(key, 0) + 1
    vocab = sorted((w for w, c in counts.items() if c >= params.min_count),
                   key=lambda w: (-counts[w], w))
    if not vocab:
        raise ValidationError("empty vocabulary after min-count filtering")
    word_to_id = {w: i for i, w in enumerate(vocab)}
    sentences = _sentences_as_ids(corpus, word_to_id)
    count_arr = np.array([counts[w] for w in vocab], dtype=np.int64)

    trainer = _Trainer(sentences, count_arr, params, seed)
    probe = _probe_pairs(sentences, trainer) if track_loss else None
    losses = []
    if probe is not None:
        losses.append(_probe_loss(trainer, probe))

    if params.workers <= 1:
        rng = np.random.default_rng(seed + 1)
        for _ in range(params.epochs):
            for sent in sentences:
                trainer.train_sentence(sent, rng)
            if probe is not None:
                losses.append(_probe_loss(trainer, probe))
    else:
        for epoch in range(params.epochs):
            threads = []
            for w in range(params.workers):
                shard = sentences[w::params.workers]
                wrng = np.random.default_rng((seed + 1, epoch, w))
                threads.append(threading.Thread(
                    target=lambda sh=shard, r=wrng: [trainer.train_sentence(s, r)
                                                     for s in sh]))
            for th in threads:
                th.start()
            for th in threads:
                th.join()
            if probe is not None:
                losses.append(_probe_loss(trainer, probe))

    return EmbeddingMatrix(vocab=vocab, vectors=trainer.syn0,
                           epoch_losses=losses if track_loss else None)


def save_embeddings(em: EmbeddingMatrix, path) -> None:
    """Write vectors as little-endian binary with a plain-text vocab sidecar.

    Layout: 4-byte magic, uint32 row count, uint32 dim, uint8 item size
    (4 or 8 bytes per float), then row-major little-endian floats.  The
    vocab goes to <path>.vocab, one lemma per line.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    arr = em.vectors
    itemsize = 8 if arr.dtype == np.float64 else 4
    dtype = "<f8" if itemsize == 8 else "<f4"
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<IIB", arr.shape[0], arr.shape[1], itemsize))
        fh.write(np.ascontiguousarray(arr, dtype=dtype).tobytes())
    with open(path.with_suffix(path.suffix + ".vocab"), "w", encoding="utf-8") as fh:
        for w in em.vocab:
            fh.write(w + "\n")


def load_embeddings(path) -> EmbeddingMatrix:
    path = Path(path)
    vocab_path = path.with_suffix(path.suffix + ".vocab")
    if not path.exists() or not vocab_path.exists():
        raise FormatError("embedding file or vocab sidecar missing", path=path)
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != _MAGIC:
            raise FormatError("bad magic, not an embedding file", path=path)
        rows, dim, itemsize = struct.unpack("<IIB", fh.read(9))
        if itemsize not in (4, 8):
            raise FormatError(f"unsupported item size {itemsize}", path=path)
        dtype = "<f8" if itemsize == 8 else "<f4"
        data = fh.read(rows * dim * itemsize)
        if len(data) != rows * dim * itemsize:
            raise FormatError("truncated embedding data", path=path)
        vectors = np.frombuffer(data, dtype=dtype).reshape(rows, dim).copy()
    with open(vocab_path, encoding="utf-8") as fh:
        vocab = fh.read().splitlines()
    if len(vocab) != rows:
        raise FormatError(f"vocab sidecar has {len(vocab)} entries for {rows} rows",
                          path=vocab_path)
    return EmbeddingMatrix(vocab=vocab, vectors=vectors)
