import math

import numpy as np
import pytest

from lscd.corpus import Usage
from lscd.wug import build_wug


def spearman_oracle(a, b):
    """Fractional ranks plus the explicit Pearson formula."""
    def ranks(v):
        order = sorted(range(len(v)), key=lambda i: v[i])
        r = [0.0] * len(v)
        i = 0
        while i < len(order):
            j = i
            while j + 1 < len(order) and v[order[j + 1]] == v[order[i]]:
                j += 1
            for t in range(i, j + 1):
                r[order[t]] = (i + j) / 2.0 + 1.0
            i = j + 1
        return r

    ra, rb = ranks(a), ranks(b)
    ma, mb = sum(ra) / len(ra), sum(rb) / len(rb)
    num = sum((x - ma) * (y - mb) for x, y in zip(ra, rb))
    da = math.sqrt(sum((x - ma) ** 2 for x in ra))
    db = math.sqrt(sum((y - mb) ** 2 for y in rb))
    return num / (da * db)


def make_usage(lemma, period, ident, context=None, start=0, end=None):
    context = context if context is not None else f"uso de {lemma} aqui"
    if end is None:
        start = context.find(lemma)
        end = start + len(lemma)
    return Usage(lemma=lemma, period=period, identifier=ident,
                 context=context, start=start, end=end)


def make_graph(lemma="palabra", n1=0, n2=0, edges=None):
    """Graph with nodes u1..un1 (period C1) and v1..vn2 (period C2)."""
    usages = [make_usage(lemma, "C1", f"u{i}") for i in range(1, n1 + 1)]
    usages += [make_usage(lemma, "C2", f"v{i}") for i in range(1, n2 + 1)]
    return build_wug(usages, edges or {})


def random_wug(rng, lemma="palabra", n_min=2, n_max=10, edge_prob=0.5,
               weights=(1, 2, 3, 4)):
    """Random graph for clustering tests; node ids z00.. sort stably."""
    n = int(rng.integers(n_min, n_max + 1))
    usages = [make_usage(lemma, "C1" if i % 2 == 0 else "C2", f"z{i:02d}")
              for i in range(n)]
    edges = {}
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < edge_prob:
                w = weights[rng.integers(0, len(weights))]
                edges[(f"z{i:02d}", f"z{j:02d}")] = float(w)
    return build_wug(usages, edges)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
