"""Command-line pipeline driver.

Each subcommand wraps one pipeline stage: corpus ingestion and target
selection, usage sampling, usage-graph construction and clustering,
gold-score derivation, annotator agreement, baseline systems, scoring
and threshold sweeps, plus a synthetic-corpus generator.  Options can
come from a key=value config file (--config); command-line flags win.
Exit codes: 0 success, 1 invalid input, 2 internal error or bad usage.
"""

from __future__ import annotations

import argparse
import re
import sys
import traceback
from pathlib import Path

from . import __version__
from .agreement import compute_agreement, filter_words_by_agreement
from .baselines import (binarize_changepoint, binarize_mean_std,
                        cosine_change_scores, freq_diff_scores, freq_gain_loss,
                        orthogonal_procrustes, profile_change_scores,
                        signed_freq_shift, trivial_baselines, PredictionSet)
from .change import derive_change_scores, write_gold
from .clustering import ClusterParams, cluster_wug
from .corpus import (CONTENT_POS, frequency_counts, load_layers,
                     proportional_threshold, read_usages, sample_usages,
                     select_targets, validate_target_index, write_usages)
from .errors import IntegrityError, LscdError, ValidationError
from .evaluation import (SUBTASKS, load_gold_set, read_predictions,
                         score_submission, threshold_sweep, write_predictions)
from .formats import write_tsv
from .sgns import SgnsParams, save_embeddings, train_sgns
from .synth import SynthConfig, generate_synthetic, write_synthetic
from .wug import (build_wug, build_wug_from_judgments, check_cluster_connectivity,
                  group_by_lemma, read_clustering, read_edges, read_judgments,
                  write_clustering, write_edges)

_LAYERS = ("token", "lemma", "pos", "conllu")


def load_config(path) -> dict:
    """Read a key=value config file; # comments and blank lines are skipped."""
    path = Path(path)
    if not path.exists():
        raise ValidationError(f"config file not found: {path}")
    out = {}
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ValidationError(f"bad config line {lineno}: {line!r}")
        key, _, value = stripped.partition("=")
        out[key.strip().replace("-", "_")] = value.strip()
    return out


class Settings:
    """Option resolver: command-line flag, then config entry, then default."""

    def __init__(self, args: argparse.Namespace, config: dict):
        self.args = args
        self.config = config

    def get(self, name, cast=str, default=None, required=False):
        value = getattr(self.args, name, None)
        if value is None and name in self.config:
            raw = self.config[name]
            if cast is bool:
                value = raw.lower() in ("1", "true", "yes", "on")
            else:
                try:
                    value = cast(raw)
                except ValueError:
                    raise ValidationError(
                        f"bad config value {raw!r} for {name}") from None
        if value is None:
            if required:
                flag = "--" + name.replace("_", "-")
                raise ValidationError(f"missing required option {flag}")
            return default
        return value

    def seed(self) -> int:
        return self.get("seed", int, 0)


def _warn(message: str) -> None:
    print(f"warning: {message}", file=sys.stderr)


def _add_corpus_flags(sp, periods=("c1", "c2")) -> None:
    for tag in periods:
        for layer in _LAYERS:
            sp.add_argument(f"--{tag}-{layer}", metavar="PATH",
                            help=f"{layer} layer file for period {tag.upper()}")


def _load_period(st: Settings, tag: str):
    paths = {}
    for layer in _LAYERS:
        p = st.get(f"{tag}_{layer}")
        if p is not None:
            paths[layer] = p
    if not paths:
        raise ValidationError(f"no corpus layers given for period {tag.upper()}")
    return load_layers(paths, period=tag.upper())


def _pos_filter(st: Settings):
    choice = st.get("pos_filter", str, "content")
    if choice == "content":
        return CONTENT_POS
    if choice == "all":
        return None
    raise ValidationError(f"pos-filter must be 'content' or 'all', got {choice!r}")


def _read_targets(path) -> list:
    path = Path(path)
    if not path.exists():
        raise ValidationError(f"target list not found: {path}")
    lines = [ln for ln in path.read_text(encoding="utf-8").splitlines()
             if ln.strip() and not ln.startswith("#")]
    if lines and lines[0].split("\t")[0] == "lemma":
        lines = lines[1:]
    targets = [ln.split("\t")[0].strip() for ln in lines]
    if not targets:
        raise ValidationError(f"target list {path} is empty")
    return targets


def _safe_name(lemma: str) -> str:
    return re.sub(r"[^\w.-]", "_", lemma)


def _graphs_from_files(usages_path, edges_path) -> dict:
    """Rebuild per-lemma graphs from a usage TSV and an aggregated edge TSV."""
    usages = read_usages(usages_path)
    by_lemma: dict[str, list] = {}
    for u in usages:
        by_lemma.setdefault(u.lemma, []).append(u)
    edge_map = read_edges(edges_path)
    unknown = sorted(set(edge_map) - set(by_lemma))
    if unknown:
        raise IntegrityError(f"edges reference lemmas without usages: {unknown[:5]}")
    graphs = {}
    for lemma in sorted(edge_map):
        entry = edge_map[lemma]
        graph = build_wug(by_lemma[lemma], entry["edges"], lemma)
        graph.edge_counts = dict(entry["counts"])
        graphs[lemma] = graph
    return graphs


# ---------------------------------------------------------------- subcommands

def cmd_ingest(st: Settings) -> int:
    pos_filter = _pos_filter(st)
    rows = []
    loaded = 0
    for tag in ("c1", "c2"):
        if not any(st.get(f"{tag}_{layer}") for layer in _LAYERS):
            continue
        corpus = _load_period(st, tag)
        stats = frequency_counts(corpus, pos_filter)
        print(f"{corpus.period}: {len(corpus.sentences)} sentences, "
              f"{corpus.n_tokens} tokens, {len(stats.counts)} distinct lemmas "
              f"(layers: {', '.join(sorted(corpus.layers))})")
        for lemma, count in sorted(stats.counts.items(), key=lambda kv: (-kv[1], kv[0])):
            rows.append([corpus.period, lemma, count])
        loaded += 1
    if not loaded:
        raise ValidationError("no corpus layers given for either period")
    out = st.get("out")
    if out:
        write_tsv(out, ["period", "lemma", "count"], rows, __version__)
        print(f"wrote {out}")
    return 0


def cmd_targets(st: Settings) -> int:
    pos_filter = _pos_filter(st)
    stats1 = frequency_counts(_load_period(st, "c1"), pos_filter)
    stats2 = frequency_counts(_load_period(st, "c2"), pos_filter)
    min1 = st.get("min1", int, required=True)
    min2 = st.get("min2", int)
    if min2 is None:
        min2 = proportional_threshold(min1, stats1, stats2)
        print(f"min2 not given, scaled from min1 by token totals: {min2}")
    targets = select_targets(stats1, stats2, min1, min2)
    out = st.get("out", required=True)
    write_tsv(out, ["lemma"], [[t] for t in targets], __version__)
    print(f"selected {len(targets)} targets (min1={min1}, min2={min2}) -> {out}")
    return 0


def cmd_sample(st: Settings) -> int:
    corpora = {tag: _load_period(st, tag) for tag in ("c1", "c2")}
    targets = _read_targets(st.get("targets", required=True))
    count = st.get("n", int, 20)
    seed = st.seed()
    all_usages = []
    for i, lemma in enumerate(sorted(targets)):
        for k, tag in enumerate(("c1", "c2")):
            result = sample_usages(corpora[tag], lemma, count, seed + 2 * i + k)
            if result.undersampled:
                _warn(f"{lemma} {tag.upper()}: only {result.available} of "
                      f"{result.requested} requested usages")
            for u in result.usages:
                check = validate_target_index(u)
                if check.status == "corrected_span":
                    u.start, u.end = check.span
                elif check.status == "mismatch":
                    _warn(f"dropping {u.identifier}: {check.reason}")
                    continue
                all_usages.append(u)
    out = st.get("out", required=True)
    write_usages(out, all_usages, __version__, seed)
    print(f"sampled {len(all_usages)} usages for {len(targets)} targets -> {out}")
    return 0


def cmd_wug_build(st: Settings) -> int:
    usages = read_usages(st.get("usages", required=True))
    judgments = read_judgments(st.get("judgments", required=True))
    groups = group_by_lemma(usages, judgments)
    graphs = []
    stats_rows = []
    for lemma in sorted(groups):
        part = groups[lemma]
        if not part["judgments"]:
            _warn(f"{lemma}: no judgments, skipped")
            continue
        graph = build_wug_from_judgments(part["usages"], part["judgments"])
        graphs.append(graph)
        n1 = len(graph.nodes_in_period("C1"))
        n2 = len(graph.nodes_in_period("C2"))
        av = graph.total_judgments / graph.judged_pairs if graph.judged_pairs else 0.0
        stats_rows.append([lemma, len(graph.nodes), n1, n2, len(graph.edges),
                           graph.judged_pairs, graph.total_judgments, round(av, 3)])
        print(f"{lemma}: {len(graph.nodes)} usages, {len(graph.edges)} edges from "
              f"{graph.judged_pairs} judged pairs ({graph.total_judgments} judgments)")
    if not graphs:
        raise ValidationError("no lemma had any judgments")
    out = st.get("out", required=True)
    write_edges(out, graphs, __version__)
    print(f"wrote {out}")
    stats_out = st.get("stats_out")
    if stats_out:
        write_tsv(stats_out,
                  ["lemma", "usages", "usages_c1", "usages_c2", "edges",
                   "judged_pairs", "judgments", "judgments_per_pair"],
                  stats_rows, __version__)
        print(f"wrote {stats_out}")
    return 0


def cmd_wug_cluster(st: Settings) -> int:
    graphs = _graphs_from_files(st.get("usages", required=True),
                                st.get("edges", required=True))
    params = ClusterParams(
        threshold=st.get("threshold", float, 2.5),
        restarts=st.get("restarts", int, 20),
        max_iters=st.get("max_iters", int, 200),
        seed=st.seed(),
        method=st.get("method", str, "auto"),
        exact_limit=st.get("exact_limit", int, 10))
    figures_dir = st.get("figures_dir")
    assignment: dict = {}
    stats_rows = []
    for lemma, graph in graphs.items():
        clustering = cluster_wug(graph, params)
        overlap = set(assignment) & set(clustering.assignment)
        if overlap:
            raise IntegrityError(
                f"usage identifiers appear under several lemmas: {sorted(overlap)[:3]}")
        assignment.update(clustering.assignment)
        uncompared = len(check_cluster_connectivity(
            graph, clustering.assignment).missing_pairs)
        stats_rows.append([lemma, len(graph.nodes), clustering.n_clusters,
                           clustering.loss, round(clustering.normalized_loss, 6),
                           uncompared, clustering.method])
        print(f"{lemma}: {clustering.n_clusters} clusters, loss {clustering.loss:g} "
              f"({clustering.method})")
        if figures_dir:
            from .plots import plot_wug
            fig_path = Path(figures_dir) / f"{_safe_name(lemma)}.png"
            plot_wug(graph, clustering.assignment, fig_path, params.threshold)
            print(f"  figure -> {fig_path}")
    out = st.get("out", required=True)
    write_clustering(out, assignment, __version__, params.seed)
    print(f"wrote {out}")
    stats_out = st.get("stats_out")
    if stats_out:
        write_tsv(stats_out,
                  ["lemma", "usages", "clusters", "loss", "normalized_loss",
                   "uncompared_pairs", "method"],
                  stats_rows, __version__, params.seed)
        print(f"wrote {stats_out}")
    return 0


def cmd_gold_scores(st: Settings) -> int:
    graphs = _graphs_from_files(st.get("usages", required=True),
                                st.get("edges", required=True))
    assignment = read_clustering(st.get("clusters", required=True))
    rounding = bool(st.get("rounding", bool, False))
    scores = {}
    for lemma, graph in graphs.items():
        sub = {uid: assignment[uid] for uid in graph.nodes if uid in assignment}
        scores[lemma] = derive_change_scores(graph, sub, rounding)
    out = st.get("out", required=True)
    write_gold(out, scores, __version__)
    defined = [s for s in scores.values() if s.graded is not None]
    changed = sum(1 for s in scores.values() if s.binary == 1)
    print(f"gold scores for {len(scores)} words -> {out}")
    if defined:
        mean_graded = sum(s.graded for s in defined) / len(defined)
        print(f"graded defined for {len(defined)}, mean {mean_graded:.3f}; "
              f"binary change for {changed} words")
    for lemma, s in sorted(scores.items()):
        holes = [part for part in ("graded", "binary", "compare_negated")
                 if getattr(s, part) is None]
        if holes:
            _warn(f"{lemma}: undefined {', '.join(holes)}")
    return 0


def cmd_agreement(st: Settings) -> int:
    usages = read_usages(st.get("usages", required=True))
    judgments = read_judgments(st.get("judgments", required=True))
    groups = group_by_lemma(usages, judgments)
    by_word = {lm: part["judgments"] for lm, part in groups.items()}
    metric = st.get("metric", str, "ordinal")
    report = compute_agreement(by_word, metric)

    def fmt(v):
        return "" if v is None else round(v, 4)

    rows = [[lm, len(groups[lm]["usages"]), w.judgment_count, fmt(w.alpha_local),
             fmt(w.alpha_pooled), fmt(w.spearman)]
            for lm, w in sorted(report.per_word.items())]
    out = st.get("out", required=True)
    write_tsv(out, ["lemma", "usages", "judgments", "alpha", "alpha_pooled",
                    "spearman"], rows, __version__)
    print(f"wrote {out}")

    pooled = [j for js in by_word.values() for j in js]
    pairs = {j.pair for j in pooled}
    annotators = {j.annotator for j in pooled}
    n_words = len(groups)
    avg_usages = sum(len(p["usages"]) for p in groups.values()) / n_words
    av = len(pooled) / len(pairs) if pairs else 0.0
    overall = report.overall
    print(f"words: {n_words}  avg usages: {avg_usages:.1f}  "
          f"annotators: {len(annotators)}  judgments: {len(pooled)}  "
          f"per pair: {av:.2f}")
    print(f"alpha ({metric}): {fmt(overall.alpha_local)}  "
          f"mean pairwise spearman: {fmt(overall.spearman)}")
    summary_out = st.get("summary_out")
    if summary_out:
        write_tsv(summary_out,
                  ["words", "avg_usages", "annotators", "judgments",
                   "judgments_per_pair", "alpha", "spearman"],
                  [[n_words, round(avg_usages, 2), len(annotators), len(pooled),
                    round(av, 3), fmt(overall.alpha_local), fmt(overall.spearman)]],
                  __version__)
        print(f"wrote {summary_out}")

    threshold = st.get("threshold", float, 0.3)
    kept, discarded = filter_words_by_agreement(report, threshold)
    if discarded:
        print(f"agreement below {threshold} on both alphas for: "
              f"{', '.join(discarded)}")
    print(f"kept {len(kept)} of {n_words} words")
    kept_out = st.get("kept_out")
    if kept_out:
        write_tsv(kept_out, ["lemma"], [[lm] for lm in kept], __version__)
        print(f"wrote {kept_out}")
    return 0


def _binarizer(st: Settings):
    choice = st.get("binarize", str, "mean-std")
    table = {"mean-std": binarize_mean_std, "changepoint": binarize_changepoint,
             "none": None}
    if choice not in table:
        raise ValidationError(f"binarize must be one of {sorted(table)}, got {choice!r}")
    return table[choice]


def cmd_baseline(st: Settings) -> int:
    mode = st.args.mode
    targets = _read_targets(st.get("targets", required=True))
    out_dir = Path(st.get("out_dir", required=True))
    seed = st.seed()
    preds: dict[str, PredictionSet] = {}

    if mode == "sgns":
        params = SgnsParams(
            dim=st.get("dim", int, 100),
            window=st.get("window", int, 10),
            epochs=st.get("epochs", int, 5),
            negatives=st.get("negatives", int, 5),
            subsample=st.get("subsample", float, 0.001),
            min_count=st.get("min_count", int, 1),
            workers=st.get("workers", int, 1))
        emb = {}
        for tag in ("c1", "c2"):
            corpus = _load_period(st, tag)
            emb[tag] = train_sgns(corpus, params, seed=seed)
            print(f"{tag.upper()}: trained {len(emb[tag].vocab)} vectors "
                  f"(dim {params.dim})")
        save_dir = st.get("save_embeddings")
        if save_dir:
            for tag in ("c1", "c2"):
                save_embeddings(emb[tag], Path(save_dir) / f"{tag}.emb")
            print(f"embeddings -> {save_dir}")
        aligned = orthogonal_procrustes(emb["c1"], emb["c2"])
        graded = cosine_change_scores(aligned, emb["c2"], targets)
        preds["graded"] = graded
        preds["compare"] = PredictionSet(task="compare", values=dict(graded.values),
                                         skipped=list(graded.skipped))
        binarize = _binarizer(st)
        if binarize is not None:
            preds["binary"] = binarize(graded)

    elif mode == "freq":
        stats = {tag: frequency_counts(_load_period(st, tag)) for tag in ("c1", "c2")}
        normalization = st.get("normalization", str, "log_ratio")
        graded = freq_diff_scores(stats["c1"], stats["c2"], targets, normalization)
        preds["graded"] = graded
        binarize = _binarizer(st)
        if binarize is not None:
            binary = binarize(graded)
            shifts = {lm: signed_freq_shift(stats["c1"], stats["c2"], lm, normalization)
                      for lm in graded.values}
            gain, loss = freq_gain_loss(binary, shifts)
            preds.update(binary=binary, gain=gain, loss=loss)

    elif mode == "profile":
        conllu = {}
        for tag in ("c1", "c2"):
            path = st.get(f"{tag}_conllu", required=True)
            conllu[tag] = load_layers({"conllu": path}, period=tag.upper())
        include = st.get("include", str, "both")
        graded = profile_change_scores(conllu["c1"], conllu["c2"], targets, include)
        preds["graded"] = graded
        binarize = _binarizer(st)
        if binarize is not None:
            preds["binary"] = binarize(graded)

    elif mode in ("minority", "random"):
        preds = trivial_baselines(targets, mode, seed)

    else:  # pragma: no cover - argparse restricts choices
        raise ValidationError(f"unknown baseline mode {mode!r}")

    for task in SUBTASKS:
        if task not in preds:
            continue
        pred = preds[task]
        path = out_dir / f"{task}.tsv"
        write_predictions(path, pred.values, __version__, seed)
        print(f"{task}: {len(pred.values)} predictions -> {path}")
        if pred.skipped:
            _warn(f"{task}: no value for {len(pred.skipped)} targets "
                  f"({', '.join(pred.skipped[:5])}"
                  f"{'...' if len(pred.skipped) > 5 else ''})")
    return 0


def cmd_evaluate(st: Settings) -> int:
    gold = load_gold_set(st.get("gold", required=True))
    phase = st.get("phase", int, 1)
    lenient = bool(st.get("lenient", bool, False))
    report = score_submission(gold, st.get("submission", required=True),
                              phase, lenient)
    print(f"phase {phase} evaluation ({len(gold.words)} gold words"
          f"{', lenient' if lenient else ''})")
    rows = []
    for task in SUBTASKS:
        if task not in report.results:
            continue
        metrics = report.results[task]
        coverage = report.coverage.get(task)
        shown = "  ".join(f"{m}={v:.4f}" for m, v in sorted(metrics.items()))
        print(f"  {task}: {shown or 'undefined'}"
              + (f"  (coverage {coverage:.0%})" if coverage is not None else ""))
        for metric, value in sorted(metrics.items()):
            rows.append([task, metric, round(value, 6)])
    for note in report.notes:
        print(f"  note: {note}")
    report_dir = st.get("report_dir")
    if report_dir:
        report_dir = Path(report_dir)
        write_tsv(report_dir / "report.tsv", ["task", "metric", "value"],
                  rows, __version__)
        print(f"wrote {report_dir / 'report.tsv'}")
        if any(report.results.values()):
            from .plots import plot_metrics
            fig = plot_metrics(report, report_dir / "metrics.png")
            print(f"wrote {fig}")
    return 0


def cmd_sweep(st: Settings) -> int:
    gold = load_gold_set(st.get("gold", required=True))
    graded = read_predictions(st.get("graded", required=True))
    step = st.get("step", int, 5)
    if step < 1:
        raise ValidationError("step must be >= 1")
    percentiles = list(range(0, 101, step))
    if percentiles[-1] != 100:
        percentiles.append(100)
    curve = threshold_sweep(gold.component("binary"), graded, percentiles)
    best_p, best_f1 = max(curve, key=lambda pf: pf[1])
    print(f"best F1 {best_f1:.4f} at percentile {best_p:g} "
          f"({len(curve)} points, step {step})")
    out_dir = st.get("out_dir")
    if out_dir:
        out_dir = Path(out_dir)
        write_tsv(out_dir / "sweep.tsv", ["percentile", "f1"],
                  [[p, round(f, 6)] for p, f in curve], __version__)
        from .plots import plot_sweep
        fig = plot_sweep(curve, out_dir / "sweep.png")
        print(f"wrote {out_dir / 'sweep.tsv'}")
        print(f"wrote {fig}")
    return 0


def cmd_synth_gen(st: Settings) -> int:
    config = SynthConfig(
        vocab_size=st.get("vocab_size", int, 500),
        sentences_per_period=st.get("sentences", int, 2000),
        sentence_len=(st.get("min_len", int, 5), st.get("max_len", int, 12)),
        n_planted=st.get("planted", int, 5),
        seed=st.seed(),
        emit_conllu=bool(st.get("conllu", bool, False)))
    result = generate_synthetic(config)
    out_dir = st.get("out_dir", required=True)
    paths = write_synthetic(result, out_dir, __version__)
    tokens = {p: result.corpora[p].n_tokens for p in ("C1", "C2")}
    print(f"generated {config.vocab_size}-word vocabulary, "
          f"{config.sentences_per_period} sentences per period "
          f"({tokens['C1']}/{tokens['C2']} tokens)")
    if result.planted:
        print(f"planted changes: {', '.join(result.planted)}")
    else:
        print("no planted changes")
    print(f"wrote {len(paths)} files to {out_dir}")
    return 0


# -------------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="FILE",
                        help="key=value option file; flags override it")
    common.add_argument("--seed", type=int, help="random seed (default: 0)")

    parser = argparse.ArgumentParser(
        prog="lscd",
        description="Lexical semantic change detection pipeline.")
    parser.add_argument("--version", action="version",
                        version=f"lscd {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    p = sub.add_parser("ingest", parents=[common],
                       help="validate corpora and report frequency statistics")
    _add_corpus_flags(p)
    p.add_argument("--pos-filter", choices=("content", "all"))
    p.add_argument("--out", metavar="PATH", help="frequency table TSV")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("targets", parents=[common],
                       help="select target words by per-period frequency")
    _add_corpus_flags(p)
    p.add_argument("--min1", type=int, help="period-1 frequency threshold")
    p.add_argument("--min2", type=int,
                   help="period-2 threshold (default: min1 scaled by token totals)")
    p.add_argument("--pos-filter", choices=("content", "all"))
    p.add_argument("--out", metavar="PATH")
    p.set_defaults(func=cmd_targets)

    p = sub.add_parser("sample", parents=[common],
                       help="sample usages of the target words from both periods")
    _add_corpus_flags(p)
    p.add_argument("--targets", metavar="PATH")
    p.add_argument("--n", type=int, help="usages per word and period (default: 20)")
    p.add_argument("--out", metavar="PATH")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("wug-build", parents=[common],
                       help="aggregate judgments into usage-graph edge lists")
    p.add_argument("--usages", metavar="PATH")
    p.add_argument("--judgments", metavar="PATH")
    p.add_argument("--out", metavar="PATH", help="aggregated edge TSV")
    p.add_argument("--stats-out", metavar="PATH")
    p.set_defaults(func=cmd_wug_build)

    p = sub.add_parser("wug-cluster", parents=[common],
                       help="cluster usage graphs into senses")
    p.add_argument("--usages", metavar="PATH")
    p.add_argument("--edges", metavar="PATH")
    p.add_argument("--out", metavar="PATH", help="cluster assignment TSV")
    p.add_argument("--stats-out", metavar="PATH")
    p.add_argument("--figures-dir", metavar="DIR",
                   help="render one graph figure per word")
    p.add_argument("--threshold", type=float,
                   help="relatedness threshold (default: 2.5)")
    p.add_argument("--restarts", type=int)
    p.add_argument("--max-iters", type=int)
    p.add_argument("--method", choices=("auto", "exact", "anneal"))
    p.add_argument("--exact-limit", type=int)
    p.set_defaults(func=cmd_wug_cluster)

    p = sub.add_parser("gold-scores", parents=[common],
                       help="derive change scores from clustered graphs")
    p.add_argument("--usages", metavar="PATH")
    p.add_argument("--edges", metavar="PATH")
    p.add_argument("--clusters", metavar="PATH")
    p.add_argument("--rounding", action="store_true", default=None,
                   help="round sense-count thresholds to integers")
    p.add_argument("--out", metavar="PATH")
    p.set_defaults(func=cmd_gold_scores)

    p = sub.add_parser("agreement", parents=[common],
                       help="inter-annotator agreement and exclusion")
    p.add_argument("--usages", metavar="PATH")
    p.add_argument("--judgments", metavar="PATH")
    p.add_argument("--metric", choices=("ordinal", "interval"))
    p.add_argument("--threshold", type=float,
                   help="dual-alpha exclusion threshold (default: 0.3)")
    p.add_argument("--out", metavar="PATH", help="per-word agreement TSV")
    p.add_argument("--summary-out", metavar="PATH")
    p.add_argument("--kept-out", metavar="PATH",
                   help="write lemmas surviving the exclusion rule")
    p.set_defaults(func=cmd_agreement)

    p = sub.add_parser("baseline", parents=[common],
                       help="run a baseline change-detection system")
    p.add_argument("mode", choices=("sgns", "freq", "profile", "minority", "random"))
    _add_corpus_flags(p)
    p.add_argument("--targets", metavar="PATH")
    p.add_argument("--out-dir", metavar="DIR")
    p.add_argument("--binarize", choices=("mean-std", "changepoint", "none"),
                   help="binarization of graded scores (default: mean-std)")
    p.add_argument("--dim", type=int)
    p.add_argument("--window", type=int)
    p.add_argument("--epochs", type=int)
    p.add_argument("--negatives", type=int)
    p.add_argument("--subsample", type=float)
    p.add_argument("--min-count", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--save-embeddings", metavar="DIR")
    p.add_argument("--normalization", choices=("log_ratio", "freq_over_log"))
    p.add_argument("--include", choices=("morph", "deprel", "both"))
    p.set_defaults(func=cmd_baseline)

    p = sub.add_parser("evaluate", parents=[common],
                       help="score a submission directory against gold data")
    p.add_argument("--gold", metavar="PATH")
    p.add_argument("--submission", metavar="DIR")
    p.add_argument("--phase", type=int, choices=(1, 2))
    p.add_argument("--lenient", action="store_true", default=None,
                   help="score the intersection instead of requiring full coverage")
    p.add_argument("--report-dir", metavar="DIR",
                   help="write report.tsv and metrics.png")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("sweep", parents=[common],
                       help="F1 across percentile thresholds of a graded ranking")
    p.add_argument("--gold", metavar="PATH")
    p.add_argument("--graded", metavar="PATH", help="graded prediction TSV")
    p.add_argument("--step", type=int, help="percentile step (default: 5)")
    p.add_argument("--out-dir", metavar="DIR",
                   help="write sweep.tsv and sweep.png")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("synth-gen", parents=[common],
                       help="generate a synthetic corpus pair with planted changes")
    p.add_argument("--out-dir", metavar="DIR")
    p.add_argument("--vocab-size", type=int)
    p.add_argument("--sentences", type=int, help="sentences per period (default: 2000)")
    p.add_argument("--planted", type=int, help="planted changes (default: 5)")
    p.add_argument("--min-len", type=int)
    p.add_argument("--max-len", type=int)
    p.add_argument("--conllu", action="store_true", default=None,
                   help="also emit CoNLL-U layers with grammatical features")
    p.set_defaults(func=cmd_synth_gen)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "command", None) is None:
        parser.print_help(sys.stderr)
        return 2
    try:
        config = load_config(args.config) if getattr(args, "config", None) else {}
        return args.func(Settings(args, config))
    except LscdError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception:
        traceback.print_exc(file=sys.stderr)
        print("internal error", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
