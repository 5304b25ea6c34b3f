"""End-to-end tests of the command-line pipeline.

One session-scoped fixture drives every stage on a small synthetic
corpus pair with simulated annotators, then individual tests inspect
the written artifacts, exit codes and idempotence guarantees.
"""

import itertools

import pytest

from lscd import __version__
from lscd.change import read_gold
from lscd.cli import main
from lscd.corpus import read_usages
from lscd.formats import read_tsv_dicts
from lscd.synth import SynthConfig, generate_synthetic
from lscd.wug import Judgment, read_clustering, read_edges, write_judgments

SYNTH = dict(vocab_size=60, sentences_per_period=300, n_planted=2, seed=11)


def run_ok(*argv):
    assert main(list(argv)) == 0


def simulate_judgments(result, usages_path, out_path):
    """Two perfectly agreeing annotators judging by sentence topic."""
    usages = read_usages(usages_path)

    def topic_of(usage):
        idx = 0 if usage.period == "C1" else 1
        votes = [0, 0]
        for w in usage.context.split():
            if w in result.topics:
                votes[result.topics[w][idx]] += 1
        return 0 if votes[0] >= votes[1] else 1

    topic = {u.identifier: topic_of(u) for u in usages}
    by_lemma = {}
    for u in usages:
        by_lemma.setdefault(u.lemma, []).append(u)
    judgments = []
    for lemma in sorted(by_lemma):
        ids = sorted(u.identifier for u in by_lemma[lemma])
        for a, b in itertools.combinations(ids, 2):
            value = 4 if topic[a] == topic[b] else 1
            judgments.append(Judgment(a, b, "ann1", value))
            judgments.append(Judgment(a, b, "ann2", value))
    # a third annotator who cannot decide on a handful of pairs
    first = sorted(by_lemma)[0]
    ids = sorted(u.identifier for u in by_lemma[first])[:3]
    for a, b in itertools.combinations(ids, 2):
        judgments.append(Judgment(a, b, "ann3", 0))
    write_judgments(out_path, judgments, __version__)


@pytest.fixture(scope="session")
def workspace(tmp_path_factory):
    ws = tmp_path_factory.mktemp("pipeline")
    corp = ws / "corpus"
    run_ok("synth-gen", "--out-dir", str(corp), "--vocab-size", "60",
           "--sentences", "300", "--planted", "2", "--seed", "11", "--conllu")
    layer_flags = []
    for tag in ("c1", "c2"):
        layer_flags += [f"--{tag}-lemma", str(corp / f"{tag}_lemma.txt"),
                        f"--{tag}-pos", str(corp / f"{tag}_pos.txt")]
    run_ok("targets", *layer_flags, "--min1", "20", "--out", str(ws / "targets.tsv"))
    run_ok("sample", *layer_flags, "--targets", str(ws / "targets.tsv"),
           "--n", "6", "--seed", "3", "--out", str(ws / "usages.tsv"))
    result = generate_synthetic(SynthConfig(**SYNTH, emit_conllu=True))
    simulate_judgments(result, ws / "usages.tsv", ws / "judgments.tsv")
    run_ok("wug-build", "--usages", str(ws / "usages.tsv"),
           "--judgments", str(ws / "judgments.tsv"),
           "--out", str(ws / "edges.tsv"), "--stats-out", str(ws / "wug-stats.tsv"))
    run_ok("wug-cluster", "--usages", str(ws / "usages.tsv"),
           "--edges", str(ws / "edges.tsv"), "--seed", "1", "--restarts", "3",
           "--out", str(ws / "clusters.tsv"),
           "--stats-out", str(ws / "cluster-stats.tsv"),
           "--figures-dir", str(ws / "figs"))
    run_ok("gold-scores", "--usages", str(ws / "usages.tsv"),
           "--edges", str(ws / "edges.tsv"), "--clusters", str(ws / "clusters.tsv"),
           "--out", str(ws / "gold.tsv"))
    run_ok("agreement", "--usages", str(ws / "usages.tsv"),
           "--judgments", str(ws / "judgments.tsv"),
           "--out", str(ws / "agreement.tsv"),
           "--summary-out", str(ws / "agreement-summary.tsv"),
           "--kept-out", str(ws / "kept.tsv"))
    run_ok("baseline", "freq", *layer_flags, "--targets", str(ws / "targets.tsv"),
           "--out-dir", str(ws / "sub-freq"))
    run_ok("baseline", "sgns", *layer_flags, "--targets", str(ws / "targets.tsv"),
           "--out-dir", str(ws / "sub-sgns"), "--dim", "16", "--window", "3",
           "--epochs", "2", "--min-count", "3", "--seed", "2")
    run_ok("baseline", "profile", "--c1-conllu", str(corp / "c1.conllu"),
           "--c2-conllu", str(corp / "c2.conllu"),
           "--targets", str(ws / "targets.tsv"), "--out-dir", str(ws / "sub-prof"))
    run_ok("baseline", "minority", "--targets", str(ws / "targets.tsv"),
           "--out-dir", str(ws / "sub-min"))
    run_ok("baseline", "random", "--targets", str(ws / "targets.tsv"),
           "--seed", "7", "--out-dir", str(ws / "sub-rand"))
    run_ok("evaluate", "--gold", str(ws / "gold.tsv"),
           "--submission", str(ws / "sub-sgns"),
           "--report-dir", str(ws / "report-sgns"))
    run_ok("evaluate", "--gold", str(ws / "gold.tsv"),
           "--submission", str(ws / "sub-min"), "--phase", "2",
           "--report-dir", str(ws / "report-min"))
    run_ok("sweep", "--gold", str(ws / "gold.tsv"),
           "--graded", str(ws / "sub-sgns" / "graded.tsv"),
           "--out-dir", str(ws / "sweep"))
    return ws, result


def test_synth_outputs_carry_provenance(workspace):
    ws, _ = workspace
    for name in ("c1_lemma.txt", "c2_pos.txt", "c1.conllu", "manifest.tsv"):
        first = (ws / "corpus" / name).read_text().splitlines()[0]
        assert first == f"# lscd {__version__} seed=11"


def test_targets_include_planted(workspace):
    ws, result = workspace
    rows = read_tsv_dicts(ws / "targets.tsv")
    targets = [r["lemma"] for r in rows]
    assert len(targets) == 29
    assert targets == sorted(targets)
    for w in result.planted:
        assert w in targets


def test_sampled_usages(workspace):
    ws, _ = workspace
    usages = read_usages(ws / "usages.tsv")
    targets = {r["lemma"] for r in read_tsv_dicts(ws / "targets.tsv")}
    assert {u.lemma for u in usages} == targets
    ids = [u.identifier for u in usages]
    assert len(ids) == len(set(ids))
    per = {}
    for u in usages:
        per[(u.lemma, u.period)] = per.get((u.lemma, u.period), 0) + 1
    assert all(1 <= n <= 6 for n in per.values())
    for u in usages:
        assert u.context[u.start:u.end] == u.lemma


def test_edges_file(workspace):
    ws, _ = workspace
    edges = read_edges(ws / "edges.tsv")
    targets = {r["lemma"] for r in read_tsv_dicts(ws / "targets.tsv")}
    assert set(edges) == targets
    for entry in edges.values():
        assert all(1.0 <= w <= 4.0 for w in entry["edges"].values())
        assert all(n >= 2 for n in entry["counts"].values())


def test_cluster_assignment_covers_all_usages(workspace):
    ws, _ = workspace
    assignment = read_clustering(ws / "clusters.tsv")
    usages = read_usages(ws / "usages.tsv")
    assert set(assignment) == {u.identifier for u in usages}
    stats = read_tsv_dicts(ws / "cluster-stats.tsv")
    assert len(stats) == 29
    for row in stats:
        assert int(row["clusters"]) >= 1
        assert float(row["normalized_loss"]) <= 0.5


def test_wug_figures_rendered(workspace):
    ws, _ = workspace
    figures = sorted(p.name for p in (ws / "figs").glob("*.png"))
    assert len(figures) == 29


def test_gold_scores_recover_planted_words(workspace):
    ws, result = workspace
    gold = read_gold(ws / "gold.tsv")
    assert len(gold) == 29
    for lemma, s in gold.items():
        if lemma in result.planted:
            assert s.graded == 1.0
            assert (s.binary, s.gain, s.loss) == (1, 1, 1)
            assert s.compare_negated == -1.0
        else:
            assert s.graded == 0.0
            assert s.binary == 0


def test_agreement_report(workspace):
    ws, _ = workspace
    rows = read_tsv_dicts(ws / "agreement.tsv")
    assert len(rows) == 29
    for row in rows:
        # identical annotators: alpha 1 where defined, else blank
        assert row["alpha"] in ("", "1.0")
        assert row["spearman"] in ("", "1.0")
    summary = read_tsv_dicts(ws / "agreement-summary.tsv")[0]
    assert summary["words"] == "29"
    assert summary["annotators"] == "3"
    assert summary["alpha"] == "1.0"
    kept = [r["lemma"] for r in read_tsv_dicts(ws / "kept.tsv")]
    assert len(kept) == 29


def test_submission_files(workspace):
    ws, _ = workspace
    assert sorted(p.name for p in (ws / "sub-sgns").iterdir()) == \
        ["binary.tsv", "compare.tsv", "graded.tsv"]
    assert sorted(p.name for p in (ws / "sub-min").iterdir()) == \
        ["binary.tsv", "gain.tsv", "loss.tsv"]
    assert sorted(p.name for p in (ws / "sub-rand").iterdir()) == \
        ["binary.tsv", "compare.tsv", "gain.tsv", "graded.tsv", "loss.tsv"]
    graded = (ws / "sub-freq" / "graded.tsv").read_text().splitlines()
    assert graded[0].startswith("# lscd ")
    assert all(len(line.split("\t")) == 2 for line in graded[1:])


def test_profile_baseline_separates_planted(workspace):
    """The planted topic swap also swaps grammatical profiles."""
    ws, result = workspace
    values = {}
    for line in (ws / "sub-prof" / "graded.tsv").read_text().splitlines()[1:]:
        lemma, score = line.split("\t")
        values[lemma] = float(score)
    planted = [values[w] for w in result.planted]
    others = [v for w, v in values.items() if w not in result.planted]
    assert min(planted) > max(others)


def test_evaluation_reports(workspace):
    ws, _ = workspace
    rows = read_tsv_dicts(ws / "report-sgns" / "report.tsv")
    metrics = {(r["task"], r["metric"]): float(r["value"]) for r in rows}
    assert ("graded", "spearman") in metrics
    assert ("binary", "f1") in metrics
    assert (ws / "report-sgns" / "metrics.png").stat().st_size > 0
    # minority on 2 of 30 positives: P=1/15, R=1
    min_rows = read_tsv_dicts(ws / "report-min" / "report.tsv")
    got = {(r["task"], r["metric"]): float(r["value"]) for r in min_rows}
    assert got[("binary", "recall")] == 1.0
    assert abs(got[("binary", "precision")] - 2 / 29) < 1e-6


def test_sweep_outputs(workspace):
    ws, _ = workspace
    rows = read_tsv_dicts(ws / "sweep" / "sweep.tsv")
    assert [r["percentile"] for r in rows][:3] == ["0.0", "5.0", "10.0"]
    assert rows[0]["f1"] == "0.0"
    assert all(0.0 <= float(r["f1"]) <= 1.0 for r in rows)
    assert (ws / "sweep" / "sweep.png").stat().st_size > 0


def test_rerun_is_byte_identical(workspace, tmp_path):
    ws, _ = workspace
    corp = ws / "corpus"
    layer_flags = []
    for tag in ("c1", "c2"):
        layer_flags += [f"--{tag}-lemma", str(corp / f"{tag}_lemma.txt"),
                        f"--{tag}-pos", str(corp / f"{tag}_pos.txt")]
    run_ok("targets", *layer_flags, "--min1", "20", "--out", str(tmp_path / "t.tsv"))
    assert (tmp_path / "t.tsv").read_bytes() == (ws / "targets.tsv").read_bytes()
    run_ok("sample", *layer_flags, "--targets", str(tmp_path / "t.tsv"),
           "--n", "6", "--seed", "3", "--out", str(tmp_path / "u.tsv"))
    assert (tmp_path / "u.tsv").read_bytes() == (ws / "usages.tsv").read_bytes()


def test_config_file_supplies_defaults(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("vocab_size=40\nsentences=50\nplanted=1\nseed=4\n"
                   f"out_dir={tmp_path / 'a'}\n")
    run_ok("synth-gen", "--config", str(cfg))
    manifest = (tmp_path / "a" / "manifest.tsv").read_text().splitlines()
    assert manifest[0] == f"# lscd {__version__} seed=4"
    assert len(manifest) == 3  # provenance, header, one planted word
    # a flag beats the config entry
    run_ok("synth-gen", "--config", str(cfg), "--planted", "0",
           "--out-dir", str(tmp_path / "b"))
    assert len((tmp_path / "b" / "manifest.tsv").read_text().splitlines()) == 2


def test_bad_config_lines(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("no equals sign here\n")
    assert main(["synth-gen", "--config", str(bad),
                 "--out-dir", str(tmp_path / "x")]) == 1
    assert main(["synth-gen", "--config", str(tmp_path / "absent.cfg"),
                 "--out-dir", str(tmp_path / "x")]) == 1


def test_exit_codes(tmp_path, capsys):
    # validation problems exit 1 with a message on stderr
    assert main(["targets", "--min1", "5", "--out", str(tmp_path / "t.tsv")]) == 1
    assert "error:" in capsys.readouterr().err
    assert main(["evaluate", "--gold", str(tmp_path / "missing.tsv"),
                 "--submission", str(tmp_path)]) == 1
    # usage problems exit 2 via argparse
    with pytest.raises(SystemExit) as exc:
        main(["targets", "--no-such-flag"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2
    assert main([]) == 2


def test_internal_errors_exit_2(tmp_path, capsys):
    # a directory where a file is expected is not a validation failure
    assert main(["evaluate", "--gold", str(tmp_path),
                 "--submission", str(tmp_path)]) == 2
    assert "internal error" in capsys.readouterr().err


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
    assert capsys.readouterr().out.strip() == f"lscd {__version__}"


def test_missing_required_option_names_flag(tmp_path, capsys):
    assert main(["sweep", "--graded", str(tmp_path / "g.tsv")]) == 1
    assert "--gold" in capsys.readouterr().err


def test_gold_roundtrip_feeds_evaluation(workspace, tmp_path):
    """Predicting the gold itself scores perfectly."""
    ws, _ = workspace
    gold = read_gold(ws / "gold.tsv")
    sub = tmp_path / "perfect"
    sub.mkdir()
    lines = [f"{lm}\t{s.graded}" for lm, s in sorted(gold.items())]
    (sub / "graded.tsv").write_text("\n".join(lines) + "\n")
    lines = [f"{lm}\t{s.binary}" for lm, s in sorted(gold.items())]
    (sub / "binary.tsv").write_text("\n".join(lines) + "\n")
    run_ok("evaluate", "--gold", str(ws / "gold.tsv"), "--submission", str(sub),
           "--report-dir", str(tmp_path / "rep"))
    rows = read_tsv_dicts(tmp_path / "rep" / "report.tsv")
    got = {(r["task"], r["metric"]): float(r["value"]) for r in rows}
    assert got[("binary", "f1")] == 1.0
    assert got[("graded", "spearman")] > 0.99


def test_simulated_judgments_have_expected_shape(workspace):
    ws, _ = workspace
    from lscd.wug import read_judgments
    judgments = read_judgments(ws / "judgments.tsv")
    annotators = {j.annotator for j in judgments}
    assert annotators == {"ann1", "ann2", "ann3"}
    assert all(j.value in (0, 1, 4) for j in judgments)


def test_phase_choice_enforced_by_parser():
    with pytest.raises(SystemExit) as exc:
        main(["evaluate", "--gold", "x", "--submission", "y", "--phase", "9"])
    assert exc.value.code == 2
