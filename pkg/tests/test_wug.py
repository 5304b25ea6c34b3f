import pytest
from hypothesis import given, strategies as st

from lscd.errors import FormatError, IntegrityError, ValidationError
from lscd.wug import (Judgment, aggregate_judgments, build_wug,
                      build_wug_from_judgments, check_cluster_connectivity,
                      group_by_lemma, read_clustering, read_judgments,
                      split_distributions, write_clustering, write_judgments)

from conftest import make_graph, make_usage


def J(a, b, value, annotator="ann1"):
    return Judgment(a, b, annotator, value)


def test_judgment_validation():
    with pytest.raises(ValidationError):
        J("a", "b", 5)
    with pytest.raises(ValidationError):
        J("a", "b", -1)
    with pytest.raises(ValidationError):
        J("a", "a", 3)
    assert J("b", "a", 2).pair == ("a", "b")


def test_aggregate_medians():
    js = [J("a", "b", 4), J("a", "b", 2, "ann2"), J("a", "b", 3, "ann3"),
          J("b", "c", 1), J("b", "c", 2, "ann2"),
          J("a", "c", 0), J("a", "c", 4, "ann2")]
    agg = aggregate_judgments(js)
    assert agg[("a", "b")] == 3.0
    assert agg[("b", "c")] == 1.5
    assert agg[("a", "c")] == 4.0  # the 0 drops out before the median


def test_aggregate_drops_all_zero_pairs():
    agg = aggregate_judgments([J("a", "b", 0), J("a", "b", 0, "ann2")])
    assert agg == {}


@given(st.lists(st.integers(1, 4), min_size=1, max_size=9))
def test_aggregate_order_invariant(values):
    js = [J("x", "y", v, f"ann{i}") for i, v in enumerate(values)]
    forward = aggregate_judgments(js)
    backward = aggregate_judgments(list(reversed(js)))
    assert forward == backward
    assert 1.0 <= forward[("x", "y")] <= 4.0


def test_build_wug_basic():
    usages = [make_usage("casa", "C1", "c1"), make_usage("casa", "C1", "c2"),
              make_usage("casa", "C2", "c3")]
    g = build_wug(usages, {("c1", "c2"): 4.0, ("c2", "c3"): 1.5})
    assert g.lemma == "casa"
    assert g.node_ids() == ["c1", "c2", "c3"]
    assert g.nodes_in_period("C1") == ["c1", "c2"]
    assert g.edges[("c1", "c2")] == 4.0
    assert g.judged_pairs == 2


def test_build_wug_lemma_filter():
    usages = [make_usage("casa", "C1", "c1"), make_usage("casa", "C2", "c2"),
              make_usage("perro", "C1", "p1")]
    g = build_wug(usages, {("c1", "c2"): 3.0}, lemma="Casa")
    assert set(g.nodes) == {"c1", "c2"}


def test_build_wug_rejects_bad_input():
    usages = [make_usage("casa", "C1", "c1"), make_usage("casa", "C2", "c2")]
    with pytest.raises(IntegrityError):
        build_wug(usages, {("c1", "c1"): 3.0})
    with pytest.raises(IntegrityError):
        build_wug(usages, {("c1", "nope"): 3.0})
    with pytest.raises(ValidationError):
        build_wug(usages, {("c1", "c2"): 4.5})
    with pytest.raises(ValidationError):
        build_wug(usages, {("c1", "c2"): 0.5})
    with pytest.raises(IntegrityError):
        build_wug(usages + [make_usage("casa", "C2", "c1")], {})
    with pytest.raises(IntegrityError):
        build_wug(usages + [make_usage("perro", "C1", "p1")], {})
    with pytest.raises(ValidationError):
        build_wug([], {})


def test_build_from_judgments_keeps_effort_stats():
    usages = [make_usage("casa", "C1", "c1"), make_usage("casa", "C1", "c2"),
              make_usage("casa", "C2", "c3")]
    js = [J("c1", "c2", 4), J("c1", "c2", 3, "ann2"),
          J("c1", "c3", 0), J("c1", "c3", 0, "ann2"),
          J("c2", "c3", 2)]
    g = build_wug_from_judgments(usages, js)
    assert g.total_judgments == 5
    assert g.judged_pairs == 3          # the all-zero pair still counts here
    assert set(g.edges) == {("c1", "c2"), ("c2", "c3")}
    assert g.edge_counts == {("c1", "c2"): 2, ("c2", "c3"): 1}
    with pytest.raises(IntegrityError):
        build_wug_from_judgments(usages, [J("c1", "ghost", 2)])


def test_group_by_lemma():
    usages = [make_usage("casa", "C1", "c1"), make_usage("casa", "C2", "c2"),
              make_usage("perro", "C1", "p1"), make_usage("perro", "C2", "p2")]
    js = [J("c1", "c2", 4), J("p1", "p2", 1)]
    groups = group_by_lemma(usages, js)
    assert set(groups) == {"casa", "perro"}
    assert [u.identifier for u in groups["casa"]["usages"]] == ["c1", "c2"]
    assert groups["perro"]["judgments"] == [J("p1", "p2", 1)]
    with pytest.raises(IntegrityError):
        group_by_lemma(usages, [J("c1", "p1", 2)])
    with pytest.raises(IntegrityError):
        group_by_lemma(usages, [J("c1", "ghost", 2)])


def test_connectivity_report():
    g = make_graph(n1=4, n2=0, edges={("u1", "u2"): 4.0, ("u3", "u4"): 4.0})
    split = {"u1": 0, "u2": 0, "u3": 1, "u4": 1}
    rep = check_cluster_connectivity(g, split)
    assert not rep.connected
    assert rep.missing_pairs == [(0, 1)]

    g2 = make_graph(n1=4, n2=0, edges={("u1", "u2"): 4.0, ("u3", "u4"): 4.0,
                                       ("u2", "u3"): 1.0})
    rep2 = check_cluster_connectivity(g2, split)
    assert rep2.connected
    assert rep2.missing_pairs == []

    one = check_cluster_connectivity(g, {uid: 0 for uid in g.nodes})
    assert one.connected and one.missing_pairs == []


def test_connectivity_missing_pairs_lists_all_unlinked():
    edges = {("u1", "u2"): 1.0, ("u2", "u3"): 1.0}
    g = make_graph(n1=3, n2=0, edges=edges)
    rep = check_cluster_connectivity(g, {"u1": 0, "u2": 1, "u3": 2})
    # chain connects the meta-graph but 0-2 was never judged directly
    assert rep.connected
    assert rep.missing_pairs == [(0, 2)]


def test_split_distributions():
    g = make_graph(n1=3, n2=2, edges={("u1", "v1"): 2.0})
    assignment = {"u1": 0, "u2": 0, "u3": 1, "v1": 0, "v2": 2}
    d1, d2 = split_distributions(g, assignment)
    assert d1.period == "C1" and d2.period == "C2"
    assert d1.counts == [2, 1, 0]
    assert d2.counts == [1, 0, 1]
    assert d1.total == 3 and d2.total == 2
    with pytest.raises(IntegrityError):
        split_distributions(g, {"u1": 0})


def test_judgment_tsv_round_trip(tmp_path):
    js = [J("c1", "c2", 4), J("c2", "c3", 0, "ann2"),
          Judgment("c1", "c3", "ann3", 2, "tricky case")]
    path = tmp_path / "judgments.tsv"
    write_judgments(path, js, version="0.0-test", seed=1)
    assert read_judgments(path) == js


def test_judgment_reader_tolerates_float_spelling(tmp_path):
    path = tmp_path / "j.tsv"
    lines = ["identifier1\tidentifier2\tannotator\tjudgment",
             "a\tb\tann1\t4.0", "a\tc\tann1\t2"]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    got = read_judgments(path)
    assert [j.value for j in got] == [4, 2]
    assert got[0].comment == ""


@pytest.mark.parametrize("bad", ["4.5", "5", "-1", "high"])
def test_judgment_reader_rejects_bad_values(tmp_path, bad):
    path = tmp_path / "j.tsv"
    lines = ["identifier1\tidentifier2\tannotator\tjudgment",
             f"a\tb\tann1\t{bad}"]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    with pytest.raises(FormatError):
        read_judgments(path)


def test_judgment_reader_rejects_self_pair(tmp_path):
    path = tmp_path / "j.tsv"
    path.write_text("identifier1\tidentifier2\tannotator\tjudgment\n"
                    "a\ta\tann1\t3\n", encoding="utf-8")
    with pytest.raises(FormatError):
        read_judgments(path)


def test_clustering_tsv_round_trip(tmp_path):
    assignment = {"c2": 1, "c1": 0, "c3": 0}
    path = tmp_path / "clusters.tsv"
    write_clustering(path, assignment, version="0.0-test")
    assert read_clustering(path) == assignment
    text = path.read_text(encoding="utf-8").splitlines()
    assert text[2:] == ["c1\t0", "c2\t1", "c3\t0"]  # sorted by identifier
    bad = tmp_path / "bad.tsv"
    bad.write_text("identifier\tcluster\nc1\tred\n", encoding="utf-8")
    with pytest.raises(FormatError):
        read_clustering(bad)
