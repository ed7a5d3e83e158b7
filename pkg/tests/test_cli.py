import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from conftest import FIXTURES, random_graph

from digraphlets.cli import (
    dispatch,
    read_annotations_csv,
    read_clustering_csv,
    read_keyed_csv,
    read_manifest_tsv,
)
from digraphlets.evalharness import EvaluationReport
from digraphlets.graph import save_edge_list


def run(*argv):
    return dispatch([str(a) for a in argv])


@pytest.fixture
def graph_file(tmp_path):
    g = random_graph(30, 0.08, seed=1, reciprocal_boost=0.2)
    p = tmp_path / "g.el"
    save_edge_list(g, p)
    return p, g


class TestExitCodes:
    def test_unknown_flag_is_usage_error(self, capsys):
        assert run("count", "--nope") == 1

    def test_unknown_subcommand(self):
        assert run("frobnicate") == 1

    def test_missing_input_is_data_error(self, tmp_path):
        assert run("count", "--in", tmp_path / "absent.el", "--out", tmp_path / "s.csv") == 2

    def test_dgdvs_without_nodes_is_usage_error(self, graph_file, tmp_path):
        p, _ = graph_file
        assert run("dist", p, p, "--measure", "dgdvs", "--out", tmp_path / "d.json") == 1

    def test_console_entry_point(self, tmp_path):
        out = tmp_path / "cat.csv"
        proc = subprocess.run(
            [sys.executable, "-m", "digraphlets.cli", "catalog", "--out", str(out)],
            capture_output=True,
        )
        assert proc.returncode == 0 and out.exists()


class TestCount:
    def test_csv_shape_and_manifest(self, graph_file, tmp_path):
        p, g = graph_file
        out = tmp_path / "sig.csv"
        assert run("count", "--in", p, "--out", out) == 0
        rows = list(csv.reader(open(out)))
        assert rows[0] == ["node"] + [f"o{i}" for i in range(129)]
        assert len(rows) == g.n + 1
        assert all(len(r) == 130 for r in rows)
        manifest = json.load(open(f"{out}.manifest.json"))
        assert manifest["subcommand"] == "count"
        assert str(p) in manifest["inputs"]
        assert manifest["version"]
        assert manifest["wall_clock_s"] >= 0

    def test_readable_by_own_reader(self, graph_file, tmp_path):
        p, g = graph_file
        out = tmp_path / "sig.csv"
        run("count", "--in", p, "--out", out)
        keys, names, mat = read_keyed_csv(out)
        assert len(keys) == g.n and mat.shape == (g.n, 129)

    def test_python_backend_identical(self, graph_file, tmp_path):
        p, _ = graph_file
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        run("count", "--in", p, "--out", a, "--backend", "numba")
        run("count", "--in", p, "--out", b, "--backend", "python")
        assert a.read_bytes() == b.read_bytes()


class TestGenerate:
    def test_byte_identical_reruns(self, tmp_path):
        a, b = tmp_path / "a.el", tmp_path / "b.el"
        for out in (a, b):
            assert run("generate", "--model", "er", "--n", 100, "--density", 0.02,
                       "--seed", 7, "--out", out) == 0
        assert a.read_bytes() == b.read_bytes()
        prov = json.load(open(f"{a}.provenance.json"))
        assert prov["model"] == "er" and prov["seed"] == 7
        assert prov["achieved_m"] == prov["target_m"] == round(0.02 * 100 * 99)


class TestDistAndGcm:
    def test_all_measures_produce_json(self, tmp_path):
        g1 = random_graph(25, 0.1, seed=2)
        g2 = random_graph(25, 0.15, seed=3)
        p1, p2 = tmp_path / "g1.el", tmp_path / "g2.el"
        save_edge_list(g1, p1)
        save_edge_list(g2, p2)
        for measure in ("drgf", "dgdda", "dgcd13", "dgcd129", "indeg", "outdeg", "spectral"):
            out = tmp_path / f"{measure}.json"
            assert run("dist", p1, p2, "--measure", measure, "--out", out) == 0
            rep = json.load(open(out))
            assert rep["measure"] == measure and rep["value"] >= 0.0

    def test_dgdvs_with_node_labels(self, tmp_path):
        g = random_graph(20, 0.15, seed=4)
        p = tmp_path / "g.el"
        save_edge_list(g, p)
        out = tmp_path / "sim.json"
        lab = g.labels[0]
        assert run("dist", p, p, "--measure", "dgdvs", "--node-a", lab, "--node-b", lab,
                   "--out", out) == 0
        assert json.load(open(out))["value"] == pytest.approx(1.0)

    def test_gcm_csv(self, graph_file, tmp_path):
        p, _ = graph_file
        out = tmp_path / "gcm.csv"
        assert run("gcm", "--in", p, "--orbits", 13, "--out", out) == 0
        rows = list(csv.reader(open(out)))
        assert len(rows) == 14
        mat = np.array([[float(x) for x in r[1:]] for r in rows[1:]])
        assert np.allclose(mat, mat.T) and np.allclose(np.diag(mat), 1.0)


class TestCatalogDump:
    def test_forty_rows(self, tmp_path):
        out = tmp_path / "catalog.csv"
        assert run("catalog", "--out", out) == 0
        rows = list(csv.reader(open(out)))
        assert rows[0] == ["graphlet", "size", "edges", "orbits"]
        assert len(rows) == 41
        orbit_ids = {int(o) for r in rows[1:] for o in r[3].split(";")}
        assert orbit_ids == set(range(129))


class TestEvalAndRobustness:
    @pytest.fixture
    def suite_manifest(self, tmp_path):
        rows = []
        for li, density in enumerate((0.04, 0.12)):
            for rep in range(4):
                g = random_graph(35, density, seed=50 + 10 * li + rep)
                p = tmp_path / f"g{li}_{rep}.el"
                save_edge_list(g, p)
                rows.append(f"{p}\tmodel{li}\tcell{rep % 2}")
        manifest = tmp_path / "suite.tsv"
        manifest.write_text("\n".join(rows) + "\n")
        return manifest

    def test_eval_json_and_curve(self, suite_manifest, tmp_path):
        out, curve = tmp_path / "report.json", tmp_path / "curve.csv"
        assert run("eval", "--manifest", suite_manifest, "--measure", "dgcd13",
                   "--out", out, "--curve", curve) == 0
        payload = json.load(open(out))
        rep = EvaluationReport.from_dict(payload["pooled"])
        assert 0.0 <= rep.aupr <= 1.0 and 0.0 <= rep.auc <= 1.0
        rows = list(csv.reader(open(curve)))
        assert rows[0][0] == "threshold" and len(rows) == len(rep.thresholds) + 1

    def test_eval_per_group(self, suite_manifest, tmp_path):
        out = tmp_path / "report.json"
        assert run("eval", "--manifest", suite_manifest, "--measure", "indeg",
                   "--out", out, "--per-group") == 0
        payload = json.load(open(out))
        assert set(payload["groups"]) == {"cell0", "cell1"}

    def test_robustness_json(self, suite_manifest, tmp_path):
        out = tmp_path / "rob.json"
        assert run("robustness", "--manifest", suite_manifest, "--measure", "indeg",
                   "--kind", "rewire", "--levels", "0.2,0.4", "--repeats", 2,
                   "--seed", 3, "--out", out) == 0
        payload = json.load(open(out))
        assert [lv["level"] for lv in payload["levels"]] == [0.2, 0.4]
        for lv in payload["levels"]:
            assert lv["min_aupr"] <= lv["mean_aupr"] <= lv["max_aupr"]

    def test_bad_manifest(self, tmp_path):
        bad = tmp_path / "bad.tsv"
        bad.write_text("only_one_column\n")
        assert run("eval", "--manifest", bad, "--measure", "indeg",
                   "--out", tmp_path / "r.json") == 2


class TestPipelines:
    def test_wtn_pipeline(self, tmp_path):
        wtn = tmp_path / "wtn.el"
        assert run("build-wtn", "--trades", FIXTURES / "trades.csv", "--coverage", 0.9,
                   "--out", wtn) == 0
        meta = json.load(open(f"{wtn}.meta.json"))
        assert meta["n"] > 0 and meta["m"] > 0

        roles = tmp_path / "roles.csv"
        assert run("count", "--in", wtn, "--out", roles) == 0

        model, preds, sig = tmp_path / "model.json", tmp_path / "pred.csv", tmp_path / "sig.csv"
        assert run("cca", "--roles", roles, "--attributes", FIXTURES / "indicators.csv",
                   "--out-model", model, "--out-predictions", preds,
                   "--out-significance", sig, "--trials", 25, "--seed", 1) == 0
        payload = json.load(open(model))
        assert len(payload["rho"]) == 4
        assert all(0.0 <= r <= 1.0 for r in payload["rho"])
        keys, names, mat = read_keyed_csv(preds)
        assert names == [f"pred_{a}" for a in payload["attribute_names"]]
        sig_rows = list(csv.reader(open(sig)))
        assert sig_rows[0] == ["attribute", "observed_r", "p_value", "significant"]
        assert len(sig_rows) == 5

        scores = tmp_path / "scores.csv"
        assert run("score", "--model", model, "--roles", roles, "--out", scores) == 0
        keys2, cols, vals = read_keyed_csv(scores)
        assert cols == ["brokerage", "peripheral", "brokerage_import", "brokerage_export"]
        assert len(keys2) == len(keys)
        assert np.allclose(vals[:, 0], vals[:, 2] + vals[:, 3], atol=1e-6)

    def test_metabolic_pipeline(self, tmp_path):
        net = tmp_path / "met.el"
        assert run("build-metabolic", "--reactions", FIXTURES / "reactions.csv",
                   "--out", net) == 0
        meta = json.load(open(f"{net}.meta.json"))
        assert meta["n"] == 24 and meta["m"] > 0

        roles = tmp_path / "roles.csv"
        assert run("count", "--in", net, "--out", roles) == 0

        out = tmp_path / "enrichment.csv"
        assert run("enrich", "--clustering", FIXTURES / "clustering.csv",
                   "--annotations", FIXTURES / "annotations.csv",
                   "--alpha", 0.01, "--out", out) == 0
        rows = list(csv.reader(open(out)))
        assert rows[0] == ["cluster", "term", "X", "N", "K", "M", "p", "significant"]
        assert len(rows) > 1
        for r in rows[1:]:
            assert 0.0 <= float(r[6]) <= 1.0
        # the planted chainA/chainB split is strongly enriched
        sig = {(r[0], r[1]) for r in rows[1:] if r[7] == "True"}
        assert ("c0", "chainA") in sig and ("c1", "chainB") in sig

    def test_score_rejects_wrong_width(self, tmp_path):
        model = tmp_path / "model.json"
        roles = tmp_path / "roles.csv"
        roles.write_text("entity,a,b\nx,1,2\n")
        # build a minimal valid model file via the cca pipeline on the same tiny data
        attrs = tmp_path / "attrs.csv"
        attrs.write_text("entity,y\n" + "\n".join(f"e{i},{i}" for i in range(5)) + "\n")
        roles_big = tmp_path / "roles_big.csv"
        rng = np.random.default_rng(0)
        with open(roles_big, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["entity"] + [f"o{i}" for i in range(4)])
            for i in range(5):
                w.writerow([f"e{i}"] + list(rng.integers(0, 5, size=4)))
        assert run("cca", "--roles", roles_big, "--attributes", attrs,
                   "--out-model", model, "--out-predictions", tmp_path / "p.csv") == 0
        assert run("score", "--model", model, "--roles", roles, "--out", tmp_path / "s.csv") == 2


class TestReaders:
    def test_manifest_reader(self, tmp_path):
        p = tmp_path / "m.tsv"
        p.write_text("# comment\na.el\tx\nb.el\ty\tg1\n")
        assert read_manifest_tsv(p) == [("a.el", "x", ""), ("b.el", "y", "g1")]

    def test_clustering_reader_requires_header(self, tmp_path):
        p = tmp_path / "c.csv"
        p.write_text("who,where\na,1\n")
        with pytest.raises(Exception):
            read_clustering_csv(p)

    def test_annotations_reject_nonbinary(self, tmp_path):
        p = tmp_path / "a.csv"
        p.write_text("entity,t\nx,2\n")
        with pytest.raises(Exception):
            read_annotations_csv(p)
