import csv
import io
import json
import math

import pytest

from walkforge.circuit import Circuit, save_circuit, u3
from walkforge.cli import main
from walkforge.graphs import load, save, hypercube


def read_csv(path):
    return list(csv.DictReader(io.StringIO(path.read_text())))


def level(rows, theta, source="exact-level"):
    return [float(r["probability"]) for r in rows if r["source"] == source and math.isclose(float(r["theta"]), theta)]


class TestHypercubeSeparable:
    def test_theta_list(self, tmp_path):
        out = tmp_path / "sep.csv"
        assert main(["hypercube-separable", "--n", "3", "--theta-list", "pi/2,pi,3pi/2,2pi", "--output", str(out)]) == 0
        rows = read_csv(out)
        assert level(rows, math.pi) == pytest.approx([0, 0, 0, 1], abs=1e-12)
        assert level(rows, math.pi / 2) == pytest.approx([1 / 8, 3 / 8, 3 / 8, 1 / 8], abs=1e-12)
        assert level(rows, 2 * math.pi) == pytest.approx([1, 0, 0, 0], abs=1e-12)
        assert {"exact", "sampled", "exact-level", "sampled-level"} == {r["source"] for r in rows}

    def test_twenty(self, tmp_path):
        out = tmp_path / "sep20.csv"
        assert main(["hypercube-separable", "--n", "20", "--theta", "pi", "--shots", "64", "-o", str(out)]) == 0
        rows = read_csv(out)
        assert level(rows, math.pi)[20] == pytest.approx(1)
        assert level(rows, math.pi, "sampled-level")[20] == 1
        assert "exact" not in {r["source"] for r in rows}

    def test_time_and_theta_exclusive(self, capsys):
        with pytest.raises(SystemExit):
            main(["hypercube-separable", "--n", "2", "--time", "1", "--theta", "1"])

    def test_deterministic_json(self, tmp_path, monkeypatch):
        monkeypatch.setenv("WALKFORGE_SEED", "17")
        args = ["hypercube-separable", "--n", "3", "--theta", "pi/2", "--readout", "0.05", "--format", "json"]
        main(args + ["-o", str(tmp_path / "a.json")])
        main(args + ["-o", str(tmp_path / "b.json")])
        assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()
        assert json.loads((tmp_path / "a.json").read_text())["params"]["seed"] == 17


class TestOneHot:
    def test_default_times(self, tmp_path):
        out = tmp_path / "oh.csv"
        assert main(["hypercube-onehot", "--n", "3", "--steps", "256", "--shots", "500", "-o", str(out)]) == 0
        rows = read_csv(out)
        tv = {float(r["time"]): float(r["value"]) for r in rows if r["label"] == "tv_exact_compiled"}
        assert len(tv) == 4
        assert tv[math.pi / 2] < 2e-3 and tv[math.pi] < 2e-3
        assert max(tv.values()) < 1e-2
        exact_full = [float(r["value"]) for r in rows if r["source"] == "exact" and math.isclose(float(r["time"]), math.pi)]
        assert exact_full == pytest.approx([1, 0, 0, 0], abs=1e-9)

    def test_table_s1(self, tmp_path):
        out = tmp_path / "s1.csv"
        assert main(["hypercube-onehot", "--table-s1", "-o", str(out)]) == 0
        labels = {r["label"] for r in read_csv(out)}
        assert {"discarded_fraction", "best_fit_time", "tv_table_s1_exact"} <= labels


class TestPipeline:
    def test_extract_then_evolve(self, tmp_path):
        circ = tmp_path / "sep.qc"
        save_circuit(Circuit(2, tuple(u3(q, math.pi / 2, -math.pi / 2, math.pi / 2) for q in range(2))), circ)
        graph = tmp_path / "g.json"
        assert main(["extract", "--circuit", str(circ), "--time", "pi/4", "-o", str(graph)]) == 0
        g = load(graph)
        assert g == load(graph)
        assert abs(g.weight(0, 1) - 1) < 1e-9 and abs(g.weight(0, 3)) < 1e-9
        out = tmp_path / "ev.csv"
        assert main(["evolve", "--graph", str(graph), "--initial", "00", "--time", "pi/2", "-o", str(out)]) == 0
        rows = read_csv(out)
        assert float(rows[-1]["probability"]) == pytest.approx(1)

    def test_sample_transfer_is_deterministic(self, tmp_path):
        args = ["sample-transfer", "--qubits", "4", "--depth", "5", "--seed", "7", "--tries", "400"]
        m1, m2 = tmp_path / "m1.jsonl", tmp_path / "m2.jsonl"
        assert main(args + ["--circuit-dir", str(tmp_path / "c1"), "-o", str(m1)]) == 0
        assert main(args + ["--circuit-dir", str(tmp_path / "c2"), "-o", str(m2)]) == 0
        lines1 = [json.loads(x) for x in m1.read_text().splitlines()]
        lines2 = [json.loads(x) for x in m2.read_text().splitlines()]
        assert [(a["try"], a["fidelity"]) for a in lines1] == [(b["try"], b["fidelity"]) for b in lines2]
        for entry in lines1:
            assert entry["depth"] <= 5

    def test_sampled_circuit_evolves_to_all_ones(self, tmp_path):
        manifest = tmp_path / "m.jsonl"
        main(["sample-transfer", "--qubits", "3", "--depth", "3", "--seed", "1", "--tries", "3000",
              "--max-results", "1", "--circuit-dir", str(tmp_path / "c"), "-o", str(manifest)])
        entry = json.loads(manifest.read_text().splitlines()[0])
        graph = tmp_path / "g.json"
        assert main(["extract", "--circuit", entry["circuit_file"], "--time", "1", "-o", str(graph)]) == 0
        out = tmp_path / "ev.csv"
        assert main(["evolve", "--graph", str(graph), "--initial", "000", "--time", "1", "-o", str(out)]) == 0
        probs = {r["label"]: float(r["probability"]) for r in read_csv(out)}
        assert probs["111"] >= 1 - 1e-6

    def test_simulate_onehot(self, tmp_path):
        from walkforge.compilers import load_table_s1

        circ = tmp_path / "s1.qc"
        save_circuit(load_table_s1(), circ)
        out = tmp_path / "sim.csv"
        assert main(["simulate", "--circuit", str(circ), "--onehot", "--shots", "1000", "-o", str(out)]) == 0
        rows = read_csv(out)
        assert sum(float(r["probability"]) for r in rows if r["source"] == "ideal") == pytest.approx(1)


class TestErrors:
    def test_bad_graph_file(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text('{"num_vertices": 2, "edges": [{"i": 0, "j": 1, "re": 1, "im": 1}, {"i": 1, "j": 0, "re": 1, "im": 1}]}')
        out = tmp_path / "never.csv"
        assert main(["evolve", "--graph", str(bad), "--time", "1", "-o", str(out)]) == 1
        err = capsys.readouterr().err
        assert err.count("\n") == 1 and "error" in err
        assert not out.exists()

    def test_missing_time(self, tmp_path, capsys):
        save(hypercube(2), tmp_path / "g.json")
        assert main(["evolve", "--graph", str(tmp_path / "g.json")]) == 1

    def test_bad_circuit(self, tmp_path, capsys):
        (tmp_path / "c.qc").write_text("qubits 2\nu9 q[0]\n")
        assert main(["simulate", "--circuit", str(tmp_path / "c.qc")]) == 1
        assert "line 2" in capsys.readouterr().err
