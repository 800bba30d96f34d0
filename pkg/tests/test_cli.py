import json

import numpy as np
import pytest

from kanmat.cli import main
from kanmat.dataset import read_csv


@pytest.fixture()
def exp_csv(tmp_path):
    out = tmp_path / "exp.csv"
    assert main(["synth", "nonlinear", "-n", "300", "--seed", "42", "-o", str(out)]) == 0
    return out


class TestSynthCommand:
    def test_writes_csv_with_expected_shape(self, exp_csv):
        d = read_csv(exp_csv)
        assert d.names == ("x1", "x2", "x3")
        assert d.n_rows == 300

    def test_precondition_violation_exits_2(self, tmp_path):
        code = main(["synth", "lagged", "-n", "100", "--shift", "150",
                     "-o", str(tmp_path / "x.csv")])
        assert code == 2

    def test_deterministic_output(self, tmp_path):
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        main(["synth", "lagged", "-n", "250", "--shift", "30", "--seed", "9", "-o", str(a)])
        main(["synth", "lagged", "-n", "250", "--shift", "30", "--seed", "9", "-o", str(b)])
        assert a.read_bytes() == b.read_bytes()

    def test_unknown_experiment_exits_2(self, tmp_path, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["synth", "wibble", "-o", str(tmp_path / "x.csv")])
        assert exc.value.code == 2


class TestMatrixCommand:
    def test_pkan_outputs(self, exp_csv, tmp_path, capsys):
        out = tmp_path / "out"
        code = main(["matrix", "pkan", str(exp_csv), "--out", str(out),
                     "--curve-samples", "8"])
        assert code == 0
        doc = json.loads((out / "pkan.json").read_text())
        assert doc["kind"] == "PKAN"
        assert len(doc["cells"]) == 9
        assert (out / "pkan.svg").exists()
        printed = capsys.readouterr().out
        assert "x1" in printed and "1.000" in printed

    def test_mkan_excluded_targets(self, exp_csv, tmp_path):
        out = tmp_path / "out"
        code = main(["matrix", "mkan", str(exp_csv), "--exclude-targets", "x1",
                     "--out", str(out), "--curve-samples", "8"])
        assert code == 0
        doc = json.loads((out / "mkan.json").read_text())
        assert doc["excluded_targets"] == ["x1"]
        rows = {c["row"] for c in doc["cells"]}
        assert rows == {"x2", "x3"}
        cols = {c["col"] for c in doc["cells"]}
        assert cols == {"x1", "x2", "x3"}

    def test_pearson_symmetric_json(self, exp_csv, tmp_path):
        out = tmp_path / "out"
        assert main(["matrix", "pearson", str(exp_csv), "--out", str(out)]) == 0
        doc = json.loads((out / "pearson.json").read_text())
        grid = {(c["row"], c["col"]): c["strength"] for c in doc["cells"]}
        for (r, c), v in grid.items():
            assert grid[(c, r)] == v

    def test_unknown_column_exits_2(self, exp_csv, tmp_path):
        code = main(["matrix", "mkan", str(exp_csv), "--exclude-targets", "zzz",
                     "--out", str(tmp_path)])
        assert code == 2

    def test_unparseable_csv_exits_1(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("a,b\n1,fish\n")
        assert main(["matrix", "pkan", str(bad), "--out", str(tmp_path)]) == 1

    def test_missing_file_exits_1(self, tmp_path):
        assert main(["matrix", "pkan", str(tmp_path / "none.csv"),
                     "--out", str(tmp_path)]) == 1


class TestTransformCommand:
    def test_ops_chain(self, exp_csv, tmp_path):
        out = tmp_path / "t.csv"
        code = main(["transform", str(exp_csv), "--ops", "lag:x1:2;drop:x3",
                     "-o", str(out)])
        assert code == 0
        d = read_csv(out)
        assert d.names == ("x1", "x2", "x1_lag2")
        assert d.n_rows == 298

    def test_sidecar_replay_reproduces_bytes(self, exp_csv, tmp_path):
        out1 = tmp_path / "t1.csv"
        main(["transform", str(exp_csv), "--ops", "lag:x1:2;subtract_mean:x2",
              "-o", str(out1)])
        sidecar = tmp_path / "t1.csv.history.json"
        assert sidecar.exists()
        out2 = tmp_path / "t2.csv"
        code = main(["transform", str(exp_csv), "--replay", str(sidecar), "-o", str(out2)])
        assert code == 0
        assert out1.read_bytes() == out2.read_bytes()

    def test_malformed_ops_exit_2(self, exp_csv, tmp_path):
        code = main(["transform", str(exp_csv), "--ops", "lag:x1",
                     "-o", str(tmp_path / "t.csv")])
        assert code == 2


class TestRankCommand:
    @pytest.fixture()
    def rank_csv(self, tmp_path):
        rng = np.random.default_rng(0)
        n = 400
        cols = {f"attr{i}": rng.uniform(0, 1, n) for i in range(4)}
        cols["q_mean"] = cols["attr0"] + rng.normal(0, 0.05, n) + 1.0
        cols["q_5"] = np.abs(cols["attr1"]) + 0.01
        cols["q_95"] = cols["attr0"] * 2 + 1.0 + rng.normal(0, 0.1, n)
        from kanmat.dataset import Dataset
        path = tmp_path / "camels_like.csv"
        Dataset.from_columns(cols.items()).to_csv(path)
        return path

    @pytest.fixture()
    def fast_config(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"forest": {"n_estimators": 10}}))
        return cfg

    def test_emits_table_shaped_reports(self, rank_csv, tmp_path, fast_config):
        out = tmp_path / "rank_out"
        code = main(["rank", str(rank_csv), "--targets", "q_mean,q_5,q_95",
                     "--methods", "mkan,pearson,nmi", "--topk", "2,4",
                     "--log-targets", "--out", str(out), "--config", str(fast_config)])
        assert code == 0
        table = (out / "topk_eval.csv").read_text().strip().splitlines()
        assert table[0] == "method,top_2,top_4"
        assert len(table) == 4
        assert {row.split(",")[0] for row in table[1:]} == {"mkan", "pearson", "nmi"}
        ranking = (out / "ranking_mkan.csv").read_text().splitlines()
        assert ranking[0] == "input,q_mean,q_5,q_95,average,rank"
        assert len(ranking) == 4 + 2

    def test_identical_invocations_identical_reports(self, rank_csv, tmp_path, fast_config):
        outs = []
        for name in ("r1", "r2"):
            out = tmp_path / name
            main(["rank", str(rank_csv), "--targets", "q_mean", "--methods", "pearson",
                  "--topk", "2", "--out", str(out), "--config", str(fast_config)])
            outs.append((out / "topk_eval.csv").read_bytes())
        assert outs[0] == outs[1]

    def test_oversized_k_exits_2(self, rank_csv, tmp_path, fast_config):
        code = main(["rank", str(rank_csv), "--targets", "q_mean",
                     "--topk", "9999", "--out", str(tmp_path / "o"),
                     "--config", str(fast_config)])
        assert code == 2

    def test_missing_target_exits_2(self, rank_csv, tmp_path):
        code = main(["rank", str(rank_csv), "--targets", "nope",
                     "--out", str(tmp_path / "o")])
        assert code == 2


class TestConfigPrecedence:
    def test_flags_override_config_file(self, exp_csv, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"fit": {"grid": 4, "seed": 7}}))
        out = tmp_path / "out"
        code = main(["matrix", "pkan", str(exp_csv), "--config", str(cfg),
                     "--grid", "6", "--out", str(out)])
        assert code == 0
        doc = json.loads((out / "pkan.json").read_text())
        assert doc["config"]["grid"] == 6      # flag wins
        assert doc["config"]["seed"] == 7      # file fills the gap
        assert doc["seed"] == 7


class TestServeCommand:
    def test_occupied_port_exits_1(self, capsys):
        import socket

        s = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        s.bind(("127.0.0.1", 0))
        port = s.getsockname()[1]
        s.listen(1)
        try:
            code = main(["serve", "--port", str(port)])
        finally:
            s.close()
        assert code == 1
        assert "cannot bind" in capsys.readouterr().err
