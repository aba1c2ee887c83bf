"""CLI behavior: commands, exit codes, determinism, report formats."""

import json

import pytest

from resolvon.cli import main

BSC = json.dumps(
    {"name": "bsc-02", "builtin": {"kind": "classical_embed",
     "stochastic": [[0.8, 0.2], [0.2, 0.8]]}}
)
PURE = json.dumps(
    {"name": "pure-pair", "builtin": {"kind": "pure_bloch", "angles": [0.0, 1.5707963267948966]}}
)


@pytest.fixture
def bsc_file(tmp_path):
    p = tmp_path / "bsc.json"
    p.write_text(BSC)
    return str(p)


@pytest.fixture
def pure_file(tmp_path):
    p = tmp_path / "pure.json"
    p.write_text(PURE)
    return str(p)


class TestSoftcover:
    def test_runs_and_reports(self, bsc_file, tmp_path, capsys):
        out = tmp_path / "r.json"
        code = main(
            ["softcover", "--channel", bsc_file, "--codebook-size", "64", "--out", str(out)]
        )
        assert code == 0
        doc = json.loads(out.read_text())
        assert doc["command"] == "softcover"
        assert len(doc["results"]["codebook"]) == 64
        assert doc["results"]["certificate"]["min_selection_margin"] >= -1e-9

    def test_stdout_when_no_out(self, bsc_file, capsys):
        assert main(["softcover", "--channel", bsc_file, "--codebook-size", "8"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["results"]["certificate"]["l_used"] == 8

    def test_seed_refused(self, bsc_file, capsys):
        code = main(
            ["softcover", "--channel", bsc_file, "--codebook-size", "8", "--seed", "1"]
        )
        assert code == 2
        assert "refused" in capsys.readouterr().err


class TestResolve:
    def test_fixed_type(self, pure_file, tmp_path):
        out = tmp_path / "r.json"
        code = main(
            [
                "resolve", "--channel", pure_file, "--type", "2:2",
                "--eps", "0.05", "--codebook-size", "128", "--out", str(out),
            ]
        )
        assert code == 0
        doc = json.loads(out.read_text())
        assert doc["results"]["codebook_size"] == 128
        assert 0.0 <= doc["results"]["trace_dist"] <= 1.0
        assert doc["config"]["type"] == [2, 2]

    def test_general_iid(self, bsc_file, tmp_path):
        out = tmp_path / "r.json"
        code = main(
            [
                "resolve", "--channel", bsc_file, "--iid", "0.7,0.3", "--n", "3",
                "--codebook-size", "8", "--out", str(out),
            ]
        )
        assert code == 0
        doc = json.loads(out.read_text())
        assert doc["results"]["terms"]["type_marginal_tv"] >= 0.0

    def test_epsilon_out_of_range_exits_2(self, bsc_file, capsys):
        code = main(
            ["resolve", "--channel", bsc_file, "--type", "2:2", "--eps", "0.6"]
        )
        assert code == 2
        assert "eps" in capsys.readouterr().err

    def test_type_n_mismatch(self, bsc_file, capsys):
        code = main(
            ["resolve", "--channel", bsc_file, "--type", "2:2", "--n", "5",
             "--codebook-size", "4"]
        )
        assert code == 2

    def test_xi_mapping_reported(self, pure_file, tmp_path):
        out = tmp_path / "r.json"
        code = main(
            ["resolve", "--channel", pure_file, "--type", "1:1", "--xi", "0.5",
             "--codebook-size", "16", "--out", str(out)]
        )
        assert code == 0
        doc = json.loads(out.read_text())
        assert doc["config"]["epsilon"] == min(0.5**2 / 50, 0.05)
        assert doc["config"]["tau0"] == min(0.5**2 / 100, 0.02)
        assert doc["results"]["xi_requested"] == 0.5
        assert "xi_achieved_bound" in doc["results"]


class TestBaseline:
    def test_runs_with_seed(self, pure_file, tmp_path):
        out = tmp_path / "b.json"
        code = main(
            ["baseline", "--channel", pure_file, "--type", "2:2",
             "--codebook-size", "32", "--seed", "5", "--trials", "4", "--out", str(out)]
        )
        assert code == 0
        doc = json.loads(out.read_text())
        assert len(doc["results"]["values"]) == 4
        assert doc["results"]["min"] <= doc["results"]["mean"] <= doc["results"]["max"]

    def test_needs_size(self, pure_file, capsys):
        assert main(["baseline", "--channel", pure_file, "--type", "2:2"]) == 2


class TestVerify:
    def test_passes_on_classical_channel(self, bsc_file, capsys):
        code = main(["verify", "--channel", bsc_file])
        out = capsys.readouterr().out
        assert code == 0
        assert "FAIL" not in out
        assert out.count("PASS") >= 6

    def test_out_file_records_suites(self, bsc_file, tmp_path):
        out = tmp_path / "verify.json"
        assert main(["verify", "--channel", bsc_file, "--out", str(out)]) == 0
        doc = json.loads(out.read_text())
        assert doc["results"]["passed"] is True
        assert len(doc["results"]["lines"]) >= 6


class TestPrecedence:
    def test_explicit_eps_wins_over_xi(self, pure_file, tmp_path):
        out = tmp_path / "r.json"
        code = main(
            ["resolve", "--channel", pure_file, "--type", "1:1", "--xi", "0.5",
             "--eps", "0.2", "--codebook-size", "8", "--out", str(out)]
        )
        assert code == 0
        doc = json.loads(out.read_text())
        assert doc["config"]["epsilon"] == 0.2
        assert doc["config"]["tau0"] == min(0.5**2 / 100, 0.02)


class TestSweep:
    def test_csv_shape_and_baseline_column(self, pure_file, tmp_path):
        out = tmp_path / "s.csv"
        code = main(
            ["sweep", "--channel", pure_file, "--type", "2:2", "--sizes", "8,32",
             "--trials", "3", "--format", "csv", "--out", str(out)]
        )
        assert code == 0
        lines = out.read_text().strip().split("\n")
        assert lines[0] == "L,trace_dist,bound,d_max,required_L,baseline_mean"
        assert len(lines) == 3
        first = lines[1].split(",")
        assert first[0] == "8"
        assert float(first[5]) >= 0.0

    def test_csv_refused_elsewhere(self, pure_file, capsys):
        code = main(
            ["resolve", "--channel", pure_file, "--type", "1:1",
             "--codebook-size", "4", "--format", "csv"]
        )
        assert code == 2


class TestDeterminism:
    def test_identical_invocations_identical_bytes(self, pure_file, tmp_path):
        argsets = [
            ["resolve", "--channel", pure_file, "--type", "2:2", "--codebook-size", "64"],
            ["softcover", "--channel", pure_file, "--codebook-size", "32"],
            ["sweep", "--channel", pure_file, "--type", "2:2", "--sizes", "8,16",
             "--trials", "2"],
        ]
        for i, argv in enumerate(argsets):
            a = tmp_path / f"a{i}.json"
            b = tmp_path / f"b{i}.json"
            assert main(argv + ["--out", str(a)]) == 0
            assert main(argv + ["--out", str(b)]) == 0
            assert a.read_bytes() == b.read_bytes()


class TestErrors:
    def test_missing_channel_file(self, capsys):
        assert main(["resolve", "--channel", "/nonexistent.json", "--type", "1:1"]) == 2

    def test_malformed_channel(self, tmp_path, capsys):
        p = tmp_path / "bad.json"
        p.write_text("{broken")
        assert main(["resolve", "--channel", str(p), "--type", "1:1"]) == 2
