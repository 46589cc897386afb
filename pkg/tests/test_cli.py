import csv
import json
import math
import subprocess
import sys
from pathlib import Path

import pytest

from zenolab.cli import EXIT_CONFIG, EXIT_OK, main, render, run
from zenolab.config import EXPERIMENTS, ConfigError, load_config, parse_config
from zenolab.experiments import COLUMNS

GOLDEN_HEADERS = {
    "zeno-converge": "t,n,cauchy_defect,generator_defect,bound",
    "azc": "tau,ratio,constant",
    "continuous": "K,t,deviation",
    "gibbs-product": "beta,trace_distance,left_dim,right_dim",
    "kms": "pair_index,residual",
    "rw-entropy": "trial,relative_entropy,bound,gap",
    "rte-dense": "t,site,value,reference_value",
    "rte-quasifree": "t,site,value,reference_value",
    "complex-zeno": "n,m,defect",
}

XY_MODEL = """
[model]
preset = xy
J = 1.0
h = 0.5
lo = {lo}
hi = {hi}
beta = 1.0

[zeno]
site = 0
amplitude0 = 0.7071067811865476, 0
amplitude1 = 0.7071067811865476, 0
"""

EXPERIMENT_BODIES = {
    "zeno-converge": "t = 1.0\nn = 4, 8",
    "azc": "t_max = 0.25\nlevels = 4",
    "continuous": "K = 10, 100\nt = 1.0",
    "gibbs-product": "betas = 0.5, 1.0",
    "kms": "pairs = 6\ntarget = zeno",
    "rw-entropy": "trials = 6",
    "rte-dense": "window = 0, 4, 5\nsites = 0, 1",
    "rte-quasifree": "N = 41\nwindow = 0, 4, 5\nsites = 0, 1",
    "complex-zeno": "t = 0.5\nn = 4, 8",
}


def write_config(tmp_path, name, body, lo=-1, hi=1, extra=""):
    text = XY_MODEL.format(lo=lo, hi=hi) + f"\n[experiment]\nname = {name}\n{body}\nseed = 5\n{extra}"
    path = tmp_path / f"{name}.ini"
    path.write_text(text)
    return path


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


class TestGoldenHeaders:
    def test_contract_table(self):
        assert {k: ",".join(v) for k, v in COLUMNS.items()} == GOLDEN_HEADERS
        assert set(EXPERIMENTS) == set(GOLDEN_HEADERS)

    @pytest.mark.parametrize("name", sorted(GOLDEN_HEADERS))
    def test_every_experiment_runs(self, tmp_path, name):
        cfg = write_config(tmp_path, name, EXPERIMENT_BODIES[name])
        out = tmp_path / "out"
        assert run(cfg, out) == EXIT_OK
        text = (out / f"{name}.csv").read_text()
        assert text.splitlines()[0] == GOLDEN_HEADERS[name]
        assert len(text.splitlines()) > 1
        assert "nan" not in text.lower()


class TestExamples:
    def test_two_level_closed_form(self, tmp_path):
        path = tmp_path / "two.ini"
        path.write_text("[model]\npreset = two-level\n[experiment]\nname = zeno-converge\nt = 1\nn = 10, 20, 40\n")
        assert run(path, tmp_path) == EXIT_OK
        rows = read_csv(tmp_path / "zeno-converge.csv")
        assert [int(r["n"]) for r in rows] == [10, 20, 40]
        for r in rows:
            n = int(r["n"])
            assert abs(float(r["generator_defect"]) - (1 - math.cos(1 / n) ** n)) < 1e-9

    def test_gibbs_product(self, tmp_path):
        cfg = write_config(tmp_path, "gibbs-product", "", lo=-3, hi=3)
        assert run(cfg, tmp_path) == EXIT_OK
        (row,) = read_csv(tmp_path / "gibbs-product.csv")
        assert float(row["trace_distance"]) <= 1e-10
        assert (int(row["left_dim"]), int(row["right_dim"])) == (8, 8)

    def test_invalid_name(self, tmp_path, caplog):
        cfg = write_config(tmp_path, "bogus", "")
        out = tmp_path / "out"
        assert run(cfg, out) == EXIT_CONFIG
        assert not out.exists()
        assert "zeno-converge" in caplog.text

    def test_dense_cap(self, tmp_path, caplog):
        cfg = write_config(tmp_path, "kms", "", lo=-7, hi=7)
        assert run(cfg, tmp_path / "out") == EXIT_CONFIG
        assert "rte-quasifree" in caplog.text
        assert not (tmp_path / "out").exists()

    def test_missing_file(self, tmp_path):
        assert run(tmp_path / "nope.ini", tmp_path) == EXIT_CONFIG

    def test_bad_format_flag(self, tmp_path):
        cfg = write_config(tmp_path, "azc", EXPERIMENT_BODIES["azc"])
        assert run(cfg, tmp_path, fmt="xml") == EXIT_CONFIG


class TestMetadata:
    def test_schema(self, tmp_path):
        cfg = write_config(tmp_path, "azc", EXPERIMENT_BODIES["azc"])
        assert run(cfg, tmp_path) == EXIT_OK
        meta = json.loads((tmp_path / "azc.meta.json").read_text())
        for key in ("experiment", "config_hash", "seed", "conventions", "timing", "columns", "versions"):
            assert key in meta
        assert set(meta["conventions"]) == {"azc_constant", "jw_ordering", "entropy_sign"}
        assert meta["seed"] == 5 and meta["experiment"] == "azc"
        assert len(meta["config_hash"]) == 64

    def test_seed_flag_overrides(self, tmp_path):
        cfg = write_config(tmp_path, "kms", EXPERIMENT_BODIES["kms"])
        run(cfg, tmp_path / "a", seed=1)
        run(cfg, tmp_path / "b", seed=2)
        assert json.loads((tmp_path / "a" / "kms.meta.json").read_text())["seed"] == 1
        assert (tmp_path / "a" / "kms.csv").read_text() != (tmp_path / "b" / "kms.csv").read_text()

    def test_json_output(self, tmp_path):
        cfg = write_config(tmp_path, "continuous", EXPERIMENT_BODIES["continuous"])
        assert run(cfg, tmp_path, fmt="json") == EXIT_OK
        data = json.loads((tmp_path / "continuous.json").read_text())
        assert data["columns"] == ["K", "t", "deviation"]
        assert len(data["rows"]) == 2

    def test_env_output_directory(self, tmp_path, monkeypatch):
        cfg = write_config(tmp_path, "azc", EXPERIMENT_BODIES["azc"])
        monkeypatch.setenv("ZENOLAB_OUT", str(tmp_path / "env"))
        assert run(cfg) == EXIT_OK
        assert (tmp_path / "env" / "azc.csv").exists()


class TestDeterminism:
    @pytest.mark.parametrize("name", ["kms", "rw-entropy", "zeno-converge", "complex-zeno"])
    def test_byte_identical(self, tmp_path, name):
        cfg = write_config(tmp_path, name, EXPERIMENT_BODIES[name])
        outputs = []
        for tag, workers in (("a", 1), ("b", 1), ("c", 4)):
            assert run(cfg, tmp_path / tag, workers=workers) == EXIT_OK
            outputs.append((tmp_path / tag / f"{name}.csv").read_bytes())
        assert outputs[0] == outputs[1] == outputs[2]


class TestConfigParsing:
    def test_amplitudes_normalized(self, caplog):
        cfg = parse_config("[zeno]\namplitude0 = 3, 0\namplitude1 = 0, 4\n[experiment]\nname = azc\n")
        assert cfg.zeno.amplitudes == pytest.approx((0.6, 0.8j), abs=1e-15)
        assert "normalizing" in caplog.text

    def test_empty_grid(self):
        with pytest.raises(ConfigError, match="empty"):
            parse_config("[experiment]\nname = azc\nn = ,\n")

    def test_bad_number(self):
        with pytest.raises(ConfigError):
            parse_config("[model]\nJ = one\n[experiment]\nname = azc\n")

    def test_no_experiment(self):
        with pytest.raises(ConfigError):
            parse_config("[model]\nJ = 1\n")

    def test_render_repr_floats(self):
        assert render(("a", "b"), [(0.1, 3)], "csv") == "a,b\n0.1,3\n"


def test_entry_point(tmp_path):
    cfg = write_config(tmp_path, "azc", EXPERIMENT_BODIES["azc"])
    proc = subprocess.run(
        [sys.executable, "-m", "zenolab", "--config", str(cfg), "--out", str(tmp_path / "o")],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert (tmp_path / "o" / "azc.csv").exists()


def test_main_requires_config():
    with pytest.raises(SystemExit):
        main([])


@pytest.mark.parametrize("path", sorted((Path(__file__).parents[1] / "configs").glob("*.ini")), ids=lambda p: p.name)
def test_shipped_configs_parse(path):
    assert load_config(path).experiment.name in EXPERIMENTS
