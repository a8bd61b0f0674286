import csv

import pytest
import yaml
from click.testing import CliRunner

from conftest import DATA, curve_task
from fdbench.cli import main, parse_params
from fdbench.fdata import write_ucr_tsv


@pytest.fixture
def config_file(tmp_path):
    write_ucr_tsv(curve_task(n=20, length=16, seed=1, name="toy"), tmp_path / "toy.tsv")
    doc = {
        "seed": 2, "workers": 1, "output_dir": "res",
        "datasets": [{"name": "toy", "path": "toy.tsv", "split_fraction": 0.5, "n_splits": 3}],
        "pipelines": [{"id": "knn", "extractor": "none", "learner": "knn"},
                      {"id": "tree", "extractor": "fourier", "learner": "tree"}],
    }
    path = tmp_path / "bench.yaml"
    path.write_text(yaml.safe_dump(doc))
    return path


def invoke(*args):
    return CliRunner().invoke(main, [str(a) for a in args])


def test_parse_params():
    assert parse_params("knots=10,df=3,filter=d4,x=0.5") == {"knots": 10, "df": 3, "filter": "d4", "x": 0.5}
    assert parse_params("") == {}
    with pytest.raises(Exception):
        parse_params("knots")


def test_validate(config_file, tmp_path):
    res = invoke("validate", "--config", config_file)
    assert res.exit_code == 0 and "dataset toy: 20 obs" in res.output
    (tmp_path / "bad.yaml").write_text("datasets: []\n")
    assert invoke("validate", "--config", tmp_path / "bad.yaml").exit_code == 1
    doc = yaml.safe_load(config_file.read_text())
    doc["datasets"][0]["path"] = "nowhere.tsv"
    (tmp_path / "missing.yaml").write_text(yaml.safe_dump(doc))
    assert invoke("validate", "--config", tmp_path / "missing.yaml").exit_code == 1


def test_run_rank_resume(config_file, tmp_path):
    res = invoke("run", "--config", config_file)
    assert res.exit_code == 0, res.output
    assert "6 records, 2 jobs executed, 0 failures" in res.output
    res = invoke("run", "--config", config_file, "--resume")
    assert res.exit_code == 0 and "0 jobs executed" in res.output
    res = invoke("rank", "--results", tmp_path / "res")
    assert res.exit_code == 0
    names = [line.split()[0] for line in res.output.splitlines()[1:]]
    assert sorted(names) == ["knn", "tree"]


def test_run_exit_codes(config_file, tmp_path):
    assert invoke("run", "--config", tmp_path / "absent.yaml").exit_code == 1
    assert invoke("run", "--config", config_file, "--workers", 0).exit_code == 1
    doc = yaml.safe_load(config_file.read_text())
    doc["pipelines"].append({"id": "bad", "extractor": "none", "learner": {"method": "knn", "params": {"k": 500}}})
    (tmp_path / "partial.yaml").write_text(yaml.safe_dump(doc))
    res = invoke("run", "--config", tmp_path / "partial.yaml", "--seed", 5)
    assert res.exit_code == 2


def test_rank_missing_results(tmp_path):
    assert invoke("rank", "--results", tmp_path / "nothing").exit_code == 1


def test_extract(tmp_path):
    out = tmp_path / "feat.csv"
    res = invoke("extract", "--dataset", DATA / "GunPoint", "--method", "bsignal",
                 "--params", "knots=10,df=5", "--out", out)
    assert res.exit_code == 0, res.output
    with open(out) as fh:
        rows = list(csv.reader(fh))
    assert len(rows) == 201 and len(rows[0]) == 1 + 14
    assert rows[0][1] == "series.b1"
    assert invoke("extract", "--dataset", DATA / "GunPoint", "--method", "nope",
                  "--out", out).exit_code == 1
    assert invoke("extract", "--dataset", tmp_path / "none", "--method", "fourier", "--out", out).exit_code == 1
