import json

import pytest

from zzgril.cli import main
from zzgril.pipeline import save_dataset, synthetic_dataset


@pytest.fixture
def dataset(tmp_path):
    d = tmp_path / "ds"
    save_dataset(synthetic_dataset(2, 4, 14, seed=1), d)
    return d


@pytest.fixture
def bifile(tmp_path, dataset):
    out = tmp_path / "b.json"
    assert main(["build", str(dataset), "-o", str(out)]) == 0
    return out


def test_build_reports_grid(dataset, tmp_path, capsys):
    out = tmp_path / "b.json"
    assert main(["build", str(dataset), "-o", str(out), "--seed", "3"]) == 0
    err = capsys.readouterr().err
    assert "grid 19x8 (T=10)" in err
    data = json.loads(out.read_text())
    assert data["metadata"]["seed"] == 3
    assert data["metadata"]["versions"]["numpy"]


def test_build_from_sample_csv(tmp_path, capsys):
    (tmp_path / "s.csv").write_text("0,1,2,3\n1,0,1,0\n")
    assert main(["build", str(tmp_path / "s.csv"), "--levels", "2", "--width", "2", "--overlap", "1"]) == 0
    captured = capsys.readouterr()
    assert "grid 5x2 (T=3)" in captured.err
    assert json.loads(captured.out)["L"] == 2


def test_build_is_idempotent(bifile, tmp_path):
    again = tmp_path / "again.json"
    assert main(["build", str(bifile), "-o", str(again)]) == 0
    assert again.read_text() == bifile.read_text()


def test_gril_outputs(bifile, tmp_path, capsys):
    out = tmp_path / "l.json"
    assert main(["gril", str(bifile), "-o", str(out), "--jobs", "1"]) == 0
    data = json.loads(out.read_text())
    assert len(data["entries"]) == 36 * 2 * 2
    assert data["metadata"]["command"] == "gril"
    again = tmp_path / "l2.json"
    assert main(["gril", str(bifile), "-o", str(again), "--jobs", "2"]) == 0
    assert again.read_bytes() == out.read_bytes()
    assert main(["gril", str(bifile), "--centers", "1x1", "--ks", "1", "--degrees", "0", "--format", "csv"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "cx,cy,k,degree,lambda" and len(lines) == 2


def test_gril_heatmaps(bifile, tmp_path):
    hm = tmp_path / "hm"
    assert main(["gril", str(bifile), "--centers", "2x3", "-o", str(tmp_path / "x.json"), "--emit-heatmap",
                 str(hm)]) == 0
    files = sorted(p.name for p in hm.iterdir())
    assert files == ["heatmap_H0_k1.csv", "heatmap_H0_k2.csv", "heatmap_H1_k1.csv", "heatmap_H1_k2.csv"]
    rows = (hm / "heatmap_H0_k1.csv").read_text().splitlines()
    assert len(rows) == 3 and len(rows[0].split(",")) == 4


def test_config_file_and_override(bifile, tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"centers": "2x2", "ks": [1], "format": "csv"}))
    assert main(["gril", str(bifile), "--config", str(cfg)]) == 0
    assert len(capsys.readouterr().out.splitlines()) == 1 + 4 * 2
    assert main(["gril", str(bifile), "--config", str(cfg), "--centers", "1x1"]) == 0
    assert len(capsys.readouterr().out.splitlines()) == 1 + 2
    cfg.write_text(json.dumps({"colour": "red"}))
    assert main(["gril", str(bifile), "--config", str(cfg)]) == 2


def test_featurize(dataset, tmp_path):
    out = tmp_path / "f.csv"
    assert main(["featurize", str(dataset), "-o", str(out), "--centers", "2x2"]) == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 3 and len(lines[0].split(",")) == 1 + 16
    meta = json.loads((tmp_path / "f.csv.meta.json").read_text())
    assert meta["config"]["centers"] == [2, 2]


def test_oracle_check(capsys, tmp_path):
    assert main(["oracle-check", "--trials", "1", "--seed", "5", "--dump", str(tmp_path / "f.json")]) == 0
    assert capsys.readouterr().out.startswith("PASS 1 instances")
    assert main(["oracle-check", "--vertices", "7"]) == 2
    assert main(["oracle-check", "--T", "6"]) == 2


def test_bench(capsys):
    assert main(["bench", "--m", "4", "--n", "12", "--centers", "1x2", "--jobs", "1"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["centers"] == 2 and report["seconds_per_center"] >= 0


def test_exit_codes(tmp_path, bifile, monkeypatch):
    assert main(["gril", str(tmp_path / "nope.json")]) == 1
    (tmp_path / "junk.json").write_text("{not json")
    assert main(["gril", str(tmp_path / "junk.json")]) == 1
    assert main(["gril", str(bifile), "--centers", "40x40"]) == 2
    assert main(["gril", str(bifile), "--centers", "banana"]) == 2
    assert main(["gril", str(bifile), "--jobs", "0"]) == 2
    monkeypatch.setenv("ZZGRIL_JOBS", "lots")
    assert main(["gril", str(bifile)]) == 2
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2
