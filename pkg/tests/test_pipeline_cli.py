import csv
import hashlib
import json
import math

import numpy as np
import pytest

from ispforge import PhysicsConfig, read_container
from ispforge.cli import main
from ispforge.container import Dataset, write_container
from ispforge.pipeline import GenerationRecipe, produce_dataset


@pytest.fixture(scope="module")
def tiny_cfg():
    return PhysicsConfig(grid_n=24, n_tx=8, n_rx=8)


def _tiny_cfg_file(tmp_path, extra=None):
    cfg = {"physics": {"grid_n": 24, "n_tx": 8, "n_rx": 8}}
    cfg.update(extra or {})
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    return path


def _container_digest(root):
    parts = [(root / "manifest.json").read_bytes()]
    for blob in sorted(root.glob("*.ispt")):
        parts.append(blob.read_bytes())
    return hashlib.sha256(b"".join(parts)).hexdigest()


def test_same_seed_same_bytes(tiny_cfg, tmp_path):
    recipe = GenerationRecipe(generator="polygon", n=4, snr_db=5.0, seed=21)
    for name in ("a", "b"):
        write_container(produce_dataset(tiny_cfg, recipe, workers=1), tmp_path / name)
    assert _container_digest(tmp_path / "a") == _container_digest(tmp_path / "b")


def test_worker_count_invariance(tiny_cfg, tmp_path):
    recipe = GenerationRecipe(generator="digit", n=6, snr_db=5.0, seed=33)
    write_container(produce_dataset(tiny_cfg, recipe, workers=1), tmp_path / "w1")
    write_container(produce_dataset(tiny_cfg, recipe, workers=2), tmp_path / "w2")
    assert _container_digest(tmp_path / "w1") == _container_digest(tmp_path / "w2")


def test_fields_export_carries_operator_and_alpha(tiny_cfg, tmp_path):
    recipe = GenerationRecipe(generator="polygon", n=2, seed=4, with_fields=True)
    ds = produce_dataset(tiny_cfg, recipe, workers=1)
    write_container(ds, tmp_path / "f")
    back = read_container(tmp_path / "f")
    assert back.g_domain is not None
    n_cells = tiny_cfg.n_cells
    assert back.g_domain.shape == (n_cells, n_cells)
    for rec in back.samples:
        assert rec.etot.shape == (tiny_cfg.n_tx, tiny_cfg.grid_n, tiny_cfg.grid_n)
        assert rec.alpha is not None and rec.alpha > 0


def test_cli_generate_single_sample(tmp_path):
    cfg_path = _tiny_cfg_file(tmp_path)
    out = tmp_path / "one"
    code = main(
        ["generate", "--config", str(cfg_path), "--seed", "3", "--out", str(out), "--n", "1",
         "--generator", "polygon"]
    )
    assert code == 0
    ds = read_container(out)
    assert len(ds) == 1
    assert ds.samples[0].id == "000000"
    assert math.isinf(ds.samples[0].snr_db)


def test_cli_generate_manifest_hash_reproducible(tmp_path):
    cfg_path = _tiny_cfg_file(tmp_path, {"generator": "digit", "n": 3, "snr_db": 5.0})
    for name in ("r1", "r2"):
        assert main(["generate", "--config", str(cfg_path), "--seed", "8",
                     "--out", str(tmp_path / name)]) == 0
    h1 = hashlib.sha256((tmp_path / "r1" / "manifest.json").read_bytes()).hexdigest()
    h2 = hashlib.sha256((tmp_path / "r2" / "manifest.json").read_bytes()).hexdigest()
    assert h1 == h2


def test_cli_curate_roundtrip(tmp_path):
    cfg_path = _tiny_cfg_file(tmp_path)
    src = tmp_path / "src"
    assert main(["generate", "--config", str(cfg_path), "--seed", "5", "--out", str(src),
                 "--n", "8", "--generator", "digit", "--snr-db", "5"]) == 0
    out = tmp_path / "curated"
    assert main(["curate", str(src), "--mode", "qbp", "--n", "4", "--seed", "1",
                 "--out", str(out)]) == 0
    curated = read_container(out)
    assert len(curated) == 4
    hist = {}
    for rec in curated.samples:
        hist[rec.category] = hist.get(rec.category, 0) + 1
    assert hist == {"good": 1, "fair": 1, "poor": 2}


def test_cli_curate_insufficient_category_exit_code(tmp_path):
    cfg_path = _tiny_cfg_file(tmp_path)
    src = tmp_path / "src2"
    assert main(["generate", "--config", str(cfg_path), "--seed", "5", "--out", str(src),
                 "--n", "4", "--generator", "polygon"]) == 0
    code = main(["curate", str(src), "--mode", "qbp", "--n", "8", "--seed", "1",
                 "--out", str(tmp_path / "x")])
    assert code == 3


def test_cli_evaluate_perfect_prediction(tmp_path):
    cfg_path = _tiny_cfg_file(tmp_path)
    src = tmp_path / "gen"
    assert main(["generate", "--config", str(cfg_path), "--seed", "2", "--out", str(src),
                 "--n", "2", "--generator", "polygon"]) == 0
    ds = read_container(src)
    pred_ds = Dataset(physics=ds.physics, samples=ds.samples,
                      pred=np.stack([s.truth for s in ds.samples]))
    pred_dir = tmp_path / "pred"
    write_container(pred_ds, pred_dir)
    out = tmp_path / "report"
    assert main(["evaluate", str(pred_dir), str(src), "--out", str(out)]) == 0

    with open(out / "evaluate.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["id", "rmse", "ssim", "q_bp"]
    assert len(rows) == 3
    summary = json.loads((out / "summary.json").read_text())
    assert summary["mean_rmse"] == 0.0
    assert summary["mean_ssim"] == pytest.approx(1.0, abs=1e-9)


def test_cli_render_outputs(tmp_path):
    cfg_path = _tiny_cfg_file(tmp_path)
    src = tmp_path / "gen"
    assert main(["generate", "--config", str(cfg_path), "--seed", "2", "--out", str(src),
                 "--n", "2", "--generator", "polygon"]) == 0
    out = tmp_path / "imgs"
    assert main(["render", str(src), "--ids", "000001", "--out", str(out)]) == 0
    assert (out / "000001_truth.pgm").exists()
    assert (out / "000001_bp.pgm").exists()
    assert not (out / "000000_truth.pgm").exists()


def test_cli_container_error_exit_code(tmp_path):
    code = main(["curate", str(tmp_path / "nonexistent"), "--n", "4", "--out", str(tmp_path / "o")])
    assert code == 4
