import math

import numpy as np
import pytest

import shoesplat as ss


def lone_cloud():
    g = ss.Gaussian()
    g.mean = [0.0, 0.0, 3.0]
    g.log_scale = [math.log(0.3)] * 3
    g.opacity_logit = 2.0
    sh = [0.0] * 48
    sh[0] = sh[1] = sh[2] = 1.0
    g.sh = sh
    cloud = ss.GaussianCloud()
    cloud.sh_degree = 0
    cloud.gaussians = [g]
    return cloud


def test_metrics_examples():
    assert ss.psnr_from_mse(6.5025, 255.0) == pytest.approx(40.0, abs=1e-9)
    assert ss.psnr_from_mse(65025.0, 255.0) == pytest.approx(0.0, abs=1e-9)
    a = np.zeros((4, 4, 3))
    assert ss.psnr(a, a) == math.inf
    b = np.full((2, 2), 0.5)
    assert ss.mse(b, b + 0.1) == pytest.approx(0.01)
    m1 = np.zeros((4, 4))
    m2 = np.zeros((4, 4))
    m1[0, :2] = 1
    m2[0, 1:3] = 1
    assert ss.iou(m1, m2) == pytest.approx(1 / 3)


def test_render_centred_blob():
    cam = ss.Camera(fx=40, fy=40, cx=16, cy=16, width=32, height=32)
    color, alpha = ss.render(lone_cloud(), cam, background=[0, 0, 0])
    assert color.shape == (32, 32, 3)
    assert alpha.shape == (32, 32)
    assert alpha[16, 16] > alpha[0, 0]
    assert color[16, 16, 0] > 0.5
    again, _ = ss.render(lone_cloud(), cam, threads=2)
    assert np.array_equal(color, again)


def test_cloud_save_load(tmp_path):
    path = tmp_path / "cloud.ply"
    ss.save_cloud(lone_cloud(), path)
    loaded = ss.load_cloud(path)
    assert len(loaded) == 1
    assert loaded.sh_degree == 0
    assert loaded.gaussians[0].opacity_logit == pytest.approx(2.0)


def test_typed_errors(tmp_path):
    with pytest.raises(ss.Error) as info:
        ss.load_cloud(tmp_path / "missing.ply")
    assert info.value.kind == "MissingFile"
    with pytest.raises(ss.Error) as info:
        ss.config_json({"train.iteratons": 3})
    assert info.value.kind == "ConfigError"


def test_config_keys():
    keys = dict(ss.config_keys())
    assert "train.iterations" in keys
    assert '"iterations": 7' in ss.config_json({"train.iterations": 7})


def test_mesh_cleanup():
    mesh = ss.TriangleMesh()
    mesh.positions = [[0, 0, 0], [1, 0, 0], [0, 1, 0], [5, 5, 5]]
    mesh.colors = [[1, 1, 1], [1, 1, 1], [1, 1, 1], [0, 0, 0]]
    mesh.faces = [[0, 1, 2], [1, 2, 3]]
    cleaned = ss.clean_mesh(mesh)
    assert cleaned.face_count() == 1
    assert ss.validate_clean(cleaned)["ok"]


def test_pipeline_end_to_end(tmp_path):
    small = {"synth.n_gaussians": 6, "synth.n_views": 8, "synth.width": 40, "synth.height": 40,
             "synth.focal": 50.0, "train.iterations": 20, "train.eval_interval": 10, "mesh.resolution": 24}
    ss.synth(tmp_path / "synth", small)
    summary = ss.import_sfm(tmp_path / "synth/sparse/0", tmp_path / "frames.csv")
    assert summary["images"] == 8
    ss.prep(tmp_path / "frames.csv", tmp_path / "synth/images", tmp_path / "synth/masks",
            tmp_path / "synth/sparse/0", tmp_path / "data", small)
    result = ss.train(tmp_path / "data", tmp_path / "run", small)
    assert [t[0] for t in result["trace"]] == [10, 20]
    report = ss.evaluate(tmp_path / "run/checkpoint.ply", tmp_path / "data", tmp_path / "eval", small)
    assert report["n_views"] >= 1
    raw = ss.extract(tmp_path / "run/checkpoint.ply", tmp_path / "raw.ply", small)
    assert raw.face_count() > 0
    cleaned = ss.clean(tmp_path / "raw.ply", tmp_path / "clean.ply")
    assert ss.validate_clean(cleaned)["ok"]
