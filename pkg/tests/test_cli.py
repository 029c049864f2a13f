import json

import numpy as np
import pytest
from click.testing import CliRunner

from panofov.cli import main
from panofov.projection import EquirectPanorama, make_pairs
from panofov.raster import load_png, save_png

from conftest import smooth_pano_image


@pytest.fixture
def runner():
    return CliRunner()


def narrow_png(tmp_path, name="in.png"):
    pano = EquirectPanorama(smooth_pano_image(256, 512), 360.0)
    narrow = make_pairs(pano, native=128)[0].input_narrow
    path = tmp_path / name
    save_png(path, narrow)
    return path


class TestFoveationProfile:
    def test_stdout_csv(self, runner):
        result = runner.invoke(main, ["foveation", "profile", "--step", "10"])
        assert result.exit_code == 0, result.output
        lines = result.output.strip().splitlines()
        assert lines[0] == "theta_deg,required,system"
        first = lines[1].split(",")
        assert float(first[0]) == 0.0
        assert float(first[1]) == 1.0

    def test_file_output(self, runner, tmp_path):
        out = tmp_path / "profile.csv"
        result = runner.invoke(main, ["foveation", "profile", "--out", str(out)])
        assert result.exit_code == 0, result.output
        rows = out.read_text().strip().splitlines()
        # one row per degree out to the mid-band edge, plus the header
        assert len(rows) == 92
        for row in rows[1:]:
            _, req, system = map(float, row.split(","))
            assert system >= req


class TestRun(object):
    def test_run_and_extend(self, runner, tmp_path):
        path = narrow_png(tmp_path)
        out = tmp_path / "out"
        result = runner.invoke(main, [
            "run", str(path), "--out", str(out),
            "--output-height", "128", "--extend-360"])
        assert result.exit_code == 0, result.output
        payload = json.loads(result.output)
        assert "pano360" in payload["artifacts"]
        assert load_png(out / "pano360.png").shape == (128, 256, 3)

    def test_run_with_config_file(self, runner, tmp_path):
        path = narrow_png(tmp_path)
        cfg = tmp_path / "config.json"
        cfg.write_text(json.dumps({
            "near_generator": {"kind": "mirror_pad"},
            "output_height": 128,
        }))
        result = runner.invoke(main, [
            "run", str(path), "--out", str(tmp_path / "out"),
            "--config", str(cfg)])
        assert result.exit_code == 0, result.output
        manifest = json.loads((tmp_path / "out" / "manifest.json").read_text())
        assert manifest["config"]["near_generator"]["kind"] == "mirror_pad"

    def test_run_batch_exit_code_on_failure(self, runner, tmp_path):
        src = tmp_path / "inputs"
        src.mkdir()
        narrow_png(src, "ok.png")
        (src / "broken.png").write_bytes(b"not a png")
        cfg = tmp_path / "config.json"
        cfg.write_text(json.dumps({"output_height": 128}))
        result = runner.invoke(main, [
            "run-batch", "--inputs", str(src), "--out", str(tmp_path / "out"),
            "--config", str(cfg)])
        assert result.exit_code == 1
        payload = json.loads(result.output)
        assert payload["n_ok"] == 1 and payload["n_failed"] == 1


class TestFuseCommand:
    def test_near_stage_reports_seam_drop(self, runner, tmp_path):
        rng = np.random.RandomState(0)
        original = tmp_path / "orig.png"
        generated = tmp_path / "gen.png"
        save_png(original, np.full((64, 64, 3), 0.2))
        save_png(generated, np.full((128, 128, 3), 0.7))
        out = tmp_path / "fused.png"
        result = runner.invoke(main, [
            "fuse", "--original", str(original), "--generated", str(generated),
            "--stage", "near", "--out", str(out), "--tol", "1e-8"])
        assert result.exit_code == 0, result.output
        payload = json.loads(result.output)
        assert payload["seam_after"] < 0.2 * payload["seam_before"]
        assert load_png(out).shape == (128, 128, 3)

    def test_overlay_method_keeps_canvas(self, runner, tmp_path):
        original = tmp_path / "orig.png"
        generated = tmp_path / "gen.png"
        save_png(original, np.full((64, 64, 3), 0.2))
        save_png(generated, np.full((128, 128, 3), 0.7))
        out = tmp_path / "fused.png"
        result = runner.invoke(main, [
            "fuse", "--original", str(original), "--generated", str(generated),
            "--stage", "near", "--out", str(out), "--method", "overlay"])
        assert result.exit_code == 0, result.output
        payload = json.loads(result.output)
        assert payload["seam_after"] == pytest.approx(payload["seam_before"])


class TestDatasetAndEvaluate:
    def test_prepare_then_evaluate_flow(self, runner, tmp_path):
        src = tmp_path / "panos"
        src.mkdir()
        save_png(src / "p0.png", smooth_pano_image(128, 256))
        data = tmp_path / "dataset"
        result = runner.invoke(main, [
            "prepare-dataset", "--inputs", str(src), "--out", str(data),
            "--native", "128"])
        assert result.exit_code == 0, result.output
        assert "wrote 4 pairs" in result.output

        # score the near targets against themselves via a tiny manifest
        manifest = tmp_path / "eval.jsonl"
        entries = [json.loads(line)
                   for line in (data / "manifest.jsonl").read_text().splitlines()]
        with open(manifest, "w") as f:
            for e in entries:
                f.write(json.dumps({
                    "id": f"{e['pano_id']}-{e['direction']}",
                    "direction": e["direction"],
                    "pred": str(e["near"]), "gt": str(e["mid"]),
                }) + "\n")
        out_csv = tmp_path / "report.csv"
        result = runner.invoke(main, [
            "evaluate", "--pred", "/", "--gt", "/",
            "--manifest", str(manifest), "--out", str(out_csv)])
        assert result.exit_code == 0, result.output
        payload = json.loads(result.output)
        assert payload["aggregate"]["overall"]["count"] == 4
        assert out_csv.read_text().count("\n") == 5


class TestExtend360:
    def test_roundtrip(self, runner, tmp_path):
        img = smooth_pano_image(64, 64)
        src = tmp_path / "half.png"
        save_png(src, img)
        out = tmp_path / "full.png"
        result = runner.invoke(main, ["extend360", str(src), "--out", str(out)])
        assert result.exit_code == 0, result.output
        full = load_png(out)
        assert full.shape == (64, 128, 3)
        assert np.array_equal(full[:, 32:96], load_png(src))
