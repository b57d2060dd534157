import json
import subprocess
import sys

import numpy as np
import pytest
from fastapi.testclient import TestClient

from roi_ellipse.harness.dataset import discover_dataset
from roi_ellipse.harness.model_io import save_model_document, train_model_document
from roi_ellipse.harness.loo import PipelineConfig
from roi_ellipse.harness.phantom import PhantomParams, write_phantom_suite
from roi_ellipse.imgcore import image_to_bytes, load_image
from roi_ellipse.service import create_app

SMALL = PhantomParams(width=128, height=128, min_semi_axis=14.0, max_semi_axis=24.0)


@pytest.fixture(scope="module")
def suite(tmp_path_factory):
    root = tmp_path_factory.mktemp("svc_suite")
    write_phantom_suite(root, count=3, master_seed=5, params=SMALL)
    return root


@pytest.fixture(scope="module")
def model_path(suite, tmp_path_factory):
    ds = discover_dataset(suite)
    doc = train_model_document(ds, "surf", PipelineConfig(master_seed=5, max_train_rows=1500))
    model_dir = tmp_path_factory.mktemp("models")
    path = model_dir / "surf-svm.json"
    save_model_document(doc, path)
    return path


@pytest.fixture()
def client(model_path):
    app = create_app(model_dir=str(model_path.parent), session_ttl=60.0)
    return TestClient(app)


def upload(client, suite, image_id="phantom_000", with_mask=False):
    img_bytes = (suite / "images" / f"{image_id}.png").read_bytes()
    files = {"image": (f"{image_id}.png", img_bytes, "image/png")}
    if with_mask:
        files["mask"] = (
            "mask.png",
            (suite / "masks" / f"{image_id}.png").read_bytes(),
            "image/png",
        )
    return client.post("/sessions", files=files)


class TestSessions:
    def test_create_session(self, client, suite):
        r = upload(client, suite)
        assert r.status_code == 201
        body = r.json()
        assert body["width"] == 128 and body["height"] == 128
        assert body["session_id"]

    def test_non_image_rejected_400(self, client):
        r = client.post("/sessions", files={"image": ("x.png", b"not an image", "image/png")})
        assert r.status_code == 400

    def test_mask_dimension_mismatch_400(self, client, suite):
        img_bytes = (suite / "images" / "phantom_000.png").read_bytes()
        bad_mask = image_to_bytes(
            load_image(suite / "masks" / "phantom_000.png"), "png"
        )
        from PIL import Image as PILImage
        import io

        small = PILImage.open(io.BytesIO(bad_mask)).resize((64, 64))
        buf = io.BytesIO()
        small.save(buf, format="PNG")
        r = client.post(
            "/sessions",
            files={
                "image": ("i.png", img_bytes, "image/png"),
                "mask": ("m.png", buf.getvalue(), "image/png"),
            },
        )
        assert r.status_code == 400

    def test_oversized_upload_413(self, client):
        blob = b"\x89PNG" + b"\x00" * (16 * 1024 * 1024 + 10)
        r = client.post("/sessions", files={"image": ("big.png", blob, "image/png")})
        assert r.status_code == 413

    def test_tiny_image_rejected(self, client):
        from roi_ellipse.imgcore import GrayImage

        tiny = image_to_bytes(GrayImage(np.zeros((8, 8), dtype=np.uint8)), "png")
        r = client.post("/sessions", files={"image": ("t.png", tiny, "image/png")})
        assert r.status_code == 400


class TestKeypoints:
    def test_keypoints_deterministic(self, client, suite):
        sid = upload(client, suite).json()["session_id"]
        a = client.get(f"/sessions/{sid}/keypoints", params={"features": "surf"})
        b = client.get(f"/sessions/{sid}/keypoints", params={"features": "surf"})
        assert a.status_code == 200
        assert a.json() == b.json()
        assert len(a.json()) > 0
        assert set(a.json()[0]) == {"x", "y", "scale", "response", "orientation"}

    def test_unknown_session_404(self, client):
        assert client.get("/sessions/deadbeef/keypoints").status_code == 404

    def test_bogus_features_400(self, client, suite):
        sid = upload(client, suite).json()["session_id"]
        r = client.get(f"/sessions/{sid}/keypoints", params={"features": "bogus"})
        assert r.status_code == 400

    def test_constant_image_empty_list(self, client):
        from roi_ellipse.imgcore import GrayImage

        flat = image_to_bytes(GrayImage(np.full((64, 64), 90, dtype=np.uint8)), "png")
        sid = client.post(
            "/sessions", files={"image": ("f.png", flat, "image/png")}
        ).json()["session_id"]
        r = client.get(f"/sessions/{sid}/keypoints", params={"features": "fast"})
        assert r.status_code == 200 and r.json() == []


class TestSegment:
    def test_click_out_of_bounds_422(self, client, suite):
        sid = upload(client, suite).json()["session_id"]
        r = client.post(
            f"/sessions/{sid}/segment",
            json={"cx": 500.0, "cy": 10.0, "features": "surf", "classifier": "kmeans"},
        )
        assert r.status_code == 422

    def test_svm_without_model_409(self, client, suite):
        sid = upload(client, suite).json()["session_id"]
        r = client.post(
            f"/sessions/{sid}/segment",
            json={"cx": 64.0, "cy": 64.0, "features": "surf", "classifier": "svm"},
        )
        assert r.status_code == 409

    def test_kmeans_deterministic_with_seed(self, client, suite):
        sid = upload(client, suite).json()["session_id"]
        body = {"cx": 64.0, "cy": 64.0, "features": "surf", "classifier": "kmeans", "seed": 4}
        a = client.post(f"/sessions/{sid}/segment", json=body)
        b = client.post(f"/sessions/{sid}/segment", json=body)
        assert a.status_code == 200
        assert a.json() == b.json()

    def test_dice_present_iff_mask_uploaded(self, client, suite, model_path):
        # centre the click on the lesion centroid for a meaningful result
        from roi_ellipse.features import load_ground_truth

        gt = load_ground_truth(suite / "masks" / "phantom_000.png")
        body = {
            "cx": gt.centroid_x,
            "cy": gt.centroid_y,
            "features": "surf",
            "classifier": "svm",
            "model": "surf-svm",
        }
        sid_plain = upload(client, suite).json()["session_id"]
        r_plain = client.post(f"/sessions/{sid_plain}/segment", json=body)
        assert r_plain.status_code == 200
        assert r_plain.json()["dice"] is None
        sid_mask = upload(client, suite, with_mask=True).json()["session_id"]
        r_mask = client.post(f"/sessions/{sid_mask}/segment", json=body)
        assert r_mask.status_code == 200
        dice = r_mask.json()["dice"]
        assert dice is not None
        assert 0.0 <= dice["value"] <= 1.0
        assert r_mask.json()["ellipse"] is not None
        assert len(r_mask.json()["tumour_keypoints"]) >= 3

    def test_inline_model_document(self, client, suite, model_path):
        doc = json.loads(model_path.read_text())
        sid = upload(client, suite).json()["session_id"]
        r = client.post(
            f"/sessions/{sid}/segment",
            json={
                "cx": 64.0,
                "cy": 64.0,
                "features": "surf",
                "classifier": "svm",
                "model": doc,
            },
        )
        assert r.status_code == 200

    def test_unknown_model_id_409(self, client, suite):
        sid = upload(client, suite).json()["session_id"]
        r = client.post(
            f"/sessions/{sid}/segment",
            json={"cx": 10.0, "cy": 10.0, "features": "surf", "classifier": "svm", "model": "nope"},
        )
        assert r.status_code == 409

    def test_bad_classifier_400(self, client, suite):
        sid = upload(client, suite).json()["session_id"]
        r = client.post(
            f"/sessions/{sid}/segment",
            json={"cx": 10.0, "cy": 10.0, "features": "surf", "classifier": "forest"},
        )
        assert r.status_code == 400


class TestCliParity:
    def test_service_ellipse_matches_cli_segment(self, client, suite, model_path, tmp_path):
        """Same image, click, and model through HTTP and the CLI must agree
        bit-for-bit on the ellipse JSON."""
        from roi_ellipse.features import load_ground_truth

        gt = load_ground_truth(suite / "masks" / "phantom_001.png")
        cx, cy = gt.centroid_x, gt.centroid_y
        sid = upload(client, suite, image_id="phantom_001").json()["session_id"]
        via_http = client.post(
            f"/sessions/{sid}/segment",
            json={
                "cx": cx,
                "cy": cy,
                "features": "surf",
                "classifier": "svm",
                "model": "surf-svm",
            },
        ).json()["ellipse"]
        out = tmp_path / "ellipse.json"
        proc = subprocess.run(
            [
                sys.executable, "-m", "roi_ellipse.harness.cli", "segment",
                "--image", str(suite / "images" / "phantom_001.png"),
                "--cx", repr(cx), "--cy", repr(cy),
                "--model", str(model_path), "--out", str(out),
            ],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0, proc.stderr
        via_cli = json.loads(out.read_text())
        assert json.dumps(via_http, sort_keys=True) == json.dumps(via_cli, sort_keys=True)
