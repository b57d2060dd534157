"""HTTP facade for the interactive click-to-segment flow.

Upload an image (optionally with its ground-truth mask), fetch keypoints,
and request a segmentation for a clicked centre point. The core pipeline
is shared with the CLI, so for identical inputs the returned ellipse JSON
is identical to `roi-ellipse segment` output. Sessions are held in memory
only and expire after an idle timeout; per-session operations serialize on
a session lock while different sessions proceed concurrently.
"""

from __future__ import annotations

import re
import secrets
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, File, HTTPException, UploadFile
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel

from .detect import FEATURE_KINDS, detect_keypoints
from .features import GroundTruth
from .harness.loo import CLASSIFIER_KINDS, PipelineConfig, score_against_mask, segment_image
from .harness.model_io import ModelFormatError, load_model_document, validate_model_document
from .imgcore import GrayImage, ImageLoadError, image_from_bytes
from .preprocess import preprocess

MAX_UPLOAD_BYTES = 16 * 1024 * 1024
_MODEL_ID = re.compile(r"^[A-Za-z0-9_-]+$")


@dataclass
class Session:
    id: str
    image: GrayImage
    gt: GroundTruth | None
    created_at: float
    last_access: float
    lock: threading.Lock = field(default_factory=threading.Lock)
    preprocessed: GrayImage | None = None
    keypoint_cache: dict = field(default_factory=dict)

    def preprocessed_image(self, cfg: PipelineConfig) -> GrayImage:
        if self.preprocessed is None:
            self.preprocessed = preprocess(self.image, cfg.preprocess)
        return self.preprocessed


class SegmentRequest(BaseModel):
    cx: float
    cy: float
    features: str = "surf"
    classifier: str = "kmeans"
    model: str | dict | None = None
    seed: int = 0


def create_app(
    model_dir: str | None = None,
    session_ttl: float = 1800.0,
    cors_origins=("*",),
) -> FastAPI:
    app = FastAPI(title="roi-ellipse service")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=list(cors_origins),
        allow_methods=["*"],
        allow_headers=["*"],
    )
    sessions: dict[str, Session] = {}
    registry_lock = threading.Lock()
    cfg = PipelineConfig()

    def _purge_expired() -> None:
        now = time.monotonic()
        with registry_lock:
            dead = [sid for sid, s in sessions.items() if now - s.last_access > session_ttl]
            for sid in dead:
                del sessions[sid]

    def _get_session(session_id: str) -> Session:
        _purge_expired()
        with registry_lock:
            session = sessions.get(session_id)
            if session is None:
                raise HTTPException(status_code=404, detail="unknown session")
            session.last_access = time.monotonic()
            return session

    def _resolve_model(spec):
        if isinstance(spec, dict):
            try:
                validate_model_document(spec)
            except ModelFormatError as exc:
                raise HTTPException(status_code=400, detail=str(exc))
            return spec
        if isinstance(spec, str):
            if model_dir is None:
                raise HTTPException(status_code=409, detail="service has no model directory")
            if not _MODEL_ID.match(spec):
                raise HTTPException(status_code=400, detail="invalid model id")
            path = Path(model_dir) / f"{spec}.json"
            if not path.is_file():
                raise HTTPException(status_code=409, detail=f"model {spec!r} not found")
            try:
                return load_model_document(path)
            except ModelFormatError as exc:
                raise HTTPException(status_code=409, detail=str(exc))
        raise HTTPException(status_code=400, detail="model must be an id or a document")

    @app.post("/sessions", status_code=201)
    def create_session(image: UploadFile = File(...), mask: UploadFile | None = File(None)):
        raw = image.file.read(MAX_UPLOAD_BYTES + 1)
        if len(raw) > MAX_UPLOAD_BYTES:
            raise HTTPException(status_code=413, detail="image exceeds the 16 MB limit")
        try:
            img = image_from_bytes(raw)
        except ImageLoadError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        if not img.meets_pipeline_minimum():
            raise HTTPException(
                status_code=400, detail="image below the 32x32 pipeline minimum"
            )
        gt = None
        if mask is not None:
            mraw = mask.file.read(MAX_UPLOAD_BYTES + 1)
            if len(mraw) > MAX_UPLOAD_BYTES:
                raise HTTPException(status_code=413, detail="mask exceeds the 16 MB limit")
            try:
                mask_img = image_from_bytes(mraw)
            except ImageLoadError as exc:
                raise HTTPException(status_code=400, detail=f"mask: {exc}")
            if (mask_img.height, mask_img.width) != (img.height, img.width):
                raise HTTPException(status_code=400, detail="mask dimensions do not match image")
            if not (mask_img.pixels > 127).any():
                raise HTTPException(status_code=400, detail="mask contains no tumour pixels")
            gt = GroundTruth(mask_img.pixels > 127)
        session = Session(
            id=secrets.token_hex(16),
            image=img,
            gt=gt,
            created_at=time.monotonic(),
            last_access=time.monotonic(),
        )
        with registry_lock:
            sessions[session.id] = session
        return {"session_id": session.id, "width": img.width, "height": img.height}

    @app.get("/sessions/{session_id}/keypoints")
    def get_keypoints(session_id: str, features: str = "surf"):
        if features not in FEATURE_KINDS:
            raise HTTPException(status_code=400, detail=f"unknown feature kind {features!r}")
        session = _get_session(session_id)
        with session.lock:
            if features not in session.keypoint_cache:
                pre = session.preprocessed_image(cfg)
                kps, _ = detect_keypoints(pre, features, cfg.detector)
                session.keypoint_cache[features] = [kp.to_json_dict() for kp in kps]
            return session.keypoint_cache[features]

    @app.post("/sessions/{session_id}/segment")
    def segment(session_id: str, req: SegmentRequest):
        if req.features not in FEATURE_KINDS:
            raise HTTPException(status_code=400, detail=f"unknown feature kind {req.features!r}")
        if req.classifier not in CLASSIFIER_KINDS:
            raise HTTPException(status_code=400, detail=f"unknown classifier {req.classifier!r}")
        session = _get_session(session_id)
        img = session.image
        if not (0 <= req.cx < img.width and 0 <= req.cy < img.height):
            raise HTTPException(status_code=422, detail="click outside image bounds")
        model_doc = None
        if req.classifier == "svm":
            if req.model is None:
                raise HTTPException(
                    status_code=409, detail="svm classification requires a model"
                )
            model_doc = _resolve_model(req.model)
        with session.lock:
            result = segment_image(
                img,
                req.cx,
                req.cy,
                feature_kind=req.features,
                classifier=req.classifier,
                cfg=cfg,
                model_doc=model_doc,
                cluster_seed=req.seed,
            )
            payload = {
                "ellipse": result.ellipse.to_json_dict() if result.ellipse else None,
                "tumour_keypoints": [kp.to_json_dict() for kp in result.tumour_keypoints()],
                "dice": None,
                "note": result.note,
            }
            if session.gt is not None:
                payload["dice"] = score_against_mask(result, session.gt).to_json_dict()
            return payload

    @app.get("/healthz")
    def healthz():
        return {"status": "ok"}

    return app
