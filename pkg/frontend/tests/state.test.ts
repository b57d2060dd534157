import assert from "node:assert/strict";
import { test } from "node:test";

import type { SegmentResponse } from "../src/api.js";
import {
  buildSegmentParams,
  clickStarted,
  diceBadge,
  initialState,
  requestFailed,
  segmentArrived,
  sessionOpened,
  toggleOverlay,
} from "../src/state.js";

function opened() {
  return sessionOpened(initialState(), "abc123", 128, 96, true);
}

const response: SegmentResponse = {
  ellipse: { cx: 40, cy: 30, rx: 10, ry: 8 },
  tumour_keypoints: [{ x: 40, y: 30, scale: 2, response: 5, orientation: 0 }],
  dice: { value: 0.87654321, area_e: 10, area_g: 12, area_overlap: 9 },
  note: "",
};

test("opening a session resets results but keeps tool preferences", () => {
  let s = initialState();
  s = { ...s, features: "brisk", classifier: "svm", modelId: "surf-svm", zoom: 2 };
  const next = sessionOpened(s, "sess", 64, 64, false);
  assert.equal(next.sessionId, "sess");
  assert.equal(next.features, "brisk");
  assert.equal(next.modelId, "surf-svm");
  assert.equal(next.zoom, 2);
  assert.equal(next.lastResponse, null);
  assert.equal(next.maskAvailable, false);
});

test("segment request body carries click and tool settings", () => {
  const s = { ...opened(), classifier: "kmeans", clusterSeed: 7 };
  const params = buildSegmentParams(s, { x: 12.5, y: 40 });
  assert.deepEqual(params, {
    cx: 12.5,
    cy: 40,
    features: "surf",
    classifier: "kmeans",
    seed: 7,
  });
});

test("svm requests include the model id and omit the clustering seed", () => {
  const s = { ...opened(), classifier: "svm", modelId: "surf-svm" };
  const params = buildSegmentParams(s, { x: 1, y: 2 });
  assert.equal(params.model, "surf-svm");
  assert.equal(params.seed, undefined);
});

test("a new click supersedes the previous result", () => {
  let s = segmentArrived(opened(), response);
  assert.ok(s.lastResponse);
  s = clickStarted(s, { x: 5, y: 6 });
  assert.equal(s.lastResponse, null);
  assert.deepEqual(s.lastClick, { x: 5, y: 6 });
  assert.equal(s.busy, true);
});

test("dice badge renders with 4 decimals when present", () => {
  const s = segmentArrived(opened(), response);
  assert.equal(diceBadge(s), "0.8765");
});

test("dice badge is absent without a mask score", () => {
  const s = segmentArrived(opened(), { ...response, dice: null });
  assert.equal(diceBadge(s), null);
});

test("network failure surfaces a message and leaves results untouched", () => {
  const withResult = segmentArrived(opened(), response);
  const failed = requestFailed(withResult, "network failure: boom");
  assert.equal(failed.error, "network failure: boom");
  assert.deepEqual(failed.lastResponse, withResult.lastResponse);
});

test("overlay toggles flip independently and never touch the image", () => {
  let s = opened();
  s = toggleOverlay(s, "keypoints");
  assert.equal(s.overlays.keypoints, false);
  assert.equal(s.overlays.ellipse, true);
  s = toggleOverlay(s, "groundTruth");
  assert.equal(s.overlays.groundTruth, true);
  assert.equal(s.imageWidth, 128);
});
