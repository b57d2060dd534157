import assert from "node:assert/strict";
import { test } from "node:test";

import {
  clampToImage,
  clickToImagePoint,
  displayToImage,
  imageToDisplay,
} from "../src/coords.js";

test("display (100, 60) at 2x zoom maps to image (50, 30)", () => {
  const p = displayToImage({ x: 100, y: 60 }, 2);
  assert.deepEqual(p, { x: 50, y: 30 });
});

test("round trip is exact at 1x zoom", () => {
  for (let x = 0; x < 256; x += 7) {
    for (let y = 0; y < 256; y += 11) {
      const there = imageToDisplay({ x, y }, 1);
      const back = displayToImage(there, 1);
      assert.equal(back.x, x);
      assert.equal(back.y, y);
    }
  }
});

test("round trip is exact at 2x zoom", () => {
  for (let x = 0; x < 256; x += 3) {
    for (let y = 0; y < 256; y += 5) {
      const there = imageToDisplay({ x, y }, 2);
      const back = displayToImage(there, 2);
      assert.equal(back.x, x);
      assert.equal(back.y, y);
    }
  }
});

test("round trip is exact for all integer zooms including subpixel halves", () => {
  for (const zoom of [1, 2, 3, 4]) {
    for (const v of [0, 0.5, 1, 12.5, 127, 255.5]) {
      const back = displayToImage(imageToDisplay({ x: v, y: v }, zoom), zoom);
      assert.equal(back.x, v);
      assert.equal(back.y, v);
    }
  }
});

test("clamping keeps clicks inside the image domain", () => {
  assert.deepEqual(clampToImage({ x: -5, y: 3 }, 64, 64), { x: 0, y: 3 });
  assert.deepEqual(clampToImage({ x: 90, y: 70 }, 64, 64), { x: 63, y: 63 });
});

test("out-of-bounds clicks are impossible by construction", () => {
  // clicking past the right edge of a zoomed canvas clamps to the last pixel
  const p = clickToImagePoint({ x: 1000, y: -40 }, 2, 128, 128);
  assert.deepEqual(p, { x: 127, y: 0 });
});

test("zoom must be positive", () => {
  assert.throws(() => displayToImage({ x: 1, y: 1 }, 0));
  assert.throws(() => imageToDisplay({ x: 1, y: 1 }, -1));
});
