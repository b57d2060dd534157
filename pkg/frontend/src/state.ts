/**
 * View state and its pure transitions.
 *
 * The state never mutates the base image; overlays are derived layers the
 * renderer composes on top. Keeping transitions pure makes the click ->
 * request -> overlay flow unit-testable without a DOM.
 */

import type { Point } from "./coords.js";
import type { SegmentParams, SegmentResponse } from "./api.js";

export interface OverlayToggles {
  keypoints: boolean;
  ellipse: boolean;
  groundTruth: boolean;
}

export interface ViewState {
  sessionId: string | null;
  imageWidth: number;
  imageHeight: number;
  zoom: number;
  overlays: OverlayToggles;
  features: string;
  classifier: string;
  modelId: string | null;
  clusterSeed: number;
  lastClick: Point | null; // image coordinates
  lastResponse: SegmentResponse | null;
  maskAvailable: boolean;
  error: string | null;
  busy: boolean;
}

export function initialState(): ViewState {
  return {
    sessionId: null,
    imageWidth: 0,
    imageHeight: 0,
    zoom: 1,
    overlays: { keypoints: true, ellipse: true, groundTruth: false },
    features: "surf",
    classifier: "kmeans",
    modelId: null,
    clusterSeed: 0,
    lastClick: null,
    lastResponse: null,
    maskAvailable: false,
    error: null,
    busy: false,
  };
}

export function sessionOpened(
  state: ViewState,
  sessionId: string,
  width: number,
  height: number,
  maskAvailable: boolean,
): ViewState {
  return {
    ...initialState(),
    sessionId,
    imageWidth: width,
    imageHeight: height,
    maskAvailable,
    features: state.features,
    classifier: state.classifier,
    modelId: state.modelId,
    clusterSeed: state.clusterSeed,
    zoom: state.zoom,
  };
}

/** Build the segment request body for a click at image coordinates. */
export function buildSegmentParams(state: ViewState, click: Point): SegmentParams {
  const params: SegmentParams = {
    cx: click.x,
    cy: click.y,
    features: state.features,
    classifier: state.classifier,
  };
  if (state.classifier === "svm" && state.modelId) {
    params.model = state.modelId;
  }
  if (state.classifier !== "svm") {
    params.seed = state.clusterSeed;
  }
  return params;
}

/** A new click supersedes the previous result and marks a request in flight. */
export function clickStarted(state: ViewState, click: Point): ViewState {
  return { ...state, lastClick: click, lastResponse: null, error: null, busy: true };
}

export function segmentArrived(state: ViewState, response: SegmentResponse): ViewState {
  return { ...state, lastResponse: response, busy: false };
}

/** Failures leave the previous overlay state untouched apart from the banner. */
export function requestFailed(state: ViewState, message: string): ViewState {
  return { ...state, error: message, busy: false };
}

export function toggleOverlay(state: ViewState, layer: keyof OverlayToggles): ViewState {
  return {
    ...state,
    overlays: { ...state.overlays, [layer]: !state.overlays[layer] },
  };
}

export function setZoom(state: ViewState, zoom: number): ViewState {
  return { ...state, zoom };
}

/** Dice badge text with exactly 4 decimals, or null when not available. */
export function diceBadge(state: ViewState): string | null {
  const dice = state.lastResponse?.dice;
  if (!dice) return null;
  return dice.value.toFixed(4);
}
