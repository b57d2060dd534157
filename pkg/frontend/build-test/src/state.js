/**
 * View state and its pure transitions.
 *
 * The state never mutates the base image; overlays are derived layers the
 * renderer composes on top. Keeping transitions pure makes the click ->
 * request -> overlay flow unit-testable without a DOM.
 */
export function initialState() {
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
export function sessionOpened(state, sessionId, width, height, maskAvailable) {
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
export function buildSegmentParams(state, click) {
    const params = {
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
export function clickStarted(state, click) {
    return { ...state, lastClick: click, lastResponse: null, error: null, busy: true };
}
export function segmentArrived(state, response) {
    return { ...state, lastResponse: response, busy: false };
}
/** Failures leave the previous overlay state untouched apart from the banner. */
export function requestFailed(state, message) {
    return { ...state, error: message, busy: false };
}
export function toggleOverlay(state, layer) {
    return {
        ...state,
        overlays: { ...state.overlays, [layer]: !state.overlays[layer] },
    };
}
export function setZoom(state, zoom) {
    return { ...state, zoom };
}
/** Dice badge text with exactly 4 decimals, or null when not available. */
export function diceBadge(state) {
    const dice = state.lastResponse?.dice;
    if (!dice)
        return null;
    return dice.value.toFixed(4);
}
