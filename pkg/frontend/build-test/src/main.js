/** DOM wiring for the click-to-segment page. */
import { ServiceClient, ServiceError } from "./api.js";
import { ZOOM_LEVELS, clickToImagePoint } from "./coords.js";
import { drawClickMarker, drawEllipse, drawGroundTruth, drawImage, drawKeypoints, } from "./overlay.js";
import { buildSegmentParams, clickStarted, diceBadge, initialState, requestFailed, segmentArrived, sessionOpened, setZoom, toggleOverlay, } from "./state.js";
const $ = (id) => {
    const el = document.getElementById(id);
    if (!el)
        throw new Error(`missing element #${id}`);
    return el;
};
const canvas = $("view");
const ctx = canvas.getContext("2d");
const errorBanner = $("error-banner");
const sessionLabel = $("session-label");
const diceLabel = $("dice-badge");
const noteLabel = $("note-label");
const serviceBase = new URLSearchParams(window.location.search).get("service") ?? "http://127.0.0.1:8000";
const client = new ServiceClient(serviceBase);
let state = initialState();
let imageBitmap = null;
let maskBitmap = null;
let inFlight = null;
function update(next) {
    state = next;
    render();
}
function render() {
    errorBanner.textContent = state.error ?? "";
    errorBanner.style.display = state.error ? "block" : "none";
    sessionLabel.textContent = state.sessionId ? `session ${state.sessionId.slice(0, 12)}…` : "no session";
    const badge = diceBadge(state);
    diceLabel.textContent = badge ? `Dice ${badge}` : "";
    noteLabel.textContent = state.lastResponse?.note || (state.busy ? "segmenting…" : "");
    $("toggle-gt").disabled = !state.maskAvailable;
    if (!imageBitmap)
        return;
    canvas.width = imageBitmap.width * state.zoom;
    canvas.height = imageBitmap.height * state.zoom;
    ctx.clearRect(0, 0, canvas.width, canvas.height);
    drawImage(ctx, imageBitmap, state.zoom);
    if (state.overlays.groundTruth && maskBitmap) {
        drawGroundTruth(ctx, maskBitmap, state.zoom);
    }
    const response = state.lastResponse;
    if (response && state.overlays.keypoints) {
        drawKeypoints(ctx, response.tumour_keypoints, state.zoom);
    }
    if (response?.ellipse && state.overlays.ellipse) {
        drawEllipse(ctx, response.ellipse, state.zoom);
    }
    if (state.lastClick) {
        drawClickMarker(ctx, state.lastClick, state.zoom);
    }
}
async function openSession() {
    const imageInput = $("image-file");
    const maskInput = $("mask-file");
    const imageFile = imageInput.files?.[0];
    if (!imageFile) {
        update(requestFailed(state, "choose an image file first"));
        return;
    }
    const maskFile = maskInput.files?.[0] ?? null;
    try {
        const info = await client.createSession(imageFile, maskFile);
        imageBitmap = await createImageBitmap(imageFile);
        maskBitmap = maskFile ? await createImageBitmap(maskFile) : null;
        update(sessionOpened(state, info.session_id, info.width, info.height, maskFile !== null));
    }
    catch (err) {
        update(requestFailed(state, err instanceof Error ? err.message : String(err)));
    }
}
async function segmentAt(displayX, displayY) {
    if (!state.sessionId)
        return;
    const click = clickToImagePoint({ x: displayX, y: displayY }, state.zoom, state.imageWidth, state.imageHeight);
    // a new click supersedes any pending request
    inFlight?.abort();
    const controller = new AbortController();
    inFlight = controller;
    update(clickStarted(state, click));
    try {
        const response = await client.segment(state.sessionId, buildSegmentParams(state, click), controller.signal);
        if (inFlight === controller) {
            update(segmentArrived(state, response));
        }
    }
    catch (err) {
        if (err instanceof DOMException && err.name === "AbortError")
            return;
        const message = err instanceof ServiceError ? `service: ${err.message}` : `network failure: ${err}`;
        if (inFlight === controller) {
            update(requestFailed(state, message));
        }
    }
}
function wireControls() {
    $("open-session").addEventListener("click", () => void openSession());
    canvas.addEventListener("click", (ev) => {
        const rect = canvas.getBoundingClientRect();
        void segmentAt(ev.clientX - rect.left, ev.clientY - rect.top);
    });
    const zoomSelect = $("zoom");
    for (const z of ZOOM_LEVELS) {
        const opt = document.createElement("option");
        opt.value = String(z);
        opt.textContent = `${z}x`;
        zoomSelect.appendChild(opt);
    }
    zoomSelect.addEventListener("change", () => update(setZoom(state, Number(zoomSelect.value))));
    $("toggle-kp").addEventListener("change", () => update(toggleOverlay(state, "keypoints")));
    $("toggle-ellipse").addEventListener("change", () => update(toggleOverlay(state, "ellipse")));
    $("toggle-gt").addEventListener("change", () => update(toggleOverlay(state, "groundTruth")));
    const features = $("features");
    features.addEventListener("change", () => update({ ...state, features: features.value }));
    const classifier = $("classifier");
    classifier.addEventListener("change", () => update({ ...state, classifier: classifier.value }));
    const model = $("model-id");
    model.addEventListener("change", () => update({ ...state, modelId: model.value.trim() || null }));
}
wireControls();
render();
