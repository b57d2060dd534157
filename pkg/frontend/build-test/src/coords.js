/**
 * Display-space <-> image-space coordinate mapping.
 *
 * The canvas renders the image scaled by an integer zoom factor with its
 * origin at the canvas origin, so the mapping is a pure scale. Division is
 * exact for integer zoom factors, which makes the round trip
 * displayToImage(imageToDisplay(p)) lossless.
 */
export const ZOOM_LEVELS = [1, 2, 3, 4];
export function displayToImage(display, zoom) {
    if (zoom <= 0) {
        throw new Error(`zoom must be positive, got ${zoom}`);
    }
    return { x: display.x / zoom, y: display.y / zoom };
}
export function imageToDisplay(image, zoom) {
    if (zoom <= 0) {
        throw new Error(`zoom must be positive, got ${zoom}`);
    }
    return { x: image.x * zoom, y: image.y * zoom };
}
/** Clamp an image-space point into the valid pixel domain [0, dim-1]. */
export function clampToImage(p, width, height) {
    return {
        x: Math.min(Math.max(p.x, 0), width - 1),
        y: Math.min(Math.max(p.y, 0), height - 1),
    };
}
/**
 * Map a click on the canvas to the segmentation request coordinates.
 * Out-of-bounds requests are impossible by construction: the result is
 * clamped to the image area.
 */
export function clickToImagePoint(display, zoom, width, height) {
    return clampToImage(displayToImage(display, zoom), width, height);
}
