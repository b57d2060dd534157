/**
 * Canvas overlay rendering. The ellipse is drawn analytically from
 * {cx, cy, rx, ry} (a vector path scaled by the zoom), never from a
 * rasterized mask, so it stays crisp at any zoom.
 */
import { imageToDisplay } from "./coords.js";
export function drawImage(ctx, bitmap, zoom) {
    ctx.save();
    ctx.imageSmoothingEnabled = zoom < 1;
    ctx.drawImage(bitmap, 0, 0, bitmap.width * zoom, bitmap.height * zoom);
    ctx.restore();
}
export function drawGroundTruth(ctx, mask, zoom) {
    ctx.save();
    ctx.globalAlpha = 0.35;
    ctx.imageSmoothingEnabled = false;
    ctx.drawImage(mask, 0, 0, mask.width * zoom, mask.height * zoom);
    ctx.restore();
}
export function drawClickMarker(ctx, click, zoom) {
    const p = imageToDisplay(click, zoom);
    ctx.save();
    ctx.strokeStyle = "#ffd400";
    ctx.lineWidth = 1.5;
    ctx.beginPath();
    ctx.moveTo(p.x - 6, p.y);
    ctx.lineTo(p.x + 6, p.y);
    ctx.moveTo(p.x, p.y - 6);
    ctx.lineTo(p.x, p.y + 6);
    ctx.stroke();
    ctx.restore();
}
export function drawKeypoints(ctx, keypoints, zoom) {
    ctx.save();
    ctx.strokeStyle = "#27e0a4";
    ctx.lineWidth = 1;
    for (const kp of keypoints) {
        const p = imageToDisplay({ x: kp.x, y: kp.y }, zoom);
        ctx.beginPath();
        ctx.arc(p.x, p.y, Math.max(2, kp.scale * zoom * 0.5), 0, 2 * Math.PI);
        ctx.stroke();
    }
    ctx.restore();
}
export function drawEllipse(ctx, ellipse, zoom) {
    const c = imageToDisplay({ x: ellipse.cx, y: ellipse.cy }, zoom);
    ctx.save();
    ctx.strokeStyle = "#ff5470";
    ctx.lineWidth = 2;
    ctx.beginPath();
    ctx.ellipse(c.x, c.y, ellipse.rx * zoom, ellipse.ry * zoom, 0, 0, 2 * Math.PI);
    ctx.stroke();
    ctx.restore();
}
