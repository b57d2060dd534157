/** Thin client for the segmentation service's JSON contract. */
export class ServiceError extends Error {
    status;
    constructor(status, detail) {
        super(detail);
        this.status = status;
        this.name = "ServiceError";
    }
}
async function raiseForStatus(response) {
    if (response.ok)
        return;
    let detail = `${response.status} ${response.statusText}`;
    try {
        const body = await response.json();
        if (typeof body?.detail === "string")
            detail = body.detail;
    }
    catch {
        // non-JSON error body: keep the status line
    }
    throw new ServiceError(response.status, detail);
}
export class ServiceClient {
    baseUrl;
    constructor(baseUrl = "") {
        this.baseUrl = baseUrl;
    }
    url(path) {
        return `${this.baseUrl.replace(/\/$/, "")}${path}`;
    }
    async createSession(image, mask) {
        const form = new FormData();
        form.append("image", image, "image.png");
        if (mask)
            form.append("mask", mask, "mask.png");
        const response = await fetch(this.url("/sessions"), {
            method: "POST",
            body: form,
        });
        await raiseForStatus(response);
        return (await response.json());
    }
    async keypoints(sessionId, features) {
        const response = await fetch(this.url(`/sessions/${sessionId}/keypoints?features=${encodeURIComponent(features)}`));
        await raiseForStatus(response);
        return (await response.json());
    }
    async segment(sessionId, params, signal) {
        const response = await fetch(this.url(`/sessions/${sessionId}/segment`), {
            method: "POST",
            headers: { "Content-Type": "application/json" },
            body: JSON.stringify(params),
            signal,
        });
        await raiseForStatus(response);
        return (await response.json());
    }
}
