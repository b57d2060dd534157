/** Thin client for the segmentation service's JSON contract. */

export interface SessionInfo {
  session_id: string;
  width: number;
  height: number;
}

export interface KeypointJson {
  x: number;
  y: number;
  scale: number;
  response: number;
  orientation: number;
}

export interface EllipseJson {
  cx: number;
  cy: number;
  rx: number;
  ry: number;
}

export interface DiceJson {
  value: number;
  area_e: number;
  area_g: number;
  area_overlap: number;
}

export interface SegmentResponse {
  ellipse: EllipseJson | null;
  tumour_keypoints: KeypointJson[];
  dice: DiceJson | null;
  note: string;
}

export interface SegmentParams {
  cx: number;
  cy: number;
  features: string;
  classifier: string;
  model?: string;
  seed?: number;
}

export class ServiceError extends Error {
  constructor(
    readonly status: number,
    detail: string,
  ) {
    super(detail);
    this.name = "ServiceError";
  }
}

async function raiseForStatus(response: Response): Promise<void> {
  if (response.ok) return;
  let detail = `${response.status} ${response.statusText}`;
  try {
    const body = await response.json();
    if (typeof body?.detail === "string") detail = body.detail;
  } catch {
    // non-JSON error body: keep the status line
  }
  throw new ServiceError(response.status, detail);
}

export class ServiceClient {
  constructor(readonly baseUrl: string = "") {}

  private url(path: string): string {
    return `${this.baseUrl.replace(/\/$/, "")}${path}`;
  }

  async createSession(image: Blob, mask?: Blob | null): Promise<SessionInfo> {
    const form = new FormData();
    form.append("image", image, "image.png");
    if (mask) form.append("mask", mask, "mask.png");
    const response = await fetch(this.url("/sessions"), {
      method: "POST",
      body: form,
    });
    await raiseForStatus(response);
    return (await response.json()) as SessionInfo;
  }

  async keypoints(sessionId: string, features: string): Promise<KeypointJson[]> {
    const response = await fetch(
      this.url(`/sessions/${sessionId}/keypoints?features=${encodeURIComponent(features)}`),
    );
    await raiseForStatus(response);
    return (await response.json()) as KeypointJson[];
  }

  async segment(
    sessionId: string,
    params: SegmentParams,
    signal?: AbortSignal,
  ): Promise<SegmentResponse> {
    const response = await fetch(this.url(`/sessions/${sessionId}/segment`), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(params),
      signal,
    });
    await raiseForStatus(response);
    return (await response.json()) as SegmentResponse;
  }
}
