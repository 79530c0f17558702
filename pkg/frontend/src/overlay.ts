// Monitoring overlay: video, skeleton, active reference geometry, per-wrist
// (u, v) readouts, and live bars for each mapped output. Mirroring flips
// the drawing only; wire data is untouched.

import type { Telemetry } from "./telemetry.js";
import type { FrameRecord } from "./wire.js";

export const SKELETON_EDGES: [string, string][] = [
  ["left_shoulder", "right_shoulder"],
  ["left_shoulder", "left_elbow"],
  ["left_elbow", "left_wrist"],
  ["right_shoulder", "right_elbow"],
  ["right_elbow", "right_wrist"],
  ["left_shoulder", "left_hip"],
  ["right_shoulder", "right_hip"],
  ["left_hip", "right_hip"],
  ["left_hip", "left_knee"],
  ["left_knee", "left_ankle"],
  ["right_hip", "right_knee"],
  ["right_knee", "right_ankle"],
  ["nose", "left_eye"],
  ["nose", "right_eye"],
];

export const TELEMETRY_STALE_MS = 500;

export function isStale(lastTelemetryWallMs: number | null, nowMs: number): boolean {
  return lastTelemetryWallMs === null || nowMs - lastTelemetryWallMs > TELEMETRY_STALE_MS;
}

export interface OverlayState {
  record: FrameRecord | null;
  telemetry: Telemetry | null;
  lastTelemetryWallMs: number | null;
  mirrorView: boolean;
  threshold: number;
  strategy: string;
  /** Auto-ranging for output bars: address -> [min, max] seen. */
  outputRanges: Map<string, [number, number]>;
}

function toCanvas(
  x: number,
  y: number,
  width: number,
  height: number,
  mirror: boolean,
): [number, number] {
  return [mirror ? (1 - x) * width : x * width, y * height];
}

export function drawOverlay(
  ctx: CanvasRenderingContext2D,
  video: HTMLVideoElement | null,
  state: OverlayState,
  nowMs: number,
): void {
  const { width, height } = ctx.canvas;
  ctx.clearRect(0, 0, width, height);
  if (video && video.readyState >= 2) {
    ctx.save();
    if (state.mirrorView) {
      ctx.translate(width, 0);
      ctx.scale(-1, 1);
    }
    ctx.drawImage(video, 0, 0, width, height);
    ctx.restore();
  } else {
    ctx.fillStyle = "#11131a";
    ctx.fillRect(0, 0, width, height);
  }

  const record = state.record;
  if (record) {
    drawSkeleton(ctx, record, state, width, height);
    drawReferenceGeometry(ctx, record, state, width, height);
  }
  drawReadouts(ctx, state, nowMs, width, height);
}

function drawSkeleton(
  ctx: CanvasRenderingContext2D,
  record: FrameRecord,
  state: OverlayState,
  width: number,
  height: number,
): void {
  ctx.lineWidth = 2;
  ctx.strokeStyle = "#27d07e";
  for (const [a, b] of SKELETON_EDGES) {
    const ka = record.kp[a];
    const kb = record.kp[b];
    if (!ka || !kb) continue;
    if (ka[2] < state.threshold || kb[2] < state.threshold) continue;
    const [ax, ay] = toCanvas(ka[0], ka[1], width, height, state.mirrorView);
    const [bx, by] = toCanvas(kb[0], kb[1], width, height, state.mirrorView);
    ctx.beginPath();
    ctx.moveTo(ax, ay);
    ctx.lineTo(bx, by);
    ctx.stroke();
  }
  for (const [name, [x, y, score]] of Object.entries(record.kp)) {
    const [cx, cy] = toCanvas(x, y, width, height, state.mirrorView);
    ctx.beginPath();
    ctx.arc(cx, cy, name.endsWith("wrist") ? 6 : 4, 0, 2 * Math.PI);
    if (score >= state.threshold) {
      ctx.fillStyle = "#27d07e";
      ctx.fill();
    } else {
      // Below the confidence gate: hollow joint.
      ctx.strokeStyle = "#d0a127";
      ctx.stroke();
    }
  }
}

function drawReferenceGeometry(
  ctx: CanvasRenderingContext2D,
  record: FrameRecord,
  state: OverlayState,
  width: number,
  height: number,
): void {
  if (state.strategy === "camera_center") {
    ctx.strokeStyle = "rgba(255,255,255,0.5)";
    ctx.setLineDash([6, 6]);
    ctx.beginPath();
    ctx.moveTo(width / 2, 0);
    ctx.lineTo(width / 2, height);
    ctx.stroke();
    ctx.setLineDash([]);
    return;
  }
  const rs = record.kp["right_shoulder"];
  const ls = record.kp["left_shoulder"];
  if (!rs || !ls) return;
  const [ax, ay] = toCanvas(rs[0], rs[1], width, height, state.mirrorView);
  const [bx, by] = toCanvas(ls[0], ls[1], width, height, state.mirrorView);
  ctx.strokeStyle = "rgba(120,180,255,0.9)";
  ctx.lineWidth = 3;
  ctx.beginPath();
  ctx.moveTo(ax, ay);
  ctx.lineTo(bx, by);
  ctx.stroke();
  if (state.strategy === "body_scaled") {
    // Shoulder-width ruler: the horizontal unit of the body-scaled frame.
    const dx = bx - ax;
    const dy = by - ay;
    ctx.strokeStyle = "rgba(120,180,255,0.45)";
    ctx.lineWidth = 2;
    for (const mult of [-1.5, 1, 2]) {
      ctx.beginPath();
      ctx.moveTo(ax + dx * -mult, ay + dy * -mult - 8);
      ctx.lineTo(ax + dx * -mult, ay + dy * -mult + 8);
      ctx.stroke();
    }
  }
}

function drawReadouts(
  ctx: CanvasRenderingContext2D,
  state: OverlayState,
  nowMs: number,
  width: number,
  height: number,
): void {
  const stale = isStale(state.lastTelemetryWallMs, nowMs);
  const telemetry = stale ? null : state.telemetry;
  ctx.font = "13px monospace";
  let y = 22;
  for (const wrist of ["right_wrist", "left_wrist"]) {
    const point = telemetry?.points[wrist];
    ctx.fillStyle = point?.valid ? "#e8e8e8" : "#777";
    const text = point
      ? `${wrist} u=${point.u.toFixed(3)} v=${point.v.toFixed(3)}${point.valid ? "" : " (invalid)"}`
      : `${wrist} -`;
    ctx.fillText(text, 10, y);
    // Outward-limit marker lights up when the wrist pegs the range end.
    if (point?.valid && (point.u >= 0.999 || point.u <= 0.001)) {
      ctx.fillStyle = "#ffd24a";
      ctx.fillText("*", width - 18, y);
    }
    y += 18;
  }

  const outputs = telemetry ? Object.entries(telemetry.outputs) : [];
  const barWidth = 150;
  let barY = height - 16 * Math.max(outputs.length, 1) - 8;
  for (const [id, value] of outputs) {
    ctx.fillStyle = "#9aa0b0";
    ctx.fillText(id, 10, barY + 11);
    const range = state.outputRanges.get(id) ?? [0, 1];
    if (value !== null) {
      range[0] = Math.min(range[0], value);
      range[1] = Math.max(range[1], value);
      state.outputRanges.set(id, range);
    }
    const span = range[1] - range[0] || 1;
    const frac = value === null ? 0 : (value - range[0]) / span;
    ctx.strokeStyle = "#555";
    ctx.strokeRect(90, barY, barWidth, 12);
    ctx.fillStyle = stale || value === null ? "#666" : "#4aa3ff";
    ctx.fillRect(90, barY, barWidth * Math.min(Math.max(frac, 0), 1), 12);
    ctx.fillStyle = "#9aa0b0";
    ctx.fillText(value === null ? "muted" : value.toPrecision(4), 90 + barWidth + 8, barY + 11);
    barY += 16;
  }
  if (stale) {
    ctx.fillStyle = "#d08027";
    ctx.fillText("telemetry stale", 10, height - 8);
  }
}
