// Capture loop: webcam -> pose inference -> wire record -> engine, with the
// monitoring overlay and controls around it. Errors (camera permission,
// model load, engine unreachable) land in status badges, never silently.

import { EngineConnection } from "./connection.js";
import { Controls } from "./controls.js";
import { drawOverlay, type OverlayState } from "./overlay.js";
import { createMoveNetEstimator, type PoseEstimator } from "./pose.js";
import { DEFAULT_SETTINGS, isValidEndpoint, type UiSettings } from "./settings.js";
import { captureRecord, type FrameRecord } from "./wire.js";

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
};

const video = $<HTMLVideoElement>("camera");
const canvas = $<HTMLCanvasElement>("overlay");
const ctx = canvas.getContext("2d")!;

const badges = {
  camera: $<HTMLElement>("badge-camera"),
  model: $<HTMLElement>("badge-model"),
  engine: $<HTMLElement>("badge-engine"),
  fps: $<HTMLElement>("badge-fps"),
};

function setBadge(el: HTMLElement, text: string, ok: boolean | null): void {
  el.textContent = text;
  el.className = "badge " + (ok === null ? "pending" : ok ? "ok" : "bad");
}

const settings: UiSettings = { ...DEFAULT_SETTINGS };
const endpointInput = $<HTMLInputElement>("endpoint");
endpointInput.value = settings.endpoint;

const overlayState: OverlayState = {
  record: null,
  telemetry: null,
  lastTelemetryWallMs: null,
  mirrorView: settings.mirrorView,
  threshold: settings.threshold,
  strategy: settings.strategy,
  outputRanges: new Map(),
};

let connection: EngineConnection | null = null;
let controls: Controls | null = null;

function connect(): void {
  const endpoint = endpointInput.value.trim();
  if (!isValidEndpoint(endpoint)) {
    setBadge(badges.engine, "bad endpoint", false);
    return;
  }
  connection?.close();
  settings.endpoint = endpoint;
  connection = new EngineConnection(endpoint, {
    onStatus: (connected) =>
      setBadge(badges.engine, connected ? "engine: connected" : "engine: disconnected", connected),
    onMessage: (message) => {
      if (message.kind === "telemetry") {
        overlayState.telemetry = message.telemetry;
        overlayState.lastTelemetryWallMs = performance.now();
        controls?.applyState(message.telemetry.state);
      } else if (message.kind === "event" && message.event.event === "calibration_done") {
        controls?.onCalibrationDone(message.event.s_max, message.event.ok);
      } else if (message.kind === "rejected") {
        setBadge(badges.engine, `engine: rejected (${message.reason})`, false);
      }
    },
  });
  connection.open();
  controls = new Controls(
    {
      strategy: $<HTMLSelectElement>("strategy"),
      preset: $<HTMLSelectElement>("preset"),
      threshold: $<HTMLInputElement>("threshold"),
      thresholdLabel: $<HTMLElement>("threshold-label"),
      calibrate: $<HTMLButtonElement>("calibrate"),
      mirror: $<HTMLInputElement>("mirror"),
      status: $<HTMLElement>("control-status"),
    },
    settings,
    connection,
  );
}

$<HTMLButtonElement>("connect").addEventListener("click", connect);

async function openCamera(): Promise<void> {
  try {
    const stream = await navigator.mediaDevices.getUserMedia({
      video: { width: 640, height: 480, frameRate: { ideal: 30 } },
      audio: false,
    });
    video.srcObject = stream;
    await video.play();
    canvas.width = video.videoWidth || 640;
    canvas.height = video.videoHeight || 480;
    setBadge(badges.camera, "camera: live", true);
  } catch (err) {
    setBadge(badges.camera, `camera: ${(err as Error).name ?? "denied"}`, false);
    throw err;
  }
}

async function loadModel(): Promise<PoseEstimator> {
  setBadge(badges.model, "model: loading", null);
  try {
    const estimator = await createMoveNetEstimator();
    setBadge(badges.model, "model: ready", true);
    return estimator;
  } catch (err) {
    setBadge(badges.model, "model: failed to load", false);
    throw err;
  }
}

async function captureLoop(estimator: PoseEstimator): Promise<void> {
  const t0 = performance.now();
  let frames = 0;
  let fpsWindowStart = t0;
  let lastRecord: FrameRecord | null = null;

  const tick = async () => {
    const now = performance.now();
    try {
      const keypoints = await estimator.estimate(video);
      if (keypoints.length > 0) {
        const record = captureRecord(
          keypoints,
          { width: video.videoWidth || 640, height: video.videoHeight || 480 },
          now - t0,
          settings,
        );
        lastRecord = record;
        connection?.sendFrame(record);
      }
    } catch {
      // one bad inference frame is not fatal; the next tick retries
    }
    frames += 1;
    if (now - fpsWindowStart >= 1000) {
      const fps = (frames * 1000) / (now - fpsWindowStart);
      setBadge(badges.fps, `capture: ${fps.toFixed(1)} fps`, fps >= 15);
      frames = 0;
      fpsWindowStart = now;
    }
    overlayState.record = lastRecord;
    overlayState.mirrorView = settings.mirrorView;
    overlayState.threshold = settings.threshold;
    overlayState.strategy = settings.strategy;
    drawOverlay(ctx, video, overlayState, performance.now());
    requestAnimationFrame(() => void tick());
  };
  requestAnimationFrame(() => void tick());
}

async function start(): Promise<void> {
  connect();
  await openCamera();
  const estimator = await loadModel();
  await captureLoop(estimator);
}

void start();
