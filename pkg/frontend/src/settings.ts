// Performer-facing settings. The engine owns the authoritative state; the
// UI displays what the engine last acknowledged, not what was requested.

export type StrategyKind = "body_scaled" | "shoulder_anchor" | "camera_center";

export type CalibrationState = "idle" | "sampling" | "done";

export interface UiSettings {
  endpoint: string;
  mirrorView: boolean;
  threshold: number; // confidence gate, forwarded to the engine
  strategy: StrategyKind;
  preset: string | null;
  calibration: CalibrationState;
}

export const DEFAULT_SETTINGS: UiSettings = {
  endpoint: "ws://127.0.0.1:9000",
  mirrorView: true,
  threshold: 0.3,
  strategy: "body_scaled",
  preset: null,
  calibration: "idle",
};

export function isValidEndpoint(endpoint: string): boolean {
  try {
    const url = new URL(endpoint);
    return (url.protocol === "ws:" || url.protocol === "wss:") && url.port !== "";
  } catch {
    return false;
  }
}
