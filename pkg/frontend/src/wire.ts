// Wire records sent to the engine: one JSON frame per pose estimate.
//
//   {"t": <ms>, "kp": {"<name>": [x, y, confidence], ...}}
//
// Coordinates are normalized image space ([0,1], origin top-left) in raw
// camera orientation. Display mirroring is strictly a rendering concern:
// nothing in the record depends on it.

import { z } from "zod";

import type { UiSettings } from "./settings.js";

export const KEYPOINT_NAMES = [
  "nose",
  "left_eye",
  "right_eye",
  "left_ear",
  "right_ear",
  "left_shoulder",
  "right_shoulder",
  "left_elbow",
  "right_elbow",
  "left_wrist",
  "right_wrist",
  "left_hip",
  "right_hip",
  "left_knee",
  "right_knee",
  "left_ankle",
  "right_ankle",
] as const;

export type KeypointName = (typeof KEYPOINT_NAMES)[number];

const KNOWN_NAMES: ReadonlySet<string> = new Set(KEYPOINT_NAMES);

const unitNumber = z.number().min(0).max(1);
const keypointTriple = z.tuple([unitNumber, unitNumber, unitNumber]);

export const frameRecordSchema = z.strictObject({
  t: z.number().finite(),
  kp: z
    .record(z.string(), keypointTriple)
    .refine((kp) => Object.keys(kp).every((name) => KNOWN_NAMES.has(name)), {
      message: "unknown keypoint name",
    }),
});

export type FrameRecord = z.infer<typeof frameRecordSchema>;

/** Raw model output: pixel-space keypoints with optional score/name. */
export interface ModelKeypoint {
  x: number;
  y: number;
  score?: number;
  name?: string;
}

export interface VideoSize {
  width: number;
  height: number;
}

const clamp01 = (v: number) => Math.min(Math.max(v, 0), 1);

/**
 * Convert one pose estimate into a wire record. Pixel coordinates are
 * normalized by the video size and clamped into [0,1] (the model can place
 * joints slightly out of frame). The UiSettings argument is taken so the
 * test suite can prove the record is independent of every display setting,
 * mirror-view included.
 */
export function captureRecord(
  keypoints: ModelKeypoint[],
  size: VideoSize,
  t: number,
  _settings?: Pick<UiSettings, "mirrorView">,
): FrameRecord {
  const kp: Record<string, [number, number, number]> = {};
  for (const point of keypoints) {
    if (!point.name || !KNOWN_NAMES.has(point.name)) continue;
    kp[point.name] = [
      clamp01(point.x / size.width),
      clamp01(point.y / size.height),
      clamp01(point.score ?? 0),
    ];
  }
  return { t, kp };
}

export function serializeRecord(record: FrameRecord): string {
  return JSON.stringify(record);
}

/** Validate a record against the wire schema; throws on violation. */
export function assertValidRecord(record: unknown): FrameRecord {
  return frameRecordSchema.parse(record);
}
