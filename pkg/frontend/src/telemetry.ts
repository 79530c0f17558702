// Messages arriving from the engine on the telemetry channel: periodic
// state snapshots, command acknowledgements, one-shot events, and the
// busy rejection.

import { z } from "zod";

const pointStateSchema = z.object({
  valid: z.boolean(),
  u: z.number(),
  v: z.number(),
});

export const telemetrySchema = z.object({
  t: z.number().nullable(),
  points: z.record(z.string(), pointStateSchema),
  outputs: z.record(z.string(), z.number().nullable()),
  state: z.object({
    strategy: z.string(),
    preset: z.string().nullable(),
    s_max: z.number(),
    c_min: z.number(),
    calibration: z.string(),
  }),
  fps: z.number().optional(),
  counters: z.record(z.string(), z.number()).optional(),
});

export const ackSchema = z.object({
  ack: z.string(),
  ok: z.boolean(),
  error: z.string().optional(),
  state: telemetrySchema.shape.state.optional(),
});

export const eventSchema = z.object({
  event: z.string(),
  ok: z.boolean().optional(),
  s_max: z.number().optional(),
  samples: z.number().optional(),
  error: z.string().optional(),
});

const busySchema = z.object({ error: z.string() });

export type Telemetry = z.infer<typeof telemetrySchema>;
export type Ack = z.infer<typeof ackSchema>;
export type EngineEvent = z.infer<typeof eventSchema>;

export type EngineMessage =
  | { kind: "telemetry"; telemetry: Telemetry }
  | { kind: "ack"; ack: Ack }
  | { kind: "event"; event: EngineEvent }
  | { kind: "rejected"; reason: string }
  | { kind: "unknown"; raw: string };

export function parseEngineMessage(raw: string): EngineMessage {
  let doc: unknown;
  try {
    doc = JSON.parse(raw);
  } catch {
    return { kind: "unknown", raw };
  }
  if (typeof doc !== "object" || doc === null) return { kind: "unknown", raw };
  if ("ack" in doc) {
    const ack = ackSchema.safeParse(doc);
    if (ack.success) return { kind: "ack", ack: ack.data };
  }
  if ("event" in doc) {
    const event = eventSchema.safeParse(doc);
    if (event.success) return { kind: "event", event: event.data };
  }
  if ("points" in doc) {
    const telemetry = telemetrySchema.safeParse(doc);
    if (telemetry.success) return { kind: "telemetry", telemetry: telemetry.data };
  }
  if ("error" in doc) {
    const busy = busySchema.safeParse(doc);
    if (busy.success) return { kind: "rejected", reason: busy.data.error };
  }
  return { kind: "unknown", raw };
}
