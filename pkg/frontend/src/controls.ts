// Performer controls. Every change goes to the engine as a control record;
// the UI reflects the acknowledged state, never the requested one. On
// timeout the control shows pending, then reverts.

import type { EngineConnection } from "./connection.js";
import type { Telemetry } from "./telemetry.js";
import type { StrategyKind, UiSettings } from "./settings.js";

export interface ControlElements {
  strategy: HTMLSelectElement;
  preset: HTMLSelectElement;
  threshold: HTMLInputElement;
  thresholdLabel: HTMLElement;
  calibrate: HTMLButtonElement;
  mirror: HTMLInputElement;
  status: HTMLElement;
}

export class Controls {
  constructor(
    private readonly el: ControlElements,
    private readonly settings: UiSettings,
    private readonly connection: EngineConnection,
  ) {
    el.strategy.value = settings.strategy;
    el.threshold.value = String(settings.threshold);
    el.thresholdLabel.textContent = settings.threshold.toFixed(2);
    el.mirror.checked = settings.mirrorView;

    el.mirror.addEventListener("change", () => {
      // Local display concern only; nothing is sent.
      this.settings.mirrorView = el.mirror.checked;
    });
    el.strategy.addEventListener("change", () => {
      void this.request("set_strategy", { kind: el.strategy.value }, () => {
        el.strategy.value = this.settings.strategy;
      });
    });
    el.preset.addEventListener("change", () => {
      if (!el.preset.value) return;
      void this.request("set_preset", { name: el.preset.value }, () => {
        el.preset.value = this.settings.preset ?? "";
      });
    });
    el.threshold.addEventListener("change", () => {
      void this.request("set_threshold", { value: Number(el.threshold.value) }, () => {
        el.threshold.value = String(this.settings.threshold);
        el.thresholdLabel.textContent = this.settings.threshold.toFixed(2);
      });
    });
    el.calibrate.addEventListener("click", () => {
      el.calibrate.disabled = true;
      void this.request("calibrate", { duration_ms: 10_000 }, () => {
        el.calibrate.disabled = false;
      });
    });
  }

  private async request(
    cmd: string,
    params: Record<string, unknown>,
    revert: () => void,
  ): Promise<void> {
    this.el.status.textContent = `${cmd}: pending`;
    const result = await this.connection.sendControl(cmd, params);
    if (result.ok && result.ack?.state) {
      this.applyState(result.ack.state);
      this.el.status.textContent = `${cmd}: ok`;
    } else {
      revert();
      this.el.status.textContent = result.timedOut
        ? `${cmd}: timeout`
        : `${cmd}: rejected (${result.ack?.error ?? "not connected"})`;
    }
  }

  /** Adopt engine-acknowledged state (from acks or telemetry). */
  applyState(state: Telemetry["state"]): void {
    this.settings.strategy = state.strategy as StrategyKind;
    this.settings.preset = state.preset;
    this.settings.threshold = state.c_min;
    this.settings.calibration =
      state.calibration === "sampling" ? "sampling" : this.settings.calibration;
    this.el.strategy.value = state.strategy;
    this.el.preset.value = state.preset ?? "";
    this.el.threshold.value = String(state.c_min);
    this.el.thresholdLabel.textContent = state.c_min.toFixed(2);
    if (state.calibration !== "sampling") {
      this.el.calibrate.disabled = false;
    }
  }

  onCalibrationDone(sMax: number | undefined, ok: boolean | undefined): void {
    this.settings.calibration = "done";
    this.el.calibrate.disabled = false;
    this.el.status.textContent = ok
      ? `calibration done: s_max=${sMax?.toFixed(2)}`
      : "calibration failed (keep moving next time)";
  }
}
