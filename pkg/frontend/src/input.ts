/** Cursor input: gamepad position control with mouse fallback.
 *
 * Stick deflection maps directly to cursor position (position control,
 * not rate control) with a radial deadzone of 0.1, rescaled so the
 * usable range still reaches the rim.  Samples are emitted at 100 Hz,
 * timestamped against trial onset.
 */

export interface CursorState {
  x: number;
  y: number;
  confirm: boolean;
}

export interface CursorSampleMsg {
  type: "cursor";
  t_ms: number;
  x: number;
  y: number;
}

export const DEADZONE = 0.1;
export const SAMPLE_RATE_HZ = 100;

/** Apply the radial deadzone to raw stick deflection. */
export function applyDeadzone(gx: number, gy: number, deadzone = DEADZONE): {
  x: number;
  y: number;
} {
  const mag = Math.hypot(gx, gy);
  if (mag <= deadzone) return { x: 0, y: 0 };
  const scale = Math.min((mag - deadzone) / (1 - deadzone), 1) / mag;
  return { x: gx * scale, y: gy * scale };
}

/** Read the first connected gamepad: left stick, A/trigger to confirm.
 * Gamepad y is down-positive; model y is up-positive. */
export function readGamepad(): CursorState | null {
  const pads = typeof navigator !== "undefined" ? navigator.getGamepads?.() : [];
  const pad = pads ? Array.from(pads).find((p) => p != null) : undefined;
  if (!pad) return null;
  const { x, y } = applyDeadzone(pad.axes[0] ?? 0, -(pad.axes[1] ?? 0));
  const confirm = Boolean(pad.buttons[0]?.pressed || pad.buttons[7]?.pressed);
  return { x, y, confirm };
}

export interface SamplerTimers {
  setInterval(fn: () => void, ms: number): unknown;
  clearInterval(handle: unknown): void;
  now(): number;
}

const realTimers: SamplerTimers = {
  setInterval: (fn, ms) => setInterval(fn, ms),
  clearInterval: (h) => clearInterval(h as Parameters<typeof clearInterval>[0]),
  now: () => performance.now(),
};

export interface CursorSampler {
  start(onsetNowMs: number): void;
  stop(): void;
  sampleCount(): number;
}

/**
 * Fixed-rate sampler: polls `source` and hands each timestamped sample
 * to `emit`.  Confirm edges are forwarded once per press via `onConfirm`.
 */
export function createCursorSampler(
  source: () => CursorState | null,
  emit: (sample: CursorSampleMsg) => void,
  onConfirm: () => void,
  timers: SamplerTimers = realTimers,
  rateHz: number = SAMPLE_RATE_HZ,
): CursorSampler {
  let handle: unknown = null;
  let onset = 0;
  let count = 0;
  let confirmDown = false;

  const tick = () => {
    const state = source();
    if (!state) return;
    count += 1;
    emit({
      type: "cursor",
      t_ms: timers.now() - onset,
      x: state.x,
      y: state.y,
    });
    if (state.confirm && !confirmDown) onConfirm();
    confirmDown = state.confirm;
  };

  return {
    start(onsetNowMs: number) {
      this.stop();
      onset = onsetNowMs;
      count = 0;
      handle = timers.setInterval(tick, 1000 / rateHz);
    },
    stop() {
      if (handle != null) {
        timers.clearInterval(handle);
        handle = null;
      }
    },
    sampleCount() {
      return count;
    },
  };
}
