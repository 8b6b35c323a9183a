/** UI-side session state: folds stream messages into the display model.
 * One queue in, one immutable-ish state out; the render loop reads it.
 */

import type { DownstreamMsg, TrialStartMsg } from "./messages.js";

export type MarkerState = "idle" | "highlighted" | "selected";

export interface DisplayModel {
  axesRatio: number; // ellipse width:height
  candidates: number[]; // marker angles, degrees
  markerStates: Map<number, MarkerState>;
  cursor: { x: number; y: number }; // normalized, rim = 1
  tactorAngles: number[];
  tactorLevels: number[]; // last amplitude frame, 0..1 per tactor
  phase: "training" | "testing" | null;
  trialActive: boolean;
  trialId: number | null;
  lastResult: { selected: number | null; correct: boolean; rtMs: number | null } | null;
  sessionComplete: boolean;
}

export const DEFAULT_TACTOR_ANGLES = [30, 90, 150, 210, 270, 330];

export function initialDisplayModel(axesRatio = 1.3): DisplayModel {
  return {
    axesRatio,
    candidates: [],
    markerStates: new Map(),
    cursor: { x: 0, y: 0 },
    tactorAngles: DEFAULT_TACTOR_ANGLES,
    tactorLevels: new Array(6).fill(0),
    phase: null,
    trialActive: false,
    trialId: null,
    lastResult: null,
    sessionComplete: false,
  };
}

function resetMarkers(model: DisplayModel): void {
  model.markerStates = new Map(model.candidates.map((c) => [c, "idle"]));
}

function applyTrialStart(model: DisplayModel, msg: TrialStartMsg): void {
  model.candidates = msg.candidates;
  resetMarkers(model);
  model.phase = msg.phase;
  model.trialActive = true;
  model.trialId = msg.trial_id;
  model.lastResult = null;
  model.cursor = { x: 0, y: 0 };
  model.tactorLevels = new Array(model.tactorAngles.length).fill(0);
  // only training trials may highlight the true target
  if (msg.phase === "training" && msg.reveal !== undefined) {
    model.markerStates.set(msg.reveal, "highlighted");
  }
}

export function applyMessage(model: DisplayModel, msg: DownstreamMsg): void {
  switch (msg.type) {
    case "trial_start":
      applyTrialStart(model, msg);
      break;
    case "frame":
      if (model.phase === "training") {
        model.tactorLevels = msg.amplitudes.slice();
      }
      break;
    case "trial_end":
      model.trialActive = false;
      model.lastResult = {
        selected: msg.selected,
        correct: msg.correct,
        rtMs: msg.rt_ms,
      };
      resetMarkers(model);
      if (msg.selected !== null) {
        model.markerStates.set(msg.selected, "selected");
      }
      model.tactorLevels = model.tactorLevels.map(() => 0);
      break;
    case "session_complete":
      model.sessionComplete = true;
      break;
  }
}

/** Participant-view guard: nothing in the rendered state may disclose
 * the true target during a testing-phase trial. */
export function renderedStateLeaks(model: DisplayModel): boolean {
  if (model.phase !== "testing" || !model.trialActive) return false;
  for (const state of model.markerStates.values()) {
    if (state === "highlighted") return true;
  }
  return model.tactorLevels.some((level) => level > 0);
}
