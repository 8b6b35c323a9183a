/** Stream message shapes shared with the session service. */

export interface TrialStartMsg {
  type: "trial_start";
  trial_id: number;
  phase: "training" | "testing";
  mode: "static" | "dynamic";
  onset_ts: number;
  candidates: number[];
  reveal?: number; // training only
}

export interface FrameMsg {
  type: "frame";
  t_ms: number;
  amplitudes: number[];
}

export interface TrialEndMsg {
  type: "trial_end";
  trial_id: number;
  selected: number | null;
  correct: boolean;
  rt_ms: number | null;
}

export interface SessionCompleteMsg {
  type: "session_complete";
  session_id: string;
}

export type DownstreamMsg =
  | TrialStartMsg
  | FrameMsg
  | TrialEndMsg
  | SessionCompleteMsg;

export function parseDownstream(raw: string): DownstreamMsg | null {
  let obj: unknown;
  try {
    obj = JSON.parse(raw);
  } catch {
    return null;
  }
  if (typeof obj !== "object" || obj === null) return null;
  const type = (obj as { type?: unknown }).type;
  if (
    type === "trial_start" ||
    type === "frame" ||
    type === "trial_end" ||
    type === "session_complete"
  ) {
    return obj as DownstreamMsg;
  }
  return null;
}

/**
 * Audit a testing-phase message log for true-target leakage: no reveal
 * field anywhere and no amplitude frames (frames disclose the target).
 * Returns the list of violations (empty = clean).
 */
export function findTargetLeaks(log: DownstreamMsg[]): string[] {
  const leaks: string[] = [];
  log.forEach((msg, i) => {
    if (msg.type === "frame") {
      leaks.push(`message ${i}: amplitude frame streamed in testing phase`);
    }
    if ("reveal" in msg && (msg as TrialStartMsg).reveal !== undefined) {
      leaks.push(`message ${i}: reveal field present`);
    }
  });
  return leaks;
}
