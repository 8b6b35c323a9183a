/** Circular angle helpers, matching the engine's conventions exactly:
 * degrees in [0, 360), 0 at front center, counterclockwise positive. */

export function wrapAngle(deg: number): number {
  const a = deg % 360;
  return a < 0 ? a + 360 : a;
}

/** Shortest signed offset x - d in (-180, 180]. */
export function signedOffset(xDeg: number, dDeg: number): number {
  let delta = (xDeg - dDeg) % 360;
  if (delta <= -180) delta += 360;
  else if (delta > 180) delta -= 360;
  return delta;
}

/** Nearest candidate angle by circular distance; ties go to the lower angle. */
export function snapToTarget(angleDeg: number, candidates: number[]): number {
  if (candidates.length === 0) throw new Error("no candidate targets");
  let best = candidates[0];
  let bestDist = Math.abs(signedOffset(angleDeg, best));
  for (const c of candidates.slice(1)) {
    const dist = Math.abs(signedOffset(angleDeg, c));
    if (dist < bestDist || (dist === bestDist && c < best)) {
      best = c;
      bestDist = dist;
    }
  }
  return best;
}
