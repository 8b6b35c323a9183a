/** Elliptical display projection.
 *
 * The belt is a circle in angle space; on screen the candidates sit on
 * an ellipse (default 1.3:1 width:height).  A marker at angle theta is
 * drawn at (a cos theta, b sin theta) in model coordinates (y up); the
 * canvas layer flips y when painting.  Picking inverts the projection
 * by normalizing each axis, so a screen pick maps back to the same
 * angle the engine's snap uses.
 */

import { snapToTarget, wrapAngle } from "./angles.js";

export interface EllipseSpec {
  semiX: number; // a, along screen x
  semiY: number; // b, along screen y
}

export const DEFAULT_AXES_RATIO = 1.3;

export function ellipseForCanvas(
  width: number,
  height: number,
  margin = 40,
  ratio = DEFAULT_AXES_RATIO,
): EllipseSpec {
  const maxX = width / 2 - margin;
  const maxY = height / 2 - margin;
  const semiX = Math.min(maxX, maxY * ratio);
  return { semiX, semiY: semiX / ratio };
}

/** Marker position in model coordinates for a belt angle. */
export function markerPosition(
  angleDeg: number,
  ellipse: EllipseSpec,
): { x: number; y: number } {
  const rad = (angleDeg * Math.PI) / 180;
  return { x: ellipse.semiX * Math.cos(rad), y: ellipse.semiY * Math.sin(rad) };
}

/** Belt angle of a model-coordinate point (inverse of markerPosition). */
export function pickAngle(x: number, y: number, ellipse: EllipseSpec): number {
  return wrapAngle(
    (Math.atan2(y / ellipse.semiY, x / ellipse.semiX) * 180) / Math.PI,
  );
}

/** Normalized cursor coordinates (rim = radius 1) for a model point. */
export function normalizeCursor(
  x: number,
  y: number,
  ellipse: EllipseSpec,
): { x: number; y: number } {
  return { x: x / ellipse.semiX, y: y / ellipse.semiY };
}

/** Snap a screen pick to the nearest candidate angle. */
export function pickNearestMarker(
  x: number,
  y: number,
  ellipse: EllipseSpec,
  candidates: number[],
): number {
  return snapToTarget(pickAngle(x, y, ellipse), candidates);
}
