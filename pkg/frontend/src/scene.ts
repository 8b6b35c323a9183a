/** Canvas renderer: ellipse, candidate markers, cursor, tactor glyphs.
 * Model coordinates are y-up; the canvas transform flips y.
 */

import { ellipseForCanvas, markerPosition } from "./ellipse.js";
import type { DisplayModel } from "./session.js";

const COLORS = {
  background: "#101418",
  ellipse: "#3a4350",
  idle: "#8a939e",
  highlighted: "#ff9f1c",
  selected: "#2ec4b6",
  cursor: "#e0fbfc",
  cursorTrail: "#5bc0be",
  glyphOff: "#2b3440",
  glyphOn: "#ff5d8f",
  text: "#c9d4e0",
};

export function renderScene(
  canvas: HTMLCanvasElement,
  model: DisplayModel,
  showGlyphs: boolean,
): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  const { width, height } = canvas;
  ctx.save();
  ctx.fillStyle = COLORS.background;
  ctx.fillRect(0, 0, width, height);
  ctx.translate(width / 2, height / 2);
  ctx.scale(1, -1); // model y is up

  const ellipse = ellipseForCanvas(width, height, 48, model.axesRatio);

  ctx.strokeStyle = COLORS.ellipse;
  ctx.lineWidth = 1.5;
  ctx.beginPath();
  ctx.ellipse(0, 0, ellipse.semiX, ellipse.semiY, 0, 0, 2 * Math.PI);
  ctx.stroke();

  for (const angle of model.candidates) {
    const { x, y } = markerPosition(angle, ellipse);
    const state = model.markerStates.get(angle) ?? "idle";
    ctx.fillStyle =
      state === "highlighted"
        ? COLORS.highlighted
        : state === "selected"
          ? COLORS.selected
          : COLORS.idle;
    ctx.beginPath();
    ctx.arc(x, y, state === "idle" ? 6 : 9, 0, 2 * Math.PI);
    ctx.fill();
  }

  if (showGlyphs) {
    model.tactorAngles.forEach((angle, i) => {
      const { x, y } = markerPosition(angle, {
        semiX: ellipse.semiX + 26,
        semiY: ellipse.semiY + 26,
      });
      const level = model.tactorLevels[i] ?? 0;
      ctx.fillStyle = level > 0 ? COLORS.glyphOn : COLORS.glyphOff;
      ctx.globalAlpha = level > 0 ? 0.35 + 0.65 * level : 1;
      ctx.beginPath();
      ctx.arc(x, y, 10 + 6 * level, 0, 2 * Math.PI);
      ctx.fill();
      ctx.globalAlpha = 1;
    });
  }

  const cx = model.cursor.x * ellipse.semiX;
  const cy = model.cursor.y * ellipse.semiY;
  ctx.strokeStyle = COLORS.cursorTrail;
  ctx.lineWidth = 1;
  ctx.beginPath();
  ctx.moveTo(0, 0);
  ctx.lineTo(cx, cy);
  ctx.stroke();
  ctx.fillStyle = COLORS.cursor;
  ctx.beginPath();
  ctx.arc(cx, cy, 5, 0, 2 * Math.PI);
  ctx.fill();

  ctx.restore();

  ctx.fillStyle = COLORS.text;
  ctx.font = "13px system-ui, sans-serif";
  const status = model.trialActive
    ? `trial ${model.trialId} — move the cursor to the perceived direction`
    : model.sessionComplete
      ? "session complete"
      : model.lastResult
        ? `trial done: ${model.lastResult.correct ? "correct" : "missed"}`
        : "waiting for trial";
  ctx.fillText(status, 12, 20);
}
