/** Results view: per-direction accuracy and response-time bar charts. */

export interface DirectionRow {
  direction_deg: number;
  kind: string;
  mode: string;
  attempted: number;
  correct: number;
  mean_rt_ms: number | null;
}

export interface MetricsPayload {
  per_direction: DirectionRow[];
  overall: { attempted: number; correct: number; mean_rt_ms: number | null };
}

export function accuracyOf(row: DirectionRow): number {
  return row.attempted ? row.correct / row.attempted : 0;
}

function drawBars(
  ctx: CanvasRenderingContext2D,
  x0: number,
  y0: number,
  w: number,
  h: number,
  title: string,
  rows: DirectionRow[],
  value: (row: DirectionRow) => number | null,
  maxValue: number,
  format: (v: number) => string,
): void {
  ctx.fillStyle = "#c9d4e0";
  ctx.font = "13px system-ui, sans-serif";
  ctx.fillText(title, x0, y0 - 8);
  if (rows.length === 0) return;
  const barW = w / rows.length;
  rows.forEach((row, i) => {
    const v = value(row);
    const frac = v === null ? 0 : Math.min(v / maxValue, 1);
    const barH = frac * (h - 24);
    const x = x0 + i * barW;
    ctx.fillStyle = row.kind === "on_tactor" ? "#2ec4b6" : "#5b8def";
    ctx.fillRect(x + 1, y0 + (h - 24) - barH, barW - 2, barH);
    if (i % 4 === 0) {
      ctx.fillStyle = "#8a939e";
      ctx.font = "10px system-ui, sans-serif";
      ctx.fillText(`${row.direction_deg}°`, x, y0 + h - 10);
    }
    if (v !== null) {
      ctx.fillStyle = "#c9d4e0";
      ctx.font = "9px system-ui, sans-serif";
      ctx.save();
      ctx.translate(x + barW / 2, y0 + (h - 24) - barH - 3);
      ctx.rotate(-Math.PI / 4);
      ctx.fillText(format(v), 0, 0);
      ctx.restore();
    }
  });
}

export function renderResults(
  canvas: HTMLCanvasElement,
  metrics: MetricsPayload,
): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  ctx.fillStyle = "#101418";
  ctx.fillRect(0, 0, canvas.width, canvas.height);

  const rows = [...metrics.per_direction].sort(
    (a, b) => a.direction_deg - b.direction_deg,
  );
  const w = canvas.width - 60;
  const half = (canvas.height - 80) / 2;

  drawBars(ctx, 30, 30, w, half, "recognition accuracy per direction", rows,
    (r) => accuracyOf(r), 1, (v) => v.toFixed(2));

  const maxRt = Math.max(
    1,
    ...rows.map((r) => r.mean_rt_ms ?? 0),
  );
  drawBars(ctx, 30, 60 + half, w, half, "mean response time per direction (ms)",
    rows, (r) => r.mean_rt_ms, maxRt, (v) => v.toFixed(0));

  const overall = metrics.overall;
  ctx.fillStyle = "#c9d4e0";
  ctx.font = "13px system-ui, sans-serif";
  const acc = overall.attempted
    ? (overall.correct / overall.attempted).toFixed(3)
    : "n/a";
  const rt = overall.mean_rt_ms === null ? "n/a" : overall.mean_rt_ms.toFixed(0);
  ctx.fillText(
    `overall: accuracy ${acc} over ${overall.attempted} trials, mean RT ${rt} ms`,
    30,
    canvas.height - 12,
  );
}
