/** GUI bootstrap: operator panel, participant view, results view.
 *
 * One render loop paints the participant canvas from the display
 * model; one message queue applies stream messages; the cursor sampler
 * pushes 100 Hz samples upstream while a trial is active.
 */

import { ServiceClient, SessionStream } from "./client.js";
import { ellipseForCanvas, normalizeCursor } from "./ellipse.js";
import { createCursorSampler, readGamepad, type CursorState } from "./input.js";
import type { DownstreamMsg } from "./messages.js";
import { renderResults, type MetricsPayload } from "./charts.js";
import { renderScene } from "./scene.js";
import { applyMessage, initialDisplayModel, type DisplayModel } from "./session.js";

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
};

interface AppState {
  client: ServiceClient;
  sessionId: string | null;
  stream: SessionStream | null;
  model: DisplayModel;
  queue: DownstreamMsg[];
  mouse: CursorState;
  useMouse: boolean;
  onsetPerfMs: number;
}

function setupOperatorPanel(app: AppState): void {
  const status = $("status");
  const say = (text: string) => (status.textContent = text);

  $("create").addEventListener("click", async () => {
    try {
      const info = await app.client.createSession({
        repetitions: Number(($("reps") as HTMLInputElement).value) || 5,
        between_mode: ($("mode") as HTMLSelectElement).value as
          | "static"
          | "dynamic"
          | "interleaved",
        phase: ($("phase") as HTMLSelectElement).value as "training" | "testing",
        randomization_seed: Number(($("seed") as HTMLInputElement).value) || 0,
      });
      app.sessionId = info.session_id;
      app.model = initialDisplayModel();
      app.stream = await app.client.openStream(
        info.session_id,
        (msg) => app.queue.push(msg),
        () => say("stream closed"),
      );
      say(`session ${info.session_id}: ${info.trial_count} trials planned`);
    } catch (err) {
      say(String(err));
    }
  });

  $("start").addEventListener("click", async () => {
    if (!app.sessionId) return say("create a session first");
    try {
      await app.client.startNextTrial(app.sessionId);
      app.onsetPerfMs = performance.now();
    } catch (err) {
      say(String(err));
    }
  });

  $("abort").addEventListener("click", async () => {
    if (!app.sessionId) return say("no session");
    try {
      await app.client.abortTrial(app.sessionId);
    } catch (err) {
      say(String(err));
    }
  });

  $("results").addEventListener("click", async () => {
    if (!app.sessionId) return say("no session");
    const metrics = (await app.client.metrics(
      app.sessionId,
    )) as unknown as MetricsPayload;
    renderResults($("resultsCanvas") as HTMLCanvasElement, metrics);
  });
}

function setupMouseFallback(app: AppState, canvas: HTMLCanvasElement): void {
  canvas.addEventListener("mousemove", (ev) => {
    const rect = canvas.getBoundingClientRect();
    const px = ev.clientX - rect.left - canvas.width / 2;
    const py = -(ev.clientY - rect.top - canvas.height / 2); // model y up
    const ellipse = ellipseForCanvas(canvas.width, canvas.height, 48);
    const { x, y } = normalizeCursor(px, py, ellipse);
    const mag = Math.hypot(x, y);
    const clamp = mag > 1 ? 1 / mag : 1;
    app.mouse = { x: x * clamp, y: y * clamp, confirm: false };
    app.useMouse = true;
  });
  canvas.addEventListener("mousedown", () => {
    app.mouse = { ...app.mouse, confirm: true };
  });
  canvas.addEventListener("mouseup", () => {
    app.mouse = { ...app.mouse, confirm: false };
  });
}

function main(): void {
  const baseUrl =
    new URLSearchParams(location.search).get("service") ??
    "http://127.0.0.1:8765";
  const app: AppState = {
    client: new ServiceClient(baseUrl),
    sessionId: null,
    stream: null,
    model: initialDisplayModel(),
    queue: [],
    mouse: { x: 0, y: 0, confirm: false },
    useMouse: false,
    onsetPerfMs: 0,
  };

  const canvas = $("scene") as HTMLCanvasElement;
  setupOperatorPanel(app);
  setupMouseFallback(app, canvas);

  const source = (): CursorState | null => {
    const pad = readGamepad();
    if (pad) {
      app.useMouse = false;
      return pad;
    }
    return app.useMouse ? app.mouse : { x: 0, y: 0, confirm: false };
  };

  const sampler = createCursorSampler(
    source,
    (sample) => {
      app.model.cursor = { x: sample.x, y: sample.y };
      if (app.stream && app.model.trialActive) {
        app.stream.sendCursor(sample.t_ms, sample.x, sample.y);
      }
    },
    () => {
      if (app.stream && app.model.trialActive) app.stream.sendConfirm();
    },
  );

  const pump = () => {
    let msg = app.queue.shift();
    while (msg) {
      if (msg.type === "trial_start") {
        app.onsetPerfMs = performance.now();
        sampler.start(app.onsetPerfMs);
      }
      if (msg.type === "trial_end") sampler.stop();
      applyMessage(app.model, msg);
      msg = app.queue.shift();
    }
  };

  const loop = () => {
    pump();
    renderScene(canvas, app.model, app.model.phase === "training");
    requestAnimationFrame(loop);
  };
  requestAnimationFrame(loop);
}

main();
