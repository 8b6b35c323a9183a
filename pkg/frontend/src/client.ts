/** Thin client for the session service: HTTP control + WebSocket stream.
 * Transports are injectable so the same code runs in the browser and in
 * node-based tests.
 */

import type { DownstreamMsg } from "./messages.js";
import { parseDownstream } from "./messages.js";

export interface SessionInfo {
  session_id: string;
  trial_count: number;
}

export interface SessionState {
  session_id: string;
  phase: string;
  trial_index: number;
  trial_count: number;
  trial_active: boolean;
  complete: boolean;
  aborted: boolean;
}

export interface CreateSessionOptions {
  repetitions?: number;
  between_mode?: "static" | "dynamic" | "interleaved";
  phase?: "training" | "testing";
  randomization_seed?: number;
  trial_timeout_ms?: number;
}

export interface StreamSocket {
  send(text: string): void;
  close(): void;
  onMessage(handler: (text: string) => void): void;
  onClose(handler: () => void): void;
  opened: Promise<void>;
}

export type SocketFactory = (url: string) => StreamSocket;
export type FetchLike = typeof fetch;

/** Browser WebSocket adapter (default). */
export function browserSocketFactory(url: string): StreamSocket {
  const ws = new WebSocket(url);
  let messageHandler: (text: string) => void = () => {};
  let closeHandler: () => void = () => {};
  ws.onmessage = (ev) => messageHandler(String(ev.data));
  ws.onclose = () => closeHandler();
  const opened = new Promise<void>((resolve, reject) => {
    ws.onopen = () => resolve();
    ws.onerror = () => reject(new Error(`websocket failed: ${url}`));
  });
  return {
    send: (text) => ws.send(text),
    close: () => ws.close(),
    onMessage: (h) => (messageHandler = h),
    onClose: (h) => (closeHandler = h),
    opened,
  };
}

export class ServiceClient {
  private baseUrl: string;
  private wsUrl: string;
  private fetchFn: FetchLike;
  private socketFactory: SocketFactory;

  constructor(
    baseUrl: string,
    options: { fetchFn?: FetchLike; socketFactory?: SocketFactory } = {},
  ) {
    this.baseUrl = baseUrl.replace(/\/$/, "");
    this.wsUrl = this.baseUrl.replace(/^http/, "ws");
    this.fetchFn = options.fetchFn ?? fetch.bind(globalThis);
    this.socketFactory = options.socketFactory ?? browserSocketFactory;
  }

  private async request(method: string, path: string, body?: unknown) {
    const resp = await this.fetchFn(`${this.baseUrl}${path}`, {
      method,
      headers: body !== undefined ? { "content-type": "application/json" } : {},
      body: body !== undefined ? JSON.stringify(body) : undefined,
    });
    const text = await resp.text();
    if (!resp.ok) {
      throw new Error(`${method} ${path} -> ${resp.status}: ${text}`);
    }
    return text ? JSON.parse(text) : null;
  }

  createSession(options: CreateSessionOptions): Promise<SessionInfo> {
    return this.request("POST", "/sessions", options);
  }

  sessionState(id: string): Promise<SessionState> {
    return this.request("GET", `/sessions/${id}`);
  }

  startNextTrial(id: string): Promise<unknown> {
    return this.request("POST", `/sessions/${id}/trials/next`);
  }

  abortTrial(id: string): Promise<unknown> {
    return this.request("POST", `/sessions/${id}/trials/abort`);
  }

  abortSession(id: string): Promise<unknown> {
    return this.request("POST", `/sessions/${id}/abort`);
  }

  metrics(id: string): Promise<Record<string, unknown>> {
    return this.request("GET", `/sessions/${id}/metrics`);
  }

  async openStream(
    id: string,
    onMessage: (msg: DownstreamMsg) => void,
    onClose: () => void = () => {},
  ): Promise<SessionStream> {
    const socket = this.socketFactory(`${this.wsUrl}/sessions/${id}/stream`);
    socket.onMessage((text) => {
      const msg = parseDownstream(text);
      if (msg) onMessage(msg);
    });
    socket.onClose(onClose);
    await socket.opened;
    return new SessionStream(socket);
  }
}

export class SessionStream {
  constructor(private socket: StreamSocket) {}

  sendCursor(tMs: number, x: number, y: number): void {
    this.socket.send(JSON.stringify({ type: "cursor", t_ms: tMs, x, y }));
  }

  sendConfirm(): void {
    this.socket.send(JSON.stringify({ type: "confirm" }));
  }

  sendAbort(): void {
    this.socket.send(JSON.stringify({ type: "abort" }));
  }

  close(): void {
    this.socket.close();
  }
}
