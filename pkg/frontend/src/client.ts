// Browser-side session client. Connects to the bridge's WebSocket endpoint
// and exchanges the newline-delimited JSON protocol line by line; every
// speed/radius shown in the UI comes back from the server, never computed
// locally.

import {
  ClientMsg,
  createLineParser,
  encodeLine,
  parseServerMsg,
  ServerMsg,
} from "./protocol.js";

export interface SessionClientEvents {
  onMessage: (msg: ServerMsg) => void;
  onOpen?: () => void;
  onClose?: () => void;
}

export class SessionClient {
  private socket: WebSocket;
  private lastSentT = -Infinity;

  constructor(url: string, events: SessionClientEvents) {
    const parser = createLineParser((obj) => {
      const msg = parseServerMsg(obj);
      if (msg) events.onMessage(msg);
    });
    this.socket = new WebSocket(url);
    this.socket.onmessage = (ev) => parser.push(String(ev.data));
    this.socket.onopen = () => events.onOpen?.();
    this.socket.onclose = () => events.onClose?.();
    this.socket.onerror = () => events.onClose?.();
  }

  get ready(): boolean {
    return this.socket.readyState === WebSocket.OPEN;
  }

  send(msg: ClientMsg) {
    if (!this.ready) return;
    if (msg.type === "input") {
      // the engine rejects non-advancing timestamps; nudge duplicates forward
      if (msg.t <= this.lastSentT) msg = { ...msg, t: this.lastSentT + 1e-4 };
      this.lastSentT = msg.t;
    } else if (msg.type === "start_task") {
      this.lastSentT = -Infinity;
    }
    this.socket.send(encodeLine(msg));
  }

  close() {
    this.socket.close();
  }
}
