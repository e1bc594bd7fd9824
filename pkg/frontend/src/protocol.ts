// Message types and newline-delimited JSON framing for the session service.
// The server speaks one JSON object per line over a bidirectional socket;
// the browser reaches it through the WebSocket bridge, which preserves the
// line-per-message framing.

export interface StartTaskMsg {
  type: "start_task";
  task: "slider" | "trace";
  technique: "constant" | "gogo" | "prism" | "forcepinch";
  c: number;
  seed: number;
  shape?: string;
}

export interface InputMsg {
  type: "input";
  t: number;
  pos: [number, number];
  force: number; // normalized [0, 1]
  pinch: boolean;
}

export interface EndTaskMsg {
  type: "end_task";
}

export type ClientMsg = StartTaskMsg | InputMsg | EndTaskMsg;

export interface Histogram {
  edges: number[];
  counts: number[];
}

export interface StateMsg {
  type: "state";
  pointer: [number, number];
  object: [number, number];
  speed: number;
  cursor_radius: number;
}

export interface SummaryMsg {
  type: "summary";
  error_distance: number;
  operation_time: number;
  num_operations: number;
  hand_travel: number;
  object_travel: number;
  overshoot_count: number;
  error_path_mean: number | null;
  speed_histogram: Histogram;
  position_histogram: Histogram;
}

export interface ErrorMsg {
  type: "error";
  msg: string;
}

export type ServerMsg = StateMsg | SummaryMsg | ErrorMsg;

export const encodeLine = (msg: ClientMsg): string => `${JSON.stringify(msg)}\n`;

export const parseServerMsg = (obj: unknown): ServerMsg | null => {
  if (typeof obj !== "object" || obj === null) return null;
  const type = (obj as { type?: unknown }).type;
  if (type === "state" || type === "summary" || type === "error") {
    return obj as ServerMsg;
  }
  return null;
};

// Incremental NDJSON decoder: feed chunks, get one callback per line.
export const createLineParser = (onObject: (obj: unknown) => void) => {
  let buffer = "";
  return {
    push(chunk: string) {
      buffer += chunk;
      for (;;) {
        const idx = buffer.indexOf("\n");
        if (idx === -1) break;
        const line = buffer.slice(0, idx).trim();
        buffer = buffer.slice(idx + 1);
        if (!line) continue;
        try {
          onObject(JSON.parse(line));
        } catch {
          // skip malformed lines; the server reports its own errors
        }
      }
    },
    flush() {
      const line = buffer.trim();
      buffer = "";
      if (!line) return;
      try {
        onObject(JSON.parse(line));
      } catch {
        // ignore trailing garbage
      }
    },
  };
};
