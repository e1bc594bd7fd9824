// Static file host + WebSocket <-> TCP bridge.
//
// Browsers cannot open raw TCP sockets, so this process pipes each
// WebSocket connection to its own TCP connection against the engine's
// session service, preserving the one-JSON-object-per-line framing in both
// directions. Run the engine first:  trackspeed serve --port 7641

import * as fs from "node:fs";
import * as http from "node:http";
import * as net from "node:net";
import * as path from "node:path";
import { fileURLToPath } from "node:url";
import { WebSocketServer, WebSocket } from "ws";

const args = process.argv.slice(2);
const flag = (name: string, fallback: string): string => {
  const idx = args.indexOf(`--${name}`);
  return idx >= 0 && args[idx + 1] !== undefined ? args[idx + 1] : fallback;
};

const httpPort = Number(flag("http-port", "8080"));
const engineHost = flag("engine-host", "127.0.0.1");
const enginePort = Number(flag("engine-port", "7641"));

// compiled to dist/node/bridge/bridge.js; the site root is frontend/
const root = path.resolve(path.dirname(fileURLToPath(import.meta.url)), "..", "..", "..");

const MIME: Record<string, string> = {
  ".html": "text/html",
  ".js": "text/javascript",
  ".map": "application/json",
  ".css": "text/css",
};

const server = http.createServer((req, res) => {
  const urlPath = (req.url ?? "/").split("?")[0];
  const rel = urlPath === "/" ? "index.html" : urlPath.replace(/^\/+/, "");
  const file = path.join(root, rel);
  if (!file.startsWith(root) || !fs.existsSync(file) || fs.statSync(file).isDirectory()) {
    res.writeHead(404);
    res.end("not found");
    return;
  }
  res.writeHead(200, { "content-type": MIME[path.extname(file)] ?? "application/octet-stream" });
  fs.createReadStream(file).pipe(res);
});

const wss = new WebSocketServer({ server, path: "/ws" });

wss.on("connection", (ws: WebSocket) => {
  const tcp = net.createConnection({ host: engineHost, port: enginePort });
  let buffer = "";

  tcp.on("data", (chunk) => {
    buffer += chunk.toString("utf-8");
    for (;;) {
      const idx = buffer.indexOf("\n");
      if (idx === -1) break;
      const line = buffer.slice(0, idx);
      buffer = buffer.slice(idx + 1);
      if (line.trim() && ws.readyState === WebSocket.OPEN) ws.send(line + "\n");
    }
  });
  tcp.on("close", () => ws.close());
  tcp.on("error", () => ws.close());

  ws.on("message", (data) => {
    const text = data.toString();
    tcp.write(text.endsWith("\n") ? text : text + "\n");
  });
  ws.on("close", () => tcp.destroy());
  ws.on("error", () => tcp.destroy());
});

server.listen(httpPort, () => {
  console.log(`demo ui on http://localhost:${httpPort} (engine ${engineHost}:${enginePort})`);
});
