/**
 * Message-channel transports. The gateway speaks newline-delimited JSON
 * over a raw TCP port; in Node (tests, headless runs) we connect directly.
 * Browsers cannot open TCP sockets, so a deployment puts a
 * websocket-to-TCP bridge in front of the gateway and uses the WebSocket
 * transport, which carries the very same line frames.
 */

export interface Transport {
  send(line: string): void;
  onLine(handler: (line: string) => void): void;
  onClose(handler: () => void): void;
  close(): void;
}

export class WebSocketTransport implements Transport {
  private lineHandler: (line: string) => void = () => {};

  constructor(private readonly socket: WebSocket) {
    socket.onmessage = (event) => {
      for (const line of String(event.data).split("\n")) {
        if (line.trim().length > 0) this.lineHandler(line);
      }
    };
  }

  send(line: string): void {
    this.socket.send(line);
  }

  onLine(handler: (line: string) => void): void {
    this.lineHandler = handler;
  }

  onClose(handler: () => void): void {
    this.socket.onclose = () => handler();
  }

  close(): void {
    this.socket.close();
  }
}

/** Direct TCP transport (Node only: tests and headless conformance runs). */
export async function connectTcp(host: string, port: number): Promise<Transport> {
  const net = await import("node:net");
  const socket = net.createConnection({ host, port });
  await new Promise<void>((resolve, reject) => {
    socket.once("connect", () => resolve());
    socket.once("error", reject);
  });
  socket.setNoDelay(true);

  let buffer = "";
  let lineHandler: (line: string) => void = () => {};
  let closeHandler: () => void = () => {};
  socket.on("data", (chunk) => {
    buffer += chunk.toString("utf-8");
    let idx: number;
    while ((idx = buffer.indexOf("\n")) >= 0) {
      const line = buffer.slice(0, idx).trim();
      buffer = buffer.slice(idx + 1);
      if (line.length > 0) lineHandler(line);
    }
  });
  socket.on("close", () => closeHandler());

  return {
    send(line: string): void {
      socket.write(line.endsWith("\n") ? line : line + "\n");
    },
    onLine(handler: (line: string) => void): void {
      lineHandler = handler;
    },
    onClose(handler: () => void): void {
      closeHandler = handler;
    },
    close(): void {
      socket.end();
      socket.destroy();
    },
  };
}
