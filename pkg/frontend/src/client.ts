/**
 * Gateway client: hello/plan handshake, trial streaming, and ack /
 * protocol_error tracking over any Transport.
 */

import {
  FORMAT_VERSION,
  type AckMessage,
  type ClientMessage,
  type PlanMessage,
  type ProtocolErrorMessage,
  type ServerMessage,
} from "./protocol.js";
import type { Transport } from "./transport.js";

export class GatewayClient {
  readonly protocolErrors: ProtocolErrorMessage[] = [];
  readonly acks: AckMessage[] = [];

  private planResolve: ((plan: PlanMessage) => void) | null = null;
  private ackWaiters = new Map<string, (ack: AckMessage) => void>();
  private closed = false;

  constructor(private readonly transport: Transport) {
    transport.onLine((line) => this.receive(JSON.parse(line) as ServerMessage));
    transport.onClose(() => {
      this.closed = true;
    });
  }

  private receive(message: ServerMessage): void {
    switch (message.type) {
      case "plan":
        this.planResolve?.(message);
        this.planResolve = null;
        break;
      case "ack": {
        this.acks.push(message);
        const waiter = this.ackWaiters.get(message.trial);
        if (waiter) {
          this.ackWaiters.delete(message.trial);
          waiter(message);
        }
        break;
      }
      case "protocol_error":
        this.protocolErrors.push(message);
        break;
    }
  }

  hello(sessionId?: string): Promise<PlanMessage> {
    const plan = new Promise<PlanMessage>((resolve) => {
      this.planResolve = resolve;
    });
    this.send({ v: FORMAT_VERSION, type: "hello", ...(sessionId ? { session: sessionId } : {}) });
    return plan;
  }

  send(message: ClientMessage): void {
    if (this.closed) throw new Error("transport is closed");
    this.transport.send(JSON.stringify(message));
  }

  ackFor(trialId: string, timeoutMs = 5000): Promise<AckMessage> {
    const existing = this.acks.find((a) => a.trial === trialId);
    if (existing) return Promise.resolve(existing);
    return new Promise((resolve, reject) => {
      const timer = setTimeout(() => {
        this.ackWaiters.delete(trialId);
        reject(new Error(`no ack for ${trialId} within ${timeoutMs} ms`));
      }, timeoutMs);
      this.ackWaiters.set(trialId, (ack) => {
        clearTimeout(timer);
        resolve(ack);
      });
    });
  }

  close(): void {
    this.transport.close();
  }
}
