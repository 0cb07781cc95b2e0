/**
 * Session state machine.
 *
 * Owns everything the UI may display. During an active run the state
 * holds exactly {connection, tick, haptic, status}: no obstacle
 * positions, no frames, no course geometry (blindfold integrity).
 * Reveal data exists only after the server reports completion and the
 * reveal is requested.
 *
 * Action cadence: exactly one action message per received tick, sent as
 * the acknowledgment of that tick; key presses between ticks only change
 * what the next acknowledgment will carry.
 */

import {
  Action,
  DoneMsg,
  Haptic,
  RevealMsg,
  ServerMsg,
  decodeServerMessage,
  encodeAction,
  encodeHello,
  encodeRevealRequest,
} from "./protocol.js";

export type ConnectionState =
  | "idle"
  | "connecting"
  | "running"
  | "finished"
  | "revealed"
  | "aborted";

export interface MidRunView {
  connection: ConnectionState;
  tick: number;
  haptic: Haptic;
  status: string;
}

export interface SocketLike {
  send(data: string): void;
  close(): void;
}

export class Session {
  connection: ConnectionState = "idle";
  tick = -1;
  haptic: Haptic = { left: 0, front: 0, right: 0 };
  status = "";
  errorReason: string | null = null;
  done: DoneMsg | null = null;
  reveal: RevealMsg | null = null;

  private socket: SocketLike | null = null;
  private desiredAction: Action = "stop";
  private lastAckedTick = -1;
  private listeners: (() => void)[] = [];

  onChange(listener: () => void): void {
    this.listeners.push(listener);
  }

  private notify(): void {
    for (const l of this.listeners) l();
  }

  /** State available while the run is live; this is all the UI may draw. */
  midRunView(): MidRunView {
    return {
      connection: this.connection,
      tick: this.tick,
      haptic: { ...this.haptic },
      status: this.status,
    };
  }

  start(socket: SocketLike, course: number, seed: number, pace = true): void {
    this.socket = socket;
    this.connection = "connecting";
    this.errorReason = null;
    this.done = null;
    this.reveal = null;
    this.lastAckedTick = -1;
    this.desiredAction = "stop";
    socket.send(encodeHello(course, seed, pace));
    this.notify();
  }

  setDesiredAction(action: Action): void {
    this.desiredAction = action;
  }

  requestReveal(): void {
    if (this.connection === "finished" && this.socket) {
      this.socket.send(encodeRevealRequest());
    }
  }

  handleDisconnect(): void {
    if (this.connection === "running" || this.connection === "connecting") {
      this.connection = "aborted";
      this.errorReason = this.errorReason ?? "connection dropped";
      this.notify();
    }
  }

  handleMessage(data: string): void {
    const msg: ServerMsg | null = decodeServerMessage(data);
    if (msg === null) return;
    switch (msg.kind) {
      case "welcome":
        this.connection = "running";
        break;
      case "tick":
        this.tick = msg.tick;
        this.haptic = msg.haptic;
        this.status = msg.status;
        if (this.socket && msg.tick > this.lastAckedTick) {
          this.lastAckedTick = msg.tick;
          this.socket.send(encodeAction(msg.tick, this.desiredAction));
        }
        break;
      case "done":
        this.connection = "finished";
        this.done = msg;
        this.haptic = { left: 0, front: 0, right: 0 };
        break;
      case "reveal":
        if (this.connection === "finished") {
          this.connection = "revealed";
          this.reveal = msg;
        }
        break;
      case "error":
        this.errorReason = msg.reason;
        if (this.connection !== "finished" && this.connection !== "revealed") {
          this.connection = "aborted";
        }
        break;
    }
    this.notify();
  }
}
