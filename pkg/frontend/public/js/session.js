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
import { decodeServerMessage, encodeAction, encodeHello, encodeRevealRequest, } from "./protocol.js";
export class Session {
    constructor() {
        this.connection = "idle";
        this.tick = -1;
        this.haptic = { left: 0, front: 0, right: 0 };
        this.status = "";
        this.errorReason = null;
        this.done = null;
        this.reveal = null;
        this.socket = null;
        this.desiredAction = "stop";
        this.lastAckedTick = -1;
        this.listeners = [];
    }
    onChange(listener) {
        this.listeners.push(listener);
    }
    notify() {
        for (const l of this.listeners)
            l();
    }
    /** State available while the run is live; this is all the UI may draw. */
    midRunView() {
        return {
            connection: this.connection,
            tick: this.tick,
            haptic: { ...this.haptic },
            status: this.status,
        };
    }
    start(socket, course, seed, pace = true) {
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
    setDesiredAction(action) {
        this.desiredAction = action;
    }
    requestReveal() {
        if (this.connection === "finished" && this.socket) {
            this.socket.send(encodeRevealRequest());
        }
    }
    handleDisconnect() {
        if (this.connection === "running" || this.connection === "connecting") {
            this.connection = "aborted";
            this.errorReason = this.errorReason ?? "connection dropped";
            this.notify();
        }
    }
    handleMessage(data) {
        const msg = decodeServerMessage(data);
        if (msg === null)
            return;
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
