/**
 * WebSocket message protocol for interactive sessions.
 *
 * Decoding whitelists every field: anything the server sends beyond the
 * documented payload is dropped on the floor, so mid-run client state
 * cannot accumulate world information even from a misbehaving server.
 */
export const PROTOCOL_VERSION = 1;
export const ACTIONS = ["forward", "turn_left", "turn_right", "stop"];
function clamp01(v) {
    const n = typeof v === "number" && isFinite(v) ? v : 0;
    return Math.min(Math.max(n, 0), 1);
}
function decodeMetrics(raw) {
    return {
        ticks: Number(raw?.ticks ?? 0),
        seconds: Number(raw?.seconds ?? 0),
        collisions: Number(raw?.collisions ?? 0),
        completed: Boolean(raw?.completed),
    };
}
/** Decode one server message; unknown types and extra fields are dropped. */
export function decodeServerMessage(data) {
    let raw;
    try {
        raw = JSON.parse(data);
    }
    catch {
        return null;
    }
    const payload = raw?.payload ?? {};
    switch (raw?.type) {
        case "welcome":
            return {
                kind: "welcome",
                course: Number(payload.course ?? 0),
                seed: Number(payload.seed ?? 0),
                tickDt: Number(payload.tick_dt ?? 0.1),
                pace: Boolean(payload.pace),
            };
        case "tick":
            return {
                kind: "tick",
                tick: Number(raw.tick ?? 0),
                haptic: {
                    left: clamp01(payload.haptic?.left),
                    front: clamp01(payload.haptic?.front),
                    right: clamp01(payload.haptic?.right),
                },
                status: String(payload.status ?? "running"),
            };
        case "done":
            return { kind: "done", tick: Number(raw.tick ?? 0), metrics: decodeMetrics(payload.metrics) };
        case "reveal": {
            const course = payload.course ?? {};
            return {
                kind: "reveal",
                courseLength: Number(course.length ?? 0),
                courseWidth: Number(course.width ?? 0),
                obstacles: (course.obstacles ?? []).map((o) => ({
                    x: Number(o.x),
                    y: Number(o.y),
                    radius: Number(o.radius),
                    classId: Number(o.class_id),
                    color: [Number(o.color?.[0] ?? 0.5), Number(o.color?.[1] ?? 0.5), Number(o.color?.[2] ?? 0.5)],
                })),
                path: (payload.path ?? []).map((p) => [Number(p[0]), Number(p[1])]),
                collisions: (payload.collisions ?? []).map((c) => ({
                    tick: Number(c.tick),
                    x: Number(c.x),
                    y: Number(c.y),
                })),
                metrics: decodeMetrics(payload.metrics),
            };
        }
        case "error":
            return { kind: "error", reason: String(payload.reason ?? "unknown") };
        default:
            return null;
    }
}
export function encodeHello(course, seed, pace) {
    return JSON.stringify({
        type: "hello",
        protocol: PROTOCOL_VERSION,
        payload: { course, seed, pace },
    });
}
export function encodeAction(tick, action) {
    return JSON.stringify({ type: "action", tick, payload: { action } });
}
export function encodeRevealRequest() {
    return JSON.stringify({ type: "reveal" });
}
