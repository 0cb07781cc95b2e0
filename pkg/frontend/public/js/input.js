/** Keyboard-only steering: arrows map to the four actions. */
const KEY_ACTIONS = {
    ArrowUp: "forward",
    ArrowLeft: "turn_left",
    ArrowRight: "turn_right",
    ArrowDown: "stop",
};
export function actionForKey(key) {
    return KEY_ACTIONS[key] ?? null;
}
/**
 * Tracks held keys; the steered action is the most recently pressed key
 * still held, falling back to forward-while-ArrowUp semantics. With no
 * key held the previous selection persists (the server repeats the last
 * action on its own during the grace window anyway).
 */
export class KeyboardSteering {
    constructor() {
        this.held = [];
        this.current = "stop";
    }
    keyDown(key) {
        const action = actionForKey(key);
        if (action === null)
            return null;
        this.held = this.held.filter((k) => k !== key);
        this.held.push(key);
        this.current = action;
        return action;
    }
    keyUp(key) {
        if (actionForKey(key) === null)
            return null;
        this.held = this.held.filter((k) => k !== key);
        const top = this.held[this.held.length - 1];
        if (top !== undefined) {
            this.current = actionForKey(top);
        }
        // nothing held: keep the last action (matches the server grace rule)
        return this.current;
    }
    action() {
        return this.current;
    }
    attach(target, onChange) {
        target.addEventListener("keydown", (e) => {
            const a = this.keyDown(e.key);
            if (a !== null) {
                e.preventDefault?.();
                onChange(this.action());
            }
        });
        target.addEventListener("keyup", (e) => {
            if (this.keyUp(e.key) !== null)
                onChange(this.action());
        });
    }
}
