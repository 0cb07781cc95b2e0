/** Keyboard-only steering: arrows map to the four actions. */

import { Action } from "./protocol.js";

const KEY_ACTIONS: Record<string, Action> = {
  ArrowUp: "forward",
  ArrowLeft: "turn_left",
  ArrowRight: "turn_right",
  ArrowDown: "stop",
};

export function actionForKey(key: string): Action | null {
  return KEY_ACTIONS[key] ?? null;
}

/**
 * Tracks held keys; the steered action is the most recently pressed key
 * still held, falling back to forward-while-ArrowUp semantics. With no
 * key held the previous selection persists (the server repeats the last
 * action on its own during the grace window anyway).
 */
export class KeyboardSteering {
  private held: string[] = [];
  private current: Action = "stop";

  keyDown(key: string): Action | null {
    const action = actionForKey(key);
    if (action === null) return null;
    this.held = this.held.filter((k) => k !== key);
    this.held.push(key);
    this.current = action;
    return action;
  }

  keyUp(key: string): Action | null {
    if (actionForKey(key) === null) return null;
    this.held = this.held.filter((k) => k !== key);
    const top = this.held[this.held.length - 1];
    if (top !== undefined) {
      this.current = actionForKey(top) as Action;
    }
    // nothing held: keep the last action (matches the server grace rule)
    return this.current;
  }

  action(): Action {
    return this.current;
  }

  attach(target: { addEventListener(type: string, cb: (e: any) => void): void }, onChange: (a: Action) => void): void {
    target.addEventListener("keydown", (e: KeyboardEvent) => {
      const a = this.keyDown(e.key);
      if (a !== null) {
        e.preventDefault?.();
        onChange(this.action());
      }
    });
    target.addEventListener("keyup", (e: KeyboardEvent) => {
      if (this.keyUp(e.key) !== null) onChange(this.action());
    });
  }
}
