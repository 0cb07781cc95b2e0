import { describe, expect, it } from "vitest";

import { actionForKey, KeyboardSteering } from "../src/input.js";
import { barHeightPercent } from "../src/bars.js";
import { fitTransform, toCanvas } from "../src/reveal.js";

describe("actionForKey", () => {
  it("maps the four arrows and nothing else", () => {
    expect(actionForKey("ArrowUp")).toBe("forward");
    expect(actionForKey("ArrowLeft")).toBe("turn_left");
    expect(actionForKey("ArrowRight")).toBe("turn_right");
    expect(actionForKey("ArrowDown")).toBe("stop");
    expect(actionForKey("w")).toBeNull();
    expect(actionForKey(" ")).toBeNull();
  });
});

describe("KeyboardSteering", () => {
  it("latest pressed key wins, release falls back to the still-held key", () => {
    const steering = new KeyboardSteering();
    steering.keyDown("ArrowUp");
    expect(steering.action()).toBe("forward");
    steering.keyDown("ArrowLeft");
    expect(steering.action()).toBe("turn_left");
    steering.keyUp("ArrowLeft");
    expect(steering.action()).toBe("forward");
  });

  it("keeps the last action when nothing is held (server grace mirrors this)", () => {
    const steering = new KeyboardSteering();
    steering.keyDown("ArrowRight");
    steering.keyUp("ArrowRight");
    expect(steering.action()).toBe("turn_right");
  });

  it("ignores unrelated keys", () => {
    const steering = new KeyboardSteering();
    expect(steering.keyDown("x")).toBeNull();
    expect(steering.action()).toBe("stop");
  });
});

describe("display helpers", () => {
  it("bar heights clamp to 0..100", () => {
    expect(barHeightPercent(0)).toBe(0);
    expect(barHeightPercent(0.5)).toBe(50);
    expect(barHeightPercent(2)).toBe(100);
    expect(barHeightPercent(-1)).toBe(0);
  });

  it("canvas transform fits the course and flips y", () => {
    const t = fitTransform(50, 4, 1012, 160, 6);
    expect(t.scale).toBeCloseTo(20, 5);
    const [x0, yTop] = toCanvas(t, 0, 4, 4);
    const [x1, yBottom] = toCanvas(t, 50, 0, 4);
    expect(x0).toBe(6);
    expect(yTop).toBe(6);
    expect(x1).toBe(6 + 50 * t.scale);
    expect(yBottom).toBe(6 + 4 * t.scale);
  });
});
