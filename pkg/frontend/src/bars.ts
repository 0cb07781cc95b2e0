/**
 * Haptic display: three vertical intensity bars (left / front / right)
 * plus an optional per-channel audio clicker whose click rate grows
 * with intensity, so the display also works ears-only.
 */

import { Haptic } from "./protocol.js";

export const CHANNELS = ["left", "front", "right"] as const;

export function barHeightPercent(intensity: number): number {
  return Math.round(Math.min(Math.max(intensity, 0), 1) * 100);
}

export class HapticBars {
  private fills: Record<string, HTMLElement> = {};
  private labels: Record<string, HTMLElement> = {};

  constructor(root: HTMLElement) {
    for (const channel of CHANNELS) {
      const column = document.createElement("div");
      column.className = "bar-column";
      const bar = document.createElement("div");
      bar.className = "bar-track";
      const fill = document.createElement("div");
      fill.className = `bar-fill bar-${channel}`;
      bar.appendChild(fill);
      const label = document.createElement("div");
      label.className = "bar-label";
      label.textContent = channel;
      const value = document.createElement("div");
      value.className = "bar-value";
      value.textContent = "0.00";
      column.append(bar, label, value);
      root.appendChild(column);
      this.fills[channel] = fill;
      this.labels[channel] = value;
    }
  }

  update(haptic: Haptic): void {
    for (const channel of CHANNELS) {
      const v = haptic[channel];
      this.fills[channel].style.height = `${barHeightPercent(v)}%`;
      this.labels[channel].textContent = v.toFixed(2);
    }
  }
}

/** Click-rate sonification: intensity 1.0 clicks at maxRate Hz. */
export class AudioClicker {
  enabled = false;
  private ctx: AudioContext | null = null;
  private accumulators = { left: 0, front: 0, right: 0 };
  private pans = { left: -1, front: 0, right: 1 };
  private maxRate = 14;

  toggle(): boolean {
    this.enabled = !this.enabled;
    if (this.enabled && this.ctx === null && typeof AudioContext !== "undefined") {
      this.ctx = new AudioContext();
    }
    return this.enabled;
  }

  /** Advance by dt seconds with the current intensities. */
  step(haptic: Haptic, dt: number): void {
    if (!this.enabled || this.ctx === null) return;
    for (const channel of CHANNELS) {
      const rate = haptic[channel] * this.maxRate;
      this.accumulators[channel] += rate * dt;
      while (this.accumulators[channel] >= 1) {
        this.accumulators[channel] -= 1;
        this.click(this.pans[channel], 300 + 300 * haptic[channel]);
      }
    }
  }

  private click(pan: number, freq: number): void {
    const ctx = this.ctx!;
    const osc = ctx.createOscillator();
    const gain = ctx.createGain();
    const panner = ctx.createStereoPanner();
    osc.frequency.value = freq;
    gain.gain.setValueAtTime(0.15, ctx.currentTime);
    gain.gain.exponentialRampToValueAtTime(0.001, ctx.currentTime + 0.05);
    panner.pan.value = pan;
    osc.connect(gain).connect(panner).connect(ctx.destination);
    osc.start();
    osc.stop(ctx.currentTime + 0.06);
  }
}
