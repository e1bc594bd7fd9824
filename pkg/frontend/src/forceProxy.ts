// Desktop stand-in for a pressure sensor: a [0, 1] accumulator driven by
// holding a key (pressure ramps up) and by scroll-wheel nudges. Idle force
// decays toward zero so letting go always relaxes the pinch.

export interface ForceProxyOptions {
  riseRate?: number; // units per second while the key is held
  decayRate?: number; // units per second toward 0 while idle
  wheelStep?: number; // units per wheel notch (~100 deltaY)
}

export class ForceProxy {
  value = 0;
  holding = false;
  private readonly riseRate: number;
  private readonly decayRate: number;
  private readonly wheelStep: number;

  constructor(opts: ForceProxyOptions = {}) {
    this.riseRate = opts.riseRate ?? 1.5;
    this.decayRate = opts.decayRate ?? 2.0;
    this.wheelStep = opts.wheelStep ?? 0.05;
  }

  private clamp() {
    if (this.value < 0) this.value = 0;
    if (this.value > 1) this.value = 1;
  }

  // Advance the accumulator by dt seconds.
  update(dt: number): number {
    this.value += (this.holding ? this.riseRate : -this.decayRate) * dt;
    this.clamp();
    return this.value;
  }

  wheel(deltaY: number): number {
    // scrolling up (negative deltaY) presses harder
    this.value += (-deltaY / 100) * this.wheelStep;
    this.clamp();
    return this.value;
  }
}
