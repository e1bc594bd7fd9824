import { describe, expect, test } from "vitest";

import { fitViewport, toMeters, toPixels } from "../src/viewport.js";

describe("viewport transforms", () => {
  const vp = fitViewport(900, 620, 1.2);

  test("meters <-> pixels round trip", () => {
    for (const [x, y] of [
      [0, 0],
      [0.4, -0.3],
      [-0.55, 0.21],
    ]) {
      const [px, py] = toPixels(vp, x, y);
      const [mx, my] = toMeters(vp, px, py);
      expect(mx).toBeCloseTo(x, 12);
      expect(my).toBeCloseTo(y, 12);
    }
  });

  test("y axis is flipped for screen space", () => {
    const [, pyUp] = toPixels(vp, 0, 0.5);
    const [, pyDown] = toPixels(vp, 0, -0.5);
    expect(pyUp).toBeLessThan(pyDown);
  });

  test("extent fits in the smaller dimension with margin", () => {
    const [left] = toPixels(vp, -0.6, 0);
    const [right] = toPixels(vp, 0.6, 0);
    expect(right - left).toBeLessThanOrEqual(620);
    expect(right - left).toBeGreaterThan(0.8 * 620 * 0.8);
  });
});
