// Task space (meters, y up) <-> canvas pixels (y down). The visible extent
// depends on the task: the slider track is 1.5 m long, the tracing canvas
// is a 1 m square; both sit centered with some margin.

export interface Viewport {
  scale: number; // pixels per meter
  cx: number;
  cy: number;
}

export const fitViewport = (
  widthPx: number,
  heightPx: number,
  extentMeters: number,
  margin = 0.85,
): Viewport => ({
  scale: (Math.min(widthPx, heightPx) * margin) / extentMeters,
  cx: widthPx / 2,
  cy: heightPx / 2,
});

export const toPixels = (vp: Viewport, x: number, y: number): [number, number] => [
  vp.cx + x * vp.scale,
  vp.cy - y * vp.scale,
];

export const toMeters = (vp: Viewport, px: number, py: number): [number, number] => [
  (px - vp.cx) / vp.scale,
  (vp.cy - py) / vp.scale,
];

// Slider geometry: the track spans [0, 1.5] m along x; center it.
export const SLIDER_LENGTH = 1.5;
export const sliderOffset = -SLIDER_LENGTH / 2;

export const TRACE_EXTENT = 1.0;
