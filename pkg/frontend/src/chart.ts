/** Dependency-free SVG chart rendering (strings, no DOM required). */

export interface Point {
  x: number;
  y: number;
}

export interface LineSegment {
  points: Point[];
  className: string;
}

export interface VerticalMarker {
  x: number;
  label: string;
}

export interface ChartOptions {
  width: number;
  height: number;
  segments: LineSegment[];
  dots?: Point[];
  markers?: VerticalMarker[];
  xTicks?: { x: number; label: string }[];
  yLabel?: string;
}

const PAD = { left: 52, right: 12, top: 10, bottom: 26 };

interface Scale {
  x: (v: number) => number;
  y: (v: number) => number;
}

function makeScale(opts: ChartOptions): Scale | null {
  const xs: number[] = [];
  const ys: number[] = [];
  for (const seg of opts.segments) {
    for (const p of seg.points) {
      xs.push(p.x);
      ys.push(p.y);
    }
  }
  for (const p of opts.dots ?? []) {
    xs.push(p.x);
    ys.push(p.y);
  }
  if (xs.length === 0) return null;
  const xMin = Math.min(...xs);
  const xMax = Math.max(...xs);
  const yMin = Math.min(0, ...ys);
  const yMax = Math.max(...ys) || 1;
  const innerW = opts.width - PAD.left - PAD.right;
  const innerH = opts.height - PAD.top - PAD.bottom;
  const xSpan = xMax - xMin || 1;
  const ySpan = yMax - yMin || 1;
  return {
    x: (v) => PAD.left + ((v - xMin) / xSpan) * innerW,
    y: (v) => PAD.top + innerH - ((v - yMin) / ySpan) * innerH,
  };
}

function fmt(v: number): string {
  return Number.isInteger(v) ? String(v) : v.toFixed(1);
}

export function polylinePath(points: Point[], scale: Scale): string {
  return points
    .map((p, k) => `${k === 0 ? "M" : "L"}${scale.x(p.x).toFixed(1)},${scale.y(p.y).toFixed(1)}`)
    .join("");
}

export function renderChart(opts: ChartOptions): string {
  const scale = makeScale(opts);
  if (scale === null) {
    return `<svg viewBox="0 0 ${opts.width} ${opts.height}"></svg>`;
  }
  const parts: string[] = [];
  const bottom = opts.height - PAD.bottom;
  parts.push(
    `<line class="axis" x1="${PAD.left}" y1="${bottom}" ` +
      `x2="${opts.width - PAD.right}" y2="${bottom}"/>`,
    `<line class="axis" x1="${PAD.left}" y1="${PAD.top}" ` +
      `x2="${PAD.left}" y2="${bottom}"/>`,
  );
  const ys = opts.segments.flatMap((s) => s.points.map((p) => p.y));
  if (ys.length > 0) {
    const yMax = Math.max(...ys, ...(opts.dots ?? []).map((p) => p.y));
    for (const frac of [0.5, 1.0]) {
      const v = yMax * frac;
      parts.push(
        `<text class="tick" x="${PAD.left - 6}" y="${scale.y(v) + 4}" ` +
          `text-anchor="end">${fmt(v)}</text>`,
      );
    }
  }
  for (const marker of opts.markers ?? []) {
    const x = scale.x(marker.x).toFixed(1);
    parts.push(
      `<line class="marker" x1="${x}" y1="${PAD.top}" x2="${x}" y2="${bottom}"/>`,
      `<text class="tick" x="${x}" y="${PAD.top + 10}">${marker.label}</text>`,
    );
  }
  for (const tick of opts.xTicks ?? []) {
    const x = scale.x(tick.x).toFixed(1);
    parts.push(
      `<text class="tick" x="${x}" y="${bottom + 16}" text-anchor="middle">` +
        `${tick.label}</text>`,
    );
  }
  for (const seg of opts.segments) {
    if (seg.points.length > 0) {
      parts.push(
        `<path class="${seg.className}" d="${polylinePath(seg.points, scale)}"/>`,
      );
    }
  }
  for (const dot of opts.dots ?? []) {
    parts.push(
      `<circle class="observed" cx="${scale.x(dot.x).toFixed(1)}" ` +
        `cy="${scale.y(dot.y).toFixed(1)}" r="2.5"/>`,
    );
  }
  if (opts.yLabel) {
    parts.push(
      `<text class="tick" x="${PAD.left + 4}" y="${PAD.top + 10}">` +
        `${opts.yLabel}</text>`,
    );
  }
  return (
    `<svg viewBox="0 0 ${opts.width} ${opts.height}" ` +
    `preserveAspectRatio="none">${parts.join("")}</svg>`
  );
}
