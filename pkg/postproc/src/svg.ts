/**
 * Deterministic SVG chart primitives: fixed canvas, fixed precision, no
 * randomness, so identical inputs yield byte-identical images.
 */

export interface Margin {
  top: number;
  right: number;
  bottom: number;
  left: number;
}

export const CANVAS = { width: 720, height: 480 };
export const DEFAULT_MARGIN: Margin = { top: 48, right: 24, bottom: 56, left: 72 };

export function fmt(v: number, digits = 4): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-3) return v.toExponential(Math.max(digits - 2, 1));
  return Number(v.toPrecision(digits + 2)).toString();
}

const coord = (v: number) => (Math.round(v * 100) / 100).toString();

export interface Scale {
  (v: number): number;
  domain: [number, number];
  range: [number, number];
  log: boolean;
}

export function linearScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0 || 1;
  const f = ((v: number) => r0 + ((v - d0) / span) * (r1 - r0)) as Scale;
  f.domain = domain;
  f.range = range;
  f.log = false;
  return f;
}

export function logScale(domain: [number, number], range: [number, number]): Scale {
  const lo = Math.log10(Math.max(domain[0], Number.MIN_VALUE));
  const hi = Math.log10(Math.max(domain[1], Number.MIN_VALUE));
  const span = hi - lo || 1;
  const [r0, r1] = range;
  const f = ((v: number) =>
    r0 + ((Math.log10(Math.max(v, Number.MIN_VALUE)) - lo) / span) * (r1 - r0)) as Scale;
  f.domain = domain;
  f.range = range;
  f.log = true;
  return f;
}

export function ticks(domain: [number, number], count = 6): number[] {
  const [lo, hi] = domain;
  if (!(hi > lo)) return [lo];
  const step = niceStep((hi - lo) / count);
  const start = Math.ceil(lo / step) * step;
  const out: number[] = [];
  for (let v = start; v <= hi + step * 1e-9; v += step) out.push(Number(v.toPrecision(12)));
  return out;
}

export function logTicks(domain: [number, number]): number[] {
  const lo = Math.ceil(Math.log10(Math.max(domain[0], Number.MIN_VALUE)));
  const hi = Math.floor(Math.log10(Math.max(domain[1], Number.MIN_VALUE)));
  const out: number[] = [];
  for (let e = lo; e <= hi; e++) out.push(Math.pow(10, e));
  if (out.length === 0) out.push(domain[0]);
  return out;
}

function niceStep(raw: number): number {
  const mag = Math.pow(10, Math.floor(Math.log10(raw)));
  const norm = raw / mag;
  if (norm <= 1) return mag;
  if (norm <= 2) return 2 * mag;
  if (norm <= 5) return 5 * mag;
  return 10 * mag;
}

export function polyline(
  xs: ArrayLike<number>,
  ys: ArrayLike<number>,
  sx: Scale,
  sy: Scale,
  stroke: string,
  opts: { dash?: string; width?: number } = {}
): string {
  const pts: string[] = [];
  for (let i = 0; i < xs.length; i++) {
    const y = ys[i]!;
    if (sy.log && y <= 0) continue;
    pts.push(`${coord(sx(xs[i]!))},${coord(sy(y))}`);
  }
  const dash = opts.dash ? ` stroke-dasharray="${opts.dash}"` : "";
  return `<polyline fill="none" stroke="${stroke}" stroke-width="${opts.width ?? 1.5}"${dash} points="${pts.join(" ")}"/>`;
}

export function scatter(
  xs: ArrayLike<number>,
  ys: ArrayLike<number>,
  sx: Scale,
  sy: Scale,
  fill: string,
  radius = 2.2
): string {
  const out: string[] = [];
  for (let i = 0; i < xs.length; i++) {
    out.push(
      `<circle cx="${coord(sx(xs[i]!))}" cy="${coord(sy(ys[i]!))}" r="${radius}" fill="${fill}" fill-opacity="0.65"/>`
    );
  }
  return out.join("");
}

export function axes(
  sx: Scale,
  sy: Scale,
  labels: { x: string; y: string; title: string }
): string {
  const [x0, x1] = sx.range;
  const [y0, y1] = sy.range; // y0 is the bottom pixel (larger value)
  const parts: string[] = [];
  parts.push(
    `<rect x="${coord(x0)}" y="${coord(y1)}" width="${coord(x1 - x0)}" height="${coord(y0 - y1)}" fill="none" stroke="#444" stroke-width="1"/>`
  );
  const xt = sx.log ? logTicks(sx.domain) : ticks(sx.domain);
  for (const t of xt) {
    const px = sx(t);
    parts.push(`<line x1="${coord(px)}" y1="${coord(y0)}" x2="${coord(px)}" y2="${coord(y0 + 5)}" stroke="#444"/>`);
    parts.push(
      `<text x="${coord(px)}" y="${coord(y0 + 20)}" font-size="11" text-anchor="middle" fill="#222">${fmt(t, 3)}</text>`
    );
  }
  const yt = sy.log ? logTicks(sy.domain) : ticks(sy.domain);
  for (const t of yt) {
    const py = sy(t);
    parts.push(`<line x1="${coord(x0 - 5)}" y1="${coord(py)}" x2="${coord(x0)}" y2="${coord(py)}" stroke="#444"/>`);
    parts.push(
      `<text x="${coord(x0 - 8)}" y="${coord(py + 4)}" font-size="11" text-anchor="end" fill="#222">${fmt(t, 3)}</text>`
    );
  }
  const cx = (x0 + x1) / 2;
  parts.push(
    `<text x="${coord(cx)}" y="${coord(y0 + 42)}" font-size="13" text-anchor="middle" fill="#111">${labels.x}</text>`
  );
  parts.push(
    `<text x="18" y="${coord((y0 + y1) / 2)}" font-size="13" text-anchor="middle" fill="#111" transform="rotate(-90 18 ${coord((y0 + y1) / 2)})">${labels.y}</text>`
  );
  parts.push(
    `<text x="${coord(cx)}" y="26" font-size="15" text-anchor="middle" fill="#000" font-weight="bold">${labels.title}</text>`
  );
  return parts.join("");
}

export function legend(entries: { label: string; color: string; dash?: string }[], x: number, y: number): string {
  const parts: string[] = [];
  entries.forEach((e, i) => {
    const yy = y + 18 * i;
    const dash = e.dash ? ` stroke-dasharray="${e.dash}"` : "";
    parts.push(`<line x1="${x}" y1="${yy}" x2="${x + 26}" y2="${yy}" stroke="${e.color}" stroke-width="2"${dash}/>`);
    parts.push(`<text x="${x + 32}" y="${yy + 4}" font-size="12" fill="#222">${e.label}</text>`);
  });
  return parts.join("");
}

/** Symmetric diverging colormap (blue / white / red) for signed fields. */
export function divergingColor(v: number, vmax: number): string {
  const t = vmax > 0 ? Math.max(-1, Math.min(1, v / vmax)) : 0;
  let r: number, g: number, b: number;
  if (t < 0) {
    const s = 1 + t; // 0 at -1, 1 at 0
    r = Math.round(33 + (255 - 33) * s);
    g = Math.round(102 + (255 - 102) * s);
    b = Math.round(172 + (255 - 172) * s);
  } else {
    const s = 1 - t;
    r = Math.round(178 + (255 - 178) * s);
    g = Math.round(24 + (255 - 24) * s);
    b = Math.round(43 + (255 - 43) * s);
  }
  return `rgb(${r},${g},${b})`;
}

export function heatmapCells(
  data: ArrayLike<number>,
  nx: number,
  ny: number,
  frame: { x: number; y: number; width: number; height: number },
  vmax: number
): string {
  const cw = frame.width / nx;
  const ch = frame.height / ny;
  const parts: string[] = [];
  for (let j = 0; j < ny; j++) {
    for (let i = 0; i < nx; i++) {
      const v = data[j * nx + i]!;
      const x = frame.x + i * cw;
      // flip vertically so increasing x2 points up
      const y = frame.y + (ny - 1 - j) * ch;
      parts.push(
        `<rect x="${coord(x)}" y="${coord(y)}" width="${coord(cw + 0.5)}" height="${coord(ch + 0.5)}" fill="${divergingColor(v, vmax)}"/>`
      );
    }
  }
  return parts.join("");
}

export function document(body: string, width = CANVAS.width, height = CANVAS.height): string {
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}">` +
    `<rect width="${width}" height="${height}" fill="white"/>` +
    body +
    "</svg>\n"
  );
}
