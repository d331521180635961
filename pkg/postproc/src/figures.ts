/**
 * The five figure kinds rendered from solver outputs. Every renderer builds
 * the whole SVG in memory and only then writes, so a malformed input never
 * leaves a partial image behind.
 */

import { writeFileSync } from "fs";
import { basename } from "path";

import { readCoercivity, readDiagnostics, readGapSeries, readProfileTable } from "./csv";
import { layerSlice, readSnapshot } from "./snapshot";
import {
  CANVAS,
  DEFAULT_MARGIN,
  axes,
  document as svgDocument,
  fmt,
  heatmapCells,
  legend,
  linearScale,
  logScale,
  polyline,
  scatter,
} from "./svg";

export type FigureKind = "slices" | "timeseries" | "profile" | "coercivity" | "gap";

/** Analytic reference curve a * exp(rate * t), drawn dashed over a timeseries. */
export interface Overlay {
  label: string;
  amplitude: number;
  rate: number;
}

export interface FigureSpec {
  kind: FigureKind;
  /** input files; meaning depends on the kind (snapshot for slices, CSV otherwise) */
  inputs: string[];
  output: string;
  /** vertical node indices for `slices`; defaults to bottom / middle / top interior */
  layers?: number[];
  overlays?: Overlay[];
  title?: string;
}

export function renderFigure(spec: FigureSpec): string {
  let svg: string;
  switch (spec.kind) {
    case "slices":
      svg = renderSlices(spec);
      break;
    case "timeseries":
      svg = renderTimeseries(spec);
      break;
    case "profile":
      svg = renderProfile(spec);
      break;
    case "coercivity":
      svg = renderCoercivity(spec);
      break;
    case "gap":
      svg = renderGap(spec);
      break;
    default:
      throw new Error(`unknown figure kind ${(spec as FigureSpec).kind}`);
  }
  writeFileSync(spec.output, svg);
  return spec.output;
}

function needOneInput(spec: FigureSpec): string {
  const first = spec.inputs[0];
  if (!first) throw new Error(`${spec.kind}: needs an input file`);
  return first;
}

export function renderSlices(spec: FigureSpec): string {
  const file = needOneInput(spec);
  const snap = readSnapshot(file);
  const layersTotal = snap.n3 + 1;
  const layers = spec.layers && spec.layers.length > 0
    ? spec.layers
    : [1, Math.floor(snap.n3 / 2), snap.n3 - 1];
  for (const l of layers) {
    if (!Number.isInteger(l) || l < 0 || l >= layersTotal) {
      throw new RangeError(`layer index ${l} outside [0, ${layersTotal - 1}]`);
    }
  }
  let vmax = 0;
  const slices = layers.map((l) => {
    const s = layerSlice(snap, l);
    for (const v of s) vmax = Math.max(vmax, Math.abs(v));
    return s;
  });

  const panel = 200;
  const gap = 24;
  const top = 56;
  const width = Math.max(CANVAS.width, layers.length * (panel + gap) + gap);
  const height = top + panel + 48;
  const parts: string[] = [];
  parts.push(
    `<text x="${width / 2}" y="26" font-size="15" text-anchor="middle" font-weight="bold">` +
      `${spec.title ?? `vorticity slices, t = ${fmt(snap.time)}`}</text>`
  );
  slices.forEach((data, i) => {
    const x = gap + i * (panel + gap);
    parts.push(heatmapCells(data, snap.n1, snap.n2, { x, y: top, width: panel, height: panel }, vmax));
    parts.push(
      `<rect x="${x}" y="${top}" width="${panel}" height="${panel}" fill="none" stroke="#444"/>`
    );
    const x3 = layers[i]! / snap.n3;
    parts.push(
      `<text x="${x + panel / 2}" y="${top + panel + 18}" font-size="12" text-anchor="middle">` +
        `layer ${layers[i]} (x3 = ${fmt(x3, 3)})</text>`
    );
  });
  parts.push(
    `<text x="${gap}" y="${top - 10}" font-size="11" fill="#333">sup |vorticity| = ${fmt(vmax)}</text>`
  );
  return svgDocument(parts.join(""), width, height);
}

export function renderTimeseries(spec: FigureSpec): string {
  const file = needOneInput(spec);
  const table = readDiagnostics(file);
  const t = table.columns.get("t")!;
  const energy = table.columns.get("energy")!;
  const enstrophy = table.columns.get("enstrophy")!;
  const m = DEFAULT_MARGIN;
  const positives: number[] = [];
  for (const v of energy) if (v > 0) positives.push(v);
  for (const v of enstrophy) if (v > 0) positives.push(v);
  if (positives.length === 0) throw new Error(`${file}: no positive series values to plot`);
  let lo = Math.min(...positives);
  let hi = Math.max(...positives);
  for (const o of spec.overlays ?? []) {
    const tail = o.amplitude * Math.exp(o.rate * t[t.length - 1]!);
    if (tail > 0) lo = Math.min(lo, tail);
    if (o.amplitude > 0) hi = Math.max(hi, o.amplitude);
  }
  const sx = linearScale([t[0]!, t[t.length - 1]!], [m.left, CANVAS.width - m.right]);
  const sy = logScale([lo / 1.5, hi * 1.5], [CANVAS.height - m.bottom, m.top]);
  const parts: string[] = [];
  parts.push(axes(sx, sy, { x: "t", y: "value (log)", title: spec.title ?? `decay of ${basename(file)}` }));
  parts.push(polyline(t, energy, sx, sy, "#1f77b4", { width: 2 }));
  parts.push(polyline(t, enstrophy, sx, sy, "#2ca02c", { width: 2 }));
  const entries = [
    { label: "kinetic energy", color: "#1f77b4" },
    { label: "enstrophy", color: "#2ca02c" },
  ];
  (spec.overlays ?? []).forEach((o, i) => {
    const ys = new Float64Array(t.length);
    for (let k = 0; k < t.length; k++) ys[k] = o.amplitude * Math.exp(o.rate * t[k]!);
    const color = "#d62728";
    parts.push(polyline(t, ys, sx, sy, color, { dash: "6 4", width: 1.5 }));
    entries.push({ label: o.label, color, dash: "6 4" } as (typeof entries)[number]);
  });
  parts.push(legend(entries, m.left + 12, m.top + 14));
  return svgDocument(parts.join(""));
}

export function renderProfile(spec: FigureSpec): string {
  const file = needOneInput(spec);
  const { x, value } = readProfileTable(file);
  const m = DEFAULT_MARGIN;
  const lo = Math.min(...value);
  const hi = Math.max(...value);
  const pad = (hi - lo || 1) * 0.08;
  const sx = linearScale([0, Math.max(...value, hi + pad)], [m.left, CANVAS.width - m.right]);
  const sy = linearScale([x[0]!, x[x.length - 1]!], [CANVAS.height - m.bottom, m.top]);
  const parts: string[] = [];
  parts.push(axes(sx, sy, { x: "density r", y: "height x3", title: spec.title ?? "hydrostatic profile" }));
  parts.push(polyline(value, x, sx, sy, "#1f77b4", { width: 2 }));
  parts.push(scatter(value, x, sx, sy, "#1f77b4", 2.0));
  return svgDocument(parts.join(""));
}

export function renderCoercivity(spec: FigureSpec): string {
  const file = needOneInput(spec);
  const samples = readCoercivity(file);
  const m = DEFAULT_MARGIN;
  const rhoLo = Math.min(...samples.rho);
  const rhoHi = Math.max(...samples.rho);
  const posRatios: number[] = [];
  for (const r of samples.ratio) if (r > 0) posRatios.push(r);
  if (posRatios.length === 0) throw new Error(`${file}: all sampled ratios vanish`);
  const sx = logScale([rhoLo / 1.2, rhoHi * 1.2], [m.left, CANVAS.width - m.right]);
  const sy = logScale(
    [Math.min(...posRatios) / 1.5, Math.max(...posRatios) * 1.5],
    [CANVAS.height - m.bottom, m.top]
  );
  const essX: number[] = [];
  const essY: number[] = [];
  const resX: number[] = [];
  const resY: number[] = [];
  let cEss = Infinity;
  let cRes = Infinity;
  for (let i = 0; i < samples.kind.length; i++) {
    const ratio = samples.ratio[i]!;
    if (ratio <= 0) continue;
    if (samples.kind[i] === "essential") {
      essX.push(samples.rho[i]!);
      essY.push(ratio);
      cEss = Math.min(cEss, ratio);
    } else {
      resX.push(samples.rho[i]!);
      resY.push(ratio);
      cRes = Math.min(cRes, ratio);
    }
  }
  const parts: string[] = [];
  parts.push(
    axes(sx, sy, {
      x: "sample density rho (log)",
      y: "energy / lower-bound ratio (log)",
      title: spec.title ?? "relative-energy coercivity samples",
    })
  );
  parts.push(scatter(essX, essY, sx, sy, "#1f77b4"));
  parts.push(scatter(resX, resY, sx, sy, "#d62728"));
  if (Number.isFinite(cEss)) {
    const y = sy(cEss);
    parts.push(
      `<line x1="${m.left}" y1="${y.toFixed(2)}" x2="${CANVAS.width - m.right}" y2="${y.toFixed(2)}" stroke="#1f77b4" stroke-dasharray="4 4"/>`
    );
  }
  parts.push(
    legend(
      [
        { label: `essential (C = ${fmt(Number.isFinite(cEss) ? cEss : 0)})`, color: "#1f77b4" },
        { label: `residual (C = ${fmt(Number.isFinite(cRes) ? cRes : 0)})`, color: "#d62728" },
      ],
      m.left + 12,
      m.top + 14
    )
  );
  return svgDocument(parts.join(""));
}

export function renderGap(spec: FigureSpec): string {
  const file = needOneInput(spec);
  const table = readGapSeries(file);
  const t = table.columns.get("t")!;
  const D = table.columns.get("D")!;
  const bound = table.columns.get("bound")!;
  const m = DEFAULT_MARGIN;
  const positives: number[] = [];
  for (const v of D) if (v > 0) positives.push(v);
  for (const v of bound) if (v > 0) positives.push(v);
  if (positives.length === 0) throw new Error(`${file}: gap series identically zero`);
  const sx = linearScale([t[0]!, t[t.length - 1]!], [m.left, CANVAS.width - m.right]);
  const sy = logScale(
    [Math.min(...positives) / 1.5, Math.max(...positives) * 1.5],
    [CANVAS.height - m.bottom, m.top]
  );
  const parts: string[] = [];
  parts.push(
    axes(sx, sy, {
      x: "t",
      y: "weighted gap D(t) (log)",
      title: spec.title ?? "twin-trajectory gap with exponential envelope",
    })
  );
  parts.push(polyline(t, D, sx, sy, "#1f77b4", { width: 2 }));
  parts.push(polyline(t, bound, sx, sy, "#d62728", { dash: "6 4" }));
  parts.push(
    legend(
      [
        { label: "gap D(t)", color: "#1f77b4" },
        { label: "fitted envelope", color: "#d62728", dash: "6 4" },
      ],
      m.left + 12,
      m.top + 14
    )
  );
  return svgDocument(parts.join(""));
}
