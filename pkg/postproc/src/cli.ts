#!/usr/bin/env node
/**
 * Batch figure rendering for solver runs.
 *
 *   cli.js <slices|timeseries|profile|coercivity|gap> --input FILE --output FILE.svg
 *          [--layers 1,8,15] [--overlay label:amplitude:rate] [--title TEXT]
 *   cli.js all --run-dir DIR [--output-dir DIR]
 *
 * The `all` mode consumes the config echo the solver wrote next to its
 * outputs and renders every figure kind found there, deriving the analytic
 * decay overlay for the timeseries from the configured viscosity law.
 */

import { existsSync, mkdirSync, readdirSync } from "fs";
import { dirname, join } from "path";

import { parseConfigEcho, requireNumber } from "./config";
import { readDiagnostics } from "./csv";
import { FigureKind, FigureSpec, Overlay, renderFigure } from "./figures";

const KINDS: FigureKind[] = ["slices", "timeseries", "profile", "coercivity", "gap"];

function parseArgs(argv: string[]): { command: string; options: Map<string, string> } {
  const command = argv[0];
  if (!command) throw new UsageError("missing command");
  const options = new Map<string, string>();
  for (let i = 1; i < argv.length; i++) {
    const arg = argv[i]!;
    if (!arg.startsWith("--")) throw new UsageError(`unexpected argument ${arg}`);
    const value = argv[i + 1];
    if (value === undefined) throw new UsageError(`option ${arg} needs a value`);
    options.set(arg.slice(2), value);
    i++;
  }
  return { command, options };
}

class UsageError extends Error {}

function parseOverlay(raw: string): Overlay {
  const parts = raw.split(":");
  if (parts.length !== 3) {
    throw new UsageError(`overlay must be label:amplitude:rate, got ${raw}`);
  }
  const amplitude = Number(parts[1]);
  const rate = Number(parts[2]);
  if (!Number.isFinite(amplitude) || !Number.isFinite(rate)) {
    throw new UsageError(`non-numeric overlay parameters in ${raw}`);
  }
  return { label: parts[0]!, amplitude, rate };
}

function singleFigure(kind: FigureKind, options: Map<string, string>): void {
  const input = options.get("input");
  const output = options.get("output");
  if (!input || !output) throw new UsageError(`${kind} needs --input and --output`);
  mkdirSync(dirname(output) || ".", { recursive: true });
  const spec: FigureSpec = { kind, inputs: [input], output };
  const layers = options.get("layers");
  if (layers) spec.layers = layers.split(",").map((s) => Number(s.trim()));
  const overlay = options.get("overlay");
  if (overlay) spec.overlays = [parseOverlay(overlay)];
  const title = options.get("title");
  if (title) spec.title = title;
  renderFigure(spec);
  console.log(`wrote ${output}`);
}

function latestSnapshot(dir: string): string | undefined {
  const snaps = readdirSync(dir)
    .filter((f) => /^snapshot_\d+\.bin$/.test(f))
    .sort();
  const last = snaps[snaps.length - 1];
  return last ? join(dir, last) : undefined;
}

function renderAll(options: Map<string, string>): void {
  const runDir = options.get("run-dir");
  if (!runDir) throw new UsageError("all needs --run-dir");
  const outDir = options.get("output-dir") ?? runDir;
  mkdirSync(outDir, { recursive: true });

  const echoPath = join(runDir, "config.resolved.toml");
  if (!existsSync(echoPath)) {
    throw new Error(`${echoPath} not found; point --run-dir at a completed run`);
  }
  const echo = parseConfigEcho(echoPath);

  const written: string[] = [];
  const diagPath = join(runDir, "diagnostics.csv");
  if (existsSync(diagPath)) {
    // analytic reference: slowest decaying cellular mode, rate 2 * 3 pi^2 nu0
    // with nu0 = mu0 (1 + Theta) / r_bott from the configured laws
    const mu0 = requireNumber(echo, "eos.mu0");
    const theta = requireNumber(echo, "profile.Theta");
    const rBott = requireNumber(echo, "profile.r_bott");
    const nu0 = (mu0 * (1 + theta)) / rBott;
    const table = readDiagnostics(diagPath);
    const e0 = table.columns.get("energy")![0]!;
    const overlays: Overlay[] =
      e0 > 0 ? [{ label: "analytic decay", amplitude: e0, rate: -6 * Math.PI * Math.PI * nu0 }] : [];
    written.push(
      renderFigure({ kind: "timeseries", inputs: [diagPath], output: join(outDir, "timeseries.svg"), overlays })
    );
  }
  const snap = latestSnapshot(runDir);
  if (snap) {
    written.push(renderFigure({ kind: "slices", inputs: [snap], output: join(outDir, "slices.svg") }));
  }
  const profilePath = join(runDir, "profile.txt");
  if (existsSync(profilePath)) {
    written.push(renderFigure({ kind: "profile", inputs: [profilePath], output: join(outDir, "profile.svg") }));
  }
  const coercPath = join(runDir, "coercivity.csv");
  if (existsSync(coercPath)) {
    written.push(renderFigure({ kind: "coercivity", inputs: [coercPath], output: join(outDir, "coercivity.svg") }));
  }
  const gapPath = join(runDir, "stability_gap.csv");
  if (existsSync(gapPath)) {
    written.push(renderFigure({ kind: "gap", inputs: [gapPath], output: join(outDir, "gap.svg") }));
  }
  if (written.length === 0) {
    throw new Error(`no renderable outputs found in ${runDir}`);
  }
  for (const w of written) console.log(`wrote ${w}`);
}

export function main(argv: string[]): number {
  try {
    const { command, options } = parseArgs(argv);
    if (command === "all") {
      renderAll(options);
    } else if ((KINDS as string[]).includes(command)) {
      singleFigure(command as FigureKind, options);
    } else {
      throw new UsageError(`unknown command ${command}; expected one of ${KINDS.join(", ")}, all`);
    }
    return 0;
  } catch (err) {
    if (err instanceof UsageError) {
      console.error(`usage error: ${err.message}`);
      return 2;
    }
    console.error(String(err instanceof Error ? err.message : err));
    return 1;
  }
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}
