/**
 * CSV readers for solver outputs. All parse errors carry the 1-based line
 * number of the offending row; an empty table is an error, not an empty
 * result, so no figure is ever written from a contentless file.
 */

import { readFileSync } from "fs";

export class CsvError extends Error {
  constructor(public readonly file: string, public readonly line: number, detail: string) {
    super(`${file}:${line}: ${detail}`);
  }
}

export interface NumericTable {
  header: string[];
  /** column-major numeric data, one Float64Array per header entry */
  columns: Map<string, Float64Array>;
  rows: number;
}

/** Parse a comma-separated numeric table with a mandatory header row. */
export function parseNumericCsv(file: string, expectedHeader?: string[]): NumericTable {
  const text = readFileSync(file, "utf8");
  const lines = text.split(/\r?\n/).filter((l) => l.length > 0);
  if (lines.length === 0) {
    throw new CsvError(file, 1, "empty file");
  }
  const header = lines[0]!.split(",").map((h) => h.trim());
  if (expectedHeader) {
    const got = header.join(",");
    const want = expectedHeader.join(",");
    if (got !== want) {
      throw new CsvError(file, 1, `header "${got}" does not match expected "${want}"`);
    }
  }
  if (lines.length === 1) {
    throw new CsvError(file, 1, "no data rows");
  }
  const rows = lines.length - 1;
  const cols = header.map(() => new Float64Array(rows));
  for (let i = 1; i < lines.length; i++) {
    const parts = lines[i]!.split(",");
    if (parts.length !== header.length) {
      throw new CsvError(file, i + 1, `expected ${header.length} fields, found ${parts.length}`);
    }
    for (let j = 0; j < parts.length; j++) {
      const v = Number(parts[j]);
      if (!Number.isFinite(v)) {
        throw new CsvError(file, i + 1, `field "${header[j]}" is not a finite number: ${parts[j]}`);
      }
      cols[j]![i - 1] = v;
    }
  }
  const columns = new Map<string, Float64Array>();
  header.forEach((h, j) => columns.set(h, cols[j]!));
  return { header, columns, rows };
}

export const DIAGNOSTICS_HEADER = [
  "t",
  "energy",
  "enstrophy",
  "max_vorticity",
  "div_residual",
  "max_velocity",
];

export function readDiagnostics(file: string): NumericTable {
  return parseNumericCsv(file, DIAGNOSTICS_HEADER);
}

export function readGapSeries(file: string): NumericTable {
  return parseNumericCsv(file, ["t", "D", "bound"]);
}

export interface CoercivitySamples {
  kind: string[];
  rho: Float64Array;
  theta: Float64Array;
  ratio: Float64Array;
}

/** The coercivity table mixes a string column in; parsed by hand. */
export function readCoercivity(file: string): CoercivitySamples {
  const text = readFileSync(file, "utf8");
  const lines = text.split(/\r?\n/).filter((l) => l.length > 0);
  if (lines.length === 0) throw new CsvError(file, 1, "empty file");
  if (lines[0] !== "sample_id,kind,rho,theta,ratio") {
    throw new CsvError(file, 1, `unexpected header "${lines[0]}"`);
  }
  if (lines.length === 1) throw new CsvError(file, 1, "no data rows");
  const n = lines.length - 1;
  const kind: string[] = new Array(n);
  const rho = new Float64Array(n);
  const theta = new Float64Array(n);
  const ratio = new Float64Array(n);
  for (let i = 1; i < lines.length; i++) {
    const parts = lines[i]!.split(",");
    if (parts.length !== 5) {
      throw new CsvError(file, i + 1, `expected 5 fields, found ${parts.length}`);
    }
    kind[i - 1] = parts[1]!;
    rho[i - 1] = Number(parts[2]);
    theta[i - 1] = Number(parts[3]);
    ratio[i - 1] = Number(parts[4]);
    if (!Number.isFinite(rho[i - 1]!) || !Number.isFinite(ratio[i - 1]!)) {
      throw new CsvError(file, i + 1, "non-numeric sample");
    }
  }
  return { kind, rho, theta, ratio };
}

/** Two-column whitespace-separated table (x3, value), as written by the solver. */
export function readProfileTable(file: string): { x: Float64Array; value: Float64Array } {
  const text = readFileSync(file, "utf8");
  const lines = text.split(/\r?\n/).filter((l) => l.trim().length > 0);
  if (lines.length === 0) throw new CsvError(file, 1, "empty file");
  const x = new Float64Array(lines.length);
  const value = new Float64Array(lines.length);
  for (let i = 0; i < lines.length; i++) {
    const parts = lines[i]!.trim().split(/\s+/);
    if (parts.length !== 2) {
      throw new CsvError(file, i + 1, `expected 2 columns, found ${parts.length}`);
    }
    x[i] = Number(parts[0]);
    value[i] = Number(parts[1]);
    if (!Number.isFinite(x[i]!) || !Number.isFinite(value[i]!)) {
      throw new CsvError(file, i + 1, "non-numeric entry");
    }
  }
  return { x, value };
}
