/**
 * Minimal reader for the solver's resolved-config echo (a flat TOML subset:
 * [section] headers and key = value lines with strings, numbers, booleans
 * and numeric arrays). Enough to locate outputs and derive overlay rates.
 */

import { readFileSync } from "fs";

export type EchoValue = string | number | boolean | number[];

export class ConfigEchoError extends Error {
  constructor(public readonly file: string, public readonly line: number, detail: string) {
    super(`${file}:${line}: ${detail}`);
  }
}

export function parseConfigEcho(file: string): Map<string, EchoValue> {
  const text = readFileSync(file, "utf8");
  const out = new Map<string, EchoValue>();
  let section = "";
  const lines = text.split(/\r?\n/);
  for (let i = 0; i < lines.length; i++) {
    const raw = lines[i]!;
    const line = raw.trim();
    if (line.length === 0 || line.startsWith("#")) continue;
    if (line.startsWith("[") && line.endsWith("]")) {
      section = line.slice(1, -1).trim();
      continue;
    }
    const eq = line.indexOf("=");
    if (eq < 0) {
      throw new ConfigEchoError(file, i + 1, `expected key = value, got "${line}"`);
    }
    const key = line.slice(0, eq).trim();
    const rawValue = line.slice(eq + 1).trim();
    out.set(section ? `${section}.${key}` : key, parseValue(file, i + 1, rawValue));
  }
  return out;
}

function parseValue(file: string, line: number, raw: string): EchoValue {
  if (raw === "true") return true;
  if (raw === "false") return false;
  if (raw.startsWith('"') && raw.endsWith('"')) {
    return raw.slice(1, -1).replace(/\\"/g, '"').replace(/\\\\/g, "\\");
  }
  if (raw.startsWith("[") && raw.endsWith("]")) {
    const inner = raw.slice(1, -1).trim();
    if (inner.length === 0) return [];
    return inner.split(",").map((part) => {
      const v = Number(part.trim());
      if (!Number.isFinite(v)) {
        throw new ConfigEchoError(file, line, `non-numeric array entry: ${part}`);
      }
      return v;
    });
  }
  const v = Number(raw);
  if (!Number.isFinite(v)) {
    throw new ConfigEchoError(file, line, `unparseable value: ${raw}`);
  }
  return v;
}

export function requireNumber(echo: Map<string, EchoValue>, key: string): number {
  const v = echo.get(key);
  if (typeof v !== "number") throw new Error(`config echo missing numeric key ${key}`);
  return v;
}
