/**
 * Reader for the solver's binary snapshot container.
 *
 * Layout (little-endian):
 *   0   magic   8 bytes "LAYRFLOW"
 *   8   version uint32 (1)
 *   12  n1      uint32
 *   16  n2      uint32
 *   20  n3      uint32
 *   24  time    float64
 *   32  omega   (n3+1)*n2*n1 float64, C order (x1 fastest)
 *   ..  uMean   (n3+1)*2 float64
 *
 * Any mismatch is rejected with the byte offset of the first inconsistency.
 */

import { readFileSync } from "fs";

export const MAGIC = "LAYRFLOW";
export const VERSION = 1;
const HEADER_BYTES = 32;

export class SnapshotError extends Error {
  constructor(public readonly file: string, public readonly offset: number, detail: string) {
    super(`${file}: byte ${offset}: ${detail}`);
  }
}

export interface Snapshot {
  n1: number;
  n2: number;
  n3: number;
  time: number;
  /** flattened (n3+1, n2, n1), x1 fastest */
  omega: Float64Array;
  /** flattened (n3+1, 2), node-major */
  uMean: Float64Array;
}

export function readSnapshot(file: string): Snapshot {
  const buf = readFileSync(file);
  if (buf.length < HEADER_BYTES) {
    throw new SnapshotError(file, buf.length, "file truncated inside the header");
  }
  const magic = buf.subarray(0, 8).toString("latin1");
  if (magic !== MAGIC) {
    throw new SnapshotError(file, 0, `bad magic "${magic}"`);
  }
  const version = buf.readUInt32LE(8);
  if (version !== VERSION) {
    throw new SnapshotError(file, 8, `unsupported version ${version}`);
  }
  const n1 = buf.readUInt32LE(12);
  const n2 = buf.readUInt32LE(16);
  const n3 = buf.readUInt32LE(20);
  if (n1 < 8 || n2 < 8 || n3 < 2) {
    throw new SnapshotError(file, 12, `inadmissible grid dims (${n1}, ${n2}, ${n3})`);
  }
  const time = buf.readDoubleLE(24);
  const nOmega = (n3 + 1) * n2 * n1;
  const nMean = (n3 + 1) * 2;
  const expected = HEADER_BYTES + 8 * (nOmega + nMean);
  if (buf.length !== expected) {
    throw new SnapshotError(
      file,
      Math.min(buf.length, expected),
      `expected ${expected} bytes, found ${buf.length}`
    );
  }
  const omega = new Float64Array(nOmega);
  for (let i = 0; i < nOmega; i++) omega[i] = buf.readDoubleLE(HEADER_BYTES + 8 * i);
  const uMean = new Float64Array(nMean);
  const base = HEADER_BYTES + 8 * nOmega;
  for (let i = 0; i < nMean; i++) uMean[i] = buf.readDoubleLE(base + 8 * i);
  return { n1, n2, n3, time, omega, uMean };
}

/** Extract one horizontal layer of the vorticity as a row-major n2 x n1 block. */
export function layerSlice(snap: Snapshot, layer: number): Float64Array {
  const layers = snap.n3 + 1;
  if (!Number.isInteger(layer) || layer < 0 || layer >= layers) {
    throw new RangeError(`layer ${layer} outside [0, ${layers - 1}]`);
  }
  const size = snap.n1 * snap.n2;
  return snap.omega.subarray(layer * size, (layer + 1) * size).slice();
}
