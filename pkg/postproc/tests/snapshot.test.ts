import { mkdtempSync, readFileSync, writeFileSync } from "fs";
import { tmpdir } from "os";
import { join } from "path";
import { describe, expect, it } from "vitest";

import { layerSlice, readSnapshot, SnapshotError } from "../src/snapshot";

const FIXTURES = join(__dirname, "fixtures", "run");
const SNAP0 = join(FIXTURES, "snapshot_000000.bin");

function corrupted(mutate: (buf: Buffer) => Buffer): string {
  const dir = mkdtempSync(join(tmpdir(), "postproc-snap-"));
  const file = join(dir, "bad.bin");
  writeFileSync(file, mutate(Buffer.from(readFileSync(SNAP0))));
  return file;
}

describe("snapshot reader", () => {
  it("parses the declared layout", () => {
    const snap = readSnapshot(SNAP0);
    expect([snap.n1, snap.n2, snap.n3]).toEqual([32, 32, 16]);
    expect(snap.time).toBe(0);
    expect(snap.omega.length).toBe(17 * 32 * 32);
    expect(snap.uMean.length).toBe(17 * 2);
  });

  it("initial cellular state has zero wall layers and interior extrema", () => {
    const snap = readSnapshot(SNAP0);
    const bottom = layerSlice(snap, 0);
    const top = layerSlice(snap, snap.n3);
    expect(Math.max(...bottom.map(Math.abs))).toBe(0);
    expect(Math.max(...top.map(Math.abs))).toBe(0);
    const mid = layerSlice(snap, 8);
    expect(Math.max(...mid.map(Math.abs))).toBeCloseTo(1.0, 10);
  });

  it("evolved snapshot carries the advanced time", () => {
    const snap = readSnapshot(join(FIXTURES, "snapshot_000050.bin"));
    expect(snap.time).toBeCloseTo(0.25, 12);
  });

  it("rejects a bad magic at offset 0", () => {
    const file = corrupted((buf) => {
      buf.write("XXXXXXXX", 0, "latin1");
      return buf;
    });
    try {
      readSnapshot(file);
      expect.unreachable();
    } catch (err) {
      expect(err).toBeInstanceOf(SnapshotError);
      expect((err as SnapshotError).offset).toBe(0);
    }
  });

  it("rejects an unsupported version at offset 8", () => {
    const file = corrupted((buf) => {
      buf.writeUInt32LE(99, 8);
      return buf;
    });
    try {
      readSnapshot(file);
      expect.unreachable();
    } catch (err) {
      expect((err as SnapshotError).offset).toBe(8);
    }
  });

  it("rejects truncation with the offset of the missing bytes", () => {
    const file = corrupted((buf) => buf.subarray(0, buf.length - 24) as Buffer);
    expect(() => readSnapshot(file)).toThrow(/expected \d+ bytes/);
  });

  it("rejects out-of-range layer indices", () => {
    const snap = readSnapshot(SNAP0);
    expect(() => layerSlice(snap, 17)).toThrow(RangeError);
    expect(() => layerSlice(snap, -1)).toThrow(RangeError);
  });
});
