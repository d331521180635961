import { existsSync, mkdtempSync, readFileSync, writeFileSync } from "fs";
import { tmpdir } from "os";
import { join } from "path";
import { describe, expect, it } from "vitest";

import { main } from "../src/cli";
import { parseConfigEcho, requireNumber } from "../src/config";
import { FigureKind, renderFigure } from "../src/figures";

const RUN = join(__dirname, "fixtures", "run");

function outDir(): string {
  return mkdtempSync(join(tmpdir(), "postproc-fig-"));
}

describe("figure rendering from a completed cellular-vortex run", () => {
  it("renders all five figure kinds without error", () => {
    const dir = outDir();
    const code = main(["all", "--run-dir", RUN, "--output-dir", dir]);
    expect(code).toBe(0);
    for (const name of ["timeseries", "slices", "profile", "coercivity", "gap"]) {
      const path = join(dir, `${name}.svg`);
      expect(existsSync(path), `${name}.svg missing`).toBe(true);
      const content = readFileSync(path, "utf8");
      expect(content.startsWith("<svg ")).toBe(true);
      expect(content.trimEnd().endsWith("</svg>")).toBe(true);
    }
  });

  it("timeseries includes the analytic overlay", () => {
    const dir = outDir();
    expect(main(["all", "--run-dir", RUN, "--output-dir", dir])).toBe(0);
    const svg = readFileSync(join(dir, "timeseries.svg"), "utf8");
    expect(svg).toContain("analytic decay");
    expect(svg).toContain("stroke-dasharray");
    expect(svg).toContain("kinetic energy");
    expect(svg).toContain("enstrophy");
  });

  it("is deterministic: identical inputs give byte-identical images", () => {
    const d1 = outDir();
    const d2 = outDir();
    expect(main(["all", "--run-dir", RUN, "--output-dir", d1])).toBe(0);
    expect(main(["all", "--run-dir", RUN, "--output-dir", d2])).toBe(0);
    for (const name of ["timeseries", "slices", "profile", "coercivity", "gap"]) {
      const a = readFileSync(join(d1, `${name}.svg`));
      const b = readFileSync(join(d2, `${name}.svg`));
      expect(a.equals(b), `${name}.svg differs between renders`).toBe(true);
    }
  });

  it("initial cellular snapshot shows the checkerboard sign pattern", () => {
    const dir = outDir();
    const out = join(dir, "slices.svg");
    renderFigure({
      kind: "slices",
      inputs: [join(RUN, "snapshot_000000.bin")],
      output: out,
      layers: [8],
    });
    const svg = readFileSync(out, "utf8");
    // a cellular vortex layer contains both strongly positive (red) and
    // strongly negative (blue) cells
    expect(svg).toContain("rgb(178,24,43)");
    expect(svg).toContain("rgb(33,102,172)");
  });
});

describe("error handling", () => {
  it("empty CSV: error, and no file is written", () => {
    const dir = outDir();
    const empty = join(dir, "empty.csv");
    writeFileSync(empty, "");
    const out = join(dir, "fig.svg");
    expect(() =>
      renderFigure({ kind: "timeseries", inputs: [empty], output: out })
    ).toThrow(/empty/);
    expect(existsSync(out)).toBe(false);
  });

  it("layer index outside the grid is rejected", () => {
    const dir = outDir();
    const out = join(dir, "fig.svg");
    expect(() =>
      renderFigure({
        kind: "slices",
        inputs: [join(RUN, "snapshot_000000.bin")],
        output: out,
        layers: [99],
      })
    ).toThrow(RangeError);
    expect(existsSync(out)).toBe(false);
  });

  it("cli reports usage errors with exit code 2", () => {
    expect(main(["frobnicate"])).toBe(2);
    expect(main(["timeseries"])).toBe(2);
    expect(main([])).toBe(2);
  });

  it("cli reports missing inputs with exit code 1", () => {
    const dir = outDir();
    expect(main(["timeseries", "--input", join(dir, "nope.csv"), "--output", join(dir, "f.svg")])).toBe(1);
  });

  it("cli creates missing output directories", () => {
    const dir = join(outDir(), "nested", "figs");
    expect(main(["all", "--run-dir", RUN, "--output-dir", dir])).toBe(0);
    expect(existsSync(join(dir, "timeseries.svg"))).toBe(true);
    const single = join(outDir(), "deep", "one.svg");
    expect(main(["gap", "--input", join(RUN, "stability_gap.csv"), "--output", single])).toBe(0);
    expect(existsSync(single)).toBe(true);
  });

  it("every single-figure command works standalone", () => {
    const dir = outDir();
    const cases: [FigureKind, string][] = [
      ["timeseries", join(RUN, "diagnostics.csv")],
      ["slices", join(RUN, "snapshot_000050.bin")],
      ["profile", join(RUN, "profile.txt")],
      ["coercivity", join(RUN, "coercivity.csv")],
      ["gap", join(RUN, "stability_gap.csv")],
    ];
    for (const [kind, input] of cases) {
      const out = join(dir, `${kind}.svg`);
      expect(main([kind, "--input", input, "--output", out])).toBe(0);
      expect(existsSync(out)).toBe(true);
    }
  });
});

describe("config echo reader", () => {
  it("parses the solver's resolved configuration", () => {
    const echo = parseConfigEcho(join(RUN, "config.resolved.toml"));
    expect(echo.get("eos.preset")).toBe("ideal-monoatomic");
    expect(requireNumber(echo, "grid.n1")).toBe(32);
    expect(requireNumber(echo, "eos.mu0")).toBeCloseTo(0.05, 12);
    expect(echo.get("solver.dealias")).toBe(true);
    expect(Array.isArray(echo.get("experiment.epsilons"))).toBe(true);
  });
});
