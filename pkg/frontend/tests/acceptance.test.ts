/**
 * Acceptance criterion A13: render the level-5 nonstandard cloud, produced
 * by the analysis CLI as CSV, to 2d and 3d PNG images.  The legend count
 * must equal the CSV row count and the input file must not be modified.
 */

import { execFileSync } from "node:child_process";
import { createHash } from "node:crypto";
import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";
import { fileURLToPath } from "node:url";
import { afterAll, describe, expect, it } from "vitest";
import { run } from "../src/cli.js";
import { render } from "../src/render.js";
import { parseCloud } from "../src/schema.js";

const HERE = path.dirname(fileURLToPath(import.meta.url));
const REPO_ROOT = path.resolve(HERE, "..", "..");
const PNG_MAGIC = [0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a];

function sha256(file: string): string {
  return createHash("sha256").update(fs.readFileSync(file)).digest("hex");
}

describe("A13", () => {
  const dir = fs.mkdtempSync(path.join(os.tmpdir(), "plotview-a13-"));
  afterAll(() => fs.rmSync(dir, { recursive: true, force: true }));

  it("renders the level-5 cloud in both modes without touching the input", async () => {
    const digits: string[][] = [];
    for (const i of [0, 2]) {
      for (const y of [0, 1, 2, 3, 9]) digits.push([String(i), String(y)]);
    }
    const config = path.join(dir, "system.json");
    fs.writeFileSync(config, JSON.stringify({
      matrix: [["2", "1"], ["0", "5/3"]],
      digits,
    }));
    const csvPath = path.join(dir, "cloud5.csv");
    execFileSync("python3",
                 ["-m", "ratile.cli", "tile", config, "--k", "5",
                  "--out", csvPath],
                 { cwd: REPO_ROOT, stdio: "pipe" });
    const rowCount = fs.readFileSync(csvPath, "utf-8").trim().split("\n").length - 1;
    const checksum = sha256(csvPath);

    for (const mode of ["2d", "3d"] as const) {
      const out = path.join(dir, `cloud5-${mode}.png`);
      const code = await run([csvPath, "--mode", mode, "--out", out]);
      expect(code).toBe(0);
      const bytes = fs.readFileSync(out);
      expect(Array.from(bytes.subarray(0, 8))).toEqual(PNG_MAGIC);
      expect(bytes.length).toBeGreaterThan(10000);
    }

    const legend = render(parseCloud(fs.readFileSync(csvPath, "utf-8")), "2d");
    expect(legend.legendPoints).toBe(rowCount);
    expect(sha256(csvPath)).toBe(checksum);
    console.log(`A13: PASS - ${rowCount} rows rendered to 2d and 3d PNGs, ` +
                "legend matches, input checksum unchanged");
  }, 600000);
});
