#!/usr/bin/env node
/**
 * plotview: render a point-cloud CSV export as a scatter image.
 *
 * Usage: plotview <csv> --mode 2d|3d --out image.png
 */

import * as fs from "node:fs";
import yargs from "yargs";
import { CsvError, parseCloud } from "./schema.js";
import { Mode, render, writePng } from "./render.js";

export async function run(argv: string[]): Promise<number> {
  const args = await yargs(argv)
    .usage("plotview <csv> --mode 2d|3d --out image.png")
    .command("$0 <csv>", "render a point-cloud CSV", (y) =>
      y.positional("csv", { type: "string", demandOption: true }))
    .option("mode", { choices: ["2d", "3d"] as const, default: "2d" as Mode })
    .option("out", { type: "string", demandOption: true })
    .strict()
    .exitProcess(false)
    .fail((msg) => {
      throw new CsvError(msg);
    })
    .parse();

  let text: string;
  try {
    text = fs.readFileSync(args.csv as string, "utf-8");
  } catch (err) {
    console.error(`error: cannot read ${args.csv}: ${(err as Error).message}`);
    return 2;
  }
  let result;
  try {
    const cloud = parseCloud(text);
    result = render(cloud, args.mode);
  } catch (err) {
    if (err instanceof CsvError) {
      console.error(`error: ${err.message}`);
      return 2;
    }
    throw err;
  }
  writePng(result.raster, args.out);
  console.log(`${result.legendPoints} points -> ${args.out} (${args.mode})`);
  return 0;
}

const invokedDirectly =
  process.argv[1] !== undefined &&
  import.meta.url === new URL(`file://${process.argv[1]}`).href;
if (invokedDirectly) {
  run(process.argv.slice(2)).then(
    (code) => process.exit(code),
    (err) => {
      console.error(`error: ${err?.message ?? err}`);
      process.exit(4);
    });
}
