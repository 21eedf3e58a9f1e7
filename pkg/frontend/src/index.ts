export { CsvError, parseCloud, parseRational } from "./schema.js";
export type { Cloud, PointRow } from "./schema.js";
export { render, writePng } from "./render.js";
export type { Mode, RenderResult } from "./render.js";
export { Raster, colorRamp } from "./raster.js";
export { run } from "./cli.js";
