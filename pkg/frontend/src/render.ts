/**
 * Scatter rendering of point clouds.
 *
 * Points live in n real coordinates plus the series embedding coordinate;
 * the 2d view projects onto the first two of those axes, the 3d view takes
 * the first three and applies a fixed rotation with mild perspective.
 * Color always encodes the embedding coordinate.
 */

import * as fs from "node:fs";
import { PNG } from "pngjs";
import { Cloud } from "./schema.js";
import { colorRamp, Raster } from "./raster.js";

export type Mode = "2d" | "3d";

export interface RenderResult {
  raster: Raster;
  /** point count shown in the legend, always equal to the CSV row count */
  legendPoints: number;
  legendText: string;
}

const WIDTH = 900;
const HEIGHT = 900;
const MARGIN = 40;

function axesOf(cloud: Cloud, mode: Mode): number[][] {
  return cloud.rows.map((row) => {
    const axes = [...row.coords, row.embed];
    while (axes.length < (mode === "3d" ? 3 : 2)) axes.push(0);
    return axes;
  });
}

function ranges(points: number[][], dims: number): [number, number][] {
  const out: [number, number][] = [];
  for (let d = 0; d < dims; d++) {
    let lo = Infinity;
    let hi = -Infinity;
    for (const p of points) {
      if (p[d] < lo) lo = p[d];
      if (p[d] > hi) hi = p[d];
    }
    if (!(hi > lo)) hi = lo + 1;
    out.push([lo, hi]);
  }
  return out;
}

export function render(cloud: Cloud, mode: Mode): RenderResult {
  const raster = new Raster(WIDTH, HEIGHT, { r: 17, g: 17, b: 24 });
  const points = axesOf(cloud, mode);
  const dims = mode === "3d" ? 3 : 2;
  const span = ranges(points, dims);
  const unit = points.map((p) =>
    p.slice(0, dims).map((v, d) => (v - span[d][0]) / (span[d][1] - span[d][0])));
  const radius = cloud.rows.length > 20000 ? 1 : cloud.rows.length > 2000 ? 2 : 4;

  if (mode === "2d") {
    cloud.rows.forEach((row, i) => {
      const x = MARGIN + unit[i][0] * (WIDTH - 2 * MARGIN);
      const y = HEIGHT - MARGIN - unit[i][1] * (HEIGHT - 2 * MARGIN);
      raster.fillCircle(x, y, radius, colorRamp(row.embed));
    });
  } else {
    const yaw = Math.PI / 5;
    const pitch = Math.PI / 7;
    const projected = unit.map((p, i) => {
      const cx = p[0] - 0.5;
      const cy = p[1] - 0.5;
      const cz = p[2] - 0.5;
      const x1 = cx * Math.cos(yaw) + cz * Math.sin(yaw);
      const z1 = -cx * Math.sin(yaw) + cz * Math.cos(yaw);
      const y1 = cy * Math.cos(pitch) - z1 * Math.sin(pitch);
      const z2 = cy * Math.sin(pitch) + z1 * Math.cos(pitch);
      const persp = 1 / (1.8 - z2);
      return { x: x1 * persp, y: y1 * persp, depth: z2, index: i };
    });
    projected.sort((a, b) => a.depth - b.depth);
    for (const p of projected) {
      const x = WIDTH / 2 + p.x * (WIDTH - 2 * MARGIN);
      const y = HEIGHT / 2 - p.y * (HEIGHT - 2 * MARGIN);
      raster.fillCircle(x, y, radius, colorRamp(cloud.rows[p.index].embed));
    }
  }

  const legendText = `${cloud.rows.length} points ${mode}`;
  raster.drawText(MARGIN / 2, MARGIN / 2, legendText, { r: 230, g: 230, b: 230 });
  return { raster, legendPoints: cloud.rows.length, legendText };
}

export function writePng(raster: Raster, path: string): void {
  const png = new PNG({ width: raster.width, height: raster.height });
  raster.data.forEach((v, i) => {
    png.data[i] = v;
  });
  fs.writeFileSync(path, PNG.sync.write(png));
}
