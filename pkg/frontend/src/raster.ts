/**
 * Minimal software rasterizer: an RGBA pixel buffer with filled circles and
 * a 5x7 bitmap font, enough for scatter plots with a small legend.
 */

export interface Rgb {
  r: number;
  g: number;
  b: number;
}

const FONT: Record<string, number[]> = {
  "0": [0b01110, 0b10001, 0b10011, 0b10101, 0b11001, 0b10001, 0b01110],
  "1": [0b00100, 0b01100, 0b00100, 0b00100, 0b00100, 0b00100, 0b01110],
  "2": [0b01110, 0b10001, 0b00001, 0b00010, 0b00100, 0b01000, 0b11111],
  "3": [0b11110, 0b00001, 0b00001, 0b01110, 0b00001, 0b00001, 0b11110],
  "4": [0b00010, 0b00110, 0b01010, 0b10010, 0b11111, 0b00010, 0b00010],
  "5": [0b11111, 0b10000, 0b11110, 0b00001, 0b00001, 0b10001, 0b01110],
  "6": [0b00110, 0b01000, 0b10000, 0b11110, 0b10001, 0b10001, 0b01110],
  "7": [0b11111, 0b00001, 0b00010, 0b00100, 0b01000, 0b01000, 0b01000],
  "8": [0b01110, 0b10001, 0b10001, 0b01110, 0b10001, 0b10001, 0b01110],
  "9": [0b01110, 0b10001, 0b10001, 0b01111, 0b00001, 0b00010, 0b01100],
  p: [0b00000, 0b00000, 0b11110, 0b10001, 0b11110, 0b10000, 0b10000],
  o: [0b00000, 0b00000, 0b01110, 0b10001, 0b10001, 0b10001, 0b01110],
  i: [0b00100, 0b00000, 0b01100, 0b00100, 0b00100, 0b00100, 0b01110],
  n: [0b00000, 0b00000, 0b11110, 0b10001, 0b10001, 0b10001, 0b10001],
  t: [0b01000, 0b01000, 0b11100, 0b01000, 0b01000, 0b01001, 0b00110],
  s: [0b00000, 0b00000, 0b01111, 0b10000, 0b01110, 0b00001, 0b11110],
  d: [0b00001, 0b00001, 0b01111, 0b10001, 0b10001, 0b10001, 0b01111],
  " ": [0, 0, 0, 0, 0, 0, 0],
};

export class Raster {
  readonly width: number;
  readonly height: number;
  readonly data: Uint8Array;

  constructor(width: number, height: number, background: Rgb) {
    this.width = width;
    this.height = height;
    this.data = new Uint8Array(width * height * 4);
    for (let i = 0; i < width * height; i++) {
      this.data[4 * i] = background.r;
      this.data[4 * i + 1] = background.g;
      this.data[4 * i + 2] = background.b;
      this.data[4 * i + 3] = 255;
    }
  }

  setPixel(x: number, y: number, color: Rgb): void {
    if (x < 0 || y < 0 || x >= this.width || y >= this.height) return;
    const i = 4 * (y * this.width + x);
    this.data[i] = color.r;
    this.data[i + 1] = color.g;
    this.data[i + 2] = color.b;
    this.data[i + 3] = 255;
  }

  fillCircle(cx: number, cy: number, radius: number, color: Rgb): void {
    const r = Math.max(radius, 0.5);
    const lo = Math.floor(-r);
    const hi = Math.ceil(r);
    for (let dy = lo; dy <= hi; dy++) {
      for (let dx = lo; dx <= hi; dx++) {
        if (dx * dx + dy * dy <= r * r) {
          this.setPixel(Math.round(cx) + dx, Math.round(cy) + dy, color);
        }
      }
    }
  }

  /** Draw text in the built-in 5x7 font; unknown characters are skipped. */
  drawText(x: number, y: number, text: string, color: Rgb, scale = 2): void {
    let cursor = x;
    for (const ch of text) {
      const glyph = FONT[ch];
      if (glyph !== undefined) {
        for (let row = 0; row < 7; row++) {
          for (let col = 0; col < 5; col++) {
            if ((glyph[row] >> (4 - col)) & 1) {
              for (let sy = 0; sy < scale; sy++) {
                for (let sx = 0; sx < scale; sx++) {
                  this.setPixel(cursor + col * scale + sx,
                                y + row * scale + sy, color);
                }
              }
            }
          }
        }
      }
      cursor += 6 * scale;
    }
  }
}

/** Dark-blue to yellow ramp over [0, 1], loosely following viridis anchors. */
export function colorRamp(t: number): Rgb {
  const anchors: Rgb[] = [
    { r: 68, g: 1, b: 84 },
    { r: 59, g: 82, b: 139 },
    { r: 33, g: 145, b: 140 },
    { r: 94, g: 201, b: 98 },
    { r: 253, g: 231, b: 37 },
  ];
  const clamped = Math.min(Math.max(t, 0), 1);
  const pos = clamped * (anchors.length - 1);
  const lo = Math.min(Math.floor(pos), anchors.length - 2);
  const frac = pos - lo;
  const a = anchors[lo];
  const b = anchors[lo + 1];
  return {
    r: Math.round(a.r + frac * (b.r - a.r)),
    g: Math.round(a.g + frac * (b.g - a.g)),
    b: Math.round(a.b + frac * (b.b - a.b)),
  };
}
