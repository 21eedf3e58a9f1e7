/**
 * Parsing and validation of point-cloud CSV exports.
 *
 * The expected shape is a header `re_1,...,re_n,badic,embed` followed by one
 * row per point: n exact rational real coordinates, a digit-string label and
 * a decimal embedding coordinate in [0, 1).
 */

import Papa from "papaparse";

export class CsvError extends Error {}

export interface PointRow {
  /** real coordinates, converted to floats for rendering */
  coords: number[];
  /** digit-string label, kept verbatim */
  badic: string;
  /** series embedding coordinate in [0, 1) */
  embed: number;
  /** 1-based line number in the source file (header is line 1) */
  line: number;
}

export interface Cloud {
  dimension: number;
  rows: PointRow[];
}

/** Convert an exact rational literal ("-7/3", "4") to a float. */
export function parseRational(text: string): number {
  const m = /^(-?\d+)(?:\/(\d+))?$/.exec(text.trim());
  if (!m) throw new CsvError(`not a rational: ${JSON.stringify(text)}`);
  const num = Number(m[1]);
  const den = m[2] === undefined ? 1 : Number(m[2]);
  if (den === 0) throw new CsvError(`zero denominator: ${JSON.stringify(text)}`);
  return num / den;
}

function expectedHeader(n: number): string[] {
  const head = [];
  for (let i = 1; i <= n; i++) head.push(`re_${i}`);
  head.push("badic", "embed");
  return head;
}

export function parseCloud(text: string): Cloud {
  if (text.trim() === "") {
    throw new CsvError("empty CSV input");
  }
  const parsed = Papa.parse<string[]>(text.trim(), { skipEmptyLines: true });
  if (parsed.errors.length > 0) {
    const first = parsed.errors[0];
    const line = first.row === undefined ? "?" : String(first.row + 1);
    throw new CsvError(`CSV syntax error at line ${line}: ${first.message}`);
  }
  const records = parsed.data;
  const header = records[0];
  const n = header.length - 2;
  if (n < 1 || header.join(",") !== expectedHeader(n).join(",")) {
    throw new CsvError(
      `unexpected header ${JSON.stringify(header.join(","))}; ` +
      `want re_1,...,re_n,badic,embed`);
  }
  if (records.length === 1) {
    throw new CsvError("CSV has a header but no data rows");
  }
  const rows: PointRow[] = [];
  const badLines: string[] = [];
  for (let i = 1; i < records.length; i++) {
    const line = i + 1;
    const rec = records[i];
    try {
      if (rec.length !== n + 2) {
        throw new CsvError(`expected ${n + 2} fields, got ${rec.length}`);
      }
      const coords = rec.slice(0, n).map(parseRational);
      const badic = rec[n];
      if (badic === "") throw new CsvError("empty digit string");
      const embed = Number(rec[n + 1]);
      if (!Number.isFinite(embed) || embed < 0 || embed >= 1) {
        throw new CsvError(`embed must be in [0, 1): ${rec[n + 1]}`);
      }
      rows.push({ coords, badic, embed, line });
    } catch (err) {
      if (err instanceof CsvError) {
        badLines.push(`line ${line}: ${err.message}`);
      } else {
        throw err;
      }
    }
  }
  if (badLines.length > 0) {
    const shown = badLines.slice(0, 10).join("; ");
    const more = badLines.length > 10 ? ` (and ${badLines.length - 10} more)` : "";
    throw new CsvError(`malformed rows: ${shown}${more}`);
  }
  return { dimension: n, rows };
}
