/**
 * File contracts shared with the index-construction engine: the headline CSV it
 * emits (`date,headline,goldstein_scale,url`, RFC 4180 quoting) and the
 * line-delimited JSON score file its sentiment loader consumes.
 */

export interface HeadlineRow {
  date: string;
  headline: string;
  goldstein: number;
  url: string;
}

export interface ScoreRow {
  date: string;
  headline: string;
  p_neg: number;
  p_neu: number;
  p_pos: number;
  goldstein: number;
}

/** Minimal RFC 4180 parser: quoted fields, doubled quotes, newlines inside quotes. */
export function parseCsv(text: string): string[][] {
  const rows: string[][] = [];
  let row: string[] = [];
  let field = "";
  let inQuotes = false;
  let i = 0;
  const pushField = () => {
    row.push(field);
    field = "";
  };
  const pushRow = () => {
    pushField();
    rows.push(row);
    row = [];
  };
  while (i < text.length) {
    const c = text[i];
    if (inQuotes) {
      if (c === '"') {
        if (text[i + 1] === '"') {
          field += '"';
          i += 2;
          continue;
        }
        inQuotes = false;
        i += 1;
        continue;
      }
      field += c;
      i += 1;
      continue;
    }
    if (c === '"') {
      inQuotes = true;
      i += 1;
    } else if (c === ",") {
      pushField();
      i += 1;
    } else if (c === "\n") {
      pushRow();
      i += 1;
    } else if (c === "\r") {
      i += 1; // swallow; \r\n handled by the \n branch
    } else {
      field += c;
      i += 1;
    }
  }
  if (field.length > 0 || row.length > 0) {
    pushRow();
  }
  return rows;
}

export function parseHeadlineCsv(text: string): HeadlineRow[] {
  const rows = parseCsv(text);
  if (rows.length === 0) {
    throw new Error("headline file is empty");
  }
  const header = rows[0];
  const need = ["date", "headline", "goldstein_scale", "url"];
  const index: Record<string, number> = {};
  for (const name of need) {
    const at = header.indexOf(name);
    if (at < 0) {
      throw new Error(`headline file is missing column '${name}'`);
    }
    index[name] = at;
  }
  const out: HeadlineRow[] = [];
  for (const row of rows.slice(1)) {
    if (row.length === 1 && row[0] === "") {
      continue; // trailing blank line
    }
    const goldstein = Number(row[index.goldstein_scale]);
    if (!Number.isFinite(goldstein)) {
      throw new Error(`unparseable goldstein_scale: '${row[index.goldstein_scale]}'`);
    }
    out.push({
      date: row[index.date],
      headline: row[index.headline],
      goldstein,
      url: row[index.url],
    });
  }
  if (out.length === 0) {
    throw new Error("headline file has a header but no rows");
  }
  return out;
}

/** Serialize one score row with the schema's exact key order. */
export function toJsonLine(row: ScoreRow): string {
  return JSON.stringify({
    date: row.date,
    headline: row.headline,
    p_neg: row.p_neg,
    p_neu: row.p_neu,
    p_pos: row.p_pos,
    goldstein: row.goldstein,
  });
}
