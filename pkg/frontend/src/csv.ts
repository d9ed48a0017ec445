/**
 * CSV reading for msint outputs.
 *
 * The simulator writes plain comma-separated tables with an optional block of
 * `#`-prefixed metadata/truncation comments before the header row.
 */

export interface CsvTable {
  columns: string[];
  /** column name -> numeric values, in file order */
  data: Map<string, number[]>;
  /** raw `#` comment lines with the marker stripped */
  comments: string[];
}

export class MissingColumnError extends Error {
  constructor(column: string, source: string) {
    super(`column '${column}' not found in ${source} `);
    this.name = "MissingColumnError";
  }
}

export class MalformedCsvError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "MalformedCsvError";
  }
}

export function parseCsv(text: string, source = "<csv>"): CsvTable {
  const comments: string[] = [];
  const rows: string[] = [];
  for (const rawLine of text.split(/\r?\n/)) {
    const line = rawLine.trim();
    if (line.length === 0) continue;
    if (line.startsWith("#")) {
      comments.push(line.replace(/^#\s?/, ""));
      continue;
    }
    rows.push(line);
  }
  if (rows.length === 0) {
    throw new MalformedCsvError(`${source} contains no header row`);
  }
  const columns = rows[0].split(",").map((c) => c.trim());
  const data = new Map<string, number[]>(columns.map((c) => [c, []]));
  for (let i = 1; i < rows.length; i++) {
    const parts = rows[i].split(",");
    if (parts.length !== columns.length) {
      throw new MalformedCsvError(
        `${source} row ${i + 1} has ${parts.length} fields, expected ${columns.length}`
      );
    }
    for (let j = 0; j < columns.length; j++) {
      const value = Number(parts[j]);
      if (!Number.isFinite(value)) {
        throw new MalformedCsvError(`${source} row ${i + 1}, column '${columns[j]}' is not numeric`);
      }
      data.get(columns[j])!.push(value);
    }
  }
  return { columns, data, comments };
}

export function requireColumn(table: CsvTable, column: string, source: string): number[] {
  const values = table.data.get(column);
  if (values === undefined) {
    throw new MissingColumnError(column, source);
  }
  return values;
}
