// Minimal CSV reader for the sweep/aggregate/report files the CLI writes:
// comma-separated, LF line endings, no quoting needed for these schemas.

export type Row = Record<string, string>;

export function parseCsv(text: string): Row[] {
  const lines = text.split("\n").filter((line) => line.trim().length > 0);
  if (lines.length < 1) {
    throw new Error("empty CSV");
  }
  const header = lines[0].split(",");
  return lines.slice(1).map((line, i) => {
    const cells = line.split(",");
    if (cells.length !== header.length) {
      throw new Error(`row ${i + 2}: expected ${header.length} cells, got ${cells.length}`);
    }
    const row: Row = {};
    header.forEach((name, j) => (row[name] = cells[j]));
    return row;
  });
}

export function requireColumns(rows: Row[], columns: string[], what: string): void {
  for (const col of columns) {
    if (rows.length === 0 || !(col in rows[0])) {
      throw new Error(`${what}: missing required column '${col}'`);
    }
  }
}
