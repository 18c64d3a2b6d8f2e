// Display helpers. Numbers pass through String() verbatim: the UI never
// rounds, scales or recomputes a metric the API already provides.

export const ABSENT = "—"; // em dash placeholder for missing values

export function verbatim(value: number | string | null | undefined, unit = ""): string {
  if (value === null || value === undefined) return ABSENT;
  const text = String(value);
  return unit ? `${text} ${unit}` : text;
}

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

// epoch seconds to an ISO-like UTC label; a presentation of the timestamp,
// not a derived metric
export function utcLabel(epochSeconds: number): string {
  return new Date(epochSeconds * 1000).toISOString().replace("T", " ").replace(/\.\d+Z$/, " UTC");
}
