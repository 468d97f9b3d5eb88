/** Byte-faithful extraction of display values from raw response text.
 *
 * Numbers shown in the dashboard must match the service's bytes exactly, so
 * they are cut out of the original JSON text instead of being re-serialized
 * (JavaScript would render 0.0 as "0" and drift from the wire format).
 */

const NUMBER_TOKEN = "-?(?:0|[1-9][0-9]*)(?:\\.[0-9]+)?(?:[eE][+-]?[0-9]+)?";

/** The raw token of a top-level-unique numeric field, e.g. `"0.0"`. */
export function rawNumber(raw: string, key: string): string {
  const pattern = new RegExp(`"${key}"\\s*:\\s*(${NUMBER_TOKEN})`);
  const match = raw.match(pattern);
  if (!match) {
    throw new Error(`field "${key}" not found as a number in response text`);
  }
  return match[1];
}

/** Every raw numeric token for a repeated field, in document order. */
export function rawNumbers(raw: string, key: string): string[] {
  const pattern = new RegExp(`"${key}"\\s*:\\s*(${NUMBER_TOKEN})`, "g");
  const out: string[] = [];
  for (const match of raw.matchAll(pattern)) {
    out.push(match[1]);
  }
  return out;
}

/** Minor currency units -> major units for axis labels (display-only). */
export function minorToMajor(minor: number): string {
  return (minor / 100).toFixed(2);
}
