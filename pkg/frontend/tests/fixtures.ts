import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import { Enveloped } from "../src/model.js";

const here = dirname(fileURLToPath(import.meta.url));

/** Recorded bytes of real service responses, as the wire delivered them. */
export function fixtureRaw(name: string): string {
  return readFileSync(join(here, "fixtures", `${name}.json`), "utf-8");
}

export function fixture<T>(name: string): Enveloped<T> {
  const raw = fixtureRaw(name);
  return { data: JSON.parse(raw) as T, raw };
}
