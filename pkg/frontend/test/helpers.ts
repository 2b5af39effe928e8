import { readFileSync } from 'node:fs';
import { dirname, join } from 'node:path';
import { fileURLToPath } from 'node:url';

import type { Transport } from '../src/bridge.js';
import type { BridgeRequest, BridgeResponse } from '../src/types.js';

/** JSON.stringify with recursively sorted object keys; mirrors the compact
 *  sorted form the fixture recorder uses. */
export function sortedStringify(value: unknown): string {
  return JSON.stringify(sortKeys(value));
}

function sortKeys(value: unknown): unknown {
  if (Array.isArray(value)) return value.map(sortKeys);
  if (value !== null && typeof value === 'object') {
    const out: Record<string, unknown> = {};
    for (const key of Object.keys(value as object).sort()) {
      out[key] = sortKeys((value as Record<string, unknown>)[key]);
    }
    return out;
  }
  return value;
}

const fixturePath = join(dirname(fileURLToPath(import.meta.url)), 'fixtures', 'bridge_fixtures.json');

export function loadFixtures(): Record<string, BridgeResponse> {
  return JSON.parse(readFileSync(fixturePath, 'utf-8'));
}

/** Transport replaying recorded responses; unknown requests fail loudly so
 *  coverage gaps surface as test failures, not silent nulls. */
export function fixtureTransport(log?: BridgeRequest[]): Transport {
  const fixtures = loadFixtures();
  return async (request) => {
    log?.push(request);
    const key = sortedStringify(request);
    const response = fixtures[key];
    if (!response) {
      throw new Error(`no recorded fixture for request: ${key.slice(0, 200)}`);
    }
    return structuredClone(response);
  };
}
