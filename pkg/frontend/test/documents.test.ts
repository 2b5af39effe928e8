// @vitest-environment happy-dom
// The diagram documents the bridge ships must be valid for the real
// renderers the UI vendors: Graphviz accepts every DOT document and
// Mermaid accepts every sequence chart.

import { Graphviz } from '@hpcc-js/wasm-graphviz';
import { describe, expect, it } from 'vitest';

import type { BridgeResponse, LocalsFsmPayload, LtsPayload, MscPayload } from '../src/types.js';
import { loadFixtures } from './helpers.js';

const fixtures = loadFixtures();

function payloadsOf(op: string): unknown[] {
  const out: unknown[] = [];
  for (const [key, response] of Object.entries(fixtures)) {
    if (key.includes(`"op":"${op}"`) && (response as BridgeResponse).ok) {
      out.push((response as BridgeResponse).payload);
    }
  }
  return out;
}

describe('bridge documents render', () => {
  it('every DOT document is accepted by graphviz', async () => {
    const graphviz = await Graphviz.load();
    const documents: string[] = [];
    for (const payload of payloadsOf('localsFsm')) {
      documents.push(...Object.values((payload as LocalsFsmPayload).dots));
    }
    for (const payload of payloadsOf('lts')) {
      documents.push((payload as LtsPayload).dot);
    }
    expect(documents.length).toBeGreaterThan(4);
    for (const dot of documents) {
      const svg = graphviz.dot(dot);
      expect(svg).toContain('<svg');
    }
  });

  it('every sequence chart is accepted by mermaid', async () => {
    const mermaid = (await import('mermaid')).default;
    mermaid.initialize({ startOnLoad: false });
    const charts = payloadsOf('msc') as MscPayload[];
    expect(charts.length).toBeGreaterThan(1);
    for (const chart of charts) {
      const result = await mermaid.parse(chart.mermaid);
      expect(result.diagramType).toBe('sequence');
    }
  });
});
