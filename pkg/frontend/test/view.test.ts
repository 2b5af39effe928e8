// @vitest-environment happy-dom
// DOM-level checks: the rendered panes show bridge payloads verbatim, and
// the criterion flows are observable in the document.

import { describe, expect, it } from 'vitest';

import { AppStore } from '../src/store.js';
import { View } from '../src/view.js';
import { fixtureTransport } from './helpers.js';

async function mount() {
  const root = document.createElement('main');
  document.body.replaceChildren(root);
  const store = new AppStore(fixtureTransport());
  new View(store, root);
  await store.init();
  await store.applyPreset('a', 'VeryGentleIntroMPST');
  await store.applyPreset('b', 'GentleIntroMPAsyncST');
  return { store, root };
}

function textOf(root: HTMLElement, selector: string): string {
  const node = root.querySelector(selector);
  return node ? (node.textContent ?? '') : '';
}

describe('document rendering', () => {
  it('replaces the error box with the locals table when merge becomes full', async () => {
    const { store, root } = await mount();
    await store.loadExample('branching_tasks');

    const errorText = textOf(root, '#pane-locals-b .error-box');
    expect(errorText).toContain("Error raised by 'Semantics B: Locals'");
    expect(errorText).toContain('[Plain Merge] - projection undefined for [pC]');
    expect(root.querySelector('#pane-locals-b table')).toBeNull();

    await store.setConfigField('b', 'merge', 'full');
    expect(root.querySelector('#pane-locals-b .error-box')).toBeNull();
    const cells = Array.from(root.querySelectorAll('#pane-locals-b .local-text'))
      .map((cell) => cell.textContent);
    expect(cells).toContain('(pB?TaskA + pB?TaskB)');

    // displayed locals are the bridge strings, character for character
    const payload = store.state.sides.b.locals!.locals;
    const rows = Array.from(root.querySelectorAll('#pane-locals-b tr')).map((row) => [
      row.querySelector('.participant')!.textContent,
      row.querySelector('.local-text')!.textContent,
    ]);
    expect(rows).toEqual(Object.entries(payload));
  });

  it('shows the global text and step buttons from bridge payloads only', async () => {
    const { store, root } = await mount();
    await store.loadExample('work_loop');

    expect(textOf(root, '#pane-global pre')).toBe(store.state.parse!.global);

    const buttons = Array.from(root.querySelectorAll('#pane-step-b .step-choice'))
      .map((button) => button.textContent);
    const offered = store.currentStep('b')!.payload.labels.map((m) => m.label);
    expect(buttons).toEqual(offered);

    await store.stepChoose('b', 'controllerworker!Quit');
    await store.stepChoose('b', 'controllerworker?Quit');
    expect(textOf(root, '#pane-step-b .terminal')).toBe('terminal state: clean');
  });

  it('renders the bisimulation verdict once both sides project', async () => {
    const { store, root } = await mount();
    await store.loadExample('work_loop');
    const verdict = store.state.bisim!.verdict!;
    expect(textOf(root, '#pane-bisim .verdict')).toBe(verdict.result);
  });
});
