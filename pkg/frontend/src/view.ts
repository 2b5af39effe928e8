// DOM layer: renders the store verbatim and forwards user events back.
// Pane visibility follows definedness (an undefined pane is replaced by its
// error box or hidden entirely).

import { renderDotInto, renderMermaidInto } from './diagrams.js';
import type { AppStore, Side } from './store.js';
import type { SemanticsConfig } from './types.js';

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K, className?: string, text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function pane(title: string, ...children: HTMLElement[]): HTMLElement {
  const box = el('section', 'pane');
  box.append(el('h3', 'pane-title', title), ...children);
  return box;
}

function errorBox(message: string): HTMLElement {
  return el('div', 'error-box', message);
}

function option(text: string, value: string, selected = false): HTMLOptionElement {
  const node = el('option', undefined, text);
  node.value = value;
  node.selected = selected;
  return node;
}

const SETTINGS: Array<{
  group: string;
  items: Array<{ label: string; kind: 'radio' | 'check'; field: keyof SemanticsConfig; value?: string }>;
}> = [
  {
    group: 'Merge Criteria',
    items: [
      { label: 'Plain', kind: 'radio', field: 'merge', value: 'plain' },
      { label: 'Full', kind: 'radio', field: 'merge', value: 'full' },
    ],
  },
  {
    group: 'Communication Model',
    items: [
      { label: 'Synchronous', kind: 'radio', field: 'commModel', value: 'sync' },
      { label: 'Ordered Asynchronous', kind: 'radio', field: 'commModel', value: 'orderedAsync' },
      { label: 'Unordered Asynchronous', kind: 'radio', field: 'commModel', value: 'unorderedAsync' },
    ],
  },
  {
    group: 'Parallel Composition',
    items: [{ label: 'Parallel Composition', kind: 'check', field: 'allowParallel' }],
  },
  {
    group: 'Recursion Scheme',
    items: [
      { label: 'Fixed Point', kind: 'check', field: 'allowFixedPoint' },
      { label: 'Kleene Star', kind: 'check', field: 'allowKleeneStar' },
    ],
  },
  {
    group: 'Extra Requirements',
    items: [
      { label: 'Well Branched', kind: 'check', field: 'requireWellBranched' },
      { label: 'Well Channelled', kind: 'check', field: 'requireWellChannelled' },
    ],
  },
];

export class View {
  constructor(private store: AppStore, private root: HTMLElement) {
    store.subscribe(() => this.render());
  }

  render(): void {
    const state = this.store.state;
    this.root.replaceChildren();

    // --- session bar -------------------------------------------------------
    const bar = el('div', 'session-bar');
    const picker = el('select');
    picker.append(option('choose an example…', ''));
    for (const example of state.examples) {
      picker.append(option(example.name, example.name,
        example.name === state.selectedExample));
    }
    picker.onchange = () => {
      if (picker.value) void this.store.loadExample(picker.value);
    };
    const editor = el('textarea');
    editor.id = 'session-editor';
    editor.rows = 4;
    editor.value = state.sessionText;
    const apply = el('button', 'apply', 'Apply session');
    apply.onclick = () => void this.store.setSession(editor.value);
    bar.append(picker, editor, apply);
    this.root.append(bar);

    // --- always-visible widgets -------------------------------------------
    const fixed = el('div', 'fixed-row');
    const globalPane = state.parseError
      ? pane('Global', errorBox(`parse error: ${state.parseError.message}`))
      : pane('Global', el('pre', 'global-text', state.parse?.global ?? ''));
    globalPane.id = 'pane-global';
    fixed.append(globalPane);

    const mscHost = el('div', 'diagram');
    if (state.msc) void renderMermaidInto(mscHost, state.msc.mermaid);
    const mscPane = pane('Message Sequence Chart', mscHost);
    mscPane.id = 'pane-msc';
    fixed.append(mscPane);
    this.root.append(fixed);

    // --- the two semantics columns -----------------------------------------
    const columns = el('div', 'columns');
    columns.append(this.column('a'), this.column('b'));
    this.root.append(columns);

    // --- bisimulation across columns ---------------------------------------
    const bisim = el('div');
    bisim.id = 'pane-bisim';
    if (state.bisim?.verdict) {
      const verdict = state.bisim.verdict;
      bisim.append(el('p', `verdict ${verdict.result}`, verdict.result));
      bisim.append(el('p', 'depth', `depth used: ${verdict.depthUsed}`));
      if (verdict.evidence) {
        bisim.append(el('p', 'evidence',
          `evidence (side ${verdict.evidenceSide}): ${verdict.evidence.join(' , ')}`));
      }
      if (verdict.note) bisim.append(el('p', 'note', verdict.note));
    } else if (state.bisim) {
      bisim.append(el('p', 'note', 'no verdict: a side failed to project'));
    }
    this.root.append(pane('Bisimulation', bisim));
  }

  private column(side: Side): HTMLElement {
    const state = this.store.state;
    const panes = state.sides[side];
    const column = el('div', 'column');
    column.id = `column-${side}`;
    column.append(el('h2', undefined, `Semantics ${side.toUpperCase()}`));

    // settings checkboxes
    const settings = el('div', 'settings');
    const presetRow = el('div', 'preset-row');
    const presetPicker = el('select');
    presetPicker.append(option('preset…', ''));
    for (const name of Object.keys(state.presets)) presetPicker.append(option(name, name));
    presetPicker.onchange = () => {
      if (presetPicker.value) void this.store.applyPreset(side, presetPicker.value);
    };
    presetRow.append(presetPicker);
    settings.append(presetRow);
    const config = state.configs[side];
    for (const group of SETTINGS) {
      const box = el('fieldset', 'setting-group');
      box.append(el('legend', undefined, group.group));
      for (const item of group.items) {
        const row = el('label', 'setting');
        const input = el('input');
        input.type = item.kind === 'radio' ? 'radio' : 'checkbox';
        input.name = `${side}-${item.field}`;
        if (item.kind === 'radio') {
          input.checked = config[item.field] === item.value;
          input.onchange = () => {
            void this.store.setConfigField(side, item.field,
              item.value as SemanticsConfig[typeof item.field]);
          };
        } else {
          input.checked = Boolean(config[item.field]);
          input.onchange = () => {
            void this.store.setConfigField(side, item.field,
              input.checked as SemanticsConfig[typeof item.field]);
          };
        }
        row.append(input, el('span', undefined, item.label));
        box.append(row);
      }
      settings.append(box);
    }
    column.append(pane('Settings', settings));

    // check pane: invisible while empty
    if (panes.check && (panes.check.violations.length || panes.check.warnings.length)) {
      const list = el('div');
      for (const warning of panes.check.warnings) list.append(el('p', 'warning', warning));
      for (const violation of panes.check.violations) {
        list.append(errorBox(`Error raised by 'Semantics ${side.toUpperCase()}': ${violation.message}`));
      }
      const checkPane = pane('Check', list);
      checkPane.id = `pane-check-${side}`;
      column.append(checkPane);
    }

    // locals, or the projection error box in their place
    const localsBody = el('div');
    localsBody.id = `pane-locals-${side}`;
    if (panes.projectionError) {
      localsBody.append(errorBox(
        `Error raised by 'Semantics ${side.toUpperCase()}: Locals': ${panes.projectionError.message}`));
    } else if (panes.locals) {
      const table = el('table', 'locals-table');
      for (const [participant, local] of Object.entries(panes.locals.locals)) {
        const row = el('tr');
        row.append(el('td', 'participant', participant), el('td', 'local-text', local));
        table.append(row);
      }
      localsBody.append(table);
    }
    column.append(pane('Locals', localsBody));

    if (panes.localsFsm) {
      const host = el('div');
      for (const [participant, dot] of Object.entries(panes.localsFsm.dots)) {
        const slot = el('div', 'diagram');
        host.append(el('h4', undefined, participant), slot);
        void renderDotInto(slot, dot);
      }
      column.append(pane('Local FSMs', host));
    }

    // step-by-step: the interactive semantic iterator
    const step = el('div');
    step.id = `pane-step-${side}`;
    const current = this.store.currentStep(side);
    if (current) {
      const stateBox = el('div', 'step-state');
      for (const [participant, local] of Object.entries(current.payload.state.locals)) {
        stateBox.append(el('div', 'step-local', `${participant}: ${local}`));
      }
      step.append(stateBox);
      if (current.payload.terminal) {
        step.append(el('p', `terminal ${current.payload.terminal}`,
          `terminal state: ${current.payload.terminal}`));
      }
      const buttons = el('div', 'step-buttons');
      for (const move of current.payload.labels) {
        const button = el('button', 'step-choice', move.label);
        button.onclick = () => void this.store.stepChoose(side, move.label);
        buttons.append(button);
      }
      const undo = el('button', 'step-undo', 'undo');
      undo.disabled = state.sides[side].stepHistory.length <= 1;
      undo.onclick = () => this.store.stepUndo(side);
      buttons.append(undo);
      step.append(buttons);
      if (panes.stepError) step.append(errorBox(panes.stepError.message));
      column.append(pane('Step-by-Step', step));
    }

    if (panes.lts) {
      const meta = el('p', 'lts-meta',
        `${panes.lts.stateCount} states, ${panes.lts.edgeCount} edges`
        + (panes.lts.truncated ? ' (truncated)' : ''));
      const host = el('div', 'diagram');
      void renderDotInto(host, panes.lts.dot);
      const ltsPane = pane('Local Compositional FSM', meta, host);
      ltsPane.id = `pane-lts-${side}`;
      column.append(ltsPane);
    }

    return column;
  }
}
