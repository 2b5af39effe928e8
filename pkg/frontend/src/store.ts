// Application state: every displayed fact is a verbatim bridge payload.
// The store issues requests and records responses; it never computes
// semantics on its own.

import { BridgeClient, Transport } from './bridge.js';
import type {
  BisimPayload, BridgeErrorInfo, CheckPayload, EnabledPayload, ExamplesPayload,
  LocalsFsmPayload, LtsPayload, MscPayload, ParsePayload, PresetsPayload,
  ProjectPayload, SemanticsConfig, BridgeOp,
} from './types.js';

export type Side = 'a' | 'b';

export interface StepEntry {
  /** Label taken to reach this point; null for the initial configuration. */
  label: string | null;
  payload: EnabledPayload;
}

export interface SidePanes {
  check: CheckPayload | null;
  locals: ProjectPayload | null;
  projectionError: BridgeErrorInfo | null;
  localsFsm: LocalsFsmPayload | null;
  lts: LtsPayload | null;
  ltsError: BridgeErrorInfo | null;
  stepHistory: StepEntry[];
  stepError: BridgeErrorInfo | null;
}

export interface AppState {
  sessionText: string;
  selectedExample: string | null;
  parse: ParsePayload | null;
  parseError: BridgeErrorInfo | null;
  msc: MscPayload | null;
  configs: Record<Side, SemanticsConfig>;
  sides: Record<Side, SidePanes>;
  bisim: BisimPayload | null;
  examples: Array<{ name: string; session: string }>;
  presets: Record<string, SemanticsConfig>;
}

export const DEFAULT_CONFIG: SemanticsConfig = {
  merge: 'plain',
  commModel: 'sync',
  allowParallel: true,
  allowFixedPoint: true,
  allowKleeneStar: true,
  requireWellBranched: false,
  requireWellChannelled: false,
  explorationMaxStates: 10000,
  bisimDepthBound: 100,
};

function emptySide(): SidePanes {
  return {
    check: null,
    locals: null,
    projectionError: null,
    localsFsm: null,
    lts: null,
    ltsError: null,
    stepHistory: [],
    stepError: null,
  };
}

export class AppStore {
  readonly state: AppState;
  private client: BridgeClient;
  private listeners: Array<() => void> = [];

  constructor(transport: Transport, configA?: SemanticsConfig, configB?: SemanticsConfig) {
    this.client = new BridgeClient(transport);
    this.state = {
      sessionText: '',
      selectedExample: null,
      parse: null,
      parseError: null,
      msc: null,
      configs: {
        a: configA ?? { ...DEFAULT_CONFIG },
        b: configB ?? { ...DEFAULT_CONFIG },
      },
      sides: { a: emptySide(), b: emptySide() },
      bisim: null,
      examples: [],
      presets: {},
    };
  }

  subscribe(listener: () => void): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private notify(): void {
    for (const listener of this.listeners) listener();
  }

  async init(): Promise<void> {
    const examples = await this.client.call<ExamplesPayload>('examples', { op: 'examples' });
    if (examples?.ok && examples.payload) this.state.examples = examples.payload.examples;
    const presets = await this.client.call<PresetsPayload>('presets', { op: 'presets' });
    if (presets?.ok && presets.payload) this.state.presets = presets.payload.presets;
    this.notify();
  }

  async loadExample(name: string): Promise<void> {
    const found = this.state.examples.find((e) => e.name === name);
    if (!found) return;
    this.state.selectedExample = name;
    await this.setSession(found.session);
  }

  async setSession(text: string): Promise<void> {
    this.state.sessionText = text;
    await this.refreshAll();
  }

  async applyPreset(side: Side, presetName: string): Promise<void> {
    const preset = this.state.presets[presetName];
    if (!preset) return;
    this.state.configs[side] = { ...preset };
    await this.refreshSide(side);
    await this.refreshBisim();
    this.notify();
  }

  async setConfigField<K extends keyof SemanticsConfig>(
    side: Side, field: K, value: SemanticsConfig[K],
  ): Promise<void> {
    this.state.configs[side] = { ...this.state.configs[side], [field]: value };
    await this.refreshSide(side);
    await this.refreshBisim();
    this.notify();
  }

  async refreshAll(): Promise<void> {
    const session = this.state.sessionText;
    const parse = await this.client.call<ParsePayload>('parse', { op: 'parse', session });
    if (parse) {
      this.state.parse = parse.ok ? parse.payload : null;
      this.state.parseError = parse.ok ? null : parse.error;
    }
    if (this.state.parseError) {
      // nothing downstream is defined for an unparseable session
      this.state.msc = null;
      this.state.sides = { a: emptySide(), b: emptySide() };
      this.state.bisim = null;
      this.notify();
      return;
    }
    const msc = await this.client.call<MscPayload>('msc', { op: 'msc', session });
    if (msc) this.state.msc = msc.ok ? msc.payload : null;
    await this.refreshSide('a');
    await this.refreshSide('b');
    await this.refreshBisim();
    this.notify();
  }

  async refreshSide(side: Side): Promise<void> {
    const session = this.state.sessionText;
    if (!session.trim() || this.state.parseError) {
      this.state.sides[side] = emptySide();
      this.notify();
      return;
    }
    const configA = this.state.configs[side];
    const panes = emptySide();
    const slot = (op: string) => `${side}:${op}`;

    const check = await this.client.call<CheckPayload>(
      slot('check'), { op: 'check', session, configA });
    if (check?.ok) panes.check = check.payload;

    const project = await this.client.call<ProjectPayload>(
      slot('project'), { op: 'project', session, configA });
    if (project) {
      if (project.ok) {
        panes.locals = project.payload;
      } else {
        panes.projectionError = project.error;
      }
    }

    if (panes.locals) {
      const fsm = await this.client.call<LocalsFsmPayload>(
        slot('localsFsm'), { op: 'localsFsm', session, configA });
      if (fsm?.ok) panes.localsFsm = fsm.payload;

      const lts = await this.client.call<LtsPayload>(
        slot('lts'), { op: 'lts', session, configA });
      if (lts) {
        panes.lts = lts.ok ? lts.payload : null;
        panes.ltsError = lts.ok ? null : lts.error;
      }

      const enabled = await this.client.call<EnabledPayload>(
        slot('step'), { op: 'enabled', session, configA });
      if (enabled?.ok && enabled.payload) {
        panes.stepHistory = [{ label: null, payload: enabled.payload }];
      }
    }

    this.state.sides[side] = panes;
    this.notify();
  }

  async refreshBisim(): Promise<void> {
    if (this.state.parseError || !this.state.sessionText.trim()) {
      this.state.bisim = null;
      return;
    }
    const response = await this.client.call<BisimPayload>('bisim', {
      op: 'bisim',
      session: this.state.sessionText,
      configA: this.state.configs.a,
      configB: this.state.configs.b,
    });
    if (response) this.state.bisim = response.ok ? response.payload : null;
    this.notify();
  }

  currentStep(side: Side): StepEntry | null {
    const history = this.state.sides[side].stepHistory;
    return history.length ? history[history.length - 1]! : null;
  }

  async stepChoose(side: Side, label: string): Promise<void> {
    const current = this.currentStep(side);
    if (!current) return;
    const response = await this.client.call<EnabledPayload>(`${side}:stepmove`, {
      op: 'step',
      configA: this.state.configs[side],
      state: current.payload.state,
      label,
    });
    if (!response) return;
    if (response.ok && response.payload) {
      this.state.sides[side].stepHistory.push({ label, payload: response.payload });
      this.state.sides[side].stepError = null;
    } else {
      this.state.sides[side].stepError = response.error;
    }
    this.notify();
  }

  stepUndo(side: Side): void {
    const history = this.state.sides[side].stepHistory;
    if (history.length > 1) {
      history.pop();
      this.state.sides[side].stepError = null;
      this.notify();
    }
  }
}
