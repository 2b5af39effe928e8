// Shapes of the JSON bridge traffic (see src/mpstlab/schemas/bridge.schema.json).

export type MergeCriterion = 'plain' | 'full';
export type CommModel = 'sync' | 'orderedAsync' | 'unorderedAsync';

export interface SemanticsConfig {
  merge: MergeCriterion;
  commModel: CommModel;
  allowParallel: boolean;
  allowFixedPoint: boolean;
  allowKleeneStar: boolean;
  requireWellBranched: boolean;
  requireWellChannelled: boolean;
  explorationMaxStates: number;
  bisimDepthBound: number;
}

export type BridgeOp =
  | 'parse' | 'check' | 'project' | 'msc' | 'localsFsm' | 'lts'
  | 'enabled' | 'step' | 'bisim' | 'examples' | 'presets';

export interface BridgeRequest {
  op: BridgeOp;
  session?: string;
  configA?: SemanticsConfig;
  configB?: SemanticsConfig;
  state?: ConfigurationState;
  label?: string;
}

export interface BridgeErrorInfo {
  kind: string;
  message: string;
  line?: number;
  column?: number;
  participant?: string;
  [key: string]: unknown;
}

export interface BridgeResponse<P = unknown> {
  ok: boolean;
  payload: P | null;
  error: BridgeErrorInfo | null;
}

export interface ConfigurationState {
  locals: Record<string, string>;
  buffer: BufferState;
  token: unknown;
}

export type BufferState =
  | { model: 'sync' }
  | { model: 'orderedAsync'; queues: Array<{ from: string; to: string; labels: string[] }> }
  | { model: 'unorderedAsync'; messages: Array<{ from: string; to: string; label: string; count: number }> };

export interface ViolationInfo {
  kind: string;
  subjects: string[];
  location: string;
  message: string;
}

export interface ParsePayload { global: string; participants: string[] }
export interface CheckPayload { violations: ViolationInfo[]; warnings: string[] }
export interface ProjectPayload { locals: Record<string, string> }
export interface MscPayload { mermaid: string }
export interface LocalsFsmPayload { dots: Record<string, string> }
export interface LtsPayload { stateCount: number; edgeCount: number; truncated: boolean; dot: string }

export interface EnabledMove { label: string; successor: ConfigurationState }
export interface EnabledPayload {
  state: ConfigurationState;
  labels: EnabledMove[];
  terminal: 'clean' | 'stuck' | null;
}

export interface VerdictInfo {
  result: 'bisimilar' | 'notBisimilar' | 'inconclusiveDepthBound';
  depthUsed: number;
  evidence: string[] | null;
  evidenceSide?: 'a' | 'b' | null;
  note: string | null;
}

export type BisimSide = { locals: Record<string, string> } | { error: BridgeErrorInfo };
export interface BisimPayload { a: BisimSide; b: BisimSide; verdict: VerdictInfo | null }

export interface ExamplesPayload { examples: Array<{ name: string; session: string }> }
export interface PresetsPayload { presets: Record<string, SemanticsConfig> }
