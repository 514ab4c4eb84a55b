/**
 * Session state for the examiner workbench.
 *
 * Pure data and transition helpers: every transition returns a fresh state
 * and never mutates history (append-only, never reordered). Scores are
 * always the verbatim numbers from a service response; the UI never
 * computes its own.
 */

export type ModelName = 'linear' | 'biomech' | 'external';

/** Slider bounds: the deformation models are validated on this ratio range. */
export const ALPHA_MIN = 0.2;
export const ALPHA_MAX = 0.7;

export interface Scores {
  hamming: number;
  filter_distance: number;
  shift: number;
}

export interface HistoryEntry {
  model: ModelName;
  /** Slider ratio, or null when a target mask upload bypassed the slider. */
  alpha: number | null;
  scores: Scores;
}

export interface SessionState {
  probeLoaded: boolean;
  galleryLoaded: boolean;
  model: ModelName;
  alpha: number;
  baseline: Scores | null;
  latest: Scores | null;
  history: readonly HistoryEntry[];
}

export function createSession(): SessionState {
  return {
    probeLoaded: false,
    galleryLoaded: false,
    model: 'biomech',
    alpha: 0.35,
    baseline: null,
    latest: null,
    history: [],
  };
}

export function clampAlpha(alpha: number): number {
  if (Number.isNaN(alpha)) return ALPHA_MIN;
  return Math.min(Math.max(alpha, ALPHA_MIN), ALPHA_MAX);
}

export function withPairLoaded(
  state: SessionState,
  probe: boolean,
  gallery: boolean,
): SessionState {
  return { ...state, probeLoaded: probe, galleryLoaded: gallery };
}

export function withModel(state: SessionState, model: ModelName): SessionState {
  return { ...state, model };
}

export function withAlpha(state: SessionState, alpha: number): SessionState {
  return { ...state, alpha: clampAlpha(alpha) };
}

export function recordBaseline(state: SessionState, scores: Scores): SessionState {
  return { ...state, baseline: scores };
}

/** Append one what-if result; prior entries are untouched and keep order. */
export function recordResult(
  state: SessionState,
  model: ModelName,
  alpha: number | null,
  scores: Scores,
): SessionState {
  const entry: HistoryEntry = Object.freeze({ model, alpha, scores });
  return { ...state, latest: scores, history: [...state.history, entry] };
}

/** Matching requires both panes; the slider needs only the probe. */
export function matchingEnabled(state: SessionState): boolean {
  return state.probeLoaded && state.galleryLoaded;
}

export function exportEnabled(state: SessionState): boolean {
  return state.history.length > 0;
}

/**
 * Positive when the latest deformation lowered the Hamming distance below
 * the undeformed baseline. Purely a presentation of two service scores.
 */
export function hammingImprovement(state: SessionState): number | null {
  if (!state.baseline || !state.latest) return null;
  return state.baseline.hamming - state.latest.hamming;
}
