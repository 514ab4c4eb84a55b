/**
 * Examiner report: a JSON snapshot of the comparison session that
 * round-trips (export then import restores the what-if history exactly).
 */

import type { HistoryEntry, Scores, SessionState } from './state.js';

export interface ExaminerReport {
  kind: 'irisdeform-examiner-report';
  version: 1;
  baseline: Scores | null;
  history: HistoryEntry[];
}

export function buildReport(state: SessionState): ExaminerReport {
  return {
    kind: 'irisdeform-examiner-report',
    version: 1,
    baseline: state.baseline,
    history: [...state.history],
  };
}

export function serializeReport(report: ExaminerReport): string {
  return JSON.stringify(report, null, 2);
}

function isScores(x: unknown): x is Scores {
  if (typeof x !== 'object' || x === null) return false;
  const s = x as Record<string, unknown>;
  return (
    typeof s.hamming === 'number' &&
    typeof s.filter_distance === 'number' &&
    typeof s.shift === 'number'
  );
}

export function parseReport(text: string): ExaminerReport {
  let raw: unknown;
  try {
    raw = JSON.parse(text);
  } catch {
    throw new Error('report is not valid JSON');
  }
  const r = raw as Record<string, unknown>;
  if (r?.kind !== 'irisdeform-examiner-report' || r?.version !== 1) {
    throw new Error('not an examiner report (kind/version mismatch)');
  }
  if (!Array.isArray(r.history)) throw new Error('report history missing');
  for (const entry of r.history as Array<Record<string, unknown>>) {
    if (!isScores(entry?.scores)) throw new Error('report history entry malformed');
  }
  if (r.baseline !== null && !isScores(r.baseline)) {
    throw new Error('report baseline malformed');
  }
  return raw as ExaminerReport;
}

/** Restore an exported session's baseline and history onto a state. */
export function applyReport(state: SessionState, report: ExaminerReport): SessionState {
  const history = report.history.map((e) => Object.freeze({ ...e }));
  const last = history.length ? history[history.length - 1] : null;
  return {
    ...state,
    baseline: report.baseline,
    latest: last ? last.scores : state.latest,
    history,
  };
}
