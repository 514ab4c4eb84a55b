/**
 * Examiner workbench wiring: probe/gallery panes with mask overlays, model
 * and pupil-ratio controls driving the deform+match round trip, append-only
 * what-if history, and report export/import.
 *
 * Served from the toolkit service under /ui/; all computation happens on the
 * service side.
 */

import { circularTargetMask, deformProbe, matchPair, ServiceError } from './api.js';
import { debounce, LatestOnlyRunner } from './debounce.js';
import { applyReport, buildReport, parseReport, serializeReport } from './report.js';
import {
  ALPHA_MAX,
  ALPHA_MIN,
  clampAlpha,
  createSession,
  exportEnabled,
  hammingImprovement,
  matchingEnabled,
  recordBaseline,
  recordResult,
  withAlpha,
  withModel,
  withPairLoaded,
  type ModelName,
  type SessionState,
} from './state.js';

const SERVICE_BASE = new URL('..', window.location.href).href.replace(/\/$/, '');

interface PaneFiles {
  image: Blob | null;
  mask: Blob | null;
}

let state: SessionState = createSession();
const probe: PaneFiles = { image: null, mask: null };
const gallery: PaneFiles = { image: null, mask: null };
let uploadedTarget: Blob | null = null;
let deformedProbe: Blob | null = null;
const runner = new LatestOnlyRunner();

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
};

const banner = $('banner');
const probeCanvas = $('probe-canvas') as unknown as HTMLCanvasElement;
const galleryCanvas = $('gallery-canvas') as unknown as HTMLCanvasElement;
const slider = $('alpha-slider') as unknown as HTMLInputElement;
const alphaReadout = $('alpha-readout');
const modelSelect = $('model-select') as unknown as HTMLSelectElement;
const overlayToggle = $('overlay-toggle') as unknown as HTMLInputElement;
const scoreBox = $('scores');
const historyBody = $('history-body');
const exportButton = $('export-button') as unknown as HTMLButtonElement;

function showError(message: string): void {
  banner.textContent = message;
  banner.classList.remove('hidden');
}

function clearError(): void {
  banner.textContent = '';
  banner.classList.add('hidden');
}

async function drawPane(
  canvas: HTMLCanvasElement,
  image: Blob | null,
  mask: Blob | null,
): Promise<void> {
  const ctx = canvas.getContext('2d');
  if (!ctx) return;
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  if (!image) return;
  const bitmap = await createImageBitmap(image);
  canvas.width = bitmap.width;
  canvas.height = bitmap.height;
  ctx.drawImage(bitmap, 0, 0);
  if (mask && overlayToggle.checked) {
    const maskBitmap = await createImageBitmap(mask);
    ctx.globalAlpha = 0.25;
    ctx.globalCompositeOperation = 'screen';
    ctx.fillStyle = '#00ff88';
    const scratch = document.createElement('canvas');
    scratch.width = maskBitmap.width;
    scratch.height = maskBitmap.height;
    const sctx = scratch.getContext('2d')!;
    sctx.drawImage(maskBitmap, 0, 0);
    sctx.globalCompositeOperation = 'source-in';
    sctx.fillStyle = '#00ff88';
    sctx.fillRect(0, 0, scratch.width, scratch.height);
    ctx.drawImage(scratch, 0, 0);
    ctx.globalAlpha = 1.0;
    ctx.globalCompositeOperation = 'source-over';
  }
}

function renderScores(): void {
  const parts: string[] = [];
  if (state.baseline) {
    parts.push(
      `<div>baseline&nbsp; hamming <b>${String(state.baseline.hamming)}</b>` +
        ` · filter ${String(state.baseline.filter_distance)}</div>`,
    );
  }
  if (state.latest) {
    parts.push(
      `<div>current&nbsp;&nbsp; hamming <b>${String(state.latest.hamming)}</b>` +
        ` · filter ${String(state.latest.filter_distance)}` +
        ` · shift ${String(state.latest.shift)}</div>`,
    );
  }
  const gain = hammingImprovement(state);
  if (gain !== null) {
    const badge = gain > 0 ? '&#9650; improved' : gain < 0 ? '&#9660; worse' : '= unchanged';
    parts.push(`<div class="${gain > 0 ? 'good' : 'bad'}">${badge} vs baseline</div>`);
  }
  scoreBox.innerHTML = parts.join('') || '<div class="dim">no scores yet</div>';
}

function renderHistory(): void {
  historyBody.innerHTML = state.history
    .map(
      (e, i) =>
        `<tr><td>${i + 1}</td><td>${e.model}</td>` +
        `<td>${e.alpha === null ? 'mask upload' : e.alpha.toFixed(2)}</td>` +
        `<td>${String(e.scores.hamming)}</td><td>${String(e.scores.filter_distance)}</td></tr>`,
    )
    .join('');
  exportButton.disabled = !exportEnabled(state);
}

function renderControls(): void {
  const ready = matchingEnabled(state);
  slider.disabled = !ready;
  modelSelect.disabled = !ready;
  alphaReadout.textContent = state.alpha.toFixed(2);
}

function renderAll(): void {
  renderScores();
  renderHistory();
  renderControls();
}

async function fileOf(input: HTMLInputElement): Promise<Blob | null> {
  return input.files && input.files.length ? input.files[0] : null;
}

async function refreshBaseline(): Promise<void> {
  if (!probe.image || !probe.mask || !gallery.image || !gallery.mask) return;
  const scores = await matchPair(
    SERVICE_BASE,
    probe.image,
    probe.mask,
    gallery.image,
    gallery.mask,
  );
  state = recordBaseline(state, scores);
}

async function loadPair(): Promise<void> {
  clearError();
  probe.image = await fileOf($('probe-image') as unknown as HTMLInputElement);
  probe.mask = await fileOf($('probe-mask') as unknown as HTMLInputElement);
  gallery.image = await fileOf($('gallery-image') as unknown as HTMLInputElement);
  gallery.mask = await fileOf($('gallery-mask') as unknown as HTMLInputElement);
  await finishLoad();
}

async function loadDemoPair(): Promise<void> {
  clearError();
  const grab = async (name: string): Promise<Blob> => {
    const resp = await fetch(`demo/${name}`);
    if (!resp.ok) throw new Error(`demo asset ${name} missing (${resp.status})`);
    return resp.blob();
  };
  try {
    probe.image = await grab('probe.png');
    probe.mask = await grab('probe_mask.png');
    gallery.image = await grab('gallery.png');
    gallery.mask = await grab('gallery_mask.png');
  } catch (err) {
    showError(String(err));
    return;
  }
  await finishLoad();
}

async function finishLoad(): Promise<void> {
  deformedProbe = null;
  state = withPairLoaded(
    { ...createSession(), model: state.model, alpha: state.alpha },
    Boolean(probe.image && probe.mask),
    Boolean(gallery.image && gallery.mask),
  );
  await drawPane(probeCanvas, probe.image, probe.mask);
  await drawPane(galleryCanvas, gallery.image, gallery.mask);
  if (matchingEnabled(state)) {
    try {
      await refreshBaseline();
    } catch (err) {
      reportFailure(err);
    }
  }
  renderAll();
}

function reportFailure(err: unknown): void {
  if (err instanceof ServiceError) {
    showError(err.message); // service error/detail verbatim
  } else {
    showError(String(err));
  }
}

async function applyDeformation(): Promise<void> {
  if (!matchingEnabled(state) || !probe.image || !probe.mask) return;
  if (!gallery.image || !gallery.mask) return;
  clearError();
  const model = state.model;
  const alpha = uploadedTarget ? null : state.alpha;
  try {
    const target =
      uploadedTarget ??
      (await circularTargetMask(SERVICE_BASE, probe.mask, state.alpha));
    const deformed = await deformProbe(SERVICE_BASE, probe.image, probe.mask, target, model);
    const scores = await matchPair(SERVICE_BASE, deformed, target, gallery.image, gallery.mask);
    deformedProbe = deformed;
    state = recordResult(state, model, alpha, scores);
    await drawPane(probeCanvas, deformed, target);
    renderAll();
  } catch (err) {
    reportFailure(err); // keep the prior pane on failure
  }
}

const scheduleApply = debounce(() => runner.submit(applyDeformation), 250);

function wire(): void {
  $('load-button').addEventListener('click', () => void loadPair());
  $('demo-button').addEventListener('click', () => void loadDemoPair());

  slider.min = String(ALPHA_MIN);
  slider.max = String(ALPHA_MAX);
  slider.step = '0.01';
  slider.value = String(state.alpha);
  slider.addEventListener('input', () => {
    uploadedTarget = null;
    state = withAlpha(state, Number(slider.value));
    alphaReadout.textContent = state.alpha.toFixed(2);
    scheduleApply();
  });

  modelSelect.addEventListener('change', () => {
    state = withModel(state, modelSelect.value as ModelName);
    scheduleApply();
  });

  ($('target-upload') as unknown as HTMLInputElement).addEventListener('change', (ev) => {
    const input = ev.target as HTMLInputElement;
    uploadedTarget = input.files && input.files.length ? input.files[0] : null;
    if (uploadedTarget) scheduleApply();
  });

  overlayToggle.addEventListener('change', () => {
    void drawPane(probeCanvas, deformedProbe ?? probe.image, probe.mask);
    void drawPane(galleryCanvas, gallery.image, gallery.mask);
  });

  exportButton.addEventListener('click', () => void exportReport());
  $('import-input').addEventListener('change', (ev) => void importReport(ev));
}

async function exportReport(): Promise<void> {
  const report = serializeReport(buildReport(state));
  download('examiner-report.json', new Blob([report], { type: 'application/json' }));
  const snapshot = sideBySideSnapshot();
  if (snapshot) download('examiner-comparison.png', snapshot);
}

function sideBySideSnapshot(): Blob | null {
  if (!probeCanvas.width || !galleryCanvas.width) return null;
  const canvas = document.createElement('canvas');
  canvas.width = probeCanvas.width + galleryCanvas.width;
  canvas.height = Math.max(probeCanvas.height, galleryCanvas.height);
  const ctx = canvas.getContext('2d');
  if (!ctx) return null;
  ctx.drawImage(probeCanvas, 0, 0);
  ctx.drawImage(galleryCanvas, probeCanvas.width, 0);
  const data = canvas.toDataURL('image/png').split(',')[1];
  const bytes = Uint8Array.from(atob(data), (ch) => ch.charCodeAt(0));
  return new Blob([bytes], { type: 'image/png' });
}

function download(name: string, blob: Blob): void {
  const link = document.createElement('a');
  link.href = URL.createObjectURL(blob);
  link.download = name;
  link.click();
  URL.revokeObjectURL(link.href);
}

async function importReport(ev: Event): Promise<void> {
  const input = ev.target as HTMLInputElement;
  if (!input.files || !input.files.length) return;
  try {
    const report = parseReport(await input.files[0].text());
    state = applyReport(state, report);
    renderAll();
    clearError();
  } catch (err) {
    showError(String(err));
  }
}

wire();
renderAll();
