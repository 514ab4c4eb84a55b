/**
 * Thin client for the deformation service. Every displayed number originates
 * here, passed through verbatim from the service JSON; errors surface the
 * service's own error/detail payload.
 */

import type { Scores } from './state.js';

export class ServiceError extends Error {
  constructor(
    readonly status: number,
    readonly errorName: string,
    readonly detail: string,
  ) {
    super(`${status} ${errorName}: ${detail}`);
  }
}

async function raiseForStatus(resp: Response): Promise<void> {
  if (resp.ok) return;
  let name = 'Error';
  let detail = resp.statusText;
  try {
    const body = (await resp.json()) as { error?: string; detail?: string };
    if (body.error) name = body.error;
    if (body.detail) detail = body.detail;
  } catch {
    // non-JSON error body: keep the status text
  }
  throw new ServiceError(resp.status, name, detail);
}

export async function health(base: string): Promise<boolean> {
  const resp = await fetch(`${base}/health`);
  return resp.ok;
}

/** POST /mask/target with operation=circular: the slider's target shape. */
export async function circularTargetMask(
  base: string,
  probeMask: Blob,
  alpha: number,
  eyelid?: Blob,
): Promise<Blob> {
  const form = new FormData();
  form.append('mask', probeMask, 'mask.png');
  form.append('operation', 'circular');
  form.append('alpha', String(alpha));
  if (eyelid) form.append('eyelid', eyelid, 'eyelid.png');
  const resp = await fetch(`${base}/mask/target`, { method: 'POST', body: form });
  await raiseForStatus(resp);
  return resp.blob();
}

/** POST /deform: returns the deformed probe as a PNG blob. */
export async function deformProbe(
  base: string,
  image: Blob,
  mask: Blob,
  targetMask: Blob,
  model: string,
): Promise<Blob> {
  const form = new FormData();
  form.append('image', image, 'image.png');
  form.append('mask', mask, 'mask.png');
  form.append('target_mask', targetMask, 'target_mask.png');
  form.append('model', model);
  const resp = await fetch(`${base}/deform`, { method: 'POST', body: form });
  await raiseForStatus(resp);
  return resp.blob();
}

/** POST /match: the one and only source of displayed scores. */
export async function matchPair(
  base: string,
  imageA: Blob,
  maskA: Blob,
  imageB: Blob,
  maskB: Blob,
): Promise<Scores> {
  const form = new FormData();
  form.append('image_a', imageA, 'a.png');
  form.append('mask_a', maskA, 'a_mask.png');
  form.append('image_b', imageB, 'b.png');
  form.append('mask_b', maskB, 'b_mask.png');
  const resp = await fetch(`${base}/match`, { method: 'POST', body: form });
  await raiseForStatus(resp);
  return (await resp.json()) as Scores;
}
