/**
 * Dashboard state: the target draft, intervention toggles and multiplier
 * overrides, and request sequencing.
 *
 * The target draft is kept on the simplex at all times: every edit
 * renormalizes, so the payload built for POST /steer can never fail the
 * server's simplex validation. Multiplier overrides are factors in
 * [0.25, 4] on a log-scaled slider, applied on top of the catalog's own
 * edit multipliers so an untouched slider sends the catalog verbatim.
 */

import {
  Distribution,
  Intervention,
  ROLES,
  Role,
  RoleShares,
  SteerRequest,
  WhatIfResult,
} from "./api.js";

export const MULTIPLIER_MIN = 0.25;
export const MULTIPLIER_MAX = 4.0;

/** Target draft plus per-role tolerance bands, always full mappings. */
export interface TargetDraft {
  shares: Distribution;
  tolerance: Distribution;
}

export interface UiState {
  selectedSnapshot: number | null;
  target: TargetDraft;
  enabled: Record<string, boolean>;
  factors: Record<string, number>;
  horizon: number;
  maxPlanLen: number;
  lastTrajectory: WhatIfResult | null;
}

function zeros(): Distribution {
  const out = {} as Distribution;
  for (const role of ROLES) {
    out[role] = 0;
  }
  return out;
}

export function uniformDistribution(): Distribution {
  const out = {} as Distribution;
  for (const role of ROLES) {
    out[role] = 1 / ROLES.length;
  }
  return out;
}

function clampShare(value: number): number {
  return Number.isFinite(value) && value > 0 ? value : 0;
}

/**
 * Project arbitrary shares onto the simplex: negatives and non-finite
 * values become 0, then the vector is scaled to sum to 1. An all-zero
 * draft falls back to the uniform distribution rather than dividing by 0.
 */
export function renormalized(shares: RoleShares): Distribution {
  const clamped = zeros();
  let total = 0;
  for (const role of ROLES) {
    const v = clampShare(shares[role] ?? 0);
    clamped[role] = v;
    total += v;
  }
  if (total <= 0) {
    return uniformDistribution();
  }
  const out = {} as Distribution;
  for (const role of ROLES) {
    out[role] = clamped[role] / total;
  }
  return out;
}

/**
 * Apply one slider edit: pin the edited role to the clamped value and
 * rescale the remaining roles to absorb the rest, so the draft stays on
 * the simplex without disturbing the share the user just set.
 */
export function editTargetShare(
  draft: TargetDraft,
  role: Role,
  value: number,
): TargetDraft {
  const pinned = Math.min(1, clampShare(value));
  const rest = 1 - pinned;
  let restTotal = 0;
  for (const other of ROLES) {
    if (other !== role) {
      restTotal += draft.shares[other];
    }
  }
  const shares = zeros();
  shares[role] = pinned;
  for (const other of ROLES) {
    if (other === role) {
      continue;
    }
    shares[other] =
      restTotal > 0
        ? (draft.shares[other] / restTotal) * rest
        : rest / (ROLES.length - 1);
  }
  return { shares: renormalized(shares), tolerance: draft.tolerance };
}

export function editTargetTolerance(
  draft: TargetDraft,
  role: Role,
  value: number,
): TargetDraft {
  const tolerance = { ...draft.tolerance };
  tolerance[role] = clampShare(value);
  return { shares: draft.shares, tolerance };
}

/** Start the draft from the community's current distribution. */
export function draftFromCurrent(current: RoleShares | null): TargetDraft {
  return {
    shares: current === null ? uniformDistribution() : renormalized(current),
    tolerance: zeros(),
  };
}

/**
 * The distance the engine minimizes, read out live while the operator
 * drags sliders: half the L1 gap, 0 exactly when target equals current.
 * This is a readout of two displayed vectors, not a projection.
 */
export function residualDistance(a: RoleShares, b: RoleShares): number {
  let total = 0;
  for (const role of ROLES) {
    total += Math.abs((a[role] ?? 0) - (b[role] ?? 0));
  }
  return total / 2;
}

/** Slider position in [0, 1] to a multiplier factor in [0.25, 4]. */
export function sliderToFactor(position: number): number {
  const t = Math.min(1, Math.max(0, position));
  return MULTIPLIER_MIN * Math.pow(MULTIPLIER_MAX / MULTIPLIER_MIN, t);
}

/** Inverse of sliderToFactor; out-of-range factors clamp to the ends. */
export function factorToSlider(factor: number): number {
  const f = Math.min(MULTIPLIER_MAX, Math.max(MULTIPLIER_MIN, factor));
  return Math.log(f / MULTIPLIER_MIN) / Math.log(MULTIPLIER_MAX / MULTIPLIER_MIN);
}

/**
 * Catalog entries selected in the what-if panel, with each enabled
 * intervention's edit multipliers scaled by its override factor. Factor
 * 1.0 (the slider midpoint) sends the catalog entry unchanged.
 */
export function selectedInterventions(
  catalog: Intervention[],
  enabled: Record<string, boolean>,
  factors: Record<string, number>,
): Intervention[] {
  const out: Intervention[] = [];
  for (const item of catalog) {
    if (!enabled[item.id]) {
      continue;
    }
    const factor = factors[item.id] ?? 1.0;
    out.push({
      ...item,
      edits: item.edits.map((e) => ({
        ...e,
        multiplier: e.multiplier * factor,
      })),
    });
  }
  return out;
}

/**
 * Build the POST /steer payload. The target is renormalized one last time
 * at the boundary, tolerances are clamped non-negative, and the horizon
 * and plan length are forced to valid integers, so the editor cannot
 * produce a request the server rejects as off-simplex or zero-horizon.
 */
export function buildSteerRequest(
  draft: TargetDraft,
  catalog: Intervention[],
  horizon: number,
  maxPlanLen: number,
): SteerRequest {
  const shares = renormalized(draft.shares);
  const tolerance = {} as Distribution;
  let anyTolerance = false;
  for (const role of ROLES) {
    const v = clampShare(draft.tolerance[role]);
    tolerance[role] = v;
    anyTolerance = anyTolerance || v > 0;
  }
  return {
    target: anyTolerance ? { distribution: shares, tolerance } : shares,
    catalog,
    horizon: Math.max(1, Math.round(Number.isFinite(horizon) ? horizon : 1)),
    max_plan_len: Math.max(
      1,
      Math.round(Number.isFinite(maxPlanLen) ? maxPlanLen : 1),
    ),
  };
}

/**
 * Last-write-wins gate for in-flight requests: issue() stamps each
 * request, accept() admits a response only if nothing newer has been
 * applied, so a slow early response can never overwrite a later one.
 */
export class SequenceGate {
  private issued = 0;
  private applied = 0;

  issue(): number {
    this.issued += 1;
    return this.issued;
  }

  accept(seq: number): boolean {
    if (seq <= this.applied) {
      return false;
    }
    this.applied = seq;
    return true;
  }
}
