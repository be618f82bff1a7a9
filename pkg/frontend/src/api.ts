/**
 * Typed client for the rolecycle HTTP API.
 *
 * One method per endpoint, nothing else: the dashboard consumes the API
 * exactly as served and performs no model math of its own. Every response
 * is returned verbatim so rendered figures stay traceable to response
 * fields. Errors arrive as the server's one-object error document and are
 * rethrown as ApiError so views can surface code and message.
 */

export const ROLES = [
  "Visitor",
  "Novice",
  "Active",
  "Leader",
  "Passive",
  "Troll",
  "Departed",
] as const;

export type Role = (typeof ROLES)[number];

/** Full role-to-share mapping, as the server serializes distributions. */
export type Distribution = Record<Role, number>;

/** Partial mapping accepted by request payloads. */
export type RoleShares = Partial<Record<Role, number>>;

export interface Health {
  status: string;
  session: string;
  snapshots: number;
  members: number;
}

export interface SnapshotDistribution {
  snapshot: number;
  from: number;
  to: number;
  distribution: Distribution | null;
  defined: boolean;
}

export interface DistributionSeries {
  series: SnapshotDistribution[];
}

export interface AssignmentRow {
  member: string;
  role: Role;
  fired_rules: string[];
}

export interface Assignments {
  snapshot: number;
  from: number;
  to: number;
  assignments: AssignmentRow[];
}

export interface MatrixDocument {
  tag: string;
  roles: Role[];
  rows: number[][];
}

export interface ViolationRecord {
  index: number;
  from: Role;
  to: Role;
  kind: string;
  detail: string;
}

export interface Violations {
  violations: Record<string, ViolationRecord[]>;
}

export interface Projection {
  steps: number;
  trajectory: Distribution[];
}

export interface WhatIfResult {
  steps: number;
  interventions: string[];
  trajectory: Distribution[];
}

export interface InterventionEdit {
  from: Role;
  to: Role;
  multiplier: number;
}

export interface Intervention {
  id: string;
  label: string;
  edits: InterventionEdit[];
  cost?: number;
}

/** Either a bare role-to-share mapping or the wrapped form with tolerance. */
export type TargetPayload =
  | RoleShares
  | { distribution: RoleShares; tolerance: RoleShares };

export interface SteerRequest {
  target: TargetPayload;
  catalog: Intervention[];
  horizon: number;
  max_plan_len?: number;
  distribution?: RoleShares;
}

export interface Plan {
  interventions: string[];
  horizon: number;
  projected: Distribution;
  residual: number;
  total_cost: number;
  within_tolerance: Record<Role, boolean>;
}

export interface SteerResult {
  plans: Plan[];
}

export interface RelativeMeasure {
  percentile: number | null;
  ratio_to_mean: number | null;
}

export interface MemberFeatures {
  member: string;
  snapshot: number;
  from: number;
  to: number;
  role: Role;
  fired_rules: string[];
  centrality: {
    member: string;
    degree_in: number;
    degree_out: number;
    degree_total: number;
    closeness: number;
    betweenness: number;
    eigenvector: number;
    reciprocity: number;
  };
  activity: {
    member: string;
    days_since_signup: number | null;
    time_since_last_login: number | null;
    mean_inter_login_gap: number | null;
    post_count: number;
    burstiness: number | null;
    flags_received: number;
  };
  relative: Record<string, RelativeMeasure>;
  edge_churn: number;
  has_signup: boolean;
  explicit_departure: boolean;
  seconds_since_last_activity: number;
}

/** A server-reported failure, carrying the error document's code. */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export type FetchLike = (
  input: string,
  init?: RequestInit,
) => Promise<Response>;

async function toApiError(response: Response): Promise<ApiError> {
  let code = "http_error";
  let message = `${response.status} ${response.statusText}`.trim();
  try {
    const body = (await response.json()) as {
      error?: { code?: string; message?: string };
    };
    if (body.error) {
      code = body.error.code ?? code;
      message = body.error.message ?? message;
    }
  } catch {
    // Non-JSON body: keep the HTTP status line as the message.
  }
  return new ApiError(response.status, code, message);
}

export class ApiClient {
  constructor(
    private readonly base: string = "",
    private readonly fetchImpl: FetchLike = (input, init) =>
      fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchImpl(this.base + path, init);
    if (!response.ok) {
      throw await toApiError(response);
    }
    return (await response.json()) as T;
  }

  private post<T>(path: string, payload: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(payload),
    });
  }

  health(): Promise<Health> {
    return this.request("/health");
  }

  distributionSeries(): Promise<DistributionSeries> {
    return this.request("/distribution");
  }

  distribution(snapshot: number): Promise<SnapshotDistribution> {
    return this.request(`/distribution?snapshot=${snapshot}`);
  }

  assignments(snapshot?: number): Promise<Assignments> {
    const query = snapshot === undefined ? "" : `?snapshot=${snapshot}`;
    return this.request(`/assignments${query}`);
  }

  matrix(masked: boolean = true): Promise<MatrixDocument> {
    return this.request(`/matrix?masked=${masked}`);
  }

  violations(): Promise<Violations> {
    return this.request("/violations");
  }

  project(steps: number, distribution?: RoleShares): Promise<Projection> {
    const payload: Record<string, unknown> = { steps };
    if (distribution !== undefined) {
      payload.distribution = distribution;
    }
    return this.post("/project", payload);
  }

  whatIf(
    steps: number,
    interventions: Intervention[],
    distribution?: RoleShares,
  ): Promise<WhatIfResult> {
    const payload: Record<string, unknown> = { steps, interventions };
    if (distribution !== undefined) {
      payload.distribution = distribution;
    }
    return this.post("/whatif", payload);
  }

  steer(request: SteerRequest): Promise<SteerResult> {
    return this.post("/steer", request);
  }

  memberFeatures(
    memberId: string,
    snapshot?: number,
  ): Promise<MemberFeatures> {
    const query = snapshot === undefined ? "" : `?snapshot=${snapshot}`;
    return this.request(
      `/members/${encodeURIComponent(memberId)}/features${query}`,
    );
  }
}
