/**
 * Thin-client contract, tested by response mocking: every figure value
 * equals the mocked response field, the empty intervention set renders
 * identically to the plain projection, and the target editor cannot send
 * a request the server would reject as off-simplex.
 */

import { describe, expect, it } from "vitest";

import {
  ApiClient,
  ApiError,
  FetchLike,
  Intervention,
  MatrixDocument,
  MemberFeatures,
  ROLES,
  SteerResult,
  Violations,
} from "../src/api.js";
import {
  drilldown,
  errorBanner,
  plansTable,
  roster,
  sankey,
  stackedArea,
  targetEditor,
  trajectory,
} from "../src/render.js";
import {
  SequenceGate,
  buildSteerRequest,
  draftFromCurrent,
  editTargetShare,
  selectedInterventions,
} from "../src/state.js";
import { dist, flags, mockApi, sum } from "./helpers.js";

const D0 = dist({
  Visitor: 0.1,
  Novice: 0.2,
  Active: 0.3,
  Leader: 0.05,
  Passive: 0.15,
  Troll: 0.05,
  Departed: 0.15,
});
const D1 = dist({
  Novice: 0.1,
  Active: 0.35,
  Leader: 0.1,
  Passive: 0.2,
  Troll: 0.05,
  Departed: 0.2,
});
const D2 = dist({
  Active: 0.3,
  Leader: 0.12,
  Passive: 0.23,
  Departed: 0.35,
});

const SERIES = {
  series: [
    { snapshot: 0, from: 0, to: 100, distribution: D0, defined: true },
    { snapshot: 1, from: 100, to: 200, distribution: null, defined: false },
    { snapshot: 2, from: 200, to: 300, distribution: D1, defined: true },
  ],
};

const MATRIX: MatrixDocument = {
  tag: "graph-masked",
  roles: [...ROLES],
  rows: [
    [0.2, 0.7, 0, 0, 0, 0, 0.1],
    [0, 0, 0.55, 0, 0.27, 0.08, 0.1],
    [0, 0, 0.55, 0.1, 0.2, 0.04, 0.11],
    [0, 0, 0.25, 0.55, 0.12, 0.03, 0.05],
    [0, 0, 0.25, 0, 0.6, 0, 0.15],
    [0, 0, 0, 0, 0, 0.25, 0.75],
    [0, 0, 0, 0, 0, 0, 1],
  ],
};

const VIOLATIONS: Violations = {
  violations: {
    m1: [
      {
        index: 2,
        from: "Troll",
        to: "Active",
        kind: "disallowed",
        detail: "Troll may only persist or depart",
      },
    ],
    m2: [
      {
        index: 1,
        from: "Troll",
        to: "Active",
        kind: "disallowed",
        detail: "Troll may only persist or depart",
      },
      {
        index: 3,
        from: "Passive",
        to: "Leader",
        kind: "disallowed",
        detail: "no direct promotion",
      },
    ],
  },
};

describe("stacked-area figure", () => {
  it("copies every defined share verbatim and skips undefined snapshots", () => {
    const figure = stackedArea(SERIES);
    expect(figure.snapshots).toEqual([0, 2]);
    for (const band of figure.bands) {
      expect(band.values[0]).toBe(D0[band.role]);
      expect(band.values[1]).toBe(D1[band.role]);
    }
  });

  it("stacks bands so each thickness is exactly the share", () => {
    const figure = stackedArea(SERIES);
    for (const band of figure.bands) {
      band.values.forEach((v, i) => {
        expect(band.upper[i]! - band.lower[i]!).toBeCloseTo(v, 12);
      });
    }
    const last = figure.bands[figure.bands.length - 1]!;
    expect(last.upper[0]).toBeCloseTo(sum(D0), 12);
  });
});

describe("sankey figure", () => {
  it("emits one link per positive matrix cell, value verbatim", () => {
    const figure = sankey(MATRIX, { violations: {} });
    const positive = MATRIX.rows.flat().filter((v) => v > 0).length;
    expect(figure.links).toHaveLength(positive);
    expect(figure.tag).toBe("graph-masked");
    expect(figure.nodes).toEqual([...ROLES]);
    for (const link of figure.links) {
      const i = ROLES.indexOf(link.source);
      const j = ROLES.indexOf(link.target);
      expect(link.value).toBe(MATRIX.rows[i]![j]);
      expect(link.value).toBeGreaterThan(0);
    }
  });

  it("tallies observed violations per pair and highlights them", () => {
    const figure = sankey(MATRIX, VIOLATIONS);
    expect(figure.violations).toEqual([
      {
        source: "Passive",
        target: "Leader",
        count: 1,
        kinds: ["disallowed"],
      },
      { source: "Troll", target: "Active", count: 2, kinds: ["disallowed"] },
    ]);
  });
});

describe("target editor figure", () => {
  // Dyadic shares sum to exactly 1.0 in floats, so renormalizing the
  // draft is a true identity and the residual must be exactly zero.
  const EXACT = dist({
    Visitor: 0.125,
    Novice: 0.125,
    Active: 0.25,
    Leader: 0.125,
    Passive: 0.125,
    Troll: 0.125,
    Departed: 0.125,
  });
  const current = {
    snapshot: 2,
    from: 200,
    to: 300,
    distribution: EXACT,
    defined: true,
  };

  it("shows residual 0.0 when the target equals the current distribution", () => {
    const draft = draftFromCurrent(EXACT);
    const figure = targetEditor(current, draft);
    expect(figure.residual).toBe(0);
    for (const row of figure.rows) {
      expect(row.current).toBe(EXACT[row.role]);
      expect(row.target).toBe(EXACT[row.role]);
    }
  });

  it("reads out the residual of an edited draft against current", () => {
    const draft = editTargetShare(draftFromCurrent(EXACT), "Active", 0.5);
    const figure = targetEditor(current, draft);
    expect(figure.residual).toBeGreaterThan(0);
    let half = 0;
    for (const row of figure.rows) {
      half += Math.abs(row.target - (row.current ?? 0));
    }
    expect(figure.residual).toBeCloseTo(half / 2, 12);
  });

  it("reports no residual when the current distribution is undefined", () => {
    const figure = targetEditor(null, draftFromCurrent(null));
    expect(figure.residual).toBeNull();
    expect(figure.rows.every((r) => r.current === null)).toBe(true);
  });
});

describe("trajectory figure", () => {
  const projectBody = { steps: 2, trajectory: [D0, D1, D2] };
  const whatifBody = {
    steps: 2,
    interventions: [] as string[],
    trajectory: [D0, D1, D2],
  };

  it("copies every trajectory point verbatim", () => {
    const figure = trajectory(whatifBody, null);
    for (const series of figure.series) {
      expect(series.values).toEqual([
        D0[series.role],
        D1[series.role],
        D2[series.role],
      ]);
    }
    expect(figure.steps).toBe(2);
  });

  it("renders the empty intervention set identically to the projection", () => {
    const target = dist({ Active: 0.5, Departed: 0.5 });
    expect(trajectory(whatifBody, target)).toEqual(
      trajectory(projectBody, target),
    );
  });

  it("re-plots a boosted reactivation run with a visibly higher Active band", () => {
    const boosted = {
      steps: 2,
      interventions: ["reactivate"],
      trajectory: [
        D0,
        { ...D1, Active: 0.41, Passive: 0.14 },
        { ...D2, Active: 0.39, Passive: 0.14 },
      ],
    };
    const baseline = trajectory(projectBody, null);
    const lifted = trajectory(boosted, null);
    const activeBase = baseline.series.find((s) => s.role === "Active")!;
    const activeLift = lifted.series.find((s) => s.role === "Active")!;
    activeLift.values.forEach((v, i) => {
      expect(v).toBeGreaterThanOrEqual(activeBase.values[i]!);
    });
    expect(activeLift.values[2]!).toBeGreaterThan(activeBase.values[2]!);
    expect(lifted.interventions).toEqual(["reactivate"]);
  });
});

describe("plans and roster figures", () => {
  it("lists every ranked plan with residual, cost, and flags verbatim", () => {
    const result: SteerResult = {
      plans: [
        {
          interventions: [],
          horizon: 6,
          projected: D2,
          residual: 0.31,
          total_cost: 0,
          within_tolerance: flags({ Active: false }),
        },
        {
          interventions: ["reactivate", "retain"],
          horizon: 6,
          projected: D1,
          residual: 0.12,
          total_cost: 2.5,
          within_tolerance: flags(),
        },
      ],
    };
    const figure = plansTable(result);
    expect(figure.horizon).toBe(6);
    expect(figure.rows).toHaveLength(2);
    expect(figure.rows[0]!.residual).toBe(0.31);
    expect(figure.rows[1]!.total_cost).toBe(2.5);
    expect(figure.rows[1]!.interventions).toEqual(["reactivate", "retain"]);
    expect(figure.rows[0]!.within_tolerance.Active).toBe(false);
    expect(figure.rows[0]!.within_tolerance.Troll).toBe(true);
    expect(figure.rows[1]!.projected).toEqual(D1);
    expect(plansTable({ plans: [] }).horizon).toBeNull();
  });

  it("lists assignment rows verbatim", () => {
    const figure = roster({
      snapshot: 3,
      from: 0,
      to: 100,
      assignments: [
        { member: "m01", role: "Leader", fired_rules: ["leader.top_degree"] },
        { member: "m02", role: "Troll", fired_rules: ["troll.flags"] },
      ],
    });
    expect(figure.snapshot).toBe(3);
    expect(figure.rows).toEqual([
      { member: "m01", role: "Leader", fired_rules: ["leader.top_degree"] },
      { member: "m02", role: "Troll", fired_rules: ["troll.flags"] },
    ]);
  });
});

describe("member drill-down figure", () => {
  const features: MemberFeatures = {
    member: "m07",
    snapshot: 2,
    from: 200,
    to: 300,
    role: "Active",
    fired_rules: ["active.login_gap"],
    centrality: {
      member: "m07",
      degree_in: 3,
      degree_out: 4,
      degree_total: 7,
      closeness: 0.41,
      betweenness: 0.02,
      eigenvector: 0.33,
      reciprocity: 0.75,
    },
    activity: {
      member: "m07",
      days_since_signup: 44.5,
      time_since_last_login: 86400,
      mean_inter_login_gap: 43200,
      post_count: 7,
      burstiness: -0.2,
      flags_received: 0,
    },
    relative: {
      mean_inter_login_gap: { percentile: 0.3, ratio_to_mean: 0.8 },
      post_count: { percentile: 0.9, ratio_to_mean: 2.1 },
    },
    edge_churn: 0.5,
    has_signup: true,
    explicit_departure: false,
    seconds_since_last_activity: 3600,
  };

  it("lists every feature and fired rule verbatim", () => {
    const figure = drilldown(features);
    expect(figure.member).toBe("m07");
    expect(figure.role).toBe("Active");
    expect(figure.fired_rules).toEqual(["active.login_gap"]);
    expect(figure.activity).toContainEqual({ name: "post_count", value: 7 });
    expect(figure.activity).toContainEqual({
      name: "burstiness",
      value: -0.2,
    });
    expect(figure.activity.map((r) => r.name)).not.toContain("member");
    expect(figure.centrality).toContainEqual({
      name: "eigenvector",
      value: 0.33,
    });
    expect(figure.relative).toContainEqual({
      name: "mean_inter_login_gap",
      percentile: 0.3,
      ratio_to_mean: 0.8,
    });
    expect(figure.status).toEqual({
      has_signup: true,
      explicit_departure: false,
      edge_churn: 0.5,
      seconds_since_last_activity: 3600,
    });
  });
});

describe("error banners", () => {
  it("surfaces the server's code and message with an actionable hint", () => {
    const banner = errorBanner(new ApiError(422, "empty_catalog", "no interventions"));
    expect(banner.code).toBe("empty_catalog");
    expect(banner.message).toBe("no interventions");
    expect(banner.hint.length).toBeGreaterThan(0);
  });

  it("keeps unknown codes and non-API failures visible", () => {
    expect(errorBanner(new ApiError(418, "teapot", "nope")).hint.length)
      .toBeGreaterThan(0);
    const network = errorBanner(new Error("connection refused"));
    expect(network.code).toBe("network");
    expect(network.message).toBe("connection refused");
  });
});

describe("wire-level thin-client pass", () => {
  const CATALOG: Intervention[] = [
    {
      id: "reactivate",
      label: "Reactivation nudge",
      edits: [{ from: "Passive", to: "Active", multiplier: 2.0 }],
      cost: 1.0,
    },
    {
      id: "retain",
      label: "Retention outreach",
      edits: [{ from: "Active", to: "Departed", multiplier: 0.5 }],
      cost: 1.5,
    },
  ];

  it("sends what-if interventions with slider factors applied to the edits", async () => {
    const body = { steps: 4, interventions: ["reactivate"], trajectory: [D0] };
    const { fetch, calls } = mockApi({ "POST /whatif": { body } });
    const api = new ApiClient("", fetch);
    const picked = selectedInterventions(
      CATALOG,
      { reactivate: true },
      { reactivate: 2.0 },
    );
    await api.whatIf(4, picked);
    const sent = calls[0]!.body as { interventions: Intervention[] };
    expect(sent.interventions).toHaveLength(1);
    expect(sent.interventions[0]!.edits[0]!.multiplier).toBe(4.0);
    expect(CATALOG[0]!.edits[0]!.multiplier).toBe(2.0);
  });

  it("can never send an off-simplex steer target, however the draft was abused", async () => {
    const replies: SteerResult = { plans: [] };
    const { fetch, calls } = mockApi({ "POST /steer": { body: replies } });
    const api = new ApiClient("", fetch);

    let draft = draftFromCurrent(D1);
    draft = editTargetShare(draft, "Active", 3.7);
    draft = editTargetShare(draft, "Troll", -9);
    draft = editTargetShare(draft, "Leader", Number.NaN);
    draft.shares.Departed = 42;

    await api.steer(buildSteerRequest(draft, CATALOG, 6, 2));
    const sent = calls[0]!.body as {
      target: Record<string, number>;
      horizon: number;
    };
    const total = ROLES.reduce((acc, role) => acc + sent.target[role]!, 0);
    expect(Math.abs(total - 1)).toBeLessThanOrEqual(1e-9);
    for (const role of ROLES) {
      expect(sent.target[role]).toBeGreaterThanOrEqual(0);
    }
    expect(sent.horizon).toBeGreaterThanOrEqual(1);
  });

  it("resolves racing what-if requests last-write-wins", async () => {
    const gate = new SequenceGate();
    const drawn: number[] = [];
    const pending: ((value: Response) => void)[] = [];
    const fetchImpl: FetchLike = () =>
      new Promise<Response>((resolve) => {
        pending.push(resolve);
      });
    const api = new ApiClient("", fetchImpl);

    const draw = async (steps: number): Promise<void> => {
      const seq = gate.issue();
      const result = await api.whatIf(steps, []);
      if (gate.accept(seq)) {
        drawn.push(trajectory(result).steps);
      }
    };

    const reply = (steps: number): Response =>
      new Response(
        JSON.stringify({ steps, interventions: [], trajectory: [D0] }),
        { status: 200, headers: { "content-type": "application/json" } },
      );

    const stale = draw(1);
    const fresh = draw(2);
    pending[1]!(reply(2));
    await fresh;
    pending[0]!(reply(1));
    await stale;
    expect(drawn).toEqual([2]);
  });

  it("rebuilds all figures well inside the 200 ms re-plot budget", () => {
    const long = {
      steps: 64,
      interventions: ["reactivate"],
      trajectory: Array.from({ length: 65 }, () => D1),
    };
    const started = performance.now();
    for (let i = 0; i < 50; i += 1) {
      trajectory(long, D2);
      stackedArea(SERIES);
      sankey(MATRIX, VIOLATIONS);
    }
    expect(performance.now() - started).toBeLessThan(200);
  });
});
