/** Shared fixtures: a recording fetch stub and distribution builders. */

import { Distribution, FetchLike, ROLES, RoleShares } from "../src/api.js";

export interface RecordedCall {
  method: string;
  url: string;
  body: unknown;
}

export interface MockReply {
  status?: number;
  body: unknown;
}

export type MockRoute =
  | MockReply
  | ((call: RecordedCall) => MockReply);

/**
 * Exact-match fetch stub keyed by "METHOD path?query". Records every call
 * so tests can assert what went over the wire; unmocked routes throw.
 */
export function mockApi(routes: Record<string, MockRoute>): {
  fetch: FetchLike;
  calls: RecordedCall[];
} {
  const calls: RecordedCall[] = [];
  const fetchImpl: FetchLike = async (input, init) => {
    const method = init?.method ?? "GET";
    const body =
      typeof init?.body === "string" ? JSON.parse(init.body) : undefined;
    const call: RecordedCall = { method, url: input, body };
    calls.push(call);
    const route = routes[`${method} ${input}`];
    if (route === undefined) {
      throw new Error(`unmocked route: ${method} ${input}`);
    }
    const reply = typeof route === "function" ? route(call) : route;
    return new Response(JSON.stringify(reply.body), {
      status: reply.status ?? 200,
      headers: { "content-type": "application/json" },
    });
  };
  return { fetch: fetchImpl, calls };
}

/** Full role mapping from a partial one, absent roles at 0. */
export function dist(shares: RoleShares): Distribution {
  const out = {} as Distribution;
  for (const role of ROLES) {
    out[role] = shares[role] ?? 0;
  }
  return out;
}

export function sum(shares: Distribution): number {
  return ROLES.reduce((acc, role) => acc + shares[role], 0);
}

/** Role-keyed tolerance flags, true unless overridden. */
export function flags(
  overrides: Partial<Record<(typeof ROLES)[number], boolean>> = {},
): Record<(typeof ROLES)[number], boolean> {
  const out = {} as Record<(typeof ROLES)[number], boolean>;
  for (const role of ROLES) {
    out[role] = overrides[role] ?? true;
  }
  return out;
}
