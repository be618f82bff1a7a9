/**
 * DOM shell for the steering dashboard.
 *
 * All numbers come from figures built in render.ts over raw API
 * responses; this file only draws them and forwards operator input back
 * through the typed client. Concurrent what-if requests are resolved
 * last-write-wins through a SequenceGate.
 */

import {
  ApiClient,
  DistributionSeries,
  Intervention,
  Role,
  SnapshotDistribution,
} from "./api.js";
import {
  DrilldownFigure,
  ErrorBanner,
  PlansFigure,
  RosterFigure,
  SankeyFigure,
  StackedAreaFigure,
  TargetEditorFigure,
  TrajectoryFigure,
  drilldown,
  errorBanner,
  plansTable,
  roster,
  sankey,
  stackedArea,
  targetEditor,
  trajectory,
} from "./render.js";
import {
  SequenceGate,
  TargetDraft,
  buildSteerRequest,
  draftFromCurrent,
  editTargetShare,
  editTargetTolerance,
  factorToSlider,
  selectedInterventions,
  sliderToFactor,
} from "./state.js";

const ROLE_COLORS: Record<Role, string> = {
  Visitor: "#8dd3c7",
  Novice: "#80b1d3",
  Active: "#4daf4a",
  Leader: "#ff7f00",
  Passive: "#bebada",
  Troll: "#e41a1c",
  Departed: "#999999",
};

const SVG_NS = "http://www.w3.org/2000/svg";
const CHART_W = 640;
const CHART_H = 240;

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  text?: string,
  className?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (text !== undefined) {
    node.textContent = text;
  }
  if (className !== undefined) {
    node.className = className;
  }
  return node;
}

function svgEl(tag: string, attrs: Record<string, string>): SVGElement {
  const node = document.createElementNS(SVG_NS, tag) as SVGElement;
  for (const [k, v] of Object.entries(attrs)) {
    node.setAttribute(k, v);
  }
  return node;
}

function fmt(value: number | null): string {
  if (value === null) {
    return "n/a";
  }
  return Number.isInteger(value) ? String(value) : value.toFixed(4);
}

function clear(node: HTMLElement): void {
  while (node.firstChild) {
    node.removeChild(node.firstChild);
  }
}

function drawStackedArea(
  host: HTMLElement,
  figure: StackedAreaFigure,
): void {
  clear(host);
  if (figure.snapshots.length === 0) {
    host.appendChild(el("p", "no defined snapshots yet"));
    return;
  }
  const svg = svgEl("svg", {
    viewBox: `0 0 ${CHART_W} ${CHART_H}`,
    width: String(CHART_W),
    height: String(CHART_H),
  });
  const n = figure.snapshots.length;
  const x = (i: number) => (n === 1 ? CHART_W / 2 : (i / (n - 1)) * CHART_W);
  const y = (v: number) => CHART_H - v * CHART_H;
  for (const band of figure.bands) {
    const top = band.upper.map((v, i) => `${x(i)},${y(v)}`);
    const bottom = band.lower.map((v, i) => `${x(i)},${y(v)}`).reverse();
    svg.appendChild(
      svgEl("polygon", {
        points: [...top, ...bottom].join(" "),
        fill: ROLE_COLORS[band.role],
        "fill-opacity": "0.85",
      }),
    );
  }
  host.appendChild(svg);
  const legend = el("div", undefined, "legend");
  for (const band of figure.bands) {
    const chip = el("span", band.role, "chip");
    chip.style.borderLeft = `10px solid ${ROLE_COLORS[band.role]}`;
    legend.appendChild(chip);
  }
  host.appendChild(legend);
}

function drawSankey(host: HTMLElement, figure: SankeyFigure): void {
  clear(host);
  host.appendChild(el("p", `matrix tag: ${figure.tag}`, "tag"));
  const svg = svgEl("svg", {
    viewBox: `0 0 ${CHART_W} ${CHART_H}`,
    width: String(CHART_W),
    height: String(CHART_H),
  });
  const slot = CHART_H / figure.nodes.length;
  const yOf = (role: Role) =>
    figure.nodes.indexOf(role) * slot + slot / 2;
  for (const link of figure.links) {
    const y1 = yOf(link.source);
    const y2 = yOf(link.target);
    svg.appendChild(
      svgEl("path", {
        d: `M 80 ${y1} C ${CHART_W / 2} ${y1}, ${CHART_W / 2} ${y2}, ${CHART_W - 80} ${y2}`,
        fill: "none",
        stroke: ROLE_COLORS[link.source],
        "stroke-opacity": "0.55",
        "stroke-width": String(Math.max(1, link.value * 24)),
      }),
    );
  }
  for (const violation of figure.violations) {
    const y1 = yOf(violation.source);
    const y2 = yOf(violation.target);
    const path = svgEl("path", {
      d: `M 80 ${y1} C ${CHART_W / 2} ${y1}, ${CHART_W / 2} ${y2}, ${CHART_W - 80} ${y2}`,
      fill: "none",
      stroke: "#d62728",
      "stroke-width": "2",
      "stroke-dasharray": "6 3",
    });
    const tooltip = svgEl("title", {});
    tooltip.textContent =
      `${violation.source} to ${violation.target}: ` +
      `${violation.count} violation(s), ${violation.kinds.join(", ")}`;
    path.appendChild(tooltip);
    svg.appendChild(path);
  }
  figure.nodes.forEach((role) => {
    const label = svgEl("text", {
      x: "4",
      y: String(yOf(role) + 4),
      "font-size": "12",
    });
    label.textContent = role;
    svg.appendChild(label);
    const right = svgEl("text", {
      x: String(CHART_W - 76),
      y: String(yOf(role) + 4),
      "font-size": "12",
    });
    right.textContent = role;
    svg.appendChild(right);
  });
  host.appendChild(svg);
  if (figure.violations.length > 0) {
    const note = el(
      "p",
      `${figure.violations.length} violated pair(s) highlighted`,
      "violation-note",
    );
    host.appendChild(note);
  }
}

function drawTrajectory(
  host: HTMLElement,
  figure: TrajectoryFigure,
): void {
  clear(host);
  const label =
    figure.interventions.length === 0
      ? "baseline projection"
      : `with: ${figure.interventions.join(", ")}`;
  host.appendChild(el("p", `${label} (${figure.steps} steps)`, "tag"));
  const svg = svgEl("svg", {
    viewBox: `0 0 ${CHART_W} ${CHART_H}`,
    width: String(CHART_W),
    height: String(CHART_H),
  });
  const first = figure.series[0];
  const n = first === undefined ? 0 : first.values.length;
  const x = (i: number) => (n <= 1 ? CHART_W / 2 : (i / (n - 1)) * CHART_W);
  const y = (v: number) => CHART_H - v * CHART_H;
  if (figure.target !== null) {
    for (const mark of figure.target) {
      svg.appendChild(
        svgEl("line", {
          x1: "0",
          x2: String(CHART_W),
          y1: String(y(mark.value)),
          y2: String(y(mark.value)),
          stroke: ROLE_COLORS[mark.role],
          "stroke-dasharray": "2 6",
          "stroke-opacity": "0.7",
        }),
      );
    }
  }
  for (const series of figure.series) {
    svg.appendChild(
      svgEl("polyline", {
        points: series.values.map((v, i) => `${x(i)},${y(v)}`).join(" "),
        fill: "none",
        stroke: ROLE_COLORS[series.role],
        "stroke-width": "2",
      }),
    );
  }
  host.appendChild(svg);
}

function drawTargetEditor(
  host: HTMLElement,
  figure: TargetEditorFigure,
  onShare: (role: Role, value: number) => void,
  onTolerance: (role: Role, value: number) => void,
): void {
  clear(host);
  const table = el("table");
  const head = el("tr");
  for (const title of ["role", "current", "target", "tolerance"]) {
    head.appendChild(el("th", title));
  }
  table.appendChild(head);
  for (const row of figure.rows) {
    const tr = el("tr");
    tr.appendChild(el("td", row.role));
    tr.appendChild(el("td", fmt(row.current)));
    const shareCell = el("td");
    const slider = el("input");
    slider.type = "range";
    slider.min = "0";
    slider.max = "1";
    slider.step = "0.001";
    slider.value = String(row.target);
    slider.addEventListener("input", () =>
      onShare(row.role, Number(slider.value)),
    );
    shareCell.appendChild(slider);
    shareCell.appendChild(el("span", ` ${row.target.toFixed(3)}`));
    tr.appendChild(shareCell);
    const tolCell = el("td");
    const tol = el("input");
    tol.type = "number";
    tol.min = "0";
    tol.step = "0.01";
    tol.value = String(row.tolerance);
    tol.addEventListener("change", () =>
      onTolerance(row.role, Number(tol.value)),
    );
    tolCell.appendChild(tol);
    tr.appendChild(tolCell);
    table.appendChild(tr);
  }
  host.appendChild(table);
  host.appendChild(
    el(
      "p",
      figure.residual === null
        ? "residual: undefined (no current distribution)"
        : `residual vs current: ${figure.residual.toFixed(4)}`,
      "residual",
    ),
  );
}

function drawPlans(host: HTMLElement, figure: PlansFigure): void {
  clear(host);
  if (figure.rows.length === 0) {
    host.appendChild(el("p", "no plans returned"));
    return;
  }
  host.appendChild(el("p", `horizon: ${figure.horizon}`, "tag"));
  const table = el("table");
  const head = el("tr");
  for (const title of ["plan", "residual", "cost", "within tolerance"]) {
    head.appendChild(el("th", title));
  }
  table.appendChild(head);
  for (const row of figure.rows) {
    const tr = el("tr");
    tr.appendChild(
      el("td", row.interventions.length === 0 ? "(do nothing)" : row.interventions.join(" + ")),
    );
    tr.appendChild(el("td", row.residual.toFixed(4)));
    tr.appendChild(el("td", row.total_cost.toFixed(2)));
    tr.appendChild(
      el("td", Object.values(row.within_tolerance).every(Boolean) ? "yes" : "no"),
    );
    table.appendChild(tr);
  }
  host.appendChild(table);
}

function drawRoster(
  host: HTMLElement,
  figure: RosterFigure,
  onSelect: (member: string) => void,
): void {
  clear(host);
  host.appendChild(
    el("p", `snapshot ${figure.snapshot}: ${figure.rows.length} members`, "tag"),
  );
  const table = el("table");
  const head = el("tr");
  for (const title of ["member", "role", "fired rules"]) {
    head.appendChild(el("th", title));
  }
  table.appendChild(head);
  for (const row of figure.rows) {
    const tr = el("tr");
    tr.className = "roster-row";
    tr.appendChild(el("td", row.member));
    tr.appendChild(el("td", row.role));
    tr.appendChild(el("td", row.fired_rules.join(", ")));
    tr.addEventListener("click", () => onSelect(row.member));
    table.appendChild(tr);
  }
  host.appendChild(table);
}

function drawDrilldown(host: HTMLElement, figure: DrilldownFigure): void {
  clear(host);
  host.appendChild(
    el("h3", `${figure.member}: ${figure.role} (snapshot ${figure.snapshot})`),
  );
  host.appendChild(
    el("p", `fired rules: ${figure.fired_rules.join(", ") || "none"}`, "tag"),
  );
  const table = el("table");
  const head = el("tr");
  for (const title of ["measure", "value", "percentile", "ratio to mean"]) {
    head.appendChild(el("th", title));
  }
  table.appendChild(head);
  const relative = new Map(figure.relative.map((r) => [r.name, r]));
  for (const row of [...figure.activity, ...figure.centrality]) {
    const tr = el("tr");
    tr.appendChild(el("td", row.name));
    tr.appendChild(el("td", fmt(row.value)));
    const rel = relative.get(row.name);
    tr.appendChild(el("td", fmt(rel?.percentile ?? null)));
    tr.appendChild(el("td", fmt(rel?.ratio_to_mean ?? null)));
    table.appendChild(tr);
  }
  host.appendChild(table);
  host.appendChild(
    el(
      "p",
      `signup: ${figure.status.has_signup}; explicit departure: ` +
        `${figure.status.explicit_departure}; edge churn: ` +
        `${fmt(figure.status.edge_churn)}; seconds since last activity: ` +
        `${fmt(figure.status.seconds_since_last_activity)}`,
      "tag",
    ),
  );
}

function drawError(host: HTMLElement, banner: ErrorBanner): void {
  clear(host);
  const box = el("div", undefined, "error-banner");
  box.appendChild(el("strong", `${banner.code}: `));
  box.appendChild(el("span", banner.message));
  box.appendChild(el("p", banner.hint, "hint"));
  host.appendChild(box);
}

interface Panels {
  error: HTMLElement;
  area: HTMLElement;
  sankey: HTMLElement;
  editor: HTMLElement;
  whatif: HTMLElement;
  catalog: HTMLElement;
  plans: HTMLElement;
  roster: HTMLElement;
  member: HTMLElement;
}

function buildLayout(root: HTMLElement): Panels {
  clear(root);
  const panels = {} as Panels;
  const sections: [keyof Panels, string][] = [
    ["error", ""],
    ["area", "Role shares over snapshots"],
    ["sankey", "Transitions"],
    ["editor", "Target"],
    ["catalog", "Interventions"],
    ["whatif", "Projected trajectory"],
    ["plans", "Recommended plans"],
    ["roster", "Members"],
    ["member", "Member detail"],
  ];
  for (const [key, title] of sections) {
    const section = el("section", undefined, `panel panel-${key}`);
    if (title !== "") {
      section.appendChild(el("h2", title));
    }
    const body = el("div");
    section.appendChild(body);
    root.appendChild(section);
    panels[key] = body;
  }
  return panels;
}

export async function bootstrap(root: HTMLElement): Promise<void> {
  const params = new URLSearchParams(window.location.search);
  const api = new ApiClient(params.get("api") ?? "");
  const panels = buildLayout(root);
  const gate = new SequenceGate();

  let catalog: Intervention[] = [];
  let enabled: Record<string, boolean> = {};
  let factors: Record<string, number> = {};
  let horizon = 6;
  let draft: TargetDraft = draftFromCurrent(null);
  let current: SnapshotDistribution | null = null;
  let series: DistributionSeries = { series: [] };

  const fail = (error: unknown): void =>
    drawError(panels.error, errorBanner(error));

  const redrawEditor = (): void => {
    drawTargetEditor(
      panels.editor,
      targetEditor(current, draft),
      (role, value) => {
        draft = editTargetShare(draft, role, value);
        redrawEditor();
        void replot();
      },
      (role, value) => {
        draft = editTargetTolerance(draft, role, value);
        redrawEditor();
      },
    );
  };

  const replot = async (): Promise<void> => {
    const seq = gate.issue();
    try {
      const picked = selectedInterventions(catalog, enabled, factors);
      const result = await api.whatIf(horizon, picked);
      if (gate.accept(seq)) {
        drawTrajectory(panels.whatif, trajectory(result, draft.shares));
      }
    } catch (error) {
      if (gate.accept(seq)) {
        fail(error);
      }
    }
  };

  const steer = async (): Promise<void> => {
    try {
      const result = await api.steer(
        buildSteerRequest(draft, catalog, horizon, 2),
      );
      drawPlans(panels.plans, plansTable(result));
    } catch (error) {
      fail(error);
    }
  };

  const redrawCatalog = (): void => {
    clear(panels.catalog);
    const list = el("div");
    for (const item of catalog) {
      const row = el("div", undefined, "catalog-row");
      const toggle = el("input");
      toggle.type = "checkbox";
      toggle.checked = enabled[item.id] ?? false;
      toggle.addEventListener("change", () => {
        enabled[item.id] = toggle.checked;
        void replot();
      });
      row.appendChild(toggle);
      row.appendChild(el("span", ` ${item.label} (${item.id}) `));
      const slider = el("input");
      slider.type = "range";
      slider.min = "0";
      slider.max = "1";
      slider.step = "0.001";
      slider.value = String(factorToSlider(factors[item.id] ?? 1.0));
      const readout = el("span", ` ×${(factors[item.id] ?? 1.0).toFixed(2)}`);
      slider.addEventListener("input", () => {
        factors[item.id] = sliderToFactor(Number(slider.value));
        readout.textContent = ` ×${factors[item.id]!.toFixed(2)}`;
        void replot();
      });
      row.appendChild(slider);
      row.appendChild(readout);
      list.appendChild(row);
    }
    panels.catalog.appendChild(list);

    const horizonLabel = el("label", "horizon (steps): ");
    const horizonInput = el("input");
    horizonInput.type = "number";
    horizonInput.min = "1";
    horizonInput.step = "1";
    horizonInput.value = String(horizon);
    horizonInput.addEventListener("change", () => {
      horizon = Math.max(1, Math.round(Number(horizonInput.value) || 1));
      horizonInput.value = String(horizon);
      void replot();
    });
    horizonLabel.appendChild(horizonInput);
    panels.catalog.appendChild(horizonLabel);

    const steerButton = el("button", "rank plans toward target");
    steerButton.addEventListener("click", () => void steer());
    panels.catalog.appendChild(steerButton);

    const loader = el("details");
    loader.appendChild(el("summary", "load catalog JSON"));
    const text = el("textarea");
    text.rows = 6;
    text.placeholder =
      '[{"id": "reactivate", "label": "Reactivation nudge", ' +
      '"edits": [{"from": "Passive", "to": "Active", "multiplier": 2.0}], ' +
      '"cost": 1.0}]';
    const apply = el("button", "use catalog");
    apply.addEventListener("click", () => {
      try {
        const parsed = JSON.parse(text.value) as Intervention[];
        if (!Array.isArray(parsed)) {
          throw new Error("a catalog is a JSON list of interventions");
        }
        catalog = parsed;
        enabled = {};
        factors = {};
        redrawCatalog();
        void replot();
      } catch (error) {
        fail(error);
      }
    });
    loader.appendChild(text);
    loader.appendChild(apply);
    panels.catalog.appendChild(loader);
  };

  const showMember = async (member: string): Promise<void> => {
    try {
      const features = await api.memberFeatures(member);
      drawDrilldown(panels.member, drilldown(features));
    } catch (error) {
      fail(error);
    }
  };

  try {
    const health = await api.health();
    document.title = `rolecycle: ${health.members} members, ${health.snapshots} snapshots`;
    series = await api.distributionSeries();
    const defined = series.series.filter((s) => s.defined);
    current = defined.length > 0 ? defined[defined.length - 1]! : null;
    draft = draftFromCurrent(current?.distribution ?? null);
    drawStackedArea(panels.area, stackedArea(series));
    const [matrixDoc, violations, assignments] = await Promise.all([
      api.matrix(true),
      api.violations(),
      api.assignments(),
    ]);
    drawSankey(panels.sankey, sankey(matrixDoc, violations));
    drawRoster(panels.roster, roster(assignments), (m) => void showMember(m));
    redrawEditor();
    redrawCatalog();
    await replot();
  } catch (error) {
    fail(error);
  }
}

const rootElement = document.getElementById("app");
if (rootElement !== null) {
  void bootstrap(rootElement);
}
