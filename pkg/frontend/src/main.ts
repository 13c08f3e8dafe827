/**
 * Browser wiring: scenario picker, diagram canvas, and query panels.
 *
 * All verdicts come from the server; this file only moves JSON between
 * the store, the API client, and the page.
 */
import { ApiClient, ApiError } from "./api.js";
import { CycleError, GraphStore } from "./graphState.js";
import { QueryPanel } from "./panels.js";
import { renderSvg } from "./render.js";
import {
  AlignResponse,
  IdentifyResponse,
  ScenarioEntry,
  SetsResponse,
} from "./types.js";

const api = new ApiClient(
  (window as { DIDGRAPH_API?: string }).DIDGRAPH_API ?? "http://127.0.0.1:8724"
);

const setsPanel = new QueryPanel<SetsResponse>();
const identifyPanel = new QueryPanel<IdentifyResponse>();
const alignPanel = new QueryPanel<AlignResponse>();

let store: GraphStore | null = null;
let scenario: ScenarioEntry | null = null;
let highlight: string[] = [];

function el<T extends HTMLElement>(id: string): T {
  const found = document.getElementById(id);
  if (!found) throw new Error(`missing element #${id}`);
  return found as T;
}

function draw(): void {
  if (!store) return;
  const graph = store.toGraphJson();
  el("canvas").innerHTML = renderSvg(graph.nodes, graph.edges, {
    highlightPath: highlight,
    selection: store.selection,
  });
  el("revision").textContent = `revision ${store.revision}`;
  refreshPanel("sets", setsPanel);
  refreshPanel("identify", identifyPanel);
  refreshPanel("align", alignPanel);
}

function refreshPanel(id: string, panel: QueryPanel<unknown>): void {
  if (!store) return;
  const view = panel.view(store.revision);
  const badge = el(`${id}-stale`);
  badge.hidden = !view.stale;
  const body = el(`${id}-body`);
  if (view.error !== null) {
    body.textContent = `error: ${view.error}`;
  } else if (view.raw !== null) {
    body.textContent = view.raw;
  } else {
    body.textContent = "(not queried)";
  }
}

function reportEditError(err: unknown): void {
  if (err instanceof CycleError) {
    highlight = err.path;
    el("status").textContent = err.message;
  } else if (err instanceof Error) {
    el("status").textContent = err.message;
  }
  draw();
}

async function runQuery<T>(
  panel: QueryPanel<T>,
  run: () => Promise<{ raw: string; data: T }>
): Promise<void> {
  if (!store) return;
  const revision = panel.begin(store.revision);
  try {
    const { raw, data } = await run();
    panel.resolve(revision, raw, data);
  } catch (err) {
    const message =
      err instanceof ApiError ? `${err.type}: ${err.message}` : String(err);
    panel.fail(revision, message);
  }
  draw();
}

async function loadCatalog(): Promise<void> {
  const { data } = await api.scenarios();
  const picker = el<HTMLSelectElement>("scenario");
  picker.innerHTML = data.scenarios
    .map((s) => `<option value="${s.name}">${s.name}</option>`)
    .join("");
  picker.onchange = () => {
    scenario = data.scenarios.find((s) => s.name === picker.value) ?? null;
    if (scenario) {
      store = GraphStore.fromScenario(scenario);
      highlight = [];
      el("status").textContent = scenario.description;
      draw();
    }
  };
  picker.onchange(new Event("change"));
}

function wireActions(): void {
  el("query-sets").onclick = () => {
    if (!store || !scenario) return;
    const period = String(scenario.periods[0]);
    void runQuery(setsPanel, async () => {
      const compacted = await api.compact(store!.toGraphJson());
      return api.sets(
        compacted.data.graph,
        scenario!.treatments[period]!,
        scenario!.deltas[period]!
      );
    });
  };
  el("query-identify").onclick = () => {
    if (!store || !scenario) return;
    const period = String(scenario.periods[0]);
    const set = el<HTMLInputElement>("adjustment")
      .value.split(",")
      .map((s) => s.trim())
      .filter((s) => s.length > 0);
    void runQuery(identifyPanel, async () => {
      const compacted = await api.compact(store!.toGraphJson());
      return api.identify(
        compacted.data.graph,
        scenario!.treatments[period]!,
        scenario!.deltas[period]!,
        set
      );
    });
  };
  el("query-align").onclick = () => {
    if (!scenario) return;
    const estimator = el<HTMLSelectElement>("estimator").value;
    const covariates = el<HTMLInputElement>("adjustment")
      .value.split(",")
      .map((s) => s.trim())
      .filter((s) => s.length > 0)
      .map((covariate) => ({ covariate }));
    void runQuery(alignPanel, () =>
      api.align(scenario!.name, estimator, covariates)
    );
  };
  el("undo").onclick = () => {
    if (store?.undo()) draw();
  };
  el("redo").onclick = () => {
    if (store?.redo()) draw();
  };
  el("remove-edge").onclick = () => {
    if (!store) return;
    const [src, dst] = el<HTMLInputElement>("edge").value.split("->");
    try {
      store.removeEdge((src ?? "").trim(), (dst ?? "").trim());
      highlight = [];
      draw();
    } catch (err) {
      reportEditError(err);
    }
  };
  el("add-edge").onclick = () => {
    if (!store) return;
    const [src, dst] = el<HTMLInputElement>("edge").value.split("->");
    try {
      store.addEdge({
        src: (src ?? "").trim(),
        dst: (dst ?? "").trim(),
        coeff: el<HTMLInputElement>("symbol").value || "x",
      });
      highlight = [];
      draw();
    } catch (err) {
      reportEditError(err);
    }
  };
}

void loadCatalog().then(wireActions);
