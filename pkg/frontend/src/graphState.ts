/**
 * Editable graph state with undo/redo and client-side acyclicity checks.
 *
 * The store owns the single source of truth for the diagram being
 * edited. Every committed edit bumps the revision counter (panels use
 * it to mark stale responses), pushes an undo snapshot, and leaves the
 * state serializable to valid graph JSON. Edits that would create a
 * directed cycle are rejected before commit, with the offending path
 * attached for canvas highlighting.
 *
 * Change (outcome_delta) nodes are derived artifacts of the server's
 * compact transform; loading a scenario strips them so the editor works
 * on the structural levels and the server re-derives the deltas.
 */
import { EdgeSpec, GraphJson, NodeSpec, ScenarioEntry } from "./types.js";

export class CycleError extends Error {
  /** Node names along the would-be cycle, starting and ending at dst. */
  readonly path: string[];

  constructor(path: string[]) {
    super(`edge would create a cycle: ${path.join(" -> ")}`);
    this.name = "CycleError";
    this.path = path;
  }
}

export class EditError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "EditError";
  }
}

const UNDO_DEPTH = 100; // contract requires at least 50

export class GraphStore {
  private nodes: NodeSpec[];
  private edges: EdgeSpec[];
  private undoStack: string[] = [];
  private redoStack: string[] = [];
  private rev = 0;
  selection: string | null = null;

  constructor(graph: GraphJson) {
    const parsed = GraphJson.parse(graph);
    this.nodes = parsed.nodes.map((n) => ({ ...n }));
    this.edges = parsed.edges.map((e) => ({ ...e }));
  }

  /** Load a shipped scenario; derived change nodes are stripped. */
  static fromScenario(entry: ScenarioEntry): GraphStore {
    const natural = entry.natural;
    const derived = new Set(
      natural.nodes.filter((n) => n.role === "outcome_delta").map((n) => n.name)
    );
    return new GraphStore({
      form: natural.form,
      nodes: natural.nodes.filter((n) => !derived.has(n.name)),
      edges: natural.edges.filter(
        (e) => !derived.has(e.src) && !derived.has(e.dst)
      ),
    });
  }

  get revision(): number {
    return this.rev;
  }

  get undoDepth(): number {
    return this.undoStack.length;
  }

  nodeNames(): string[] {
    return this.nodes.map((n) => n.name);
  }

  getNode(name: string): NodeSpec | undefined {
    return this.nodes.find((n) => n.name === name);
  }

  listEdges(): readonly EdgeSpec[] {
    return this.edges;
  }

  toGraphJson(): GraphJson {
    return {
      form: "natural",
      nodes: this.nodes.map((n) => ({ ...n })),
      edges: this.edges.map((e) => ({ ...e })),
    };
  }

  serialize(): string {
    return JSON.stringify(this.toGraphJson());
  }

  // -- edit actions ---------------------------------------------------

  addNode(spec: NodeSpec): void {
    NodeSpec.parse(spec);
    if (this.getNode(spec.name)) {
      throw new EditError(`duplicate node ${spec.name}`);
    }
    this.commit(() => {
      this.nodes.push({ ...spec });
    });
  }

  removeNode(name: string): void {
    if (!this.getNode(name)) {
      throw new EditError(`unknown node ${name}`);
    }
    this.commit(() => {
      this.nodes = this.nodes.filter((n) => n.name !== name);
      this.edges = this.edges.filter((e) => e.src !== name && e.dst !== name);
      if (this.selection === name) this.selection = null;
    });
  }

  addEdge(spec: EdgeSpec): void {
    EdgeSpec.parse(spec);
    if (!this.getNode(spec.src) || !this.getNode(spec.dst)) {
      throw new EditError(`unknown endpoint on ${spec.src} -> ${spec.dst}`);
    }
    if (this.edges.some((e) => e.src === spec.src && e.dst === spec.dst)) {
      throw new EditError(`duplicate edge ${spec.src} -> ${spec.dst}`);
    }
    const cycle = this.findPath(spec.dst, spec.src);
    if (cycle) {
      throw new CycleError([...cycle, spec.dst]);
    }
    this.commit(() => {
      this.edges.push({ ...spec });
    });
  }

  removeEdge(src: string, dst: string): void {
    if (!this.edges.some((e) => e.src === src && e.dst === dst)) {
      throw new EditError(`unknown edge ${src} -> ${dst}`);
    }
    this.commit(() => {
      this.edges = this.edges.filter((e) => !(e.src === src && e.dst === dst));
    });
  }

  setSymbol(src: string, dst: string, coeff: string | number): void {
    const edge = this.edges.find((e) => e.src === src && e.dst === dst);
    if (!edge) {
      throw new EditError(`unknown edge ${src} -> ${dst}`);
    }
    this.commit(() => {
      edge.coeff = coeff;
    });
  }

  toggleObserved(name: string): void {
    const node = this.getNode(name);
    if (!node) {
      throw new EditError(`unknown node ${name}`);
    }
    this.commit(() => {
      node.observed = !node.observed;
    });
  }

  /** Selection is view state: no revision bump, no undo entry. */
  select(name: string | null): void {
    if (name !== null && !this.getNode(name)) {
      throw new EditError(`unknown node ${name}`);
    }
    this.selection = name;
  }

  // -- history ----------------------------------------------------------

  undo(): boolean {
    const snapshot = this.undoStack.pop();
    if (snapshot === undefined) return false;
    this.redoStack.push(this.serialize());
    this.restore(snapshot);
    this.rev += 1;
    return true;
  }

  redo(): boolean {
    const snapshot = this.redoStack.pop();
    if (snapshot === undefined) return false;
    this.undoStack.push(this.serialize());
    this.restore(snapshot);
    this.rev += 1;
    return true;
  }

  // -- internals ---------------------------------------------------------

  private commit(mutate: () => void): void {
    this.undoStack.push(this.serialize());
    if (this.undoStack.length > UNDO_DEPTH) this.undoStack.shift();
    this.redoStack = [];
    mutate();
    this.rev += 1;
  }

  private restore(snapshot: string): void {
    const graph = GraphJson.parse(JSON.parse(snapshot));
    this.nodes = graph.nodes.map((n) => ({ ...n }));
    this.edges = graph.edges.map((e) => ({ ...e }));
    if (this.selection !== null && !this.getNode(this.selection)) {
      this.selection = null;
    }
  }

  /** Directed path from -> to, or null. Used for cycle detection. */
  private findPath(from: string, to: string): string[] | null {
    const out = new Map<string, string[]>();
    for (const e of this.edges) {
      const targets = out.get(e.src) ?? [];
      targets.push(e.dst);
      out.set(e.src, targets);
    }
    const stack: string[][] = [[from]];
    const seen = new Set<string>([from]);
    while (stack.length > 0) {
      const path = stack.pop()!;
      const tip = path[path.length - 1]!;
      if (tip === to) return path;
      for (const next of out.get(tip) ?? []) {
        if (!seen.has(next)) {
          seen.add(next);
          stack.push([...path, next]);
        }
      }
    }
    return null;
  }
}
