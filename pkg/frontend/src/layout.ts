/**
 * Deterministic layered layout: one column per time index, latent
 * confounders on top, then treatments, covariates, and outcomes, each
 * group ordered by name. Pure function of the node list, so the same
 * graph always renders in the same place.
 */
import { NodeSpec } from "./types.js";

export interface Point {
  x: number;
  y: number;
}

const ROLE_RANK: Record<string, number> = {
  latent_confounder: 0,
  treatment: 1,
  covariate: 2,
  outcome_level: 3,
  outcome_delta: 4,
};

export const COLUMN_WIDTH = 160;
export const ROW_HEIGHT = 90;
export const MARGIN = 60;

export function layout(nodes: readonly NodeSpec[]): Map<string, Point> {
  const times = [...new Set(nodes.map((n) => n.time))].sort((a, b) => a - b);
  const column = new Map(times.map((t, i) => [t, i]));
  const points = new Map<string, Point>();
  for (const t of times) {
    const members = nodes
      .filter((n) => n.time === t)
      .sort((a, b) => {
        const byRole = (ROLE_RANK[a.role] ?? 9) - (ROLE_RANK[b.role] ?? 9);
        return byRole !== 0 ? byRole : a.name.localeCompare(b.name);
      });
    members.forEach((n, row) => {
      points.set(n.name, {
        x: MARGIN + column.get(t)! * COLUMN_WIDTH,
        y: MARGIN + row * ROW_HEIGHT,
      });
    });
  }
  return points;
}
