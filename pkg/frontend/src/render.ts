/**
 * SVG generation for the diagram canvas.
 *
 * Pure string output (no DOM dependency): node circles laid out by the
 * layered layout, curved edges via d3-shape path generators, dashed
 * strokes for latent nodes, and optional highlighting of a node path
 * (used for cycle rejection and open-backdoor display).
 */
import { line, curveBasis } from "d3";

import { layout, MARGIN, COLUMN_WIDTH, ROW_HEIGHT, Point } from "./layout.js";
import { EdgeSpec, NodeSpec } from "./types.js";

const NODE_RADIUS = 22;

export interface RenderOptions {
  highlightPath?: readonly string[];
  selection?: string | null;
}

function escapeXml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function edgePath(a: Point, b: Point): string {
  const mid: [number, number] = [
    (a.x + b.x) / 2,
    (a.y + b.y) / 2 - (a.y === b.y ? 24 : 0),
  ];
  const gen = line().curve(curveBasis);
  return gen([
    [a.x, a.y],
    mid,
    [b.x, b.y],
  ])!;
}

export function renderSvg(
  nodes: readonly NodeSpec[],
  edges: readonly EdgeSpec[],
  options: RenderOptions = {}
): string {
  const points = layout(nodes);
  const highlighted = new Set<string>();
  const path = options.highlightPath ?? [];
  for (let i = 0; i + 1 < path.length; i += 1) {
    highlighted.add(`${path[i]}->${path[i + 1]}`);
    highlighted.add(`${path[i + 1]}->${path[i]}`);
  }
  const columns = new Set(nodes.map((n) => n.time)).size;
  const rows = Math.max(
    1,
    ...[...new Set(nodes.map((n) => n.time))].map(
      (t) => nodes.filter((n) => n.time === t).length
    )
  );
  const width = 2 * MARGIN + Math.max(0, columns - 1) * COLUMN_WIDTH + 2 * NODE_RADIUS;
  const height = 2 * MARGIN + Math.max(0, rows - 1) * ROW_HEIGHT + 2 * NODE_RADIUS;

  const edgeMarkup = edges
    .map((e) => {
      const a = points.get(e.src);
      const b = points.get(e.dst);
      if (!a || !b) return "";
      const hot = highlighted.has(`${e.src}->${e.dst}`);
      const stroke = hot ? "#e63946" : "#5c677d";
      const label = escapeXml(String(e.coeff));
      const midX = (a.x + b.x) / 2;
      const midY = (a.y + b.y) / 2 - 10;
      return (
        `<path d="${edgePath(a, b)}" fill="none" stroke="${stroke}" ` +
        `stroke-width="${hot ? 2.5 : 1.5}" marker-end="url(#arrow)"/>` +
        `<text x="${midX}" y="${midY}" font-size="11" fill="${stroke}" ` +
        `text-anchor="middle">${label}</text>`
      );
    })
    .join("");

  const nodeMarkup = nodes
    .map((n) => {
      const p = points.get(n.name)!;
      const inPath = path.includes(n.name);
      const stroke = inPath ? "#e63946" : "#1d3557";
      const dash = n.observed ? "" : ' stroke-dasharray="4 3"';
      const selected = options.selection === n.name;
      const fill = selected ? "#a8dadc" : n.observed ? "#f1faee" : "#ffffff";
      return (
        `<circle cx="${p.x}" cy="${p.y}" r="${NODE_RADIUS}" fill="${fill}" ` +
        `stroke="${stroke}" stroke-width="${inPath ? 2.5 : 1.5}"${dash}/>` +
        `<text x="${p.x}" y="${p.y + 4}" font-size="12" text-anchor="middle" ` +
        `fill="#1d3557">${escapeXml(n.name)}</text>`
      );
    })
    .join("");

  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}">` +
    `<defs><marker id="arrow" viewBox="0 0 10 10" refX="22" refY="5" ` +
    `markerWidth="7" markerHeight="7" orient="auto-start-reverse">` +
    `<path d="M 0 0 L 10 5 L 0 10 z" fill="#5c677d"/></marker></defs>` +
    edgeMarkup +
    nodeMarkup +
    `</svg>`
  );
}
