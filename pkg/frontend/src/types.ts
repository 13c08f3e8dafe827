/**
 * JSON schemas shared with the analysis server.
 *
 * The UI never invents its own representation: these zod schemas mirror
 * the server's file formats exactly, so a graph serialized here is a
 * valid request body and every response can be validated before display.
 */
import { z } from "zod";

export const NodeRole = z.enum([
  "treatment",
  "outcome_level",
  "outcome_delta",
  "covariate",
  "latent_confounder",
]);
export type NodeRole = z.infer<typeof NodeRole>;

export const NodeSpec = z
  .object({
    name: z.string().min(1),
    time: z.number().int(),
    role: NodeRole,
    observed: z.boolean(),
    deterministic: z.boolean().optional(),
    post: z.string().optional(),
    baseline: z.string().optional(),
  })
  .strict();
export type NodeSpec = z.infer<typeof NodeSpec>;

export const EdgeSpec = z
  .object({
    src: z.string(),
    dst: z.string(),
    coeff: z.union([z.string(), z.number()]),
  })
  .strict();
export type EdgeSpec = z.infer<typeof EdgeSpec>;

export const GraphJson = z
  .object({
    form: z.enum(["natural", "compact"]),
    nodes: z.array(NodeSpec),
    edges: z.array(EdgeSpec),
  })
  .strict();
export type GraphJson = z.infer<typeof GraphJson>;

export const ScenarioEntry = z.object({
  name: z.string(),
  description: z.string(),
  periods: z.array(z.number().int()),
  treatments: z.record(z.string()),
  deltas: z.record(z.string()),
  families: z.record(z.record(z.string())),
  truth: z.record(z.string()),
  assignment: z.record(z.number()),
  estimators: z.array(z.string()),
  natural: GraphJson,
  compact: GraphJson,
});
export type ScenarioEntry = z.infer<typeof ScenarioEntry>;

export const ScenarioCatalog = z.object({
  schema: z.string(),
  scenarios: z.array(ScenarioEntry),
});
export type ScenarioCatalog = z.infer<typeof ScenarioCatalog>;

export const SetsResponse = z.object({ sets: z.array(z.array(z.string())) });
export type SetsResponse = z.infer<typeof SetsResponse>;

export const IdentifyResponse = z.object({
  status: z.string(),
  detail: z.string(),
  open_paths: z.array(z.array(z.string())),
  path_sum: z.string().nullable(),
});
export type IdentifyResponse = z.infer<typeof IdentifyResponse>;

export const AlignResponse = z.object({
  unclear: z.boolean(),
  per_period: z.record(z.array(z.tuple([z.string(), z.number()]))),
  notes: z.array(z.string()),
  category: z.string(),
});
export type AlignResponse = z.infer<typeof AlignResponse>;

export const TraceResponse = z.object({
  paths: z.array(z.object({ nodes: z.array(z.string()), product: z.string() })),
  sum: z.string(),
  value: z.number().optional(),
});
export type TraceResponse = z.infer<typeof TraceResponse>;

export const ValidateResponse = z.object({
  ok: z.boolean(),
  diagnostics: z.array(
    z.object({
      code: z.string(),
      severity: z.string(),
      message: z.string(),
      element: z.string().nullable(),
    })
  ),
});
export type ValidateResponse = z.infer<typeof ValidateResponse>;

export const CompactResponse = z.object({ graph: GraphJson });
export type CompactResponse = z.infer<typeof CompactResponse>;

export const SimulateResponse = z.object({ csv: z.string() });
export type SimulateResponse = z.infer<typeof SimulateResponse>;

export const ErrorBody = z.object({
  error: z.object({ type: z.string(), message: z.string() }),
});
export type ErrorBody = z.infer<typeof ErrorBody>;
