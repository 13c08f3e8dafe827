/**
 * Typed client for the analysis server.
 *
 * Every call returns both the parsed payload and the exact response
 * body text, so panels can display server JSON byte-for-byte. HTTP 400
 * bodies are surfaced as ApiError with the server's type and message.
 */
import { z } from "zod";

import {
  AlignResponse,
  CompactResponse,
  ErrorBody,
  GraphJson,
  IdentifyResponse,
  ScenarioCatalog,
  SetsResponse,
  SimulateResponse,
  TraceResponse,
  ValidateResponse,
} from "./types.js";

export interface HttpResponse {
  status: number;
  text(): Promise<string>;
}

export type HttpFetch = (
  url: string,
  init?: { method?: string; headers?: Record<string, string>; body?: string }
) => Promise<HttpResponse>;

export class ApiError extends Error {
  constructor(
    readonly type: string,
    message: string,
    readonly status: number
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export interface ApiResult<T> {
  data: T;
  raw: string;
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: HttpFetch = (url, init) =>
      fetch(url, init) as unknown as Promise<HttpResponse>
  ) {}

  private async request<T>(
    method: "GET" | "POST",
    path: string,
    schema: z.ZodType<T>,
    body?: unknown
  ): Promise<ApiResult<T>> {
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, {
      method,
      headers: body === undefined ? {} : { "content-type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const raw = await response.text();
    if (response.status >= 400) {
      const parsed = ErrorBody.safeParse(JSON.parse(raw));
      if (parsed.success) {
        throw new ApiError(
          parsed.data.error.type,
          parsed.data.error.message,
          response.status
        );
      }
      throw new ApiError("HttpError", raw, response.status);
    }
    return { data: schema.parse(JSON.parse(raw)), raw };
  }

  scenarios() {
    return this.request("GET", "/api/scenarios", ScenarioCatalog);
  }

  validate(graph: GraphJson) {
    return this.request("POST", "/api/validate", ValidateResponse, { graph });
  }

  compact(graph: GraphJson, delta?: string) {
    return this.request("POST", "/api/compact", CompactResponse, {
      graph,
      ...(delta === undefined ? {} : { delta }),
    });
  }

  sets(graph: GraphJson, treatment: string, outcome: string) {
    return this.request("POST", "/api/sets", SetsResponse, {
      graph,
      treatment,
      outcome,
    });
  }

  trace(
    graph: GraphJson,
    from: string,
    to: string,
    given: string[] = [],
    assign?: Record<string, number>
  ) {
    return this.request("POST", "/api/trace", TraceResponse, {
      graph,
      from,
      to,
      given,
      ...(assign === undefined ? {} : { assign }),
    });
  }

  identify(graph: GraphJson, treatment: string, outcome: string, set: string[]) {
    return this.request("POST", "/api/identify", IdentifyResponse, {
      graph,
      treatment,
      outcome,
      set,
    });
  }

  align(
    scenario: string,
    estimator: string,
    plan: Array<{ covariate: string; strategy?: string; period?: number }>,
    targetPeriod?: number
  ) {
    return this.request("POST", "/api/align", AlignResponse, {
      scenario,
      estimator,
      plan,
      ...(targetPeriod === undefined ? {} : { target_period: targetPeriod }),
    });
  }

  simulate(scenario: string, n: number, mode = "gaussian", seed = 0) {
    return this.request("POST", "/api/simulate", SimulateResponse, {
      scenario,
      n,
      mode,
      seed,
    });
  }

  bench(config: unknown) {
    return this.request("POST", "/api/bench", z.record(z.unknown()), {
      config,
    });
  }
}
