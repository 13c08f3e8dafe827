// UI contract: panels render server JSON byte-equal for every scenario.
//
// Fixtures under ../fixtures are byte-exact recordings of the analysis
// server's responses (scripts/record_fixtures.py). The API client is
// exercised against a stub that replays those bodies, and each panel's
// rendered JSON must equal the recorded bytes exactly — the UI never
// recomputes or reformats a verdict.
import { readFileSync } from "node:fs";
import { describe, expect, it } from "vitest";

import { ApiClient, ApiError, HttpFetch } from "../src/api.js";
import { QueryPanel } from "../src/panels.js";
import {
  AlignResponse,
  IdentifyResponse,
  ScenarioCatalog,
  SetsResponse,
} from "../src/types.js";

function fixture(name: string): string {
  return readFileSync(new URL(`../fixtures/${name}`, import.meta.url), "utf-8");
}

const catalog = ScenarioCatalog.parse(JSON.parse(fixture("catalog.json")));
const manifest = JSON.parse(fixture("manifest.json")) as Record<
  string,
  { requests: Record<string, unknown> }
>;

function replayFetch(bodyByPath: Record<string, string>): HttpFetch {
  return async (url) => {
    const path = new URL(url).pathname;
    const body = bodyByPath[path];
    if (body === undefined) {
      return { status: 404, text: async () => '{"error":{"type":"NotFound","message":"?"}}' };
    }
    return { status: 200, text: async () => body };
  };
}

describe("recorded-fixture contract", () => {
  for (const entry of catalog.scenarios) {
    it(`${entry.name}: sets/identify/align panels render byte-equal JSON`, async () => {
      const bodies = {
        "/api/sets": fixture(`${entry.name}.sets.json`),
        "/api/identify": fixture(`${entry.name}.identify.json`),
        "/api/align": fixture(`${entry.name}.align.json`),
      };
      const client = new ApiClient("http://server.test", replayFetch(bodies));
      const period = String(entry.periods[0]);
      const request = manifest[entry.name]!.requests as {
        identify: { set: string[] };
      };

      const setsPanel = new QueryPanel<SetsResponse>();
      const sets = await client.sets(
        entry.compact,
        entry.treatments[period]!,
        entry.deltas[period]!
      );
      setsPanel.resolve(setsPanel.begin(0), sets.raw, sets.data);
      expect(setsPanel.renderJson()).toBe(bodies["/api/sets"]);

      const identifyPanel = new QueryPanel<IdentifyResponse>();
      const identify = await client.identify(
        entry.compact,
        entry.treatments[period]!,
        entry.deltas[period]!,
        request.identify.set
      );
      identifyPanel.resolve(identifyPanel.begin(0), identify.raw, identify.data);
      expect(identifyPanel.renderJson()).toBe(bodies["/api/identify"]);

      const alignPanel = new QueryPanel<AlignResponse>();
      const align = await client.align(
        entry.name,
        "dY(X)",
        request.identify.set.map((covariate) => ({ covariate })),
        Number(period)
      );
      alignPanel.resolve(alignPanel.begin(0), align.raw, align.data);
      expect(alignPanel.renderJson()).toBe(bodies["/api/align"]);

      // the parsed views stay schema-valid
      expect(SetsResponse.parse(JSON.parse(sets.raw))).toEqual(sets.data);
      expect(IdentifyResponse.parse(JSON.parse(identify.raw))).toEqual(
        identify.data
      );
      expect(AlignResponse.parse(JSON.parse(align.raw))).toEqual(align.data);
    });
  }

  it("adjusting the fig4 first minimal set is sufficient", () => {
    const identify = IdentifyResponse.parse(
      JSON.parse(fixture("fig4.identify.json"))
    );
    expect(identify.status).toBe("sufficient");
    const sets = SetsResponse.parse(JSON.parse(fixture("fig4.sets.json")));
    expect(sets.sets).toEqual([["W0"]]);
  });

  it("maps HTTP 400 bodies to ApiError with the server's type and message", async () => {
    const fetchImpl: HttpFetch = async () => ({
      status: 400,
      text: async () =>
        '{"error":{"type":"UnknownNodeError","message":"no node named \'QQ\'"}}',
    });
    const client = new ApiClient("http://server.test", fetchImpl);
    await expect(
      client.sets(catalog.scenarios[0]!.compact, "A1", "QQ")
    ).rejects.toMatchObject({
      name: "ApiError",
      type: "UnknownNodeError",
      status: 400,
    });
    await expect(
      client.sets(catalog.scenarios[0]!.compact, "A1", "QQ")
    ).rejects.toBeInstanceOf(ApiError);
  });
});
