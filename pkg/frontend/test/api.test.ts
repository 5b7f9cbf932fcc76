import { describe, expect, it } from "vitest";

import { Api, ApiError } from "../src/api.js";

interface Call {
  url: string;
  method: string;
  body: unknown;
}

function fakeFetch(
  responses: Record<string, unknown>,
  calls: Call[],
  status = 200,
): typeof fetch {
  return (async (input: RequestInfo | URL, init?: RequestInit) => {
    const url = String(input);
    calls.push({
      url,
      method: init?.method ?? "GET",
      body: init?.body ? JSON.parse(init.body as string) : undefined,
    });
    const path = url.replace(/^https?:\/\/[^/]*/, "").split("?")[0];
    return {
      ok: status < 400,
      status,
      statusText: "whatever",
      json: async () => responses[path] ?? {},
    } as Response;
  }) as typeof fetch;
}

describe("Api", () => {
  it("creates sessions", async () => {
    const calls: Call[] = [];
    const api = new Api("", fakeFetch({ "/session": { id: "s1" } }, calls));
    expect(await api.newSession()).toBe("s1");
    expect(calls[0]).toEqual({
      url: "/session",
      method: "POST",
      body: undefined,
    });
  });

  it("loads source with a language tag", async () => {
    const calls: Call[] = [];
    const api = new Api("", fakeFetch({}, calls));
    await api.load("s1", "f x = x", "mcy");
    expect(calls[0].url).toBe("/session/s1/load");
    expect(calls[0].body).toEqual({ source: "f x = x", lang: "mcy" });
  });

  it("queries analyses with encoded names", async () => {
    const calls: Call[] = [];
    const api = new Api("", fakeFetch({}, calls));
    await api.analyze("s1", "Get Type", "conc");
    expect(calls[0].url).toBe(
      "/session/s1/analyze?name=Get%20Type&function=conc",
    );
    expect(calls[0].method).toBe("GET");
  });

  it("drives trace endpoints", async () => {
    const calls: Call[] = [];
    const api = new Api(
      "",
      fakeFetch({ "/session/s1/trace": { trace: "t1", step: {} } }, calls),
    );
    const started = await api.newTrace("s1", "coin");
    expect(started.trace).toBe("t1");
    await api.forward("t1", 1);
    await api.backward("t1");
    await api.runTo("t1", { steps: 3 });
    await api.breakpoint("t1", "conc", true);
    await api.exportTrace("t1");
    expect(calls.map((c) => [c.method, c.url])).toEqual([
      ["POST", "/session/s1/trace"],
      ["POST", "/trace/t1/forward"],
      ["POST", "/trace/t1/backward"],
      ["POST", "/trace/t1/runto"],
      ["POST", "/trace/t1/breakpoint"],
      ["GET", "/trace/t1/export"],
    ]);
    expect(calls[1].body).toEqual({ alt: 1 });
    expect(calls[3].body).toEqual({ policy: { steps: 3 } });
    expect(calls[4].body).toEqual({ fn: "conc", on: true });
  });

  it("prefixes a base url", async () => {
    const calls: Call[] = [];
    const api = new Api("http://x:1", fakeFetch({}, calls));
    await api.backward("t1");
    expect(calls[0].url).toBe("http://x:1/trace/t1/backward");
  });

  it("raises ApiError with the service detail", async () => {
    const calls: Call[] = [];
    const api = new Api(
      "",
      fakeFetch(
        { "/trace/t1/forward": { detail: "cannot step a terminal state" } },
        calls,
        409,
      ),
    );
    const err = await api.forward("t1", 0).catch((e) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect(err.status).toBe(409);
    expect(err.message).toBe("cannot step a terminal state");
  });
});
