// Thin fetch client for the workbench service.

import type {
  AnalyzeResponse,
  ExportedTrace,
  LoadResponse,
  RenderedState,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    detail: string,
  ) {
    super(detail);
  }
}

async function unwrap<T>(response: Response): Promise<T> {
  const body = await response.json();
  if (!response.ok) {
    throw new ApiError(response.status, body.detail ?? response.statusText);
  }
  return body as T;
}

export class Api {
  constructor(
    private base: string = "",
    private doFetch: typeof fetch = fetch,
  ) {}

  private get(path: string): Promise<Response> {
    return this.doFetch(this.base + path);
  }

  private post(path: string, body?: unknown): Promise<Response> {
    return this.doFetch(this.base + path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
  }

  async newSession(): Promise<string> {
    const data = await unwrap<{ id: string }>(await this.post("/session"));
    return data.id;
  }

  load(sid: string, source: string, lang: string): Promise<LoadResponse> {
    return this.post(`/session/${sid}/load`, { source, lang }).then((r) =>
      unwrap<LoadResponse>(r),
    );
  }

  async analyses(sid: string): Promise<string[]> {
    const data = await unwrap<{ analyses: string[] }>(
      await this.get(`/session/${sid}/analyses`),
    );
    return data.analyses;
  }

  analyze(sid: string, name: string, fn: string): Promise<AnalyzeResponse> {
    const query = `name=${encodeURIComponent(name)}&function=${encodeURIComponent(fn)}`;
    return this.get(`/session/${sid}/analyze?${query}`).then((r) =>
      unwrap<AnalyzeResponse>(r),
    );
  }

  newTrace(
    sid: string,
    goal: string,
  ): Promise<{ trace: string; step: RenderedState }> {
    return this.post(`/session/${sid}/trace`, { goal }).then((r) =>
      unwrap<{ trace: string; step: RenderedState }>(r),
    );
  }

  forward(tid: string, alt: number): Promise<RenderedState> {
    return this.post(`/trace/${tid}/forward`, { alt }).then((r) =>
      unwrap<RenderedState>(r),
    );
  }

  backward(tid: string): Promise<RenderedState> {
    return this.post(`/trace/${tid}/backward`).then((r) =>
      unwrap<RenderedState>(r),
    );
  }

  runTo(
    tid: string,
    policy: string | { steps: number },
  ): Promise<RenderedState> {
    return this.post(`/trace/${tid}/runto`, { policy }).then((r) =>
      unwrap<RenderedState>(r),
    );
  }

  breakpoint(tid: string, fn: string, on: boolean): Promise<RenderedState> {
    return this.post(`/trace/${tid}/breakpoint`, { fn, on }).then((r) =>
      unwrap<RenderedState>(r),
    );
  }

  exportTrace(tid: string): Promise<ExportedTrace> {
    return this.get(`/trace/${tid}/export`).then((r) =>
      unwrap<ExportedTrace>(r),
    );
  }
}
