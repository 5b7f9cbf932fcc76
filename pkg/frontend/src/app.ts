// DOM glue: owns the document, delegates all rendering to view.ts.

import { Api, ApiError } from "./api.js";
import type { ExportedTrace, NodeRecord, RenderedState } from "./types.js";
import {
  controlFlags,
  renderAnalysisResult,
  renderBreakpoints,
  renderForwardChooser,
  renderFunctionList,
  renderStatus,
  renderTasks,
  renderTree,
} from "./view.js";

const api = new Api();

interface UiState {
  sid: string | null;
  tid: string | null;
  functions: string[];
  selectedFn: string | null;
  state: RenderedState | null;
  exported: ExportedTrace | null;
  breakpoints: Set<string>;
}

const ui: UiState = {
  sid: null,
  tid: null,
  functions: [],
  selectedFn: null,
  state: null,
  exported: null,
  breakpoints: new Set(),
};

function el<T extends HTMLElement>(id: string): T {
  const found = document.getElementById(id);
  if (!found) throw new Error(`missing element #${id}`);
  return found as T;
}

function setError(message: string) {
  el("error").textContent = message;
}

async function guard(action: () => Promise<void>) {
  setError("");
  try {
    await action();
  } catch (err) {
    if (err instanceof ApiError) setError(`${err.status}: ${err.message}`);
    else setError(String(err));
  }
}

function cursorRecord(): NodeRecord | null {
  if (!ui.exported) return null;
  return ui.exported.nodes.find((n) => n.id === ui.exported!.cursor) ?? null;
}

function repaintTrace() {
  if (!ui.state) return;
  el("status").innerHTML = renderStatus(ui.state);
  el("tasks").innerHTML = renderTasks(ui.state);
  el("tree").innerHTML = renderTree(ui.state);
  const record = cursorRecord();
  el("chooser").innerHTML = record ? renderForwardChooser(record) : "";
  const flags = controlFlags(ui.state);
  el<HTMLButtonElement>("back").disabled = !flags.canBack;
  el<HTMLButtonElement>("run-terminal").disabled = !flags.canRun;
  el<HTMLButtonElement>("run-break").disabled = !flags.canRun;
}

function repaintBreakpoints() {
  el("breakpoints").innerHTML = renderBreakpoints(ui.breakpoints);
  for (const chip of el("breakpoints").querySelectorAll<HTMLElement>(".bp")) {
    chip.onclick = () =>
      guard(async () => {
        const fn = chip.dataset.bp!;
        if (ui.tid) await api.breakpoint(ui.tid, fn, false);
        ui.breakpoints.delete(fn);
        repaintBreakpoints();
      });
  }
}

async function refresh(state: RenderedState) {
  ui.state = state;
  if (ui.tid) ui.exported = await api.exportTrace(ui.tid);
  repaintTrace();
}

function repaintFunctions() {
  el("functions").innerHTML = renderFunctionList(ui.functions, ui.selectedFn);
  for (const item of el("functions").querySelectorAll<HTMLElement>(".fn")) {
    item.onclick = () =>
      guard(async () => {
        ui.selectedFn = item.dataset.fn ?? null;
        repaintFunctions();
        await runAnalysis();
      });
  }
}

async function runAnalysis() {
  if (!ui.sid || !ui.selectedFn) return;
  const name = el<HTMLSelectElement>("analysis").value;
  const result = await api.analyze(ui.sid, name, ui.selectedFn);
  el("analysis-out").innerHTML = renderAnalysisResult(result);
}

async function loadProgram() {
  if (!ui.sid) ui.sid = await api.newSession();
  const source = el<HTMLTextAreaElement>("source").value;
  const lang = el<HTMLSelectElement>("lang").value;
  const loaded = await api.load(ui.sid, source, lang);
  ui.functions = loaded.functions;
  ui.selectedFn = loaded.functions[0] ?? null;
  el("module").textContent =
    `${loaded.module} (${loaded.lang}, ${loaded.version.slice(0, 12)})`;
  repaintFunctions();
  const names = await api.analyses(ui.sid);
  el<HTMLSelectElement>("analysis").innerHTML = names
    .map((n) => `<option>${n}</option>`)
    .join("");
  await runAnalysis();
}

async function startTrace() {
  if (!ui.sid) throw new Error("load a program first");
  const goal = el<HTMLInputElement>("goal").value;
  const started = await api.newTrace(ui.sid, goal);
  ui.tid = started.trace;
  ui.breakpoints = new Set();
  repaintBreakpoints();
  await refresh(started.step);
}

function wireControls() {
  el("load").onclick = () => guard(loadProgram);
  el("start").onclick = () => guard(startTrace);
  el<HTMLSelectElement>("analysis").onchange = () => guard(runAnalysis);

  el("chooser").onclick = (event) => {
    const target = event.target as HTMLElement;
    if (target.dataset.alt === undefined || !ui.tid) return;
    const alt = Number(target.dataset.alt);
    guard(async () => refresh(await api.forward(ui.tid!, alt)));
  };
  el("back").onclick = () =>
    guard(async () => {
      if (ui.tid) await refresh(await api.backward(ui.tid));
    });
  el("run-terminal").onclick = () =>
    guard(async () => {
      if (ui.tid) await refresh(await api.runTo(ui.tid, "terminal"));
    });
  el("run-break").onclick = () =>
    guard(async () => {
      if (ui.tid) await refresh(await api.runTo(ui.tid, "breakpoint"));
    });
  el("set-break").onclick = () =>
    guard(async () => {
      const fn = el<HTMLInputElement>("break-fn").value.trim();
      if (!ui.tid || !fn) return;
      const enable = !ui.breakpoints.has(fn);
      await api.breakpoint(ui.tid, fn, enable);
      if (enable) ui.breakpoints.add(fn);
      else ui.breakpoints.delete(fn);
      repaintBreakpoints();
    });
}

document.addEventListener("DOMContentLoaded", wireControls);
