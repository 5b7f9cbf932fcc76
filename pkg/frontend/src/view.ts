// Pure rendering: wire-format data in, HTML strings out.
// No DOM access here; app.ts owns the document.

import type {
  AnalyzeResponse,
  NodeRecord,
  RenderedState,
  TreeNode,
} from "./types.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

/** Ids to paint red: the pending redex and the variables it would bind. */
export function markedIds(state: RenderedState): Set<number> {
  const ids = new Set<number>(state.bound);
  if (state.redex !== null) ids.add(state.redex);
  return ids;
}

function nodeClasses(
  node: TreeNode,
  marks: Set<number>,
  shared: Set<number>,
): string {
  const classes = ["node", `node-${node.kind}`];
  if (marks.has(node.id)) classes.push("red");
  if (shared.has(node.id)) classes.push("shared");
  return classes.join(" ");
}

function treeHtml(
  node: TreeNode,
  marks: Set<number>,
  shared: Set<number>,
): string {
  const cls = nodeClasses(node, marks, shared);
  let label = escapeHtml(node.label);
  if (node.kind === "case" && node.patterns) {
    label += ` {${escapeHtml(node.patterns.join("; "))}}`;
  }
  if (node.kind === "part" && node.missing !== undefined) {
    label += ` (needs ${node.missing})`;
  }
  const head = `<span class="${cls}" data-id="${node.id}">${label}</span>`;
  if (node.children.length === 0) {
    return `<li>${head}</li>`;
  }
  const kids = node.children
    .map((child) => treeHtml(child, marks, shared))
    .join("");
  return `<li>${head}<ul>${kids}</ul></li>`;
}

/** The expression tree with exactly the redex/bound ids marked red. */
export function renderTree(state: RenderedState): string {
  const marks = markedIds(state);
  const shared = new Set(state.shared);
  return `<ul class="tree">${treeHtml(state.tree, marks, shared)}</ul>`;
}

export function renderStatus(state: RenderedState): string {
  const bits = [`<span class="step">step ${state.step}</span>`];
  if (state.terminal === "running" && state.kind) {
    bits.push(`<span class="kind">next: ${escapeHtml(state.kind)}</span>`);
  } else {
    bits.push(`<span class="terminal ${state.terminal}">${state.terminal}</span>`);
  }
  if (state.answer !== null) {
    bits.push(`<span class="answer">${escapeHtml(state.answer)}</span>`);
  }
  if (state.bindings) {
    for (const [name, value] of state.bindings) {
      bits.push(
        `<span class="binding">${escapeHtml(name)} = ${escapeHtml(value)}</span>`,
      );
    }
  }
  if (state.reason !== null) {
    bits.push(`<span class="reason">${escapeHtml(state.reason)}</span>`);
  }
  return bits.join(" ");
}

export function renderTasks(state: RenderedState): string {
  if (state.tasks.length < 2 && !state.tasks.some((t) => t.status === "suspended")) {
    return "";
  }
  const rows = state.tasks
    .map((t) => {
      const wait = t.wait !== undefined ? ` waiting on #${t.wait}` : "";
      return `<li class="task ${t.status}">task ${t.id}: ${t.status}${wait}</li>`;
    })
    .join("");
  return `<ul class="tasks">${rows}</ul>`;
}

/**
 * Forward controls for a trace node: one button per child, nothing more.
 * An unexpanded node (no children computed yet) gets a single probe
 * button only while the state is still running; that button carries the
 * "expand" class, not "alt".
 */
export function renderForwardChooser(record: NodeRecord): string {
  const buttons = record.children.map(
    (child, index) =>
      `<button class="alt" data-alt="${index}" data-target="${child}">` +
      `alt ${index}</button>`,
  );
  if (buttons.length === 0 && record.terminal === "running") {
    return `<button class="expand" data-alt="0">step</button>`;
  }
  return buttons.join("");
}

export function renderFunctionList(
  functions: string[],
  selected: string | null,
): string {
  return functions
    .map((name) => {
      const cls = name === selected ? "fn selected" : "fn";
      return `<li class="${cls}" data-fn="${escapeHtml(name)}">${escapeHtml(name)}</li>`;
    })
    .join("");
}

export function renderAnalysisResult(result: AnalyzeResponse): string {
  if (result.message !== undefined) {
    const text = result.message === "" ? "(none)" : result.message;
    return `<code>${escapeHtml(result.function)}: ${escapeHtml(text)}</code>`;
  }
  if (result.graph) {
    const edges = result.graph.edges
      .map(([a, b]) => `${escapeHtml(a)} -&gt; ${escapeHtml(b)}`)
      .join(", ");
    return `<code>${escapeHtml(result.graph.root)}: ${edges || "no edges"}</code>`;
  }
  return "<code>?</code>";
}

/** Active breakpoints as clickable chips; clicking one clears it. */
export function renderBreakpoints(names: ReadonlySet<string>): string {
  return [...names]
    .sort()
    .map(
      (name) =>
        `<button class="bp" data-bp="${escapeHtml(name)}">` +
        `${escapeHtml(name)} &times;</button>`,
    )
    .join("");
}

export interface ControlFlags {
  canBack: boolean;
  canRun: boolean;
}

/** Which navigation controls make sense at this state. */
export function controlFlags(state: RenderedState | null): ControlFlags {
  if (!state) return { canBack: false, canRun: false };
  return {
    canBack: state.step > 0,
    canRun: state.terminal === "running",
  };
}

/** Breadcrumb over the visited trace: root to cursor, oldest first. */
export function pathToCursor(records: NodeRecord[], cursor: number): number[] {
  const parents = new Map<number, number>();
  for (const record of records) {
    for (const child of record.children) parents.set(child, record.id);
  }
  const path = [cursor];
  while (parents.has(path[0])) {
    path.unshift(parents.get(path[0])!);
  }
  return path;
}
