import { readFileSync } from "node:fs";
import { describe, expect, it } from "vitest";

import type {
  ExportedTrace,
  NodeRecord,
  RenderedState,
  TreeNode,
} from "../src/types.js";
import {
  controlFlags,
  escapeHtml,
  markedIds,
  pathToCursor,
  renderAnalysisResult,
  renderBreakpoints,
  renderForwardChooser,
  renderFunctionList,
  renderStatus,
  renderTasks,
  renderTree,
} from "../src/view.js";

function fixture(name: string): ExportedTrace {
  const url = new URL(`./fixtures/${name}.json`, import.meta.url);
  return JSON.parse(readFileSync(url, "utf-8")) as ExportedTrace;
}

const FIXTURES = ["deterministic", "narrowing", "residuation"].map((name) => ({
  name,
  trace: fixture(name),
}));

function treeIds(node: TreeNode, into: Set<number> = new Set()): Set<number> {
  into.add(node.id);
  for (const child of node.children) treeIds(child, into);
  return into;
}

/** data-ids of spans carrying a given class, from rendered markup. */
function idsWithClass(html: string, cls: string): Set<number> {
  const ids = new Set<number>();
  const spans = html.matchAll(/<span class="([^"]*)" data-id="(\d+)"/g);
  for (const [, classes, id] of spans) {
    if (classes.split(" ").includes(cls)) ids.add(Number(id));
  }
  return ids;
}

function allDataIds(html: string): Set<number> {
  const ids = new Set<number>();
  for (const [, id] of html.matchAll(/data-id="(\d+)"/g)) {
    ids.add(Number(id));
  }
  return ids;
}

describe("markedIds", () => {
  it("is the redex plus the bound variables", () => {
    const state = { redex: 7, bound: [3, 4] } as unknown as RenderedState;
    expect(markedIds(state)).toEqual(new Set([7, 3, 4]));
  });

  it("is empty for a terminal state", () => {
    const state = { redex: null, bound: [] } as unknown as RenderedState;
    expect(markedIds(state).size).toBe(0);
  });
});

describe("renderTree marking", () => {
  // The core contract: exactly the pending redex and the variables the
  // step will bind are painted red, at every state of every fixture.
  for (const { name, trace } of FIXTURES) {
    it(`marks exactly the redex/bound ids red (${name})`, () => {
      for (const record of trace.nodes) {
        const html = renderTree(record.state);
        const red = idsWithClass(html, "red");
        expect(red).toEqual(markedIds(record.state));
      }
    });
  }

  it("marks every occurrence of a shared redex", () => {
    const shared: TreeNode = { id: 2, kind: "fun", label: "f", children: [] };
    const state = {
      tree: { id: 1, kind: "cons", label: ":", children: [shared, shared] },
      shared: [2],
      redex: 2,
      bound: [],
    } as unknown as RenderedState;
    const html = renderTree(state);
    const occurrences = html.match(/node-fun red shared/g) ?? [];
    expect(occurrences).toHaveLength(2);
  });

  it("renders every tree node with its id", () => {
    for (const { trace } of FIXTURES) {
      for (const record of trace.nodes) {
        expect(allDataIds(renderTree(record.state))).toEqual(
          treeIds(record.state.tree),
        );
      }
    }
  });

  it("shows case branch patterns in the label", () => {
    const caseNode = FIXTURES.flatMap(({ trace }) => trace.nodes)
      .map((r) => r.state)
      .find((s) => findKind(s.tree, "case"));
    expect(caseNode).toBeDefined();
    const html = renderTree(caseNode!);
    expect(html).toMatch(/fcase \{\[\]; [^}]*\}/);
  });

  it("escapes markup in labels", () => {
    const state = {
      tree: {
        id: 1,
        kind: "cons",
        label: "<script>alert(1)</script>",
        children: [],
      },
      shared: [],
      redex: null,
      bound: [],
    } as unknown as RenderedState;
    expect(renderTree(state)).not.toContain("<script>");
    expect(renderTree(state)).toContain("&lt;script&gt;");
  });
});

function findKind(node: TreeNode, kind: string): TreeNode | null {
  if (node.kind === kind) return node;
  for (const child of node.children) {
    const found = findKind(child, kind);
    if (found) return found;
  }
  return null;
}

describe("forward chooser", () => {
  // The other core contract: exactly one alternative button per child.
  for (const { name, trace } of FIXTURES) {
    it(`offers as many alternatives as the node has children (${name})`, () => {
      for (const record of trace.nodes) {
        const html = renderForwardChooser(record);
        const altButtons = html.match(/class="alt"/g) ?? [];
        expect(altButtons).toHaveLength(record.children.length);
      }
    });
  }

  it("labels alternatives by index and target", () => {
    const branchy = FIXTURES.flatMap(({ trace }) => trace.nodes).find(
      (r) => r.children.length === 2,
    );
    expect(branchy).toBeDefined();
    const html = renderForwardChooser(branchy!);
    expect(html).toContain('data-alt="0"');
    expect(html).toContain('data-alt="1"');
    expect(html).toContain(`data-target="${branchy!.children[1]}"`);
  });

  it("offers a probe step on an unexpanded running node", () => {
    const record = {
      id: 9,
      children: [],
      terminal: "running",
    } as unknown as NodeRecord;
    const html = renderForwardChooser(record);
    expect(html.match(/class="expand"/g)).toHaveLength(1);
    expect(html).not.toContain('class="alt"');
  });

  it("offers nothing at a terminal leaf", () => {
    const leaf = FIXTURES.flatMap(({ trace }) => trace.nodes).find(
      (r) => r.terminal !== "running" && r.children.length === 0,
    );
    expect(leaf).toBeDefined();
    expect(renderForwardChooser(leaf!)).toBe("");
  });
});

describe("status line", () => {
  it("shows the pending step kind while running", () => {
    const root = fixture("deterministic").nodes.find((n) => n.id === 0)!;
    const html = renderStatus(root.state);
    expect(html).toContain("step 0");
    expect(html).toContain("next: function-unfold");
  });

  it("shows answers and bindings at success", () => {
    const done = fixture("residuation").nodes.find(
      (n) => n.terminal === "success",
    )!;
    const html = renderStatus(done.state);
    expect(html).toContain("success");
    expect(html).toContain("x = 0");
  });

  it("shows the failure reason", () => {
    const failed = fixture("narrowing").nodes.find(
      (n) => n.terminal === "failure",
    )!;
    const html = renderStatus(failed.state);
    expect(html).toContain("failure");
    expect(html).toContain(escapeHtml(failed.state.reason!));
  });
});

describe("task list", () => {
  it("shows suspended tasks with their wait variable", () => {
    const suspended = fixture("residuation").nodes.find((n) =>
      n.state.tasks.some((t) => t.status === "suspended"),
    );
    expect(suspended).toBeDefined();
    const html = renderTasks(suspended!.state);
    expect(html).toContain("suspended");
    expect(html).toMatch(/waiting on #\d+/);
  });

  it("stays empty for a single active task", () => {
    const root = fixture("deterministic").nodes.find((n) => n.id === 0)!;
    expect(renderTasks(root.state)).toBe("");
  });
});

describe("trace path", () => {
  for (const { name, trace } of FIXTURES) {
    it(`walks parent links from root to cursor (${name})`, () => {
      const path = pathToCursor(trace.nodes, trace.cursor);
      expect(path[0]).toBe(trace.root);
      expect(path[path.length - 1]).toBe(trace.cursor);
      const byId = new Map(trace.nodes.map((n) => [n.id, n]));
      for (let i = 0; i + 1 < path.length; i++) {
        expect(byId.get(path[i])!.children).toContain(path[i + 1]);
      }
    });
  }
});

describe("program pane", () => {
  it("lists functions and highlights the selection", () => {
    const html = renderFunctionList(["conc", "last"], "last");
    expect(html).toContain('data-fn="conc"');
    expect(html).toMatch(/class="fn selected" data-fn="last"/);
    expect(html.match(/class="fn[ "]/g)).toHaveLength(2);
  });

  it("renders message results", () => {
    const html = renderAnalysisResult({
      function: "conc",
      message: "[a] -> [a] -> [a]",
    });
    expect(html).toContain("conc: [a] -&gt; [a] -&gt; [a]");
  });

  it("renders empty messages as (none)", () => {
    expect(renderAnalysisResult({ function: "last", message: "" })).toContain(
      "(none)",
    );
  });

  it("renders graph results as edge lists", () => {
    const html = renderAnalysisResult({
      function: "last",
      graph: {
        root: "last",
        nodes: ["last", "conc"],
        edges: [["last", "conc"]],
      },
    });
    expect(html).toContain("last: last -&gt; conc");
  });
});

describe("controls", () => {
  const det = fixture("deterministic");
  const root = det.nodes.find((n) => n.id === det.root)!;
  const success = det.nodes.find((n) => n.terminal === "success")!;

  it("disables back at the root and run at a terminal", () => {
    expect(controlFlags(root.state)).toEqual({ canBack: false, canRun: true });
    expect(controlFlags(success.state)).toEqual({
      canBack: true,
      canRun: false,
    });
    expect(controlFlags(null)).toEqual({ canBack: false, canRun: false });
  });

  it("renders breakpoint chips sorted with clear handles", () => {
    const html = renderBreakpoints(new Set(["last", "conc"]));
    const names = [...html.matchAll(/data-bp="(\w+)"/g)].map((m) => m[1]);
    expect(names).toEqual(["conc", "last"]);
    expect(html).toContain('class="bp"');
  });

  it("renders no chips when nothing is set", () => {
    expect(renderBreakpoints(new Set())).toBe("");
  });
});
