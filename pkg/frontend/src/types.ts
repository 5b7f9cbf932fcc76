// Wire format of the workbench HTTP service.

export type Terminal = "running" | "success" | "failure" | "floundered";

export interface TreeNode {
  id: number;
  kind:
    | "var"
    | "lit"
    | "cons"
    | "fun"
    | "part"
    | "apply"
    | "or"
    | "conj"
    | "case"
    | "elided";
  label: string;
  children: TreeNode[];
  patterns?: string[]; // case nodes: one label per branch
  missing?: number; // part nodes: arguments still expected
}

export interface TaskView {
  id: number;
  status: "active" | "suspended";
  goal: number;
  wait?: number;
}

export interface RenderedState {
  step: number;
  terminal: Terminal;
  root: number;
  tree: TreeNode;
  shared: number[];
  redex: number | null;
  kind: string | null;
  bound: number[];
  tasks: TaskView[];
  vars: [string, number][];
  answer: string | null;
  bindings: [string, string][] | null;
  reason: string | null;
}

export interface StepInfo {
  redex: number;
  kind: string;
  bound: [number, number][]; // (variable id, target id) pairs
}

export interface NodeRecord {
  id: number;
  state: RenderedState;
  stepinfo: StepInfo | null;
  children: number[];
  terminal: Terminal;
}

export interface ExportedTrace {
  nodes: NodeRecord[];
  root: number;
  cursor: number;
}

export interface LoadResponse {
  module: string;
  functions: string[];
  version: string;
  lang: string;
}

export interface AnalyzeResponse {
  function: string;
  message?: string;
  graph?: { root: string; nodes: string[]; edges: [string, string][] };
  dot?: string;
}
