"""Small-step heap machine for the flat representation.

States are persistent values: every step copies the (immutable-node) heap,
so arbitrarily many successor states can coexist, which is what makes the
reversible tracer cheap.  A step picks the next active task round-robin,
finds its leftmost-outermost demanded redex and applies exactly one rule,
returning every don't-know alternative of that step:

* function calls unfold to eagerly instantiated rule bodies whose pattern
  variables are fresh unbound nodes;
* a case selects on constructor-rooted scrutinees; a flexible case on an
  unbound variable narrows, one alternative per branch, binding the
  variable to a shallow constructor term; a rigid case suspends its task;
* ``Or`` splits into two alternatives, left first;
* ``=:=`` decomposes data structurally with an occurs check, binding
  variables to shallow terms (imitation), and every binding wakes the
  tasks suspended on that variable in the same step;
* ``&`` forks its conjuncts into separate tasks scheduled fairly; ``&>``
  and ``cond`` evaluate their first argument to success first; arithmetic
  primitives are rigid and suspend on unbound arguments.

Contraction always goes through a bound-variable indirection on the redex
node, so every reference to a shared redex observes the contractum.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Optional, Union

from .ir import (
    Apply, Case, Cons, Expr, External, Free, FunCall, Lit, LitPat, Or,
    PartCall, Pattern, Program, Rule, Var, show_term,
)
from . import prelude


class EvalError(Exception):
    pass


class InjectError(EvalError):
    pass


class SteppingTerminalError(EvalError):
    pass


# ---------------------------------------------------------------------------
# Heap nodes


class Node:
    __slots__ = ()


@dataclass(frozen=True)
class NVar(Node):
    hint: Optional[str] = None


@dataclass(frozen=True)
class NBound(Node):
    target: int


@dataclass(frozen=True)
class NLit(Node):
    value: int


@dataclass(frozen=True)
class NStruct(Node):
    name: str
    args: tuple[int, ...] = ()


@dataclass(frozen=True)
class NFun(Node):
    name: str
    args: tuple[int, ...] = ()


@dataclass(frozen=True)
class NPart(Node):
    name: str
    missing: int
    args: tuple[int, ...] = ()


@dataclass(frozen=True)
class NApply(Node):
    fn: int
    arg: int


@dataclass(frozen=True)
class NCaseBranch:
    pattern: Pattern
    patvars: tuple[int, ...]
    body: int


@dataclass(frozen=True)
class NCase(Node):
    kind: str
    scrut: int
    branches: tuple[NCaseBranch, ...]


@dataclass(frozen=True)
class NOr(Node):
    left: int
    right: int


@dataclass(frozen=True)
class NConj(Node):
    """Result of forking a concurrent conjunction; succeeds when all do."""

    parts: tuple[int, ...]


ACTIVE = "active"
SUSPENDED = "suspended"


@dataclass(frozen=True)
class Task:
    id: int
    goal: int
    status: str = ACTIVE
    wait_var: Optional[int] = None
    mode: str = "hnf"  # root task runs to normal form


@dataclass(frozen=True)
class StepInfo:
    redex: int
    kind: str
    bound_vars: tuple[tuple[int, int], ...] = ()


@dataclass
class MachineState:
    """One point of the evaluation; treated as immutable once returned.

    Task order doubles as the round-robin schedule: a task that just
    stepped moves to the back, so active tasks take turns fairly.
    """

    heap: dict[int, Node]
    root: int
    tasks: tuple[Task, ...]
    goal_vars: tuple[tuple[str, int], ...]
    step_count: int = 0
    next_id: int = 1
    next_task: int = 1
    failed: Optional[str] = None

    def fork(self) -> "MachineState":
        return MachineState(dict(self.heap), self.root, self.tasks,
                            self.goal_vars, self.step_count, self.next_id,
                            self.next_task, self.failed)

    def alloc(self, node: Node) -> int:
        nid = self.next_id
        self.next_id += 1
        self.heap[nid] = node
        return nid


def deref(heap: dict[int, Node], nid: int) -> tuple[int, Node]:
    node = heap[nid]
    while isinstance(node, NBound):
        nid = node.target
        node = heap[nid]
    return nid, node


# ---------------------------------------------------------------------------
# Injection


def _check_goal(program: Program, goal: Expr):
    arity = {f.name: f.arity for f in program.functions}
    for name, b in prelude.BUILTINS.items():
        arity.setdefault(name, b.arity)
    from .ir import subexprs

    for e in subexprs(goal):
        if isinstance(e, (FunCall, PartCall)) and e.name not in arity:
            raise InjectError(f"unknown function {e.name} in goal")
        if isinstance(e, Cons) and program.constructor(e.name) is None:
            raise InjectError(f"unknown constructor {e.name} in goal")


def inject(program: Program, goal: Expr,
           hints: Optional[dict[int, str]] = None) -> MachineState:
    """Build the initial state: shared heap, one active root task.

    Open variables of the goal and variables introduced by its own Free
    nodes become the answer variables, in order of first appearance.
    """
    _check_goal(program, goal)
    hints = hints or {}
    state = MachineState(heap={}, root=0, tasks=(), goal_vars=())
    env: dict[int, int] = {}
    goal_vars: list[tuple[str, int]] = []

    def note_var(var_id: int) -> int:
        name = hints.get(var_id, f"_{var_id}")
        nid = state.alloc(NVar(name))
        goal_vars.append((name, nid))
        return nid

    memo: dict[object, int] = {}
    root = _instantiate(state, program, goal, env, memo, note_var)
    state.root = root
    state.tasks = (Task(id=1, goal=root, mode="nf"),)
    state.next_task = 2
    state.goal_vars = tuple(goal_vars)
    state.tasks = _sweep(program, state)  # the goal may already be a value
    return state


def _free_vars(e: Expr, bound: frozenset[int]) -> frozenset[int]:
    if isinstance(e, Var):
        return frozenset() if e.id in bound else frozenset((e.id,))
    if isinstance(e, (Cons, FunCall, PartCall)):
        out = frozenset()
        for a in e.args:
            out |= _free_vars(a, bound)
        return out
    if isinstance(e, Case):
        out = _free_vars(e.scrutinee, bound)
        for b in e.branches:
            inner = bound
            if not isinstance(b.pattern, LitPat):
                inner = bound | frozenset(b.pattern.vars)
            out |= _free_vars(b.body, inner)
        return out
    if isinstance(e, Or):
        return _free_vars(e.left, bound) | _free_vars(e.right, bound)
    if isinstance(e, Free):
        return _free_vars(e.body, bound | frozenset(e.vars))
    if isinstance(e, Apply):
        return _free_vars(e.fn, bound) | _free_vars(e.arg, bound)
    return frozenset()


def _static_data(e: Expr) -> bool:
    """Literals and constructor terms over variables carry no choices, so
    syntactically identical occurrences may share one heap node.  Anything
    with a function call (or disjunction) inside must stay independent:
    each textual occurrence makes its own nondeterministic choices."""
    if isinstance(e, (Var, Lit)):
        return True
    if isinstance(e, Cons):
        return all(_static_data(a) for a in e.args)
    return False


def _instantiate(state: MachineState, program: Program, e: Expr,
                 env: dict[int, int], memo: Optional[dict],
                 fresh_var: Callable[[int], int],
                 hints: Optional[dict[int, str]] = None) -> int:
    """Build heap nodes for an expression.

    With a memo table, syntactically identical data subterms of one call
    share one node (used for goal injection; rule unfolding passes None).
    """

    def go(e: Expr, env: dict[int, int]) -> int:
        if isinstance(e, Var):
            if e.id not in env:
                env[e.id] = fresh_var(e.id)
            return env[e.id]
        key = None
        if memo is not None and _static_data(e):
            fv = _free_vars(e, frozenset())
            key = (e, tuple(sorted((v, env[v]) for v in fv if v in env)))
            if key in memo:
                return memo[key]
        nid = build(e, env)
        if key is not None:
            memo[key] = nid
        return nid

    def build(e: Expr, env: dict[int, int]) -> int:
        if isinstance(e, Lit):
            return state.alloc(NLit(e.value))
        if isinstance(e, Cons):
            return state.alloc(NStruct(e.name, tuple(go(a, env) for a in e.args)))
        if isinstance(e, FunCall):
            return state.alloc(NFun(e.name, tuple(go(a, env) for a in e.args)))
        if isinstance(e, PartCall):
            return state.alloc(NPart(e.name, e.missing,
                                     tuple(go(a, env) for a in e.args)))
        if isinstance(e, Or):
            return state.alloc(NOr(go(e.left, env), go(e.right, env)))
        if isinstance(e, Apply):
            return state.alloc(NApply(go(e.fn, env), go(e.arg, env)))
        if isinstance(e, Free):
            inner = dict(env)
            for v in e.vars:
                inner[v] = fresh_var(v)
            return go(e.body, inner)
        if isinstance(e, Case):
            scrut = go(e.scrutinee, env)
            branches = []
            for b in e.branches:
                inner = dict(env)
                pvs: list[int] = []
                if not isinstance(b.pattern, LitPat):
                    for v in b.pattern.vars:
                        hint = hints.get(v) if hints else None
                        pv = state.alloc(NVar(hint))
                        inner[v] = pv
                        pvs.append(pv)
                branches.append(NCaseBranch(b.pattern, tuple(pvs),
                                            go(b.body, inner)))
            return state.alloc(NCase(e.kind, scrut, tuple(branches)))
        raise InjectError(f"cannot build {type(e).__name__}")

    return go(e, env)


def _unfold_body(state: MachineState, program: Program, fname: str,
                 rule: Rule, args: tuple[int, ...]) -> int:
    env = dict(zip(rule.params, args))
    hint_map = rule.hint_map()

    def fresh(var_id: int) -> int:
        return state.alloc(NVar(hint_map.get(var_id)))

    return _instantiate(state, program, rule.body, env, None, fresh, hint_map)


# ---------------------------------------------------------------------------
# Demand: find the next redex of one task


@dataclass(frozen=True)
class Redex:
    node: int


@dataclass(frozen=True)
class Suspend:
    var: int
    at: int


@dataclass(frozen=True)
class Blocked:
    pass


@dataclass(frozen=True)
class Done:
    pass


_ARITH = {"+", "-", "*", "==", "<", "<="}
_REDUCIBLE = (NFun, NCase, NOr, NApply)

Demand = Union[Redex, Suspend, Blocked, Done]


def _conj_success(heap, nid) -> Optional[bool]:
    """True if every part succeeded, None while something is pending,
    False only for data that definitely is not a constraint success."""
    _, node = deref(heap, nid)
    if isinstance(node, NStruct):
        return node.name == "Success"
    if isinstance(node, NConj):
        ok = True
        for p in node.parts:
            sub = _conj_success(heap, p)
            if sub is None:
                ok = None
            elif sub is False:
                return False
        return ok
    if isinstance(node, (NLit, NPart)):
        return False
    return None  # unreduced or unbound: still pending


def demand(program: Program, heap: dict[int, Node], nid: int,
           mode: str) -> Demand:
    nid, node = deref(heap, nid)

    if isinstance(node, (NVar, NLit, NPart)):
        return Done()
    if isinstance(node, NStruct):
        if mode == "hnf":
            return Done()
        for a in node.args:
            d = demand(program, heap, a, "nf")
            if not isinstance(d, Done):
                return d
        return Done()
    if isinstance(node, NConj):
        return Done() if _conj_success(heap, nid) else Blocked()
    if isinstance(node, NOr):
        return Redex(nid)
    if isinstance(node, NApply):
        fid, fn = deref(heap, node.fn)
        if isinstance(fn, NPart):
            return Redex(nid)
        if isinstance(fn, NVar):
            return Suspend(fid, nid)
        if isinstance(fn, _REDUCIBLE):
            return demand(program, heap, fid, "hnf")
        return Redex(nid)  # applying a non-function: contracts to failure
    if isinstance(node, NCase):
        sid, scrut = deref(heap, node.scrut)
        if isinstance(scrut, NVar):
            return Redex(nid) if node.kind == "flex" else Suspend(sid, nid)
        if isinstance(scrut, (NStruct, NLit)):
            return Redex(nid)
        if isinstance(scrut, NConj):
            return Redex(nid) if _conj_success(heap, sid) else Blocked()
        if isinstance(scrut, _REDUCIBLE):
            return demand(program, heap, sid, "hnf")
        return Redex(nid)  # case on a partial application: failure
    if isinstance(node, NFun):
        return _demand_call(program, heap, nid, node)
    raise EvalError(f"cannot demand {type(node).__name__}")


def _ready_hnf(program: Program, heap, aid: int) -> Optional[Demand]:
    """Demand needed to bring one argument to head normal form."""
    aid, node = deref(heap, aid)
    if isinstance(node, _REDUCIBLE):
        return demand(program, heap, aid, "hnf")
    if isinstance(node, NConj) and _conj_success(heap, aid) is None:
        return Blocked()
    return None


def _demand_call(program: Program, heap, nid: int, node: NFun) -> Demand:
    name = node.name
    if name == "&":
        return Redex(nid)
    if name in ("&>", "cond"):
        sub = _ready_hnf(program, heap, node.args[0])
        if sub is not None:
            return sub
        cid, c = deref(heap, node.args[0])
        if isinstance(c, NVar):
            return Suspend(cid, nid)
        return Redex(nid)
    if name == "=:=":
        for a in node.args:
            sub = _ready_hnf(program, heap, a)
            if sub is not None:
                return sub
        return Redex(nid)
    if name in _ARITH:
        for a in node.args:
            sub = _ready_hnf(program, heap, a)
            if sub is not None:
                return sub
            aid, an = deref(heap, a)
            if isinstance(an, NVar):
                return Suspend(aid, nid)  # arithmetic is rigid
        return Redex(nid)
    if name == "failed":
        return Redex(nid)
    f = program.function(name) or prelude.BUILTINS.get(name)
    if f is None:
        raise EvalError(f"unknown function {name}")
    return Redex(nid)


# ---------------------------------------------------------------------------
# Contraction


def _is_ctor(program: Program, name: str) -> bool:
    return program.constructor(name) is not None


def _occurs(heap, var_id: int, nid: int) -> bool:
    """Does the unbound variable occur in the data skeleton under nid?"""
    nid, node = deref(heap, nid)
    if nid == var_id:
        return True
    if isinstance(node, NStruct):
        return any(_occurs(heap, var_id, a) for a in node.args)
    return False


class _StepBuilder:
    """One alternative under construction."""

    def __init__(self, program: Program, state: MachineState, task: Task):
        self.program = program
        self.state = state.fork()
        self.task = task
        self.bound: list[tuple[int, int]] = []

    def bind(self, var_id: int, target: int):
        # waking happens inside the binding step itself
        self.state.heap[var_id] = NBound(target)
        self.bound.append((var_id, target))
        tasks = []
        for t in self.state.tasks:
            if t.status == SUSPENDED and t.wait_var == var_id:
                tasks.append(replace(t, status=ACTIVE, wait_var=None))
            else:
                tasks.append(t)
        self.state.tasks = tuple(tasks)

    def contract(self, redex: int, target: int):
        self.state.heap[redex] = NBound(target)

    def fail(self, reason: str):
        self.state.failed = reason

    def finish(self, redex: int, kind: str) -> tuple[MachineState, StepInfo]:
        st = self.state
        st.step_count += 1
        stepped = [t for t in st.tasks if t.id == self.task.id]
        st.tasks = tuple(t for t in st.tasks
                         if t.id != self.task.id) + tuple(stepped)
        if st.failed is None:
            st.tasks = _sweep(self.program, st)
        return st, StepInfo(redex, kind, tuple(self.bound))


def _sweep(program: Program, state: MachineState) -> tuple[Task, ...]:
    """Drop finished tasks; a conjunct finishing on non-Success data fails."""
    kept = []
    for t in state.tasks:
        if t.mode == "nf":
            if _is_nf(state.heap, t.goal):
                continue
        else:
            done = _conj_success(state.heap, t.goal)
            if done:
                continue
            _, node = deref(state.heap, t.goal)
            if isinstance(node, (NLit, NPart)) or (
                    isinstance(node, NStruct) and node.name != "Success"):
                state.failed = "conjunct evaluated to non-constraint data"
        kept.append(t)
    return tuple(kept)


def _is_nf(heap, nid: int) -> bool:
    nid, node = deref(heap, nid)
    if isinstance(node, (NVar, NLit, NPart)):
        return True
    if isinstance(node, NStruct):
        return all(_is_nf(heap, a) for a in node.args)
    if isinstance(node, NConj):
        return bool(_conj_success(heap, nid))
    return False


def step(program: Program,
         state: MachineState) -> list[tuple[MachineState, StepInfo]]:
    """All don't-know alternatives of the next machine step."""
    status = classify(program, state)
    if status.kind != "running":
        raise SteppingTerminalError(f"state is terminal ({status.kind})")
    task, dem = _pick(program, state)
    if isinstance(dem, Suspend):
        b = _StepBuilder(program, state, task)
        b.state.tasks = tuple(
            replace(t, status=SUSPENDED, wait_var=dem.var)
            if t.id == task.id else t
            for t in b.state.tasks)
        return [b.finish(dem.at, "suspend")]
    assert isinstance(dem, Redex)
    return _contract(program, state, task, dem.node)


def _pick(program: Program,
          state: MachineState) -> tuple[Task, Union[Redex, Suspend]]:
    for t in state.tasks:
        if t.status != ACTIVE:
            continue
        d = demand(program, state.heap, t.goal, t.mode)
        if isinstance(d, (Redex, Suspend)):
            return t, d
    raise SteppingTerminalError("no steppable task")


def _contract(program: Program, state: MachineState, task: Task,
              redex: int) -> list[tuple[MachineState, StepInfo]]:
    _, node = deref(state.heap, redex)

    if isinstance(node, NOr):
        out = []
        for side in (node.left, node.right):
            b = _StepBuilder(program, state, task)
            b.contract(redex, side)
            out.append(b.finish(redex, "or-split"))
        return out

    if isinstance(node, NCase):
        sid, scrut = deref(state.heap, node.scrut)
        if isinstance(scrut, NVar):
            return _narrow(program, state, task, redex, node, sid)
        return [_select(program, state, task, redex, node, sid, scrut)]

    if isinstance(node, NApply):
        b = _StepBuilder(program, state, task)
        _, fn = deref(b.state.heap, node.fn)
        if not isinstance(fn, NPart):
            b.fail("application of a non-function value")
            return [b.finish(redex, "apply-saturate")]
        args = fn.args + (node.arg,)
        if fn.missing > 1:
            new = b.state.alloc(NPart(fn.name, fn.missing - 1, args))
        elif _is_ctor(program, fn.name):
            new = b.state.alloc(NStruct(fn.name, args))
        else:
            new = b.state.alloc(NFun(fn.name, args))
        b.contract(redex, new)
        return [b.finish(redex, "apply-saturate")]

    assert isinstance(node, NFun)
    name = node.name
    if name == "&":
        return [_fork(program, state, task, redex, node)]
    if name in ("&>", "cond"):
        b = _StepBuilder(program, state, task)
        ok = _conj_success(b.state.heap, node.args[0])
        if ok:
            b.contract(redex, node.args[1])
        else:
            b.fail(f"first argument of {name} is not a constraint success")
        return [b.finish(redex, "function-unfold")]
    if name == "=:=":
        return _solve_eq(program, state, task, redex, node)
    if name in _ARITH:
        return [_arith(program, state, task, redex, node)]
    if name == "failed":
        b = _StepBuilder(program, state, task)
        b.fail("explicit failure")
        return [b.finish(redex, "function-unfold")]

    f = program.function(name)
    if f is None or isinstance(f.rule, External):
        b = _StepBuilder(program, state, task)
        b.fail(f"no implementation for external function {name}")
        return [b.finish(redex, "function-unfold")]
    b = _StepBuilder(program, state, task)
    body = _unfold_body(b.state, program, name, f.rule, node.args)
    b.contract(redex, body)
    return [b.finish(redex, "function-unfold")]


def _select(program, state, task, redex: int, case: NCase, sid: int,
            scrut: Node) -> tuple[MachineState, StepInfo]:
    b = _StepBuilder(program, state, task)
    if isinstance(scrut, NConj):  # fully successful conjunction is Success
        scrut = NStruct("Success")
    for br in case.branches:
        if isinstance(br.pattern, LitPat):
            if isinstance(scrut, NLit) and scrut.value == br.pattern.value:
                b.contract(redex, br.body)
                return b.finish(redex, "case-select")
        elif isinstance(scrut, NStruct) and scrut.name == br.pattern.name:
            for pv, arg in zip(br.patvars, scrut.args):
                b.state.heap[pv] = NBound(arg)
            b.contract(redex, br.body)
            return b.finish(redex, "case-select")
    if isinstance(scrut, (NPart, NFun)):
        b.fail("case on a non-data value")
    else:
        b.fail("no matching case branch")
    return b.finish(redex, "case-select")


def _narrow(program, state, task, redex: int, case: NCase,
            var_id: int) -> list[tuple[MachineState, StepInfo]]:
    out = []
    for br in case.branches:
        b = _StepBuilder(program, state, task)
        if isinstance(br.pattern, LitPat):
            target = b.state.alloc(NLit(br.pattern.value))
        else:
            target = b.state.alloc(NStruct(br.pattern.name, br.patvars))
        b.bind(var_id, target)
        b.contract(redex, br.body)
        out.append(b.finish(redex, "case-narrow"))
    return out


def _fork(program, state, task, redex: int,
          node: NFun) -> tuple[MachineState, StepInfo]:
    b = _StepBuilder(program, state, task)
    st = b.state
    goal_id, _ = deref(st.heap, task.goal)
    conj = st.alloc(NConj(node.args))
    b.contract(redex, conj)
    t1 = Task(st.next_task, node.args[0])
    t2 = Task(st.next_task + 1, node.args[1])
    st.next_task += 2
    tasks = list(st.tasks)
    if goal_id == redex:  # the conjunction was this task's whole goal
        tasks = [t for t in tasks if t.id != task.id]
    tasks.extend((t1, t2))
    st.tasks = tuple(tasks)
    return b.finish(redex, "function-unfold")


def _arith(program, state, task, redex: int,
           node: NFun) -> tuple[MachineState, StepInfo]:
    b = _StepBuilder(program, state, task)
    vals = []
    for a in node.args:
        _, an = deref(b.state.heap, a)
        if not isinstance(an, NLit):
            b.fail(f"{node.name} applied to non-numeric data")
            return b.finish(redex, "function-unfold")
        vals.append(an.value)
    x, y = vals
    if node.name in ("+", "-", "*"):
        r = {"+": x + y, "-": x - y, "*": x * y}[node.name]
        target = b.state.alloc(NLit(r))
    else:
        r = {"==": x == y, "<": x < y, "<=": x <= y}[node.name]
        target = b.state.alloc(NStruct("True" if r else "False"))
    b.contract(redex, target)
    return b.finish(redex, "function-unfold")


def _solve_eq(program, state, task, redex: int,
              node: NFun) -> list[tuple[MachineState, StepInfo]]:
    b = _StepBuilder(program, state, task)
    st = b.state
    lid, left = deref(st.heap, node.args[0])
    rid, right = deref(st.heap, node.args[1])
    if isinstance(left, NConj):
        left = NStruct("Success")
    if isinstance(right, NConj):
        right = NStruct("Success")

    def success() -> int:
        return st.alloc(NStruct("Success"))

    def chain(pairs: list[tuple[int, int]]) -> int:
        eqs = [st.alloc(NFun("=:=", (a, c))) for a, c in pairs]
        if not eqs:
            return success()
        out = eqs[-1]
        for e in reversed(eqs[:-1]):
            out = st.alloc(NFun("&", (e, out)))
        return out

    def bind_var(var_id: int, other_id: int, other: Node):
        if isinstance(other, (NVar, NLit)):
            b.bind(var_id, other_id)
            b.contract(redex, success())
            return
        if isinstance(other, NPart):
            b.fail("cannot unify with a partial application")
            return
        assert isinstance(other, NStruct)
        if _occurs(st.heap, var_id, other_id):
            b.fail("occurs check failed")
            return
        if not other.args:
            b.bind(var_id, other_id)
            b.contract(redex, success())
            return
        fresh = tuple(st.alloc(NVar()) for _ in other.args)
        shallow = st.alloc(NStruct(other.name, fresh))
        b.bind(var_id, shallow)
        b.contract(redex, chain(list(zip(fresh, other.args))))

    if isinstance(left, NVar) and isinstance(right, NVar) and lid == rid:
        b.contract(redex, success())
    elif isinstance(left, NVar):
        bind_var(lid, rid, right)
    elif isinstance(right, NVar):
        bind_var(rid, lid, left)
    elif isinstance(left, NLit) and isinstance(right, NLit):
        if left.value == right.value:
            b.contract(redex, success())
        else:
            b.fail(f"clash: {left.value} =:= {right.value}")
    elif isinstance(left, NStruct) and isinstance(right, NStruct):
        if left.name != right.name or len(left.args) != len(right.args):
            b.fail(f"clash: {left.name} =:= {right.name}")
        else:
            b.contract(redex, chain(list(zip(left.args, right.args))))
    elif isinstance(left, NPart) or isinstance(right, NPart):
        b.fail("cannot unify partial applications")
    else:
        b.fail("clash: literal =:= constructor term")
    return [b.finish(redex, "constraint-solve")]


# ---------------------------------------------------------------------------
# Classification and readback


@dataclass(frozen=True)
class Status:
    kind: str  # success | failure | floundered | running
    value: Optional[Expr] = None
    reason: Optional[str] = None


def classify(program: Program, state: MachineState) -> Status:
    if state.failed is not None:
        return Status("failure", reason=state.failed)
    if not state.tasks:
        return Status("success", value=readback(state.heap, state.root))
    for t in state.tasks:
        if t.status != ACTIVE:
            continue
        if isinstance(demand(program, state.heap, t.goal, t.mode),
                      (Redex, Suspend)):
            return Status("running")
    return Status("floundered")


def is_terminal(program: Program, state: MachineState) -> bool:
    return classify(program, state).kind != "running"


def readback(heap, nid: int) -> Expr:
    """Best-effort expression view of a heap node (exact on data)."""
    nid, node = deref(heap, nid)
    if isinstance(node, NVar):
        return Var(nid)
    if isinstance(node, NLit):
        return Lit(node.value)
    if isinstance(node, NStruct):
        return Cons(node.name, tuple(readback(heap, a) for a in node.args))
    if isinstance(node, NPart):
        return PartCall(node.name, node.missing,
                        tuple(readback(heap, a) for a in node.args))
    if isinstance(node, NFun):
        return FunCall(node.name, tuple(readback(heap, a) for a in node.args))
    if isinstance(node, NApply):
        return Apply(readback(heap, node.fn), readback(heap, node.arg))
    if isinstance(node, NConj):
        if _conj_success(heap, nid):
            return Cons("Success")
        return FunCall("&", tuple(readback(heap, p) for p in node.parts))
    if isinstance(node, NOr):
        return Or(readback(heap, node.left), readback(heap, node.right))
    return FunCall("<case>")


def var_names(heap, state: MachineState) -> dict[int, str]:
    names = {}
    for name, nid in state.goal_vars:
        vid, node = deref(heap, nid)
        if isinstance(node, NVar):
            names[vid] = name
    return names


# ---------------------------------------------------------------------------
# Pending-step preview (what the next step would reduce)


@dataclass(frozen=True)
class Pending:
    redex: int
    kind: str
    would_bind: tuple[int, ...]


def pending_step(program: Program,
                 state: MachineState) -> Optional[Pending]:
    if classify(program, state).kind != "running":
        return None
    task, dem = _pick(program, state)
    heap = state.heap
    if isinstance(dem, Suspend):
        return Pending(dem.at, "suspend", ())
    nid, node = deref(heap, dem.node)
    if isinstance(node, NOr):
        return Pending(nid, "or-split", ())
    if isinstance(node, NApply):
        return Pending(nid, "apply-saturate", ())
    if isinstance(node, NCase):
        sid, scrut = deref(heap, node.scrut)
        if isinstance(scrut, NVar):
            return Pending(nid, "case-narrow", (sid,))
        return Pending(nid, "case-select", ())
    assert isinstance(node, NFun)
    if node.name == "=:=":
        lid, left = deref(heap, node.args[0])
        rid, right = deref(heap, node.args[1])
        binds: tuple[int, ...] = ()
        if isinstance(left, NVar) and isinstance(right, NVar) and lid == rid:
            binds = ()
        elif isinstance(left, NVar):
            binds = (lid,)
        elif isinstance(right, NVar):
            binds = (rid,)
        return Pending(nid, "constraint-solve", binds)
    return Pending(nid, "function-unfold", ())


# ---------------------------------------------------------------------------
# Batch solving


@dataclass(frozen=True)
class SolveConfig:
    strategy: str = "dfs"
    max_steps_per_branch: int = 10000
    max_nodes: int = 100000
    max_answers: Optional[int] = None


@dataclass(frozen=True)
class Answer:
    bindings: tuple[tuple[str, Expr], ...]
    value: Expr
    names: tuple[tuple[int, str], ...] = ()

    def show_value(self) -> str:
        return show_term(self.value, dict(self.names))

    def show_bindings(self) -> str:
        names = dict(self.names)
        return ", ".join(f"{n} = {show_term(e, names)}"
                         for n, e in self.bindings)


@dataclass
class SolveResult:
    answers: list[Answer]
    floundered: bool = False
    exhausted: bool = False


def _answer(heap, state: MachineState, value: Expr) -> Answer:
    names = var_names(heap, state)
    bindings = tuple((name, readback(heap, nid))
                     for name, nid in state.goal_vars)
    return Answer(bindings, value, tuple(sorted(names.items())))


def solve(program: Program, goal: Expr,
          config: SolveConfig = SolveConfig(),
          hints: Optional[dict[int, str]] = None) -> SolveResult:
    """Explore the alternative tree of a goal under a budget."""
    root = inject(program, goal, hints)
    result = SolveResult(answers=[])
    if config.strategy == "dfs":
        _solve_dfs(program, root, config, result)
    elif config.strategy == "bfs":
        _solve_bfs(program, root, config, result)
    else:
        raise EvalError(f"unknown strategy {config.strategy!r}")
    return result


def _note(program, state, config, result) -> bool:
    """Record a terminal state; True when the search should keep going."""
    status = classify(program, state)
    if status.kind == "success":
        result.answers.append(_answer(state.heap, state, status.value))
        return not (config.max_answers is not None
                    and len(result.answers) >= config.max_answers)
    if status.kind == "floundered":
        result.floundered = True
    return True


def _solve_dfs(program, root, config, result):
    stack = [root]
    while stack:
        state = stack.pop()
        if classify(program, state).kind != "running":
            if not _note(program, state, config, result):
                return
            continue
        if state.step_count >= config.max_steps_per_branch:
            result.exhausted = True
            continue
        for child, _ in reversed(step(program, state)):
            stack.append(child)


def _solve_bfs(program, root, config, result):
    from collections import deque

    queue = deque([root])
    explored = 0
    while queue:
        state = queue.popleft()
        explored += 1
        if explored > config.max_nodes:
            result.exhausted = True
            return
        if classify(program, state).kind != "running":
            if not _note(program, state, config, result):
                return
            continue
        for child, _ in step(program, state):
            queue.append(child)
