"""Principal type inference for flat programs.

Standard Hindley-Milner over the flat representation: unification with an
occurs check, generalization one strongly connected component of the call
graph at a time, declared signatures checked against the inferred principal
types (a declaration may be more specific, never more general).

The constraint primitives type as documented on the builtins table; integer
literals have the primitive type ``Int``.  Inference fills every function's
``signature`` field; the result is idempotent and stable under renaming of
program variables.
"""

from __future__ import annotations

from dataclasses import replace
from typing import Optional

from .ir import (
    Apply, Case, Cons, ConsPat, Expr, External, Free, FunCall, FuncDecl,
    Lit, LitPat, Or, PartCall, Program, TCons, TFunc, TVar, TypeExpr, Var,
    called_functions, func_type, show_type,
)
from . import prelude


class TypeInferenceError(Exception):
    def __init__(self, fn: str, message: str):
        super().__init__(f"{fn}: {message}")
        self.fn = fn


_META = "%"
_SKOLEM = "!"


class _Ctx:
    """Unification state for one program."""

    def __init__(self):
        self.subst: dict[str, TypeExpr] = {}
        self.counter = 0

    def fresh(self) -> TVar:
        self.counter += 1
        return TVar(f"{_META}{self.counter}")

    def prune(self, t: TypeExpr) -> TypeExpr:
        while isinstance(t, TVar) and t.name in self.subst:
            t = self.subst[t.name]
        return t

    def resolve(self, t: TypeExpr) -> TypeExpr:
        t = self.prune(t)
        if isinstance(t, TCons):
            return TCons(t.name, tuple(self.resolve(a) for a in t.args))
        if isinstance(t, TFunc):
            return TFunc(self.resolve(t.dom), self.resolve(t.rng))
        return t

    def occurs(self, name: str, t: TypeExpr) -> bool:
        t = self.prune(t)
        if isinstance(t, TVar):
            return t.name == name
        if isinstance(t, TCons):
            return any(self.occurs(name, a) for a in t.args)
        if isinstance(t, TFunc):
            return self.occurs(name, t.dom) or self.occurs(name, t.rng)
        return False

    def unify(self, a: TypeExpr, b: TypeExpr, fn: str):
        a, b = self.prune(a), self.prune(b)
        if isinstance(a, TVar) and isinstance(b, TVar) and a.name == b.name:
            return
        if isinstance(a, TVar):
            if self.occurs(a.name, b):
                raise TypeInferenceError(
                    fn, f"occurs check: {self.show_pair(a, b)[0]} in "
                        f"{self.show_pair(a, b)[1]}")
            self.subst[a.name] = b
            return
        if isinstance(b, TVar):
            self.unify(b, a, fn)
            return
        if isinstance(a, TCons) and isinstance(b, TCons):
            if a.name != b.name or len(a.args) != len(b.args):
                raise TypeInferenceError(fn, self._clash(a, b))
            for x, y in zip(a.args, b.args):
                self.unify(x, y, fn)
            return
        if isinstance(a, TFunc) and isinstance(b, TFunc):
            self.unify(a.dom, b.dom, fn)
            self.unify(a.rng, b.rng, fn)
            return
        raise TypeInferenceError(fn, self._clash(a, b))

    def _clash(self, a: TypeExpr, b: TypeExpr) -> str:
        sa, sb = self.show_pair(a, b)
        return f"cannot match {sa} with {sb}"

    def show_pair(self, a: TypeExpr, b: TypeExpr) -> tuple[str, str]:
        """Render two types with one shared variable lettering."""
        order: dict[str, str] = {}

        def go(t: TypeExpr) -> TypeExpr:
            t = self.prune(t)
            if isinstance(t, TVar):
                if t.name not in order:
                    k = len(order)
                    order[t.name] = chr(ord("a") + k) if k < 26 else f"t{k}"
                return TVar(order[t.name])
            if isinstance(t, TCons):
                if t.name.startswith(_SKOLEM):
                    return TVar(t.name[1:])
                return TCons(t.name, tuple(go(x) for x in t.args))
            return TFunc(go(t.dom), go(t.rng))

        return (show_type(go(a), canonical=False),
                show_type(go(b), canonical=False))

    def instantiate(self, qvars: tuple[str, ...], t: TypeExpr) -> TypeExpr:
        if not qvars:
            return t
        mapping = {q: self.fresh() for q in qvars}

        def go(x: TypeExpr) -> TypeExpr:
            if isinstance(x, TVar):
                return mapping.get(x.name, x)
            if isinstance(x, TCons):
                return TCons(x.name, tuple(go(a) for a in x.args))
            return TFunc(go(x.dom), go(x.rng))

        return go(t)


def _tvars(t: TypeExpr, acc: list[str]):
    if isinstance(t, TVar):
        if t.name not in acc:
            acc.append(t.name)
    elif isinstance(t, TCons):
        for a in t.args:
            _tvars(a, acc)
    else:
        _tvars(t.dom, acc)
        _tvars(t.rng, acc)


def _scheme(t: TypeExpr) -> tuple[tuple[str, ...], TypeExpr]:
    vs: list[str] = []
    _tvars(t, vs)
    return tuple(vs), t


def _skolemize(t: TypeExpr) -> TypeExpr:
    if isinstance(t, TVar):
        return TCons(f"{_SKOLEM}{t.name}")
    if isinstance(t, TCons):
        return TCons(t.name, tuple(_skolemize(a) for a in t.args))
    return TFunc(_skolemize(t.dom), _skolemize(t.rng))


def _letterize(t: TypeExpr) -> TypeExpr:
    """Final pass: metavariables become a, b, c in first-occurrence order."""
    order: dict[str, str] = {}

    def go(x: TypeExpr) -> TypeExpr:
        if isinstance(x, TVar):
            if x.name not in order:
                k = len(order)
                order[x.name] = chr(ord("a") + k) if k < 26 else f"t{k}"
            return TVar(order[x.name])
        if isinstance(x, TCons):
            return TCons(x.name, tuple(go(a) for a in x.args))
        return TFunc(go(x.dom), go(x.rng))

    return go(t)


def _sccs(nodes: list[str], edges: dict[str, set[str]]) -> list[list[str]]:
    """Tarjan; emitted so that every component follows its dependencies."""
    index: dict[str, int] = {}
    low: dict[str, int] = {}
    stack: list[str] = []
    on: set[str] = set()
    out: list[list[str]] = []
    counter = [0]

    def visit(v: str):
        index[v] = low[v] = counter[0]
        counter[0] += 1
        stack.append(v)
        on.add(v)
        for w in sorted(edges.get(v, ())):
            if w not in index:
                visit(w)
                low[v] = min(low[v], low[w])
            elif w in on:
                low[v] = min(low[v], index[w])
        if low[v] == index[v]:
            comp = []
            while True:
                w = stack.pop()
                on.discard(w)
                comp.append(w)
                if w == v:
                    break
            out.append(comp)

    for v in nodes:
        if v not in index:
            visit(v)
    return out


def infer_types(program: Program) -> Program:
    """Fill every function signature with its principal type.

    Declared signatures are kept and checked: the declaration must be an
    instance of the inferred principal type.
    """
    ctx = _Ctx()

    ctor_schemes: dict[str, tuple[tuple[str, ...], TypeExpr]] = {}
    for td in program.types:
        res = TCons(td.name, tuple(TVar(p) for p in td.params))
        for c in td.constructors:
            ctor_schemes[c.name] = (td.params, func_type(*c.arg_types, res))

    schemes: dict[str, tuple[tuple[str, ...], TypeExpr]] = {}
    for name, b in prelude.BUILTINS.items():
        schemes[name] = _scheme(b.signature)

    local = {f.name: f for f in program.functions}
    for f in program.functions:
        if isinstance(f.rule, External):
            if f.signature is None:
                raise TypeInferenceError(
                    f.name, "external function needs a declared signature")
            schemes[f.name] = _scheme(f.signature)

    defined = [f.name for f in program.functions if not isinstance(f.rule, External)]
    edges = {
        name: {g for g in called_functions(local[name].rule.body)
               if g in local and not isinstance(local[g].rule, External)}
        for name in defined
    }

    inferred: dict[str, TypeExpr] = {}
    for comp in _sccs(defined, edges):
        comp_types = {name: ctx.fresh() for name in comp}
        for name in comp:
            f = local[name]
            env: dict[int, TypeExpr] = {}
            params = []
            for p in f.rule.params:
                env[p] = ctx.fresh()
                params.append(env[p])
            body_t = _infer_expr(ctx, f.rule.body, env, schemes, comp_types,
                                 ctor_schemes, name)
            ctx.unify(comp_types[name], func_type(*params, body_t), name)
        for name in comp:
            t = ctx.resolve(comp_types[name])
            inferred[name] = _letterize(t)
            schemes[name] = _scheme(inferred[name])
        for name in comp:
            f = local[name]
            if f.signature is None:
                continue
            # the declaration must instantiate the principal type, and
            # later callers must see the declared (possibly narrower) form
            qs, t = schemes[name]
            ctx.unify(ctx.instantiate(qs, t), _skolemize(f.signature), name)
            schemes[name] = _scheme(f.signature)

    out = []
    for f in program.functions:
        if f.signature is not None or isinstance(f.rule, External):
            out.append(f)
        else:
            out.append(replace(f, signature=inferred[f.name]))
    return replace(program, functions=tuple(out))


def _infer_expr(ctx: _Ctx, e: Expr, env: dict[int, TypeExpr],
                schemes, comp_types, ctor_schemes, fn: str) -> TypeExpr:
    def fun_type(name: str) -> TypeExpr:
        if name in comp_types:
            return comp_types[name]
        if name in schemes:
            return ctx.instantiate(*schemes[name])
        raise TypeInferenceError(fn, f"unknown function {name}")

    def go(e: Expr) -> TypeExpr:
        if isinstance(e, Var):
            return env[e.id]
        if isinstance(e, Lit):
            return prelude.INT
        if isinstance(e, Cons):
            t = ctx.instantiate(*ctor_schemes[e.name])
            return apply_args(t, e.args)
        if isinstance(e, FunCall):
            return apply_args(fun_type(e.name), e.args)
        if isinstance(e, PartCall):
            t = ctor_schemes.get(e.name)
            base = ctx.instantiate(*t) if t is not None else fun_type(e.name)
            return apply_args(base, e.args)
        if isinstance(e, Apply):
            a, b = ctx.fresh(), ctx.fresh()
            ctx.unify(go(e.fn), TFunc(a, b), fn)
            ctx.unify(a, go(e.arg), fn)
            return b
        if isinstance(e, Or):
            lt = go(e.left)
            ctx.unify(lt, go(e.right), fn)
            return lt
        if isinstance(e, Free):
            for v in e.vars:
                env[v] = ctx.fresh()
            return go(e.body)
        if isinstance(e, Case):
            scrut_t = go(e.scrutinee)
            result = ctx.fresh()
            for br in e.branches:
                if isinstance(br.pattern, LitPat):
                    ctx.unify(scrut_t, prelude.INT, fn)
                else:
                    ct = ctx.instantiate(*ctor_schemes[br.pattern.name])
                    for v in br.pattern.vars:
                        env[v] = ctx.fresh()
                        dom, ct = _split_arrow(ctx, ct, fn)
                        ctx.unify(env[v], dom, fn)
                    ctx.unify(scrut_t, ct, fn)
                ctx.unify(result, go(br.body), fn)
            return result
        raise TypeInferenceError(fn, f"cannot type {type(e).__name__}")

    def apply_args(t: TypeExpr, args) -> TypeExpr:
        for a in args:
            dom, t = _split_arrow(ctx, t, fn)
            ctx.unify(dom, go(a), fn)
        return t

    return go(e)


def _split_arrow(ctx: _Ctx, t: TypeExpr, fn: str) -> tuple[TypeExpr, TypeExpr]:
    t = ctx.prune(t)
    if isinstance(t, TFunc):
        return t.dom, t.rng
    dom, rng = ctx.fresh(), ctx.fresh()
    ctx.unify(t, TFunc(dom, rng), fn)
    return dom, rng
