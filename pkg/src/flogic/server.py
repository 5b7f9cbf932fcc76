"""HTTP session service exposing loading, analyses and trace sessions.

Every session owns a loaded program, an analysis cache that survives
reloads (the cache is keyed by program version, so reloading identical
source keeps its entries useful) and any number of trace sessions.  A
per-session lock serializes commands, so concurrent requests against one
trace interleave as some sequential order.
"""

from __future__ import annotations

import threading
import uuid
from dataclasses import dataclass, field
from typing import Optional, Union

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel

from . import analysis as an
from . import trace as tr
from .analysis import AnalysisCache, Graph, Message, default_registry
from .evaluator import EvalError
from .infer import TypeInferenceError
from .ir import IRError, Program, ValidationError
from .loaders import LANGUAGES, UnknownLanguageError, compile_goal, load_source
from .prolog import PrologError
from .surface import SurfaceCompileError, SurfaceSyntaxError


@dataclass
class Session:
    id: str
    lock: threading.RLock = field(default_factory=threading.RLock)
    cache: AnalysisCache = field(default_factory=AnalysisCache)
    program: Optional[Program] = None
    source: str = ""
    lang: str = ""
    version: str = ""
    traces: dict[str, tr.TraceSession] = field(default_factory=dict)


class LoadBody(BaseModel):
    source: str
    lang: str = "mcy"


class GoalBody(BaseModel):
    goal: str


class ForwardBody(BaseModel):
    alt: int = 0


class RunToBody(BaseModel):
    policy: Union[str, dict]


class BreakpointBody(BaseModel):
    fn: str
    on: bool = True


_LOAD_ERRORS = (SurfaceSyntaxError, SurfaceCompileError, PrologError,
                IRError, ValidationError, TypeInferenceError,
                UnknownLanguageError)


def create_app(ui_dir: Optional[str] = None) -> FastAPI:
    app = FastAPI(title="flogic workbench")
    app.add_middleware(CORSMiddleware, allow_origins=["*"],
                       allow_methods=["*"], allow_headers=["*"])
    sessions: dict[str, Session] = {}
    trace_owner: dict[str, Session] = {}
    registry = default_registry()
    state_lock = threading.Lock()

    def get_session(sid: str) -> Session:
        s = sessions.get(sid)
        if s is None:
            raise HTTPException(404, f"unknown session {sid}")
        return s

    def get_trace(tid: str) -> tuple[Session, tr.TraceSession]:
        s = trace_owner.get(tid)
        if s is None:
            raise HTTPException(404, f"unknown trace {tid}")
        return s, s.traces[tid]

    def need_program(s: Session) -> Program:
        if s.program is None:
            raise HTTPException(400, "no program loaded in this session")
        return s.program

    @app.post("/session")
    def new_session():
        sid = uuid.uuid4().hex[:12]
        with state_lock:
            sessions[sid] = Session(sid)
        return {"id": sid}

    @app.post("/session/{sid}/load")
    def load(sid: str, body: LoadBody):
        s = get_session(sid)
        with s.lock:
            if body.lang not in LANGUAGES:
                raise HTTPException(
                    400, f"unknown language {body.lang!r}; "
                         f"expected one of {', '.join(LANGUAGES)}")
            try:
                program = load_source(body.source, body.lang)
            except ValidationError as exc:
                detail = "; ".join(f"{v.decl}: {v.detail}"
                                   for v in exc.violations)
                raise HTTPException(400, f"invalid program: {detail}")
            except _LOAD_ERRORS as exc:
                raise HTTPException(400, str(exc))
            s.program = program
            s.source = body.source
            s.lang = body.lang
            s.version = an.program_version(program)
            return {
                "module": program.name,
                "functions": [f.name for f in program.functions],
                "version": s.version,
                "lang": body.lang,
            }

    @app.get("/session/{sid}/analyses")
    def analyses(sid: str):
        get_session(sid)
        return {"analyses": list(registry.names())}

    @app.get("/session/{sid}/analyze")
    def analyze(sid: str, name: str, function: str):
        s = get_session(sid)
        with s.lock:
            program = need_program(s)
            try:
                result = an.analyze(s.cache, registry, program, name,
                                    function, version=s.version)
            except (an.UnknownAnalysisError, an.UnknownFunctionError) as exc:
                raise HTTPException(400, str(exc))
            if isinstance(result, Message):
                return {"function": function, "message": result.text}
            assert isinstance(result, Graph)
            g = result.graph
            return {
                "function": function,
                "graph": {"root": g.root, "nodes": list(g.nodes),
                          "edges": [list(e) for e in g.edges]},
                "dot": an.export_graph(g, "dot"),
            }

    @app.post("/session/{sid}/trace")
    def new_trace(sid: str, body: GoalBody):
        s = get_session(sid)
        with s.lock:
            program = need_program(s)
            try:
                goal, hints = compile_goal(program, body.goal)
                session = tr.start(program, goal, hints)
            except (SurfaceSyntaxError, SurfaceCompileError,
                    EvalError) as exc:
                raise HTTPException(400, str(exc))
            tid = uuid.uuid4().hex[:12]
            s.traces[tid] = session
            with state_lock:
                trace_owner[tid] = s
            return {"trace": tid, "step": tr.render(session)}

    @app.post("/trace/{tid}/forward")
    def forward(tid: str, body: ForwardBody):
        s, session = get_trace(tid)
        with s.lock:
            try:
                return tr.forward(session, body.alt)
            except tr.TerminalNodeError as exc:
                raise HTTPException(409, str(exc))
            except tr.AlternativeRangeError as exc:
                raise HTTPException(400, str(exc))

    @app.post("/trace/{tid}/backward")
    def backward(tid: str):
        s, session = get_trace(tid)
        with s.lock:
            try:
                return tr.backward(session)
            except tr.AtRootError as exc:
                raise HTTPException(409, str(exc))

    @app.post("/trace/{tid}/runto")
    def runto(tid: str, body: RunToBody):
        s, session = get_trace(tid)
        with s.lock:
            policy = body.policy
            if isinstance(policy, dict):
                if "steps" not in policy:
                    raise HTTPException(400, "policy object needs 'steps'")
                try:
                    policy = ("steps", int(policy["steps"]))
                except (TypeError, ValueError):
                    raise HTTPException(400, "'steps' must be an integer")
            try:
                return tr.run_to(session, policy)
            except tr.TraceError as exc:
                raise HTTPException(400, str(exc))

    @app.post("/trace/{tid}/breakpoint")
    def breakpoint(tid: str, body: BreakpointBody):
        s, session = get_trace(tid)
        with s.lock:
            if body.on:
                tr.set_breakpoint(session, body.fn)
            else:
                tr.clear_breakpoint(session, body.fn)
            return tr.render(session)

    @app.get("/trace/{tid}/export")
    def export(tid: str):
        s, session = get_trace(tid)
        with s.lock:
            return tr.export_data(session)

    if ui_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=ui_dir, html=True),
                  name="ui")

    return app


app = create_app()
