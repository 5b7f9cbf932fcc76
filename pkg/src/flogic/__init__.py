"""Analysis and debugging workbench for a small functional-logic language.

The package compiles pattern-based functional-logic source (and pure
Prolog) into a flat intermediate form with explicit case distinctions,
infers types, runs memoized per-function analyses, and evaluates goals
on a small-step heap machine with narrowing, residuation and concurrent
conjunctions.  A reversible tracer, an HTTP service and a CLI sit on
top.
"""

__version__ = "0.1.0"

from .ir import Program, parse_ir, serialize_ir, validate
from .loaders import compile_goal, load_path, load_source

__all__ = [
    "Program", "parse_ir", "serialize_ir", "validate",
    "compile_goal", "load_path", "load_source",
    "__version__",
]
