#!/usr/bin/env python3
"""Print every analysis for every function of a program.

    python3 scripts/analysis_report.py samples/list.mcy
    python3 scripts/analysis_report.py samples/nat.mcy --dot deps.dot
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from flogic import analysis as an
from flogic.analysis import Graph, Message, default_registry
from flogic.loaders import load_path


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("file")
    ap.add_argument("--dot", metavar="OUT",
                    help="also write the first function's call graph")
    args = ap.parse_args()

    program = load_path(args.file)
    registry = default_registry()
    cache = an.AnalysisCache()
    version = an.program_version(program)

    functions = [f.name for f in program.functions]
    print(f"module {program.name}: {len(functions)} functions "
          f"(version {version[:12]})")
    width = max(len(n) for n in registry.names())
    for fname in functions:
        print(f"\n{fname}")
        for name in registry.names():
            result = an.analyze(cache, registry, program, name, fname,
                                version=version)
            if isinstance(result, Message):
                text = result.text or "(none)"
            else:
                assert isinstance(result, Graph)
                g = result.graph
                text = f"{len(g.nodes)} nodes, {len(g.edges)} edges"
            print(f"  {name:<{width}}  {text}")

    if args.dot:
        g = an.dep_graph(program, functions[0]).graph
        Path(args.dot).write_text(an.export_graph(g, "dot"),
                                  encoding="utf-8")
        print(f"\nwrote {args.dot}")


if __name__ == "__main__":
    main()
