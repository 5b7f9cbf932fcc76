#!/usr/bin/env python3
"""Walk a goal step by step and print each machine state.

Shows the expression tree with the pending redex marked, forks at
nondeterministic steps, and ends with the answer (or failure reason).

    python3 scripts/trace_walkthrough.py samples/list.mcy \
        --goal "conc ys [x] =:= [1,2] where ys, x free"
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from flogic import evaluator as ev
from flogic import trace as tr
from flogic.loaders import compile_goal, load_path


def draw(tree, redex, bound, indent=""):
    mark = ""
    if tree["id"] == redex:
        mark = "  <-- next step"
    elif tree["id"] in bound:
        mark = "  <-- will be bound"
    label = tree["label"]
    if tree["kind"] == "case":
        label += " {" + "; ".join(tree["patterns"]) + "}"
    print(f"{indent}{label}  #{tree['id']}{mark}")
    for child in tree["children"]:
        draw(child, redex, bound, indent + "  ")


def show(session, chosen=None):
    out = tr.render(session)
    head = f"step {out['step']}"
    if chosen is not None:
        head += f" (took alternative {chosen})"
    if out["kind"]:
        head += f" next: {out['kind']}"
    print(f"--- {head}")
    draw(out["tree"], out["redex"], set(out["bound"]))
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("file")
    ap.add_argument("--goal", required=True)
    ap.add_argument("--max-steps", type=int, default=60)
    args = ap.parse_args()

    program = load_path(args.file)
    goal, hints = compile_goal(program, args.goal)
    session = tr.start(program, goal, hints)

    out = show(session)
    for _ in range(args.max_steps):
        kids = tr.children(session)
        if not kids:
            break
        choice = 0
        if len(kids) > 1:
            print(f"    ({len(kids)} alternatives, following the first)")
        tr.forward(session, choice)
        out = show(session, choice)

    print("---")
    if out["terminal"] == "success":
        print(f"answer: {out['answer']}")
        for name, value in out["bindings"]:
            print(f"  {name} = {value}")
    elif out["terminal"] == "failure":
        print(f"failed: {out['reason']}")
    elif out["terminal"] == "floundered":
        print("floundered: all tasks suspended")
    else:
        print("step budget reached; still running")
    print(f"(rewind works too: {len(session.history) - 1} positions "
          f"recorded)")


if __name__ == "__main__":
    main()
