"""Run a program and print the executed line sequence of every frame.

usage: trace_lines.py FILE

One JSON object per frame activation: {"scope": qualname or "", "steps":
[[line, raised], ...]} where `raised` is true when an exception was
raised in the frame just before that line ran. Generator and
comprehension frames are left out.
"""
import json
import os
import runpy
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))
from projectmap import ProjectMap  # noqa: E402

CO_GENERATOR = 0x20


def main():
    path = os.path.abspath(sys.argv[1])
    pmap = ProjectMap(path, True)
    runs = []

    def tracer(frame, event, arg):
        if event != "call":
            return None
        d = pmap.describe(frame.f_code)
        if d is None or d[0] not in ("module", "function"):
            return None
        if frame.f_code.co_flags & CO_GENERATOR:
            return None
        run = {"scope": d[2] or "", "steps": []}
        runs.append(run)
        pending = [False]

        def local(frame, event, arg):
            if event == "line":
                run["steps"].append([frame.f_lineno, pending[0]])
                pending[0] = False
            elif event == "exception":
                pending[0] = True
            return local

        return local

    os.chdir(os.path.dirname(path))
    real_stdout = sys.stdout
    sys.stdout = open(os.devnull, "w")
    sys.settrace(tracer)
    try:
        runpy.run_path(path, run_name="__main__")
    finally:
        sys.settrace(None)
        sys.stdout = real_stdout
    for r in runs:
        print(json.dumps(r))


main()
