"""Spec file, analysis report and flat output through the command line entry point.

Everything here is also reachable from a shell as ``dwellgraph <command>``.
"""

import io
import json
import pathlib
import tempfile

from dwellgraph.cli import main


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


tmp = pathlib.Path(tempfile.mkdtemp())
spec = tmp / "example2.json"
code, text = run("generate-example", "example2")
spec.write_text(text)
print(text)

code, text = run("analyze", str(spec))
report = json.loads(text)
print("exit", code, " input sha256", report["input_sha256"][:16], "...")
print("minimum winner:", report["minimum"]["winner"], "tau", report["minimum"]["tau_int"])
print("average winner:", report["average"]["winner"], "tau", report["average"]["tau_int"])

code, text = run("analyze", str(spec), "--min", "--format", "flat")
print("\n".join(line for line in text.splitlines() if "tau_int=" in line))

code, text = run("graph", str(spec))
print(text)

bad = tmp / "unstable.json"
bad.write_text(json.dumps({"dimension": 1,
                           "subsystems": [{"name": "ok", "matrix": [[0.5]]},
                                          {"name": "bad", "matrix": [[1.2]]}]}))
print("unstable spec exit code:", run("analyze", str(bad))[0])
