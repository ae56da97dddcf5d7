"""System description files and analysis reports (JSON).

A system file looks like::

    {
      "dimension": 2,
      "subsystems": [
        {"name": "A1", "matrix": [[0.5, 0.1], [0.0, 0.3]]},
        {"name": "A2", "matrix": [[0.2, 0.0], [0.4, 0.6]]}
      ],
      "adjacency": "full",
      "options": {"epsilon": null, "tol": 1e-09, "norm": "spectral"}
    }

``adjacency`` is one of ``"full"``, ``"ring"`` (one-sided), ``"ring2"``
(two-sided) or ``{"edges": [[1, 2], [2, 1]]}`` with 1-based subsystem
indices.  Reports use the same 1-based numbering for nodes and cycles.
"""

import hashlib
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ParseError, ValidationError
from .graph import Adjacency, fully_connected, ring

__all__ = ["SystemSpec", "parse_spec", "render_spec", "load_spec", "spec_hash",
           "build_report", "render_report", "parse_report", "flatten_report"]

ADJ_KEYWORDS = ("full", "ring", "ring2")
NORMS = ("spectral", "1", "inf")
DEFAULT_OPTIONS = {"epsilon": None, "tol": 1e-9, "norm": "spectral"}


@dataclass(eq=False)
class SystemSpec:
    dimension: int
    names: list
    matrices: list
    adjacency: object = "full"
    options: dict = field(default_factory=lambda: dict(DEFAULT_OPTIONS))

    @property
    def m(self):
        return len(self.matrices)

    def adjacency_graph(self):
        """The :class:`Adjacency` with 0-based nodes."""
        if self.adjacency == "full":
            return fully_connected(self.m)
        if self.adjacency in ("ring", "ring2"):
            return ring(self.m, two_sided=self.adjacency == "ring2")
        return Adjacency(self.m, [(i - 1, j - 1) for i, j in self.adjacency])

    def to_dict(self):
        adj = self.adjacency
        return {
            "dimension": self.dimension,
            "subsystems": [{"name": n, "matrix": np.asarray(A, dtype=float).tolist()}
                           for n, A in zip(self.names, self.matrices)],
            "adjacency": adj if isinstance(adj, str) else {"edges": [list(e) for e in adj]},
            "options": {**DEFAULT_OPTIONS, **self.options},
        }

    def __eq__(self, other):
        return isinstance(other, SystemSpec) and self.to_dict() == other.to_dict()


def _reject_constant(name):
    raise ValidationError(f"non-finite number {name} is not allowed")


def _number(x, where):
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise ValidationError("expected a number", field=where)
    if not math.isfinite(x):
        raise ValidationError("non-finite number", field=where)
    return float(x)


def parse_spec(text):
    """Parse and validate a system file.

    Raises
    ------
    ParseError
        Malformed JSON (with line number).
    ValidationError
        Structurally valid JSON that does not describe a valid system.
    """
    try:
        data = json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as err:
        raise ParseError(err.msg, line=err.lineno) from err
    if not isinstance(data, dict):
        raise ValidationError("top level must be an object")

    n = data.get("dimension")
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise ValidationError("dimension must be a positive integer", field="dimension")

    subs = data.get("subsystems")
    if not isinstance(subs, list) or not subs:
        raise ValidationError("need at least one subsystem", field="subsystems")
    names, matrices = [], []
    for k, sub in enumerate(subs):
        where = f"subsystems[{k}]"
        if not isinstance(sub, dict) or "matrix" not in sub:
            raise ValidationError("subsystem needs a 'matrix'", field=where)
        name = sub.get("name", f"A{k + 1}")
        if not isinstance(name, str):
            raise ValidationError("name must be a string", field=f"{where}.name")
        rows = sub["matrix"]
        if (not isinstance(rows, list) or len(rows) != n
                or any(not isinstance(r, list) or len(r) != n for r in rows)):
            raise ValidationError(f"matrix must be {n}x{n}", field=f"{where}.matrix")
        A = np.array([[_number(x, f"{where}.matrix[{i}][{j}]") for j, x in enumerate(r)]
                      for i, r in enumerate(rows)])
        names.append(name)
        matrices.append(A)
    m = len(matrices)

    adj = data.get("adjacency", "full")
    if isinstance(adj, str):
        if adj not in ADJ_KEYWORDS:
            raise ValidationError(f"adjacency keyword must be one of {ADJ_KEYWORDS}",
                                  field="adjacency")
        if adj != "full" and m < 2:
            raise ValidationError("a ring needs at least two subsystems", field="adjacency")
    elif isinstance(adj, dict) and isinstance(adj.get("edges"), list):
        edges = []
        for k, e in enumerate(adj["edges"]):
            where = f"adjacency.edges[{k}]"
            if (not isinstance(e, list) or len(e) != 2
                    or any(isinstance(v, bool) or not isinstance(v, int) for v in e)):
                raise ValidationError("edge must be a pair of integers", field=where)
            i, j = e
            if not (1 <= i <= m and 1 <= j <= m):
                raise ValidationError(f"edge endpoints must lie in 1..{m}", field=where)
            if i == j:
                raise ValidationError("self-loops are not allowed", field=where)
            edges.append((i, j))
        adj = sorted(set(edges))
    else:
        raise ValidationError("adjacency must be a keyword or {'edges': [...]}",
                              field="adjacency")

    opts = dict(DEFAULT_OPTIONS)
    raw = data.get("options", {}) or {}
    if not isinstance(raw, dict):
        raise ValidationError("options must be an object", field="options")
    unknown = set(raw) - set(DEFAULT_OPTIONS)
    if unknown:
        raise ValidationError(f"unknown options {sorted(unknown)}", field="options")
    if raw.get("epsilon") is not None:
        eps = _number(raw["epsilon"], "options.epsilon")
        if not eps > 0:
            raise ValidationError("epsilon must be positive", field="options.epsilon")
        opts["epsilon"] = eps
    if "tol" in raw:
        tol = _number(raw["tol"], "options.tol")
        if not tol > 0:
            raise ValidationError("tol must be positive", field="options.tol")
        opts["tol"] = tol
    if "norm" in raw:
        if str(raw["norm"]) not in NORMS:
            raise ValidationError(f"norm must be one of {NORMS}", field="options.norm")
        opts["norm"] = str(raw["norm"])
    return SystemSpec(n, names, matrices, adj, opts)


def load_spec(path):
    with open(path, encoding="utf-8") as fh:
        return parse_spec(fh.read())


def _compact(obj, indent=0):
    # one matrix row per line keeps files readable and diff-friendly
    pad = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f'{pad}  {json.dumps(k)}: {_compact(v, indent + 1)}' for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + f"\n{pad}}}"
    if isinstance(obj, list):
        if all(not isinstance(x, (dict, list)) for x in obj):
            return json.dumps(obj)
        items = [f"{pad}  {_compact(x, indent + 1)}" for x in obj]
        return "[\n" + ",\n".join(items) + f"\n{pad}]"
    return json.dumps(obj)


def render_spec(spec):
    return _compact(spec.to_dict()) + "\n"


def spec_hash(spec):
    canonical = json.dumps(spec.to_dict(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()


def _sig(x, digits=12):
    return None if x is None else float(f"{x:.{digits}g}")


def _one_based(cycle):
    return None if cycle is None else [v + 1 for v in cycle]


def _report_entry(report):
    d = report.to_dict()
    d["critical_cycle"] = _one_based(report.critical_cycle)
    return d


def build_report(spec, analysis, flags):
    """Machine-readable report of an :func:`dwellgraph.dwell.analyze` run."""
    forms = analysis["forms"]
    graph = analysis["graph"]
    out = {
        "input_sha256": spec_hash(spec),
        "flags": dict(flags),
        "subsystems": [
            {"name": name, "kind": f.kind, "spectral_radius": _sig(f.spectral_radius),
             "factor_norm": _sig(f.factor_norm), "epsilon": f.epsilon,
             "chains": list(f.chains)}
            for name, f in zip(spec.names, forms)
        ],
        "edges": [{"from": e.i + 1, "to": e.j + 1, "w_plus": _sig(e.w_plus),
                   "w_minus": _sig(e.w_minus)} for e in graph.edges],
    }
    for mode in ("minimum", "average"):
        reports = analysis.get(mode) or []
        if not reports:
            continue
        win = analysis["winner"][mode]
        out[mode] = {
            "winner": win.method,
            "tau_int": win.tau_int,
            "bound_real": win.bound_real,
            "critical_cycle": _one_based(win.critical_cycle),
            "reports": [_report_entry(r) for r in reports],
        }
    out["flat"] = flatten_report(out)
    return out


def flatten_report(report):
    flat = {"input_sha256": report["input_sha256"]}
    for mode in ("minimum", "average"):
        if mode not in report:
            continue
        sec = report[mode]
        flat[f"{mode}.winner"] = sec["winner"]
        flat[f"{mode}.tau_int"] = sec["tau_int"]
        flat[f"{mode}.bound_real"] = sec["bound_real"]
        for r in sec["reports"]:
            key = r["method"]
            norm = r["diagnostics"].get("norm")
            if norm:
                key += f"[{norm}]"
            if r["diagnostics"].get("scaled"):
                key += "[scaled]"
            flat[f"{mode}.{key}.tau_int"] = r["tau_int"]
            flat[f"{mode}.{key}.bound_real"] = r["bound_real"]
    return flat


def render_report(report, fmt="json"):
    if fmt == "flat":
        return "".join(f"{k}={v}\n" for k, v in report["flat"].items())
    return json.dumps(report, indent=2) + "\n"


REPORT_KEYS = ("input_sha256", "flags", "subsystems", "edges", "flat")


def parse_report(text):
    """Load a JSON report and check its required sections."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as err:
        raise ParseError(err.msg, line=err.lineno) from err
    missing = [k for k in REPORT_KEYS if k not in data]
    if missing:
        raise ValidationError(f"report lacks {missing}")
    for mode in ("minimum", "average"):
        if mode in data:
            sec = data[mode]
            if sec["winner"] not in [r["method"] for r in sec["reports"]]:
                raise ValidationError("winner is not among the reports", field=mode)
    return data
