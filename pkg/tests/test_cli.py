import io
import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dwellgraph.catalog import example2_matrices
from dwellgraph.cli import (EXIT_INVALID, EXIT_NUMERIC, EXIT_OK, EXIT_UNSTABLE, cmd_analyze,
                            cmd_generate_example, cmd_graph, cmd_simulate, main)
from dwellgraph.errors import ParseError, UnknownExample, ValidationError
from dwellgraph.specfile import (SystemSpec, parse_report, parse_spec, render_report,
                                 render_spec)

A_EX1 = np.array([[-0.2, 1.0, 0.0], [-1.0, 1.4, 0.0], [0.0, 0.0, -0.4]])


def _spec_text(matrices, adjacency="full", **options):
    return json.dumps({
        "dimension": len(matrices[0]),
        "subsystems": [{"name": f"M{k}", "matrix": m} for k, m in enumerate(matrices)],
        "adjacency": adjacency,
        "options": options,
    })


def _run(argv):
    out = io.StringIO()
    code = main(argv, out=out)
    return code, out.getvalue()


def test_parse_minimal():
    spec = parse_spec(_spec_text([[[0.5, 0.0], [0.0, 0.2]], [[0.1, 0.3], [0.0, 0.4]]],
                                 {"edges": [[1, 2], [2, 1]]}))
    assert spec.m == 2 and spec.dimension == 2
    assert spec.adjacency_graph().edges == ((0, 1), (1, 0))
    assert spec.options["tol"] == 1e-9


@pytest.mark.parametrize("text, field", [
    (_spec_text([[[1, 2, 3], [4, 5, 6]]]), "subsystems[0].matrix"),
    (_spec_text([[[0.5]], [[0.2]]], {"edges": [[1, 1]]}), "adjacency.edges[0]"),
    (_spec_text([[[0.5]], [[0.2]]], {"edges": [[1, 3]]}), "adjacency.edges[0]"),
    (_spec_text([[[0.5]]], "star"), "adjacency"),
    (_spec_text([[[0.5]]], norm="2"), "options.norm"),
    (_spec_text([[[0.5]]], tol=-1), "options.tol"),
    ('{"dimension": 1, "subsystems": []}', "subsystems"),
    ('{"dimension": 0, "subsystems": [{"matrix": [[0.5]]}]}', "dimension"),
    ('{"dimension": 1, "subsystems": [{"matrix": [["x"]]}]}', "subsystems[0].matrix[0][0]"),
])
def test_validation_errors(text, field):
    with pytest.raises(ValidationError) as info:
        parse_spec(text)
    assert info.value.field == field


@pytest.mark.parametrize("token", ["NaN", "Infinity", "-Infinity"])
def test_non_finite_rejected(token):
    with pytest.raises(ValidationError):
        parse_spec('{"dimension": 1, "subsystems": [{"matrix": [[%s]]}]}' % token)


def test_parse_error_has_line():
    with pytest.raises(ParseError) as info:
        parse_spec('{"dimension": 1,\n"subsystems": [\n')
    assert info.value.line == 3


finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 4), st.integers(1, 4), st.data())
def test_round_trip(n, m, data):
    mats = [np.array(data.draw(st.lists(st.lists(finite, min_size=n, max_size=n),
                                        min_size=n, max_size=n))) for _ in range(m)]
    if m > 1:
        adj = data.draw(st.sampled_from(["full", "ring", "ring2", "edges"]))
    else:
        adj = "full"
    if adj == "edges":
        pairs = [(i, j) for i in range(1, m + 1) for j in range(1, m + 1) if i != j]
        adj = sorted(set(data.draw(st.lists(st.sampled_from(pairs), max_size=len(pairs)))))
    opts = {"epsilon": data.draw(st.one_of(st.none(), st.floats(1e-6, 0.5))),
            "tol": data.draw(st.floats(1e-12, 1e-3)),
            "norm": data.draw(st.sampled_from(["spectral", "1", "inf"]))}
    spec = SystemSpec(n, [f"S{k}" for k in range(m)], mats, adj, opts)
    again = parse_spec(render_spec(spec))
    assert again == spec
    assert render_spec(again) == render_spec(spec)


def test_generate_example1():
    spec = cmd_generate_example("example1")
    assert spec.m == 4 and spec.dimension == 3
    ref = np.sort_complex(np.linalg.eigvals(A_EX1))
    for A in spec.matrices:
        assert np.allclose(np.sort_complex(np.linalg.eigvals(A)), ref, atol=1e-10)
    assert np.array_equal(spec.matrices[0], A_EX1)
    assert [cmd_generate_example("example1", g).adjacency for g in ("G1", "G2", "G3")] == \
        ["full", "ring", "ring2"]
    assert parse_spec(render_spec(spec)) == spec


def test_generate_example2_verbatim():
    spec = cmd_generate_example("example2")
    A1, A2 = spec.matrices
    assert A1.tolist() == [[-0.38, 0.2, 0.1], [-0.16, 0.72, 0.16], [-0.24, 0.24, 0.8]]
    assert A2.tolist() == [[-0.8, -0.07, 0.04], [0.1, -1.0, 0.05], [-0.1, -0.06, -0.34]]
    for a, b in zip(spec.matrices, example2_matrices()):
        assert np.array_equal(a, b)


def test_generate_unknown():
    with pytest.raises(UnknownExample):
        cmd_generate_example("example3")


def test_analyze_report_round_trip_and_determinism():
    spec = cmd_generate_example("example2")
    r1 = cmd_analyze(spec)
    r2 = cmd_analyze(spec)
    assert render_report(r1) == render_report(r2)
    parsed = parse_report(render_report(r1))
    assert parsed == json.loads(render_report(r1))
    assert parsed["minimum"]["winner"] in {r["method"] for r in parsed["minimum"]["reports"]}
    assert len(parsed["edges"]) == 2
    assert parsed["flags"]["tol"] == 1e-9
    flat = render_report(r1, "flat")
    assert "minimum.theorem1.tau_int=8" in flat.splitlines()


def test_report_weights_recompute_cycle_value():
    # 12 significant digits suffice to recompute the certified ratio
    spec = cmd_generate_example("example1", "G2")
    report = cmd_analyze(spec)
    sec = report["minimum"]
    cyc = sec["critical_cycle"]
    edges = {(e["from"], e["to"]): e for e in report["edges"]}
    pairs = list(zip(cyc, cyc[1:] + cyc[:1]))
    ratio = sum(edges[p]["w_plus"] for p in pairs) / sum(edges[p]["w_minus"] for p in pairs)
    assert ratio == pytest.approx(sec["bound_real"], rel=1e-10)


def test_build_report_requires_modes_present():
    spec = cmd_generate_example("example2")
    report = cmd_analyze(spec, mode="min")
    assert "average" not in report and "minimum" in report


def test_cmd_graph():
    edges = cmd_graph(cmd_generate_example("example2"))
    assert [(i, j) for i, j, _, _ in edges] == [(1, 2), (2, 1)]


def test_simulate_contract():
    spec = cmd_generate_example("example1", "G1")
    a = cmd_simulate(spec, 7, trials=100, seed=42)
    b = cmd_simulate(spec, 7, trials=100, seed=42)
    assert json.dumps(a) == json.dumps(b)
    assert a["flags"]["seed"] == 42 and a["stats"]["trials"] == 100
    assert a["all_decay"] and a["stats"]["bound_violations"] == 0
    with pytest.raises(ValidationError):
        cmd_simulate(spec, 7, trials=0)


def test_main_exit_codes(tmp_path):
    good = tmp_path / "good.json"
    good.write_text(render_spec(cmd_generate_example("example2")))
    code, out = _run(["analyze", str(good), "--format", "flat"])
    assert code == EXIT_OK and "minimum.winner=" in out

    unstable = tmp_path / "unstable.json"
    unstable.write_text(_spec_text([[[0.5, 0.0], [0.0, 0.2]], [[1.01, 0.0], [0.0, 0.1]]]))
    assert _run(["analyze", str(unstable)])[0] == EXIT_UNSTABLE

    bad = tmp_path / "bad.json"
    bad.write_text(_spec_text([[[1, 2, 3], [4, 5, 6]]]))
    assert _run(["analyze", str(bad)])[0] == EXIT_INVALID
    assert _run(["analyze", str(tmp_path / "missing.json")])[0] == EXIT_INVALID
    assert _run(["simulate", str(good), "--tau", "8", "--trials", "0"])[0] == EXIT_INVALID
    assert _run(["generate-example", "nope"])[0] == EXIT_INVALID

    nilpotent = tmp_path / "nilpotent.json"
    nilpotent.write_text(_spec_text([[[0.0, 0.0], [0.0, 0.0]], [[0.5, 0.0], [0.0, 0.2]]]))
    assert _run(["analyze", str(nilpotent)])[0] == EXIT_NUMERIC


def test_main_simulate_byte_identical(tmp_path):
    f = tmp_path / "ex1.json"
    code, text = _run(["generate-example", "example1", "--graph", "G1"])
    f.write_text(text)
    argv = ["simulate", str(f), "--tau", "7", "--trials", "50", "--seed", "42"]
    assert _run(argv) == _run(argv)
    code, out = _run(argv + ["--adversarial"])
    assert code == EXIT_OK and json.loads(out)["critical_cycle"]


def test_main_graph_dump(tmp_path):
    f = tmp_path / "ex2.json"
    f.write_text(render_spec(cmd_generate_example("example2")))
    code, out = _run(["graph", str(f)])
    lines = out.splitlines()
    assert code == EXIT_OK and lines[0].split("\t") == ["from", "to", "w_plus", "w_minus"]
    assert len(lines) == 3


def test_build_report_unknown_winner_rejected():
    spec = cmd_generate_example("example2")
    report = cmd_analyze(spec)
    report["minimum"]["winner"] = "nonsense"
    with pytest.raises(ValidationError):
        parse_report(json.dumps(report))
