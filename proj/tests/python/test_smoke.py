import math
import os

import pytest

import kosmann

FIXTURES = os.environ["KOSMANN_FIXTURES"]


def fixture(name):
    return os.path.join(FIXTURES, name)


def strip_runtime(obj):
    if isinstance(obj, dict):
        return {k: strip_runtime(v) for k, v in obj.items() if k != "runtime_ms"}
    if isinstance(obj, list):
        return [strip_runtime(v) for v in obj]
    return obj


def test_load_and_introspect():
    spec = kosmann.load(fixture("schwarzschild.geo"))
    assert spec.dim == 4
    assert spec.signature == (1, 3)
    assert spec.coords[0] == "t"
    assert "tshift" in spec.fields
    assert not spec.has_reduction
    assert spec.expected["killing"] is True
    assert len(spec.sample_points(5, seed=1)) == 5


def test_killing_verdicts():
    sch = kosmann.load(fixture("schwarzschild.geo"))
    kr = kosmann.killing(sch, "tshift")
    assert kr["killing"] and kr["metric_killing"]
    assert kr["residual"] < 1e-9
    flat = kosmann.load(fixture("flat2d.geo"))
    assert not kosmann.killing(flat, "dilation")["killing"]
    with pytest.raises(ValueError):
        kosmann.killing(flat, "no-such-field")


def test_check_report():
    spec = kosmann.load(fixture("s2.geo"))
    rep = kosmann.check(spec, "killing", seed=7)
    assert rep["mode"] == "check"
    assert rep["suite"] == "killing"
    assert rep["pass"] is True
    assert any(c["name"].startswith("killing:") for c in rep["checks"])
    again = kosmann.check(spec, "killing", seed=7)
    assert strip_runtime(rep) == strip_runtime(again)
    with pytest.raises(ValueError):
        kosmann.check(spec, "bogus")


def test_reduce_hopf():
    spec = kosmann.load(fixture("s3_hopf.geo"))
    rep = kosmann.reduce(spec)
    assert rep["pass"] is True
    assert rep["fiber_rank"] == 1
    assert all(abs(v - 0.5) < 1e-10 for v in rep["scalar"]["values"])
    assert abs(rep["monopole"]["value"] + 1.0) < 1e-3


def test_oracle_sphere():
    spec = kosmann.load(fixture("s2.geo"))
    rep = kosmann.oracle(spec, "so3", seed=3)
    assert rep["pass"] is True
    assert rep["conn_deviation"] < 1e-6


def test_expressions():
    v = kosmann.evaluate("x^2*sin(y)", ["x", "y"], [2.0, 0.3])
    assert abs(v - 4.0 * math.sin(0.3)) < 1e-12
    d = kosmann.partial("x^2*sin(y)", ["x", "y"], 0, [2.0, 0.3])
    assert abs(d - 4.0 * math.sin(0.3)) < 1e-12
    printed = kosmann.canonical("1/2 + x*3", ["x"])
    assert kosmann.evaluate(printed, ["x"], [0.7]) == kosmann.evaluate(
        "1/2 + x*3", ["x"], [0.7]
    )
    with pytest.raises(ValueError):
        kosmann.evaluate("x +", ["x"], [0.0])
