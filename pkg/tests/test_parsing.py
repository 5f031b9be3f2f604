import pytest

from foliate import Foliation, Form, parse_scenario, serialize
from foliate.parsing import ScenarioError
from foliate.runner import bundled_scenarios, render_text, run_text

MINIMAL = "coords x y\nparams alpha\nfoliation K = d/dx + alpha*d/dy\n"


def test_minimal_header_and_one_foliation():
    s = parse_scenario(MINIMAL)
    assert s.coords == ("x", "y")
    assert len(s.declarations) == 1
    assert isinstance(s.get("K", ("foliation",)).value, Foliation)


def test_undeclared_coordinate_reports_location():
    with pytest.raises(ScenarioError) as exc:
        parse_scenario("coords x y\nform a = dz\n", "t.scn")
    e = exc.value
    assert e.line == 2 and e.col >= 10
    assert "t.scn:2:" in str(e)


@pytest.mark.parametrize("text, where, fragment", [
    ("coords x y\nform a = dx +\n", "e.scn:2:14", "end of input"),
    ("coords x y\nform a = dx\nform a = dy\n", "e.scn:3:6", "already in use"),
    ("coords x y\nfoliation F = d/dx ; d/dx\n", "e.scn:2:", "linearly dependent"),
    ("coords x y\nbundle P base y fiber x\n", "e.scn:2:", "declared order"),
    ("coords x y\nrun involutive F\n", "e.scn:2:16", "undeclared name 'F'"),
])
def test_input_errors_are_located(text, where, fragment):
    with pytest.raises(ScenarioError) as exc:
        run_text(text, "e.scn")
    assert str(exc.value).startswith(where)
    assert fragment in str(exc.value)


def test_wedge_and_power_syntax():
    s = parse_scenario("coords x y z\nform a = dx^dy\nscalar f = cos(y)^2\n")
    a = s.get("a", ("form",)).value
    assert a == Form.d_coord(3, 0) ^ Form.d_coord(3, 1)
    assert s.get("f", ("scalar",)).value.bandwidth() == 2


@pytest.mark.parametrize("name", sorted(bundled_scenarios()))
def test_bundled_scenarios_round_trip(name):
    text = bundled_scenarios()[name].read_text()
    s = parse_scenario(text, name)
    once = serialize(s)
    assert serialize(parse_scenario(once)) == once
    assert render_text(run_text(once)) == render_text(run_text(text))


def test_bundled_suspension_scenario_is_infeasible():
    text = bundled_scenarios()["suspension_t3"].read_text()
    records = run_text(text)
    solves = [r for r in records if r.directive.op == "solve-basic"]
    assert [r.status for r in solves[:4]] == ["infeasible"] * 4
