import math

import pytest
from hypothesis import given, strategies as st

from robin_born.config import ScenarioConfig, dump_config, load_config
from robin_born.model import (BoundaryImpulse, Geometry, MediumParams, ModelValidationError,
                              RobinCoefficient, SpaceTimePoint, TimeGrid, ensure_valid, validate)


def fields(violations):
    return [v.field for v in violations]


def test_figure_parameters_are_valid():
    assert validate(MediumParams(0.06, 0.001), RobinCoefficient(0.005), Geometry.halfspace()) == []


def test_negative_gamma_is_the_only_violation():
    assert fields(validate(MediumParams(-1.0, 0.0), RobinCoefficient(0.0), Geometry.halfspace())) == ["gamma"]


def test_zero_width_slab():
    assert fields(validate(MediumParams(0.06, 0.0), RobinCoefficient(0.0), Geometry.slab(0.0, 3))) == ["geometry.L"]


@pytest.mark.parametrize("item, expected", [
    (MediumParams(0.06, -0.1), ["b"]),
    (MediumParams(math.nan, 0.0), ["gamma"]),
    (RobinCoefficient(-1e-9), ["beta"]),
    (Geometry.slab(10.0, 0), ["geometry.M"]),
    (Geometry("disk"), ["geometry.kind"]),
    (BoundaryImpulse(0.0, 0.0, -1.0), ["source.s"]),
    (TimeGrid(10.0, 5.0, 4), ["grid"]),
    (TimeGrid(0.0, 5.0, 1), ["grid.count"]),
])
def test_each_invariant_reported_alone(item, expected):
    assert fields(item.violations()) == expected


def test_zero_beta_and_absorption_accepted():
    assert validate(MediumParams(0.06, 0.0), RobinCoefficient(0.0), Geometry.halfspace()) == []


def test_point_inside_slab():
    geom = Geometry.slab(10.0, 2)
    assert SpaceTimePoint(0, 0, 10.0, 1.0).violations(geom) == []
    assert len(SpaceTimePoint(0, 0, 10.5, 1.0).violations(geom)) == 1
    assert len(SpaceTimePoint(0, 0, -0.1, 1.0).violations()) == 1
    assert len(SpaceTimePoint(0, 0, 1.0, -1.0).violations()) == 1


def test_ensure_valid_raises_with_field_names():
    with pytest.raises(ModelValidationError) as info:
        ensure_valid(MediumParams(0.0, -1.0), RobinCoefficient(0.1))
    assert {v.field for v in info.value.violations} == {"gamma", "b"}


def test_grid_parse_and_times():
    g = TimeGrid.parse("200:4000:191")
    assert g == TimeGrid(200.0, 4000.0, 191)
    t = g.times()
    assert t[0] == 200.0 and t[-1] == 4000.0 and t[1] - t[0] == pytest.approx(20.0)
    with pytest.raises(ValueError):
        TimeGrid.parse("1:2")


pos = st.floats(1e-4, 1e3, allow_nan=False)


@given(gamma=pos, b=st.floats(0, 1), beta=st.floats(0, 5), slab=st.booleans(), L=pos,
       M=st.one_of(st.none(), st.integers(1, 50)), s=st.floats(0, 1e4), t0=st.floats(0, 100),
       span=pos, count=st.integers(2, 500), x3=st.floats(0, 1e-4), n_max=st.integers(0, 200),
       tol=st.floats(1e-9, 0.99))
def test_config_round_trip(tmp_path_factory, gamma, b, beta, slab, L, M, s, t0, span, count, x3,
                           n_max, tol):
    geom = Geometry.slab(L, M) if slab else Geometry.halfspace()
    cfg = ScenarioConfig(MediumParams(gamma, b), RobinCoefficient(beta), geom,
                         BoundaryImpulse(0.5, -0.25, s), TimeGrid(t0, t0 + span, count),
                         (1.0, 2.0, x3), n_max, tol)
    assert cfg.violations() == []
    path = tmp_path_factory.mktemp("cfg") / "scenario.yaml"
    path.write_text(dump_config(cfg))
    assert load_config(path) == cfg


def test_config_reports_missing_and_mistyped(tmp_path):
    path = tmp_path / "bad.yaml"
    path.write_text("gamma: fast\nbeta: 0.1\ngrid: {tStart: 0, tEnd: 1}\npoint: {x3: 1}\n")
    with pytest.raises(ModelValidationError) as info:
        load_config(path)
    assert {v.field for v in info.value.violations} == {"gamma", "grid.count"}


def test_config_range_checks():
    cfg = ScenarioConfig(MediumParams(0.06, 0.0), RobinCoefficient(0.0), Geometry.halfspace(),
                         BoundaryImpulse(), TimeGrid(1.0, 2.0, 2), (0.0, 0.0, 1.0), 201, 1.0)
    assert {v.field for v in cfg.violations()} == {"nMax", "tol"}
