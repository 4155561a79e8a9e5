import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from tdho.errors import FrequencyDomainError, ScheduleDomainError, ScheduleRangeError
from tdho.schedule import ModeFrequencySpec, ParamSchedule, eval_param, mode_frequency, parse_schedule


def test_constant():
    assert eval_param(ParamSchedule.constant(1.0), 5.0) == 1.0


def test_quench_at_zero_keeps_initial_value_only_at_zero():
    q = ParamSchedule.quench(1.0, 2.0, 0.0)
    assert eval_param(q, 0.0) == 1.0
    assert eval_param(q, 0.1) == 2.0
    assert q.right_value(0.0) == 2.0


def test_quench_later_is_right_continuous():
    q = ParamSchedule.quench(1.0, 2.0, 1.5)
    assert q(1.4999) == 1.0
    assert q(1.5) == 2.0
    assert q.breakpoints() == (1.5,)


def test_piecewise_right_limit():
    s = ParamSchedule.piecewise([(0, 1), (2, 3)])
    assert eval_param(s, 2.0) == 3.0
    assert eval_param(s, 1.999) == 1.0


def test_piecewise_rejects_unsorted():
    with pytest.raises(ScheduleDomainError):
        ParamSchedule.piecewise([(0, 1), (2, 3), (2, 4)])


def test_negative_time():
    with pytest.raises(ScheduleDomainError):
        eval_param(ParamSchedule.constant(1.0), -0.1)


def test_tabulated_interpolates_and_bounds():
    ts = np.linspace(0, 2, 11)
    s = ParamSchedule.tabulated(ts, 1 + ts**2)
    assert s(1.0) == pytest.approx(2.0, abs=1e-12)
    assert 1.0 <= s(0.05) <= 1.04
    with pytest.raises(ScheduleRangeError):
        s(2.5)


def test_tabulated_is_monotone_between_monotone_samples():
    ts = np.array([0.0, 1.0, 2.0, 3.0])
    s = ParamSchedule.tabulated(ts, [1.0, 1.0, 5.0, 5.0])
    vals = [s(t) for t in np.linspace(0, 3, 301)]
    assert np.all(np.diff(vals) >= -1e-15)


@pytest.mark.parametrize("spec,t,expected", [
    (1.5, 3.0, 1.5),
    ({"kind": "constant", "value": 2}, 0.0, 2.0),
    ({"kind": "quench", "initial": 1, "final": 2}, 0.0, 1.0),
    ({"kind": "quench", "initial": 1, "final": 2, "t_q": 1}, 1.0, 2.0),
    ({"kind": "piecewise", "points": [[0, 1], [2, 3]]}, 2.5, 3.0),
    ({"kind": "tabulated", "t": [0, 1], "values": [0, 2]}, 0.5, 1.0),
])
def test_parse_schedule(spec, t, expected):
    assert parse_schedule(spec)(t) == pytest.approx(expected)


@pytest.mark.parametrize("bad", ["x", {"value": 1}, {"kind": "ramp"}, {"kind": "quench", "initial": 1}])
def test_parse_schedule_errors(bad):
    with pytest.raises(ScheduleDomainError):
        parse_schedule(bad)


def test_round_trip_dict():
    for s in (ParamSchedule.constant(2.0), ParamSchedule.quench(1, 2, 0.5),
              ParamSchedule.piecewise([(0, 1), (1, 4)]),
              ParamSchedule.tabulated([0, 1, 2], [1, 2, 1])):
        assert parse_schedule(s.to_dict()).to_dict() == s.to_dict()


@pytest.mark.parametrize("c,expected", [(2, math.sqrt(3)), (3, 2.0)])
def test_mode_frequency_symmetric(c, expected):
    spec = ModeFrequencySpec(ParamSchedule.constant(1.0), ParamSchedule.constant(1.0), c)
    assert mode_frequency(spec, 0.7) == pytest.approx(expected, rel=1e-15)


def test_mode_frequency_uncoupled():
    spec = ModeFrequencySpec(ParamSchedule.constant(1.0), ParamSchedule.constant(0.0), 5)
    assert mode_frequency(spec, 1.0) == 1.0


def test_frequency_domain_error_reports_time_and_value():
    spec = ModeFrequencySpec(ParamSchedule.quench(1.0, -1.0, 0.5), ParamSchedule.constant(0.2), 2)
    with pytest.raises(FrequencyDomainError) as info:
        mode_frequency(spec, 1.0)
    assert info.value.t == 1.0
    assert info.value.value == pytest.approx(-0.6)


@given(st.floats(0, 100), st.floats(-5, 5), st.floats(0.1, 5))
def test_com_mode_ignores_coupling(t, J, k0):
    a = ModeFrequencySpec(ParamSchedule.constant(k0), ParamSchedule.constant(J), 0.0)
    b = ModeFrequencySpec(ParamSchedule.constant(k0), ParamSchedule.constant(0.0), 0.0)
    assert mode_frequency(a, t) == mode_frequency(b, t)


@given(st.floats(0, 10))
def test_evaluation_is_deterministic(t):
    s = ParamSchedule.tabulated([0, 5, 10], [1, 3, 2])
    assert s(t) == s(t)
