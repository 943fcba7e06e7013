import math

import pytest

import worldsim.stern_gerlach as sg
from worldsim.errors import GridTooSmall, ParamError

S = 1 / math.sqrt(2)


def _run(c1=S, c2=S, **kw):
    return sg.stern_gerlach_run(sg.SternGerlachParams(c1, c2, **kw))


def test_coupling_kicks_spins_apart_in_wavenumber():
    run = _run()
    assert run.wavenumbers['up'] == pytest.approx(-10, abs=1e-6)
    assert run.wavenumbers['down'] == pytest.approx(10, abs=1e-6)


def test_canonical_correlation_is_set_by_the_coupling():
    run = _run(flight_times=(0, 0.5, 1))
    for row in run.rows:
        assert row['canonical_correlation'] == \
            pytest.approx(math.log(2), abs=1e-9)


def test_flight_separates_the_packets():
    run = _run(flight_times=(0, 1))
    start, end = run.rows
    assert start['spin_position_correlation'] == pytest.approx(0, abs=1e-9)
    assert start['separation'] == pytest.approx(0, abs=1e-9)
    assert end['spin_position_correlation'] == \
        pytest.approx(math.log(2), abs=1e-6)
    assert end['separation'] == pytest.approx(20, abs=1e-6)


def test_unequal_amplitudes():
    run = _run(c1=0.6, c2=0.8, flight_times=(1, ))
    p = [0.36, 0.64]
    entropy = -sum(x * math.log(x) for x in p)
    assert run.rows[0]['canonical_correlation'] == \
        pytest.approx(entropy, abs=1e-9)


def test_single_spin_component():
    run = _run(c1=1, c2=0, flight_times=(1, ))
    assert run.wavenumbers['down'] is None
    assert run.rows[0]['canonical_correlation'] == pytest.approx(0, abs=1e-9)
    assert run.rows[0]['separation'] is None


def test_recombination_restores_the_initial_state():
    run = _run(flight_times=(0, 0.5, 1), recombine=True)
    assert run.fidelity == pytest.approx(1, abs=1e-9)
    assert _run(flight_times=(1, )).fidelity is None


def test_long_flight_leaves_the_grid():
    with pytest.raises(GridTooSmall):
        _run(flight_times=(3, ))


def test_params_validation():
    with pytest.raises(ParamError):
        sg.SternGerlachParams(1, 1)
    with pytest.raises(ParamError):
        sg.SternGerlachParams(1, 0, cells=33)
    with pytest.raises(ParamError):
        sg.SternGerlachParams(1, 0, width=0)
    with pytest.raises(ParamError):
        sg.SternGerlachParams(1, 0, flight_times=())
    with pytest.raises(ParamError):
        sg.SternGerlachParams(1, 0, flight_times=(-1, ))
