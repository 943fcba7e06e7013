import math

import numpy as np
import pytest

import worldsim.pointer as pointer
import worldsim.tensor_core as tc
from worldsim.errors import AlignmentError, GridTooSmall, KindError, ParamError


def _params(eta_cells=(32, ), times=(0, 1), r_cells=64, phi=None):
    q = tc.Register.grid('q', 8, 1.0)
    r = tc.Register.grid('r', r_cells, 1.0)
    eta = np.zeros(r_cells)
    eta[list(eta_cells)] = 1
    return pointer.PointerParams(
        q, np.ones(8) if phi is None else phi, r, eta, times,
    )


def test_sharp_pointer_measures_q():
    run = pointer.von_neumann_run(_params())
    start, end = run.rows
    assert start['C'] == pytest.approx(0, abs=1e-12)
    assert end['C'] == pytest.approx(math.log(8), abs=1e-12)
    assert end['I_q'] == pytest.approx(-math.log(8), abs=1e-12)
    assert run.criterion['max_correlation'] == \
        pytest.approx(math.log(8), abs=1e-12)
    assert run.criterion['generates_measurement']


def test_wide_pointer_needs_longer_coupling():
    run = pointer.von_neumann_run(_params(eta_cells=(32, 33), times=(0, 1, 2)))
    correlations = [row['C'] for row in run.rows]
    assert correlations[0] == pytest.approx(0, abs=1e-12)
    assert correlations[1] < math.log(8) - 0.1
    assert correlations[2] == pytest.approx(math.log(8), abs=1e-12)
    assert run.criterion['I_q_constant']
    assert run.criterion['generates_measurement']


def test_no_coupling_is_no_measurement():
    run = pointer.von_neumann_run(_params(times=(0, )))
    assert not run.criterion['reached']
    assert not run.criterion['generates_measurement']


def test_coupled_state_is_a_shift():
    params = _params()
    state = pointer.coupled_state(params, 1)
    psi = state.amplitudes.reshape(8, 64)
    for i, x in enumerate(params.q.positions()):
        assert np.flatnonzero(psi[i]) == [32 + int(x)]


def test_unaligned_time():
    with pytest.raises(AlignmentError):
        pointer.coupled_state(_params(), 0.5)


def test_pointer_leaving_the_grid():
    with pytest.raises(GridTooSmall):
        pointer.von_neumann_run(_params(eta_cells=(4, ), times=(2, ),
                                        r_cells=8))


def test_params_validation():
    with pytest.raises(ParamError):
        _params(times=())
    with pytest.raises(ParamError):
        _params(times=(-1, ))
    with pytest.raises(ParamError):
        _params(phi=np.zeros(8))
    with pytest.raises(ParamError):
        _params(phi=np.ones(3))
    with pytest.raises(KindError):
        pointer.PointerParams(
            tc.Register.finite('q', 2), [1, 0],
            tc.Register.grid('r', 4, 1.0), [1, 0, 0, 0],
        )


def test_sampled_wave_functions():
    q = tc.Register.grid('q', 8, 1.0)
    r = tc.Register.grid('r', 64, 1.0)
    params = pointer.PointerParams(
        q, lambda x: math.exp(-x * x / 4),
        r, lambda x: 1.0 if x == 0 else 0.0,
    )
    assert np.linalg.norm(params.phi) == pytest.approx(1)
    run = pointer.von_neumann_run(params)
    assert run.rows[-1]['C'] == pytest.approx(-run.rows[-1]['I_q'], abs=1e-12)
