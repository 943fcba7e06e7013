import math

import numpy as np
import numpy.testing as npt
import pytest

import worldsim.sampling as sampling
import worldsim.tensor_core as tc
from worldsim.errors import (
    AxisError,
    KindError,
    NameCollision,
    NormError,
    NotUnitary,
    ShapeError,
    UseOuterProductInstead,
)

S = 1 / math.sqrt(2)


def _qubits(*names):
    return [tc.Register.finite(name, 2) for name in names]


def _bell():
    a, b = _qubits('a', 'b')
    return tc.StateVector([a, b], [S, 0, 0, S])


def test_finite_register_labels():
    reg = tc.Register.finite('s', 3)
    assert reg.labels == ('0', '1', '2')
    assert reg.index('2') == 2
    with pytest.raises(AxisError):
        reg.index('3')


def test_grid_register_is_centered():
    reg = tc.Register.grid('x', 8, 0.5)
    npt.assert_allclose(reg.positions(), np.arange(-4, 4) * 0.5)
    assert reg.origin == -2.0
    assert reg.kind == tc.GRID


def test_register_validation():
    with pytest.raises(ShapeError):
        tc.Register('s', ['0', '0'])
    with pytest.raises(ShapeError):
        tc.Register('x', [0.0, 1.0], kind=tc.GRID)
    with pytest.raises(KindError):
        tc.Register.finite('s', 2).positions()


def test_duplicate_register_names():
    a, _ = _qubits('a', 'b')
    with pytest.raises(NameCollision):
        tc.StateVector([a, a], [1, 0, 0, 0])


def test_state_needs_unit_norm():
    a, = _qubits('a')
    with pytest.raises(NormError):
        tc.StateVector([a], [1, 1])
    with pytest.raises(ShapeError):
        tc.StateVector([a], [1, 0, 0])


def test_constructor_fixes_phase():
    a, = _qubits('a')
    state = tc.StateVector([a], [1j * S, 1j * S])
    npt.assert_allclose(state.amplitudes, [S, S])
    state = tc.StateVector([a], [0, -1])
    npt.assert_allclose(state.amplitudes, [0, 1])


def test_from_amplitudes_normalizes_and_fixes_phase():
    a, = _qubits('a')
    state = tc.StateVector.from_amplitudes([a], [1j, 1j])
    npt.assert_allclose(state.amplitudes, [S, S])


def test_basis_state():
    a, b = _qubits('a', 'b')
    state = tc.StateVector.basis([a, b], {'a': '1', 'b': '0'})
    npt.assert_allclose(state.amplitudes, [0, 0, 1, 0])
    with pytest.raises(AxisError):
        tc.StateVector.basis([a, b], {'a': '1'})


def test_permuted_and_inner():
    a, b = _qubits('a', 'b')
    state = tc.StateVector.basis([a, b], ['0', '1'])
    swapped = state.permuted(['b', 'a'])
    npt.assert_allclose(swapped.amplitudes, [0, 0, 1, 0])
    assert abs(state.inner(swapped) - 1) < 1e-12


def test_permute_amplitudes_keeps_phases():
    a, b = _qubits('a', 'b')
    amps = np.array([0, 1j, -1, 0]) * S
    layout, moved = tc.permute_amplitudes([a, b], amps, ['b', 'a'])
    assert [reg.name for reg in layout] == ['b', 'a']
    npt.assert_allclose(moved, [0, -S, 1j * S, 0])
    with pytest.raises(AxisError):
        tc.permute_amplitudes([a, b], amps, ['a'])


def test_operator_must_be_unitary_when_flagged():
    a, = _qubits('a')
    with pytest.raises(NotUnitary):
        tc.LinearOperator([a], [[1, 1], [0, 1]], unitary=True)
    with pytest.raises(ShapeError):
        tc.LinearOperator([a], np.eye(3))


def test_diagonal_detects_unitarity():
    a, = _qubits('a')
    assert tc.LinearOperator.diagonal([a], [1, 1j]).unitary
    assert not tc.LinearOperator.diagonal([a], [1, 0.5]).unitary


def test_apply_on_second_register():
    a, b = _qubits('a', 'b')
    x = tc.LinearOperator([b], [[0, 1], [1, 0]], unitary=True)
    state = tc.apply_operator(x, tc.StateVector.basis([a, b], ['0', '0']))
    npt.assert_allclose(state.amplitudes, [0, 1, 0, 0])


def test_apply_on_reversed_targets():
    a, b = _qubits('a', 'b')
    # CNOT with b controlling a
    cnot = tc.LinearOperator(
        [b, a], [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]],
        unitary=True,
    )
    state = tc.apply_operator(cnot, tc.StateVector.basis([a, b], ['0', '1']))
    npt.assert_allclose(state.amplitudes, [0, 0, 0, 1])


def test_nonunitary_operator_renormalizes():
    a, = _qubits('a')
    project = tc.LinearOperator([a], [[1, 0], [0, 0]])
    state = tc.apply_operator(project, tc.StateVector([a], [S, S]))
    npt.assert_allclose(state.amplitudes, [1, 0])
    with pytest.raises(NormError):
        tc.apply_operator(project, tc.StateVector.basis([a], ['1']))


def test_evolve_composes_in_order():
    a, = _qubits('a')
    h = tc.LinearOperator([a], [[S, S], [S, -S]], unitary=True)
    z = tc.LinearOperator.diagonal([a], [1, -1])
    zero = tc.StateVector.basis([a], ['0'])
    state = tc.evolve([h, z, h], zero)
    npt.assert_allclose(state.amplitudes, [0, 1], atol=1e-12)
    composed = h.compose(z.compose(h))
    npt.assert_allclose(
        tc.apply_operator(composed, zero).amplitudes, state.amplitudes,
        atol=1e-12,
    )
    npt.assert_allclose(h.dagger().matrix, h.matrix)


def test_permutation_operator():
    reg = tc.Register.finite('m', 3)
    op = tc.LinearOperator.permutation([reg], [1, 2, 0])
    state = tc.apply_operator(op, tc.StateVector.basis([reg], ['0']))
    npt.assert_allclose(state.amplitudes, [0, 1, 0])
    with pytest.raises(ShapeError):
        tc.LinearOperator.permutation([reg], [0, 0, 1])


def test_tensor_product():
    a, b = _qubits('a', 'b')
    plus = tc.StateVector([a], [S, S])
    one = tc.StateVector.basis([b], ['1'])
    state = tc.tensor_product([plus, one])
    assert state.names == ('a', 'b')
    npt.assert_allclose(state.amplitudes, [0, S, 0, S])


def test_contract_and_assemble():
    state = _bell()
    rest, amps = tc.contract(state.layout, state.amplitudes, ['a'], [0, 1])
    assert [reg.name for reg in rest] == ['b']
    npt.assert_allclose(amps, [0, S])
    rebuilt = tc.assemble(state.layout, [(['b'], [0, 1]), (['a'], [0, S])])
    npt.assert_allclose(rebuilt, [0, 0, 0, S])


def test_reduced_density_of_bell_pair():
    rho = tc.reduced_density(_bell(), ['a'])
    npt.assert_allclose(rho.matrix, np.eye(2) / 2, atol=1e-12)
    npt.assert_allclose(rho.eigenvalues(), [0.5, 0.5])
    with pytest.raises(UseOuterProductInstead):
        tc.reduced_density(_bell(), ['a', 'b'])


def test_density_matrix_validation():
    a, = _qubits('a')
    with pytest.raises(ShapeError):
        tc.DensityMatrix([a], [[1, 1], [0, 0]])
    with pytest.raises(NormError):
        tc.DensityMatrix([a], np.eye(2))
    pure = tc.DensityMatrix.from_state(tc.StateVector([a], [S, S]))
    npt.assert_allclose(pure.eigenvalues(), [1, 0], atol=1e-12)


def test_fourier_dual_of_gaussian_is_gaussian():
    x = tc.Register.grid('x', 256, 0.1)
    psi = np.exp(-x.positions() ** 2 / 2)
    state = tc.StateVector.from_amplitudes([x], psi)
    dual = tc.fourier_dual(state, 'x')
    k = dual.register('x').positions()
    expected = np.exp(-k ** 2 / 2)
    expected = expected / np.linalg.norm(expected)
    npt.assert_allclose(np.abs(dual.amplitudes), expected, atol=1e-10)


def test_fourier_dual_turns_shifts_into_phases():
    x = tc.Register.grid('x', 128, 0.2)
    rng = np.random.default_rng(7)
    amps = rng.standard_normal(128) + 1j * rng.standard_normal(128)
    state = tc.StateVector.from_amplitudes([x], amps)
    shift = 5
    moved = tc.StateVector([x], np.roll(state.amplitudes, shift))
    dual = tc.fourier_dual(state, 'x')
    k = dual.register('x').positions()
    expected = tc.canonical_phase(
        dual.amplitudes * np.exp(-1j * k * shift * x.width),
    )
    npt.assert_allclose(
        tc.fourier_dual(moved, 'x').amplitudes, expected, atol=1e-10,
    )


def test_fourier_dual_needs_grid():
    with pytest.raises(KindError):
        tc.fourier_dual(_bell(), 'a')


def _random_grid_state(seed, cells=64, width=0.25):
    x = tc.Register.grid('x', cells, width)
    rng = np.random.default_rng(seed)
    amps = rng.standard_normal(cells) + 1j * rng.standard_normal(cells)
    return x, tc.StateVector.from_amplitudes([x], amps)


def test_fourier_dual_twice_is_parity():
    x, state = _random_grid_state(1)
    twice = tc.fourier_dual(tc.fourier_dual(state, 'x'), 'x')
    npt.assert_allclose(twice.register('x').positions(), x.positions(),
                        atol=1e-12)
    # x_j -> -x_j is j -> -j mod N on the centered grid
    flipped = tc.StateVector([x], np.roll(state.amplitudes[::-1], 1))
    npt.assert_allclose(twice.amplitudes, flipped.amplitudes, atol=1e-10)


def test_fourier_dual_preserves_overlaps():
    x, left = _random_grid_state(2)
    _, right = _random_grid_state(3)
    dual_left = tc.fourier_dual(left, 'x')
    dual_right = tc.fourier_dual(right, 'x')
    assert np.linalg.norm(dual_left.amplitudes) == pytest.approx(1)
    assert abs(dual_left.inner(dual_right)) == \
        pytest.approx(abs(left.inner(right)), abs=1e-12)


@pytest.mark.parametrize('cell', [0, 17, 40])
def test_fourier_dual_of_a_delta_is_flat(cell):
    x = tc.Register.grid('x', 64, 0.25)
    amps = np.zeros(64)
    amps[cell] = 1
    dual = tc.fourier_dual(tc.StateVector([x], amps), 'x')
    npt.assert_allclose(np.abs(dual.amplitudes), [1 / 8] * 64, atol=1e-12)


def test_operators_on_disjoint_targets_commute():
    rng = sampling.trial_rng(5, 0)
    a, b, c = _qubits('a', 'b', 'c')
    state = sampling.random_state(rng, [a, b, c])
    u = tc.LinearOperator([a], sampling.random_unitary(rng, 2), unitary=True)
    v = tc.LinearOperator([c, b], sampling.random_unitary(rng, 4),
                          unitary=True)
    npt.assert_allclose(
        tc.evolve([u, v], state).amplitudes,
        tc.evolve([v, u], state).amplitudes,
        atol=1e-12,
    )


@pytest.mark.parametrize('trial', range(5))
def test_bipartite_reductions_share_their_spectrum(trial):
    rng = sampling.trial_rng(8, trial)
    layout = sampling.qudits([2, 3, 2])
    state = sampling.random_state(rng, layout)
    left = tc.reduced_density(state, ['q1']).eigenvalues()
    right = tc.reduced_density(state, ['q0', 'q2']).eigenvalues()
    npt.assert_allclose(left, right[:3], atol=1e-12)
    npt.assert_allclose(right[3:], 0, atol=1e-12)
