import json
import math
import os

import numpy as np
import numpy.testing as npt
import pytest

import worldsim.classical_info as ci
from worldsim.errors import (
    AxisError,
    ConditionOnNull,
    GroupingError,
    NormError,
    PartitionError,
)


def _pair(probs, measure_weights=None):
    return ci.FiniteDistribution(
        [('x', ['0', '1']), ('y', ['0', '1'])], probs, measure_weights,
    )


def _product(px, py):
    return ci.FiniteDistribution(
        [('x', range(len(px))), ('y', range(len(py)))],
        np.outer(px, py),
    )


def test_distribution_must_be_normalized():
    with pytest.raises(NormError):
        _pair([0.5, 0.5, 0.5, 0.5])
    with pytest.raises(NormError):
        _pair([1.5, -0.5, 0, 0])
    with pytest.raises(NormError):
        _pair([0.25] * 4, [[1, 0], None])


def test_marginal():
    npt.assert_allclose(ci.marginal(_pair([0.25] * 4), ['x']).probs, [.5, .5])
    npt.assert_allclose(
        ci.marginal(_pair([0.5, 0, 0, 0.5]), ['x']).probs, [.5, .5],
    )
    npt.assert_allclose(
        ci.marginal(_product([0.3, 0.7], [0.4, 0.6]), ['y']).probs,
        [0.4, 0.6],
    )
    with pytest.raises(AxisError):
        ci.marginal(_pair([0.25] * 4), [])


def test_marginal_keeps_axis_order():
    P = ci.FiniteDistribution(
        [('a', '01'), ('b', '01'), ('c', '01')], np.full(8, 1 / 8),
    )
    assert ci.marginal(P, ['c', 'a']).names == ('a', 'c')


def test_conditional():
    P = _product([0.3, 0.7], [0.4, 0.6])
    npt.assert_allclose(ci.conditional(P, {'y': 1}).probs, [0.3, 0.7])
    npt.assert_allclose(
        ci.conditional(_pair([0.5, 0, 0, 0.5]), {'y': '0'}).probs, [1, 0],
    )
    npt.assert_allclose(
        ci.conditional(_pair([0.1, 0.2, 0.3, 0.4]), {'y': '1'}).probs,
        [1 / 3, 2 / 3],
    )


def test_conditional_errors():
    with pytest.raises(ConditionOnNull):
        ci.conditional(_pair([0.5, 0, 0.5, 0]), {'y': '1'})
    with pytest.raises(AxisError):
        ci.conditional(_pair([0.25] * 4), {'x': '0', 'y': '0'})
    with pytest.raises(AxisError):
        ci.conditional(_pair([0.25] * 4), {'y': '2'})


def test_information():
    point = ci.FiniteDistribution([('x', '0123')], [1, 0, 0, 0])
    assert ci.information(point) == 0
    uniform = ci.FiniteDistribution([('x', '0123')], [0.25] * 4)
    assert ci.information(uniform) == pytest.approx(-math.log(4), abs=1e-12)
    weighted = ci.FiniteDistribution([('x', '01')], [0.5, 0.5], [[2, 2]])
    assert ci.information(weighted) == pytest.approx(-math.log(4), abs=1e-12)


def test_correlation_examples():
    assert abs(ci.correlation(_product([0.3, 0.7], [0.4, 0.6]),
                              [['x'], ['y']])) < 1e-12
    assert ci.correlation(_pair([0.5, 0, 0, 0.5]), [['x'], ['y']]) == \
        pytest.approx(math.log(2), abs=1e-12)
    ghz = np.zeros(8)
    ghz[0] = ghz[7] = 0.5
    P = ci.FiniteDistribution([('x', '01'), ('y', '01'), ('z', '01')], ghz)
    assert ci.correlation(P, [['x'], ['y'], ['z']]) == \
        pytest.approx(2 * math.log(2), abs=1e-12)
    assert ci.correlation(P, [['x'], ['y', 'z']]) == \
        pytest.approx(math.log(2), abs=1e-12)


@pytest.mark.parametrize('grouping', [
    [['x', 'y']],
    [['x'], []],
    [['x'], ['x', 'y']],
    [['x'], ['z']],
])
def test_bad_groupings(grouping):
    with pytest.raises(GroupingError):
        ci.correlation(_pair([0.25] * 4), grouping)


def test_correlation_ignores_measure_weights():
    rng = np.random.default_rng(3)
    probs = rng.random(4)
    probs /= probs.sum()
    plain = ci.correlation(_pair(probs), [['x'], ['y']])
    weighted = ci.correlation(_pair(probs, [[3, 0.5], [7, 2]]),
                              [['x'], ['y']])
    assert abs(plain - weighted) < 1e-12


def test_correlation_invariant_under_relabeling():
    rng = np.random.default_rng(5)
    probs = rng.random((3, 4))
    probs /= probs.sum()
    P = ci.FiniteDistribution([('x', range(3)), ('y', range(4))], probs)
    Q = ci.FiniteDistribution(
        [('x', range(3)), ('y', range(4))], probs[[2, 0, 1]][:, [3, 1, 0, 2]],
    )
    assert abs(ci.correlation(P, [['x'], ['y']]) -
               ci.correlation(Q, [['x'], ['y']])) < 1e-12


def test_independent_information_adds():
    P = _product([0.2, 0.3, 0.5], [0.9, 0.1])
    total = ci.information(ci.marginal(P, ['x'])) + \
        ci.information(ci.marginal(P, ['y']))
    assert abs(ci.information(P) - total) < 1e-12


def test_partition_validation():
    with pytest.raises(PartitionError):
        ci.Partition({'0': 'a', '1': 'b'}, blocks=['a', 'b', 'c'])
    with pytest.raises(PartitionError):
        ci.Partition.from_blocks({'a': ['0', '1'], 'b': ['1']})
    with pytest.raises(PartitionError):
        ci.Partition({'0': 'a'}).check(['0', '1'])
    part = ci.Partition.from_blocks({'lo': ['0', '1'], 'hi': ['2']})
    assert part.blocks == ('lo', 'hi')
    assert part.block_of('2') == 'hi'


def test_coarsen_merging_an_axis_kills_its_correlation():
    P = _pair([0.4, 0.1, 0.1, 0.4])
    merged = ci.coarsen(P, {'x': ci.Partition({'0': '*', '1': '*'})})
    npt.assert_allclose(merged.probs, [[0.5, 0.5]])
    assert abs(ci.correlation(merged, [['x'], ['y']])) < 1e-12


def test_coarsen_identity():
    P = _pair([0.1, 0.2, 0.3, 0.4])
    same = ci.coarsen(P, {'x': ci.Partition.identity(['0', '1'])})
    npt.assert_allclose(same.probs, P.probs)


def test_coarsen_sums_measure_weights():
    P = ci.FiniteDistribution(
        [('x', '012')], [0.2, 0.3, 0.5], [[1, 2, 3]],
    )
    merged = ci.coarsen(P, {'x': ci.Partition({'0': 'a', '1': 'a', '2': 'b'})})
    npt.assert_allclose(merged.weight_of('x'), [3, 3])
    npt.assert_allclose(merged.probs, [0.5, 0.5])


def test_coarsening_never_raises_correlation():
    rng = np.random.default_rng(42)
    labels = ['0', '1', '2', '3']
    for _ in range(1000):
        probs = rng.random((4, 4))
        probs /= probs.sum()
        P = ci.FiniteDistribution([('x', labels), ('y', labels)], probs)
        partitions = {}
        for axis in ('x', 'y'):
            blocks = rng.permutation([0, 1] + list(rng.integers(0, 2, 2)))
            partitions[axis] = ci.Partition(
                dict((label, str(b)) for label, b in zip(labels, blocks)),
            )
        coarse = ci.coarsen(P, partitions)
        fine = ci.correlation(P, [['x'], ['y']])
        assert ci.correlation(coarse, [['x'], ['y']]) <= fine + 1e-12


def _gaussian_density(rho, cells=512, half_width=6.0):
    x = np.linspace(-half_width, half_width, cells, endpoint=False)
    dx = x[1] - x[0]
    X, Y = np.meshgrid(x, x, indexing='ij')
    f = np.exp(-(X ** 2 - 2 * rho * X * Y + Y ** 2) / (2 * (1 - rho ** 2)))
    return f / (f.sum() * dx * dx), dx * dx


def test_continuous_correlation_of_separable_density():
    density, area = _gaussian_density(0.0, cells=64)
    sequence = ci.continuous_correlation(density, 5, area)
    assert max(abs(c) for c in sequence) < 1e-10


def test_continuous_correlation_approaches_gaussian_limit():
    density, area = _gaussian_density(0.8)
    sequence = ci.continuous_correlation(density, 8, area)
    assert all(b >= a - 1e-10 for a, b in zip(sequence, sequence[1:]))
    assert sequence[-1] == pytest.approx(-0.5 * math.log(1 - 0.64), abs=0.02)


def test_continuous_correlation_invariant_under_block_permutation():
    density, area = _gaussian_density(0.5, cells=64)
    # swaps the halves and the quarters inside one half, keeping the nesting
    order = [3, 2, 0, 1]
    blocks = density.reshape(4, 16, 64)[order].reshape(64, 64)
    npt.assert_allclose(
        ci.continuous_correlation(blocks, 2, area),
        ci.continuous_correlation(density, 2, area),
        atol=1e-12,
    )


def test_continuous_correlation_errors():
    with pytest.raises(NormError):
        ci.continuous_correlation(np.ones((4, 4)), 1)
    with pytest.raises(PartitionError):
        ci.continuous_correlation(np.full((6, 6), 1 / 36), 2)


def test_json_document(tmp_path):
    P = _pair([0.1, 0.2, 0.3, 0.4], [[1, 2], None])
    path = os.path.join(str(tmp_path), 'p.json')
    with open(path, 'w') as f:
        json.dump(P.to_json_obj(), f)
    loaded = ci.FiniteDistribution.load(path)
    npt.assert_allclose(loaded.probs, P.probs)
    npt.assert_allclose(loaded.weight_of('x'), [1, 2])
    assert loaded.weight_of('y') is None
