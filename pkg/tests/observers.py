#
# Copyright 2026 The worldsim authors
#
# This program is free software; you can redistribute it and/or modify
# it under the terms of the GNU General Public License as published by
# the Free Software Foundation; either version 2 of the License, or
# (at your option) any later version.
#
# This program is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
# GNU General Public License for more details.
#
# You should have received a copy of the GNU General Public License
# along with this program; if not, write to the Free Software
# Foundation, Inc., 51 Franklin Street, Fifth Floor, Boston, MA  02110-1301 USA
#
# Refer to the README and COPYING files for full details of the license
#
import collections
import fractions
import math

import numpy as np
import numpy.testing as npt
import pytest

import worldsim.observers as observers
import worldsim.sampling as sampling
import worldsim.tensor_core as tc
from worldsim.errors import (
    AlphabetError,
    ConfigError,
    DegenerateObservable,
    EmptyNotebook,
    NameCollision,
    ParamError,
    SizeError,
    UnknownObserver,
)
from worldsim.quantum_correlation import ProjectorFamily

S = 1 / math.sqrt(2)


def _qubit(amps=(0.6, 0.8), name='s'):
    reg = tc.Register.finite(name, 2)
    return reg, tc.StateVector([reg], amps)


def _memories(hs, observer):
    return sorted(
        (e.memories[observer].symbols, e.weight) for e in hs.nonzero()
    )


def test_memory_sequence():
    memory = observers.MemorySequence().append('0').append('1', source='A')
    assert memory.symbols == ('0', '1')
    assert memory.last() == ('1', 'A')
    assert str(memory) == '[…,0,1@A]'
    assert observers.MemorySequence().last() is None
    assert memory == observers.MemorySequence([('0', None), ('1', 'A')])


def test_initial_observers_must_be_distinct():
    _, state = _qubit()
    with pytest.raises(NameCollision):
        observers.initial(state, ['A', 'A'])
    hs = observers.initial(state, ['A'])
    with pytest.raises(NameCollision):
        observers.add_observer(hs, 'A')
    assert observers.add_observer(hs, 'B').observers == ('A', 'B')


def test_observation_splits_by_square_amplitudes():
    reg, state = _qubit()
    z, symbols = observers.qubit_families(reg)['Z']
    hs = observers.observe(observers.initial(state, ['A']), 's', z, 'A',
                           symbols)
    memories = _memories(hs, 'A')
    assert [m for m, _ in memories] == [('0', ), ('1', )]
    npt.assert_allclose([w for _, w in memories], [0.36, 0.64])


def test_repeated_observation_agrees_with_itself():
    reg, state = _qubit()
    z, symbols = observers.qubit_families(reg)['Z']
    hs = observers.initial(state, ['A'])
    for _ in range(3):
        hs = observers.observe(hs, 's', z, 'A', symbols)
    assert len(hs.nonzero()) == 2
    assert [m for m, _ in _memories(hs, 'A')] == \
        [('0', '0', '0'), ('1', '1', '1')]


def test_retired_register_becomes_pointer():
    reg, state = _qubit()
    z, symbols = observers.qubit_families(reg)['Z']
    hs = observers.observe(observers.initial(state, ['A']), 's', z, 'A',
                           symbols, retire=True)
    for e in hs.nonzero():
        assert e.residual.names == ()
        assert e.pointers['s'] in ('0', '1')


def test_observation_errors():
    reg, state = _qubit()
    z, symbols = observers.qubit_families(reg)['Z']
    hs = observers.initial(state, ['A'])
    with pytest.raises(UnknownObserver):
        observers.observe(hs, 's', z, 'B', symbols)
    with pytest.raises(AlphabetError):
        observers.observe(hs, 's', z, 'A', ['0'])
    with pytest.raises(AlphabetError):
        observers.observe(hs, 's', z, 'A', ['0', '0'])
    q = tc.Register.finite('q', 3)
    lumped = ProjectorFamily.from_blocks([q], [
        ('a', 0, [[1, 0, 0]]), ('b', 1, [[0, 1, 0], [0, 0, 1]]),
    ])
    hs3 = observers.initial(tc.StateVector.basis([q], ['0']), ['A'])
    with pytest.raises(DegenerateObservable):
        observers.observe(hs3, 'q', lumped, 'A', ['a', 'b'])


def test_read_notebook():
    reg, state = _qubit()
    z, symbols = observers.qubit_families(reg)['Z']
    hs = observers.initial(state, ['A', 'B'])
    with pytest.raises(EmptyNotebook):
        observers.read_notebook(hs, 'B', 'A')
    with pytest.raises(UnknownObserver):
        observers.read_notebook(hs, 'C', 'A')
    hs = observers.observe(hs, 's', z, 'A', symbols)
    hs = observers.read_notebook(hs, 'B', 'A')
    for e in hs.nonzero():
        symbol, source = e.memories['B'].last()
        assert symbol == e.memories['A'].symbols[-1]
        assert source == 'A'


def test_introduce_and_group_weights():
    reg, state = _qubit()
    z, symbols = observers.qubit_families(reg)['Z']
    hs = observers.observe(observers.initial(state, ['A']), 's', z, 'A',
                           symbols)
    t, fresh = _qubit((S, S), name='t')
    hs = observers.introduce(hs, fresh)
    zt, _ = observers.qubit_families(t)['Z']
    hs = observers.observe(hs, 't', zt, 'A', symbols)
    assert len(hs.nonzero()) == 4
    first = observers.group_weights(hs, lambda e: e.memories['A'].symbols[0])
    npt.assert_allclose([first['0'], first['1']], [0.36, 0.64])


def test_state_distance():
    reg, state = _qubit()
    z, symbols = observers.qubit_families(reg)['Z']
    hs = observers.observe(observers.initial(state, ['A']), 's', z, 'A',
                           symbols)
    assert observers.state_distance(hs, hs) == 0
    other = observers.observe(observers.initial(state, ['A']), 's',
                              observers.qubit_families(reg)['X'][0], 'A',
                              ['0', '1'])
    assert observers.state_distance(hs, other) > 0.1


def test_hybrid_matches_dense_memories():
    rng = sampling.trial_rng(1, 0)
    q0, q1 = sampling.qudits([2, 3])
    state = sampling.random_state(rng, [q0, q1])
    f0 = sampling.random_projector_family(rng, [q0])
    f1 = sampling.random_projector_family(rng, [q1])
    memories = collections.OrderedDict([
        ('A', observers.MemoryRegister('mA', '012', 2)),
        ('B', observers.MemoryRegister('mB', '012', 1)),
    ])
    hs = observers.initial(state, memories)
    dense = state
    for memory in memories.values():
        blank = tc.StateVector.basis([memory.register], [memory.encode([])])
        dense = tc.tensor_product([dense, blank])
    for observer, name, family in (('A', 'q0', f0), ('B', 'q1', f1),
                                   ('A', 'q1', f1)):
        symbols = '012'[:family.dimension]
        hs = observers.observe(hs, name, family, observer, symbols)
        dense = observers.dense_observe(
            dense, name, family, memories[observer], symbols,
        )
    hybrid = observers.hybrid_to_dense(hs, memories)
    assert hybrid.names == ('mA', 'mB', 'q0', 'q1')
    npt.assert_allclose(
        hybrid.amplitudes, dense.permuted(hybrid.names).amplitudes,
        atol=1e-10,
    )


def test_memory_register_append_is_a_permutation():
    memory = observers.MemoryRegister('m', '01', 2)
    images = memory.append_permutation('1')
    assert sorted(images) == list(range(memory.register.dimension))
    start = memory.register.index(memory.encode(['0']))
    assert images[start] == memory.register.index('01')
    with pytest.raises(AlphabetError):
        memory.append_permutation('2')
    with pytest.raises(SizeError):
        memory.encode(['0', '1', '0'])
    with pytest.raises(AlphabetError):
        observers.MemoryRegister('m', ['0', observers.BLANK], 1)


def test_ten_spins_give_binomial_weights():
    run = observers.repeated_spin_run(10, S, S)
    assert run.branch_count == 1024
    assert run.zero_weight == 0
    for m, weight in run.grouped.items():
        assert weight == pytest.approx(math.comb(10, m) / 1024, abs=1e-12)
        assert run.exact[m] == fractions.Fraction(math.comb(10, m), 1024)


def test_spin_run_with_certain_outcome():
    run = observers.repeated_spin_run(3, 1, 0)
    assert run.branch_count == 8
    assert run.zero_weight == 7
    assert run.grouped[3] == pytest.approx(1)


@pytest.mark.parametrize('a,b', [(S, S), (math.sqrt(0.3), math.sqrt(0.7)), (1, 0)])
def test_spin_tally_matches_branch_by_branch_run(a, b):
    explicit = observers.repeated_spin_run(6, a, b)
    tallied = observers.repeated_spin_run(6, a, b, explicit_limit=0)
    assert explicit.state is not None
    assert tallied.state is None
    assert tallied.branch_count == explicit.branch_count == 64
    assert tallied.zero_weight == explicit.zero_weight
    npt.assert_allclose(
        list(tallied.grouped.values()), list(explicit.grouped.values()),
        atol=1e-12,
    )


def test_long_spin_run_is_tallied():
    run = observers.repeated_spin_run(20, S, S, max_branches=2 ** 20)
    assert run.state is None
    assert run.branch_count == 2 ** 20
    assert run.zero_weight == 0
    assert run.grouped[10] == pytest.approx(
        math.comb(20, 10) / 2 ** 20, abs=1e-12,
    )
    assert run.exact[0] == fractions.Fraction(1, 2 ** 20)


def test_pruned_spin_run_keeps_only_live_branches():
    run = observers.repeated_spin_run(3, 1, 0)
    assert len(run.state) == 1
    entry, = run.state
    assert entry.memories['O'].symbols == ('0', '0', '0')


def test_spin_run_limits():
    with pytest.raises(SizeError):
        observers.repeated_spin_run(21, S, S)
    with pytest.raises(SizeError):
        observers.repeated_spin_run(4, S, S, max_branches=8)
    with pytest.raises(ParamError):
        observers.repeated_spin_run(2, 1, 1)


@pytest.mark.parametrize('notebook', [False, True])
def test_case_1_memories_agree(notebook):
    hs, report = observers.multi_observer_case(
        1, {'amplitudes': [0.6, 0.8], 'notebook': notebook},
    )
    assert all(a['pass'] for a in report['assertions'])
    assert len(report['branches']) == 2
    # B joins after A and holds a single record
    assert hs.observers == ('A', 'B')
    assert all(len(e.memories['B'].symbols) == 1 for e in hs)


@pytest.mark.parametrize('first,second', [('Z', 'X'), ('X', 'Y')])
def test_case_2_noncommuting_observers(first, second):
    hs, report = observers.multi_observer_case(
        2, {'amplitudes': [0.6, 0.8], 'first': first, 'second': second},
    )
    assert all(a['pass'] for a in report['assertions'])
    assert len(hs.nonzero()) == 4


def test_case_2_weights():
    hs, _ = observers.multi_observer_case(
        2, {'amplitudes': [0.6, 0.8], 'first': 'Z', 'second': 'X'},
    )
    weights = dict(
        ((e.memories['A'].symbols[-1], e.memories['B'].symbols[-1]),
         e.weight)
        for e in hs.nonzero()
    )
    npt.assert_allclose(
        [weights[k] for k in [('0', '+'), ('0', '-'), ('1', '+'),
                              ('1', '-')]],
        [0.18, 0.18, 0.32, 0.32], atol=1e-12,
    )


def test_case_3_order_and_no_signalling():
    amps = np.array([0.5, 0.5j, -0.5, 0.5])
    hs, report = observers.multi_observer_case(3, {'amplitudes': amps})
    assert [a['name'] for a in report['assertions'] if not a['pass']] == []
    assert len(hs.nonzero()) == 4


def test_case_errors():
    with pytest.raises(ConfigError) as e:
        observers.multi_observer_case(4, {})
    assert e.value.field == 'params.case'
    with pytest.raises(ConfigError) as e:
        observers.multi_observer_case(1, {'amplitudes': [1, 1]})
    assert e.value.field == 'params.amplitudes'
    with pytest.raises(ConfigError) as e:
        observers.multi_observer_case(
            2, {'amplitudes': [S, S], 'first': 'Z', 'second': 'Z'},
        )
    assert e.value.field == 'params.second'
