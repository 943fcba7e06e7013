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
"""
Observers with memory.

A hybrid state is a list of entries, each a classical part (the memory
sequence of every observer plus labels of retired pointer registers), an
amplitude, and a normalized residual state over the registers that are
still quantum. An observation acts on every entry separately and splits it
into eigencomponents of the observed register, appending the matching
symbol to the observer's memory.

MemoryRegister and dense_observe carry the same memories as explicit
Hilbert space factors. They only scale to a handful of registers and are
kept to check the hybrid form against.
"""
import collections
import fractions
import itertools
import logging
import math

import numpy as np

from . import config
from . import constants
from . import tensor_core
from .errors import (
    AlphabetError,
    ConfigError,
    DegenerateObservable,
    EmptyNotebook,
    NameCollision,
    NormError,
    ParamError,
    SizeError,
    UnknownObserver,
)
from .quantum_correlation import ProjectorFamily

PRIOR = '…'
BLANK = '_'


class MemorySequence(object):
    def __init__(self, records=()):
        self._records = tuple(records)

    def append(self, symbol, source=None):
        return MemorySequence(self._records + ((symbol, source), ))

    @property
    def records(self):
        return self._records

    @property
    def symbols(self):
        return tuple(symbol for symbol, _ in self._records)

    def last(self):
        if not self._records:
            return None
        return self._records[-1]

    def __len__(self):
        return len(self._records)

    def __eq__(self, other):
        return isinstance(other, MemorySequence) and \
            self._records == other._records

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return hash(self._records)

    def __str__(self):
        parts = [PRIOR]
        for symbol, source in self._records:
            parts.append(symbol if source is None else '%s@%s' % (
                symbol, source,
            ))
        return '[%s]' % ','.join(parts)


class Entry(object):
    def __init__(self, memories, pointers, amplitude, residual):
        self.memories = collections.OrderedDict(memories)
        self.pointers = collections.OrderedDict(pointers)
        self.amplitude = complex(amplitude)
        self.residual = residual

    @property
    def weight(self):
        if self.residual is None:
            return 0.0
        return abs(self.amplitude) ** 2

    def key(self):
        return (
            tuple(sorted(
                (name, memory.records)
                for name, memory in self.memories.items()
            )),
            tuple(sorted(self.pointers.items())),
        )

    def vector(self):
        """
        amplitude * residual, registers in sorted name order.
        """
        if self.residual is None:
            return None
        _, amps = tensor_core.permute_amplitudes(
            self.residual.layout, self.residual.amplitudes,
            sorted(self.residual.names),
        )
        return self.amplitude * amps

    def __repr__(self):
        return 'Entry(%s, w=%.6g)' % (
            ' '.join('%s%s' % (k, v) for k, v in self.memories.items()),
            self.weight,
        )


class HybridBranchState(object):
    def __init__(self, entries):
        self._entries = tuple(entries)
        total = sum(entry.weight for entry in self._entries)
        if abs(total - 1) > constants.EIGEN_TOL:
            raise NormError('Hybrid state weights sum to %.15g' % total)
        keys = [entry.key() for entry in self._entries]
        if len(set(keys)) != len(keys):
            raise NameCollision('Two entries share a classical part')

    @property
    def entries(self):
        return self._entries

    @property
    def observers(self):
        if not self._entries:
            return ()
        return tuple(self._entries[0].memories)

    def __len__(self):
        return len(self._entries)

    def __iter__(self):
        return iter(self._entries)

    def nonzero(self):
        return [e for e in self._entries if e.weight >= constants.ZERO_WEIGHT]


def initial(state, observers=()):
    observers = list(observers)
    if len(set(observers)) != len(observers):
        raise NameCollision('Observer names repeat: %s' % observers)
    memories = [(name, MemorySequence()) for name in observers]
    return HybridBranchState([Entry(memories, (), 1, state)])


def add_observer(hs, name):
    if name in hs.observers:
        raise NameCollision('Observer %s already exists' % name)
    entries = []
    for e in hs:
        memories = list(e.memories.items()) + [(name, MemorySequence())]
        entries.append(Entry(memories, e.pointers, e.amplitude, e.residual))
    return HybridBranchState(entries)


def introduce(hs, state):
    """
    Add a fresh system, in state, to every entry.
    """
    entries = []
    for e in hs:
        residual = e.residual
        if residual is not None:
            residual = tensor_core.tensor_product([residual, state])
        entries.append(Entry(e.memories, e.pointers, e.amplitude, residual))
    return HybridBranchState(entries)


def _check_observation(hs, register, family, observer, symbols):
    if observer not in hs.observers:
        raise UnknownObserver('No observer %s' % observer)
    if list(family.names) != [register]:
        raise DegenerateObservable(
            'Family %s does not act on %s alone' % (family.name, register)
        )
    if not family.is_nondegenerate():
        raise DegenerateObservable(
            'Family %s has degenerate outcomes' % family.name
        )
    symbols = list(symbols)
    if len(symbols) != len(family.outcomes):
        raise AlphabetError(
            '%d symbols for %d outcomes' % (
                len(symbols), len(family.outcomes),
            )
        )
    if len(set(symbols)) != len(symbols):
        raise AlphabetError('Symbols repeat: %s' % symbols)
    return symbols


def _component(residual, register, ket, retire):
    """
    Unnormalized component of residual along ket on register, either with
    the register kept in the eigenstate or removed.
    """
    rest, amps = tensor_core.contract(
        residual.layout, residual.amplitudes, [register], ket,
    )
    if retire:
        return rest, amps
    pieces = [([register], ket), ([reg.name for reg in rest], amps)]
    return residual.layout, tensor_core.assemble(residual.layout, pieces)


def observe(hs, register, family, observer, symbols, retire=False,
            keep_null=False):
    """
    Good observation of family on register by observer, applied to every
    entry. With retire set the observed register turns into a classical
    pointer label. With keep_null set zero-weight components are kept as
    null entries so branch counts can be reported.
    """
    symbols = _check_observation(hs, register, family, observer, symbols)
    kets = [family.vectors(label)[0] for label in family.labels]
    entries = []
    pruned = 0
    for e in hs:
        for label, ket, symbol in zip(family.labels, kets, symbols):
            memories = collections.OrderedDict(e.memories)
            memories[observer] = memories[observer].append(symbol)
            pointers = collections.OrderedDict(e.pointers)
            if retire:
                pointers[register] = label
            if e.residual is None:
                if keep_null:
                    entries.append(Entry(memories, pointers, 0, None))
                continue
            layout, amps = _component(e.residual, register, ket, retire)
            norm = np.linalg.norm(amps)
            if (abs(e.amplitude) * norm) ** 2 < constants.ZERO_WEIGHT:
                pruned += 1
                if keep_null:
                    entries.append(Entry(memories, pointers, 0, None))
                continue
            canon = tensor_core.canonical_phase(amps / norm)
            amplitude = e.amplitude * np.vdot(canon, amps)
            residual = tensor_core.StateVector(layout, canon)
            entries.append(Entry(memories, pointers, amplitude, residual))
    logging.debug('%s observed %s: %d entries, %d null components',
                  observer, register, len(entries), pruned)
    return HybridBranchState(entries)


def read_notebook(hs, reader, writer):
    """
    reader copies the last record of writer's memory, tagged with its
    source.
    """
    for name in (reader, writer):
        if name not in hs.observers:
            raise UnknownObserver('No observer %s' % name)
    entries = []
    for e in hs:
        last = e.memories[writer].last()
        if last is None:
            raise EmptyNotebook('%s has recorded nothing yet' % writer)
        memories = collections.OrderedDict(e.memories)
        memories[reader] = memories[reader].append(last[0], source=writer)
        entries.append(Entry(memories, e.pointers, e.amplitude, e.residual))
    return HybridBranchState(entries)


def prune(hs):
    return HybridBranchState(hs.nonzero())


def group_weights(hs, key):
    """
    Total weight per key(entry), in order of first appearance.
    """
    out = collections.OrderedDict()
    for e in hs:
        k = key(e)
        out[k] = out.get(k, 0.0) + e.weight
    return out


def as_mapping(hs):
    return dict(
        (e.key(), e.vector()) for e in hs.nonzero()
    )


def state_distance(h1, h2):
    """
    Largest amplitude difference between two hybrid states, matched by
    classical part.
    """
    m1 = as_mapping(h1)
    m2 = as_mapping(h2)
    worst = 0.0
    for key in set(m1) | set(m2):
        if key not in m1 or key not in m2:
            return float('inf')
        if m1[key].shape != m2[key].shape:
            return float('inf')
        worst = max(worst, np.abs(m1[key] - m2[key]).max())
    return worst


class MemoryRegister(object):
    """
    Explicit memory of at most length symbols over alphabet, blank padded.
    """
    def __init__(self, name, alphabet, length):
        alphabet = list(alphabet)
        if BLANK in alphabet or len(set(alphabet)) != len(alphabet):
            raise AlphabetError('Bad memory alphabet %s' % alphabet)
        if any(len(s) != 1 for s in alphabet):
            raise AlphabetError('Memory symbols must be single characters')
        self.alphabet = alphabet
        self.length = length
        labels = [
            ''.join(cells) for cells in itertools.product(
                [BLANK] + sorted(alphabet), repeat=length,
            )
        ]
        self.register = tensor_core.Register(
            name, labels, kind=tensor_core.MEMORY,
        )

    @property
    def name(self):
        return self.register.name

    def encode(self, symbols):
        symbols = list(symbols)
        if len(symbols) > self.length:
            raise SizeError('Memory %s overflows' % self.name)
        return ''.join(symbols) + BLANK * (self.length - len(symbols))

    def append_permutation(self, symbol):
        """
        Image index of every label when symbol is written to the first
        blank cell. Full or malformed contents take the remaining labels
        in sorted order.
        """
        if symbol not in self.alphabet:
            raise AlphabetError('%r is not in %s' % (symbol, self.alphabet))
        labels = self.register.labels
        images = [None] * len(labels)
        used = set()
        for i, label in enumerate(labels):
            filled = label.rstrip(BLANK)
            if BLANK in filled or len(filled) == self.length:
                continue
            image = filled + symbol + BLANK * (self.length - len(filled) - 1)
            images[i] = self.register.index(image)
            used.add(images[i])
        free = sorted(set(range(len(labels))) - used)
        rest = [i for i, image in enumerate(images) if image is None]
        for i, j in zip(rest, free):
            images[i] = j
        return images


def dense_observe(state, register, family, memory, symbols):
    """
    sum_i P_i x A_i on (register, memory), A_i writing symbol i.
    """
    symbols = list(symbols)
    if len(symbols) != len(family.outcomes):
        raise AlphabetError('One symbol per outcome is needed')
    reg = state.register(register)
    mem = memory.register
    matrix = np.zeros(
        (reg.dimension * mem.dimension, ) * 2, dtype=complex,
    )
    for outcome, symbol in zip(family.outcomes, symbols):
        shift = tensor_core.LinearOperator.permutation(
            [mem], memory.append_permutation(symbol),
        )
        matrix += np.kron(outcome.projector, shift.matrix)
    op = tensor_core.LinearOperator([reg, mem], matrix, unitary=True)
    return tensor_core.apply_operator(op, state)


def hybrid_to_dense(hs, memories):
    """
    Dense state over the residual registers followed by the explicit
    memory registers (observer -> MemoryRegister), names sorted.
    """
    total = None
    layout = None
    for e in hs.nonzero():
        pieces = [(e.residual.names, e.residual.amplitudes)]
        regs = list(e.residual.layout)
        for observer, memory in memories.items():
            label = memory.encode(e.memories[observer].symbols)
            ket = np.zeros(memory.register.dimension, dtype=complex)
            ket[memory.register.index(label)] = 1
            pieces.append(([memory.name], ket))
            regs.append(memory.register)
        regs.sort(key=lambda reg: reg.name)
        amps = e.amplitude * tensor_core.assemble(regs, pieces)
        if total is None:
            total, layout = amps, regs
        else:
            total = total + amps
    return tensor_core.StateVector(layout, total)


def spin_register(name):
    return tensor_core.Register.finite(name, ['up', 'down'])


SpinRun = collections.namedtuple(
    'SpinRun', 'state grouped branch_count zero_weight exact',
)


def _exact(p):
    guess = fractions.Fraction(p).limit_denominator(1 << 20)
    if abs(float(guess) - p) < constants.ALGEBRA_TOL:
        return guess
    return None


def _tally_up_counts(n, p, q):
    """
    Weight per up-count after n spins, one spin at a time, and the number
    of the 2^n branches lighter than ZERO_WEIGHT.
    """
    weights = np.array([1.0])
    for _ in range(n):
        weights = np.append(weights * q, 0.0) + np.append(0.0, weights * p)
    zero = sum(
        math.comb(n, m) for m in range(n + 1)
        if p ** m * q ** (n - m) < constants.ZERO_WEIGHT
    )
    return weights.tolist(), zero


def repeated_spin_run(n, a, b, max_branches=None, explicit_limit=None):
    """
    One observer measures n fresh spins a|up> + b|down> in turn. Branches
    are grouped by how many times up was seen; the weight of m ups is
    C(n, m) |a|^2m |b|^2(n-m) whatever the branch count.

    Runs of at most explicit_limit branches keep every branch, null ones
    included until they are counted and pruned. Longer runs only tally
    the up-count weights, and the state is None.
    """
    a = complex(a)
    b = complex(b)
    if abs(abs(a) ** 2 + abs(b) ** 2 - 1) > constants.NORM_TOL:
        raise ParamError('|a|^2 + |b|^2 must be 1')
    if n < 1:
        raise ParamError('At least one spin is needed')
    if max_branches is None:
        max_branches = config.get_int(
            'max_branches', constants.DEFAULT_MAX_BRANCHES,
        )
    if explicit_limit is None:
        explicit_limit = constants.EXPLICIT_SPIN_BRANCHES
    if n > constants.MAX_SPINS or 2 ** n > max_branches:
        raise SizeError(
            '%d spins need %d branches, budget is %d' % (
                n, 2 ** n, max_branches,
            )
        )

    p, q = abs(a) ** 2, abs(b) ** 2
    hs = None
    if 2 ** n <= explicit_limit:
        hs = initial(tensor_core.StateVector([], [1]), ['O'])
        for i in range(1, n + 1):
            reg = spin_register('s%d' % i)
            hs = introduce(hs, tensor_core.StateVector([reg], [a, b]))
            hs = observe(
                hs, reg.name, ProjectorFamily.computational(reg), 'O',
                ['0', '1'], retire=True, keep_null=True,
            )
        branch_count = len(hs)
        hs = prune(hs)
        zero = branch_count - len(hs)
        counts = group_weights(
            hs, lambda e: e.memories['O'].symbols.count('0'),
        )
        weights = [counts.get(m, 0.0) for m in range(n + 1)]
    else:
        branch_count = 2 ** n
        weights, zero = _tally_up_counts(n, p, q)
    grouped = collections.OrderedDict(enumerate(weights))

    exact = None
    p, q = _exact(p), _exact(q)
    if p is not None and q is not None:
        exact = collections.OrderedDict(
            (m, math.comb(n, m) * p ** m * q ** (n - m))
            for m in range(n + 1)
        )
    logging.info('Spin run n=%d: %d branches, %d of zero weight',
                 n, branch_count, zero)
    return SpinRun(hs, grouped, branch_count, zero, exact)


def qubit_families(reg):
    """
    Z, X and Y measurements of a qubit with their memory symbols.
    """
    s = 1 / np.sqrt(2)
    return {
        'Z': (ProjectorFamily.from_basis(
            [reg], ['0', '1'], [[1, 0], [0, 1]], [1, -1], name=reg.name,
        ), ['0', '1']),
        'X': (ProjectorFamily.from_basis(
            [reg], ['+', '-'], [[s, s], [s, -s]], [1, -1], name=reg.name,
        ), ['+', '-']),
        'Y': (ProjectorFamily.from_basis(
            [reg], ['+i', '-i'], [[s, 1j * s], [s, -1j * s]], [1, -1],
            name=reg.name,
        ), ['+i', '-i']),
    }


def _amplitudes(config_, field, size=None):
    try:
        amps = np.array(config_[field], dtype=complex).reshape(-1)
    except KeyError:
        raise ConfigError('params.%s' % field, 'missing')
    except (TypeError, ValueError) as e:
        raise ConfigError('params.%s' % field, str(e))
    if size is not None and amps.size != size:
        raise ConfigError(
            'params.%s' % field, 'expected %d amplitudes' % size,
        )
    if amps.size < 2:
        raise ConfigError('params.%s' % field, 'need at least 2 amplitudes')
    if abs(np.linalg.norm(amps) - 1) > constants.NORM_TOL:
        raise ConfigError('params.%s' % field, 'amplitudes are not normalized')
    return amps


def _assertion(name, passed):
    return {'name': name, 'pass': bool(passed)}


def _report_branches(hs):
    return [
        {
            'memories': dict(
                (name, str(memory)) for name, memory in e.memories.items()
            ),
            'weight': float('%.12g' % e.weight),
        }
        for e in hs.nonzero()
    ]


def _observer_case_1(params):
    amps = _amplitudes(params, 'amplitudes', 2)
    notebook = bool(params.get('notebook', False))
    reg = tensor_core.Register.finite('s', 2)
    z, symbols = qubit_families(reg)['Z']
    hs = initial(tensor_core.StateVector([reg], amps), ['A'])
    hs = observe(hs, 's', z, 'A', symbols)
    first = len(hs)
    # B arrives after A has looked
    hs = add_observer(hs, 'B')
    if notebook:
        hs = read_notebook(hs, 'B', 'A')
    else:
        hs = observe(hs, 's', z, 'B', symbols)
    assertions = [
        _assertion('memories_agree', all(
            e.memories['A'].symbols[-1] == e.memories['B'].symbols[-1]
            for e in hs
        )),
        _assertion('no_second_split', len(hs) == first),
    ]
    if notebook:
        assertions.append(_assertion('notebook_sourced', all(
            e.memories['B'].last()[1] == 'A' for e in hs
        )))
    return hs, assertions


def _observer_case_2(params):
    amps = _amplitudes(params, 'amplitudes', 2)
    first = params.get('first', 'Z')
    second = params.get('second', 'X')
    reg = tensor_core.Register.finite('s', 2)
    families = qubit_families(reg)
    for field, name in (('first', first), ('second', second)):
        if name not in families:
            raise ConfigError(
                'params.%s' % field, 'unknown observable %r' % (name, ),
            )
    fa, sa = families[first]
    fb, sb = families[second]
    oa, ob = fa.observable(), fb.observable()
    if np.abs(oa.dot(ob) - ob.dot(oa)).max() < constants.ALGEBRA_TOL:
        raise ConfigError(
            'params.second', 'must not commute with the first observable',
        )
    hs = initial(tensor_core.StateVector([reg], amps), ['A', 'B'])
    hs = observe(hs, 's', fa, 'A', sa)
    hs = observe(hs, 's', fb, 'B', sb)

    expected = {}
    for label_a, symbol_a in zip(fa.labels, sa):
        va = fa.vectors(label_a)[0]
        for label_b, symbol_b in zip(fb.labels, sb):
            vb = fb.vectors(label_b)[0]
            w = abs(np.vdot(va, amps)) ** 2 * abs(np.vdot(vb, va)) ** 2
            if w >= constants.ZERO_WEIGHT:
                expected[(symbol_a, symbol_b)] = w
    got = dict(
        ((e.memories['A'].symbols[-1], e.memories['B'].symbols[-1]),
         e.weight)
        for e in hs.nonzero()
    )
    assertions = [
        _assertion('branch_count', len(got) == len(expected)),
        _assertion('weights', set(got) == set(expected) and all(
            abs(got[k] - expected[k]) < constants.ALGEBRA_TOL
            for k in expected
        )),
    ]
    return hs, assertions


def _observer_case_3(params):
    amps = _amplitudes(params, 'amplitudes')
    d = amps.size
    r1 = tensor_core.Register.finite('s1', d)
    r2 = tensor_core.Register.finite('s2', d)
    psi = np.zeros((d, d), dtype=complex)
    psi[np.arange(d), np.arange(d)] = amps
    state = tensor_core.StateVector([r1, r2], psi.reshape(-1))
    symbols = [str(j) for j in range(d)]
    f1 = ProjectorFamily.computational(r1)
    f2 = ProjectorFamily.computational(r2)

    def by(hs, reg, family, observer):
        return observe(hs, reg, family, observer, symbols)

    start = initial(state, ['O1', 'O2'])
    only_o1 = by(start, 's1', f1, 'O1')
    forward = by(only_o1, 's2', f2, 'O2')
    swapped = by(by(start, 's2', f2, 'O2'), 's1', f1, 'O1')
    repeated = by(forward, 's1', f1, 'O1')
    twice_first = by(by(only_o1, 's1', f1, 'O1'), 's2', f2, 'O2')

    def o1_view(hs):
        return group_weights(hs, lambda e: e.memories['O1'].symbols)

    before, after = o1_view(only_o1), o1_view(forward)
    tol = constants.ALGEBRA_TOL
    assertions = [
        _assertion('branch_count', len(forward.nonzero()) == int(
            np.sum(np.abs(amps) ** 2 >= constants.ZERO_WEIGHT))),
        _assertion('memories_correlated', all(
            e.memories['O1'].symbols == e.memories['O2'].symbols
            for e in forward.nonzero()
        )),
        _assertion('order_swap', state_distance(forward, swapped) < tol),
        _assertion('repeat', state_distance(repeated, twice_first) < tol),
        _assertion('no_signalling', set(before) == set(after) and all(
            abs(before[k] - after[k]) < tol for k in before
        )),
    ]
    return forward, assertions


_CASES = {
    1: _observer_case_1,
    2: _observer_case_2,
    3: _observer_case_3,
}


def multi_observer_case(case, params):
    """
    Run one of the multi-observer cases; returns (final state, report).
    """
    if case not in _CASES:
        raise ConfigError('params.case', 'unknown case %r' % (case, ))
    hs, assertions = _CASES[case](params)
    report = {
        'case': case,
        'branches': _report_branches(hs),
        'assertions': assertions,
    }
    return hs, report
