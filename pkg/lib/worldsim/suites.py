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
Seeded property suites behind `worldsim verify`.

Every trial draws its inputs from sampling.trial_rng(seed, trial), so a
report is a pure function of (suite, seed) and a failure can be replayed
from the [seed, trial] pair it carries.
"""
import collections
import logging

import numpy as np

from . import config
from . import constants
from . import observers
from . import quantum_correlation
from . import sampling
from . import tensor_core
from . import utils
from .errors import UnknownSuite
from .quantum_correlation import ProjectorFamily
from .scenarios import clean

# trials are dealt round robin to this many threads
WORKERS = 4


def _donald_trial(rng):
    dims = [(2, 3), (3, 3)][int(rng.integers(2))]
    q0, q1 = sampling.qudits(dims)
    state = sampling.random_state(rng, [q0, q1])
    A = sampling.random_projector_family(
        rng, [q0], degenerate=bool(rng.random() < 0.5),
    )
    B = sampling.random_projector_family(
        rng, [q1], degenerate=bool(rng.random() < 0.5),
    )
    c_ab = quantum_correlation.observable_correlation(state, A, B)
    canonical = quantum_correlation.canonical_correlation(state, ['q0'])
    return c_ab <= canonical + 1e-9, {
        'dims': dims, 'C_AB': c_ab, 'canonical': canonical,
    }


def _process1_trial(rng):
    dims = [[2], [3], [4], [2, 2]][int(rng.integers(4))]
    regs = sampling.qudits(dims)
    rank = int(rng.integers(1, tensor_core._product(dims) + 1))
    rho = sampling.random_density(rng, regs, rank)
    A = sampling.random_projector_family(
        rng, regs, degenerate=bool(rng.random() < 0.5),
    )
    before = quantum_correlation.density_information(rho)
    after = quantum_correlation.density_information(
        quantum_correlation.process1_channel(rho, A),
    )
    return after <= before + 1e-10, {
        'dims': dims, 'rank': rank, 'before': before, 'after': after,
    }


def _nosignal_trial(rng):
    d = int(rng.integers(2, 5))
    amps = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    amps = amps / np.linalg.norm(amps)
    _, report = observers.multi_observer_case(3, {'amplitudes': amps})
    failed = [a['name'] for a in report['assertions'] if not a['pass']]
    return not failed, {'d': d, 'failed': failed}


# cells and spacing of the uncertainty corpus grid
UNCERTAINTY_GRID = (1024, 0.05)


def _smooth_function(rng, x):
    """
    Sum of one to three Gaussians with random centers, widths, carrier
    wavenumbers and complex weights.
    """
    psi = np.zeros(x.size, dtype=complex)
    for _ in range(int(rng.integers(1, 4))):
        center = rng.uniform(-5, 5)
        width = rng.uniform(0.5, 2.0)
        k0 = rng.uniform(-5, 5)
        weight = rng.standard_normal() + 1j * rng.standard_normal()
        psi += weight * np.exp(
            -(x - center) ** 2 / (2 * width ** 2) + 1j * k0 * x
        )
    return psi


def _uncertainty_trial(rng):
    cells, width = UNCERTAINTY_GRID
    reg = tensor_core.Register.grid('x', cells, width)
    state = tensor_core.StateVector.from_amplitudes(
        [reg], _smooth_function(rng, reg.positions()),
    )
    ix, ik = quantum_correlation.info_uncertainty(state)
    bound = quantum_correlation.UNCERTAINTY_BOUND
    return ix + ik <= bound + 5e-3, {
        'I_x': ix, 'I_k': ik, 'excess': ix + ik - bound,
    }


def _unitary_trial(rng):
    dims = [int(rng.integers(2, 4)), int(rng.integers(2, 4))]
    regs = sampling.qudits(dims)
    rho = sampling.random_density(
        rng, regs, int(rng.integers(1, dims[0] * dims[1] + 1)),
    )
    u = sampling.random_unitary(rng, dims[0] * dims[1])
    evolved = tensor_core.DensityMatrix(
        regs, u.dot(rho.matrix).dot(u.conj().T),
    )
    before = quantum_correlation.density_information(rho)
    after = quantum_correlation.density_information(evolved)
    return abs(after - before) < 1e-10, {
        'dims': dims, 'before': before, 'after': after,
    }


def _schmidt_trial(rng):
    dims = [int(rng.integers(2, 5)) for _ in range(int(rng.integers(2, 4)))]
    regs = sampling.qudits(dims)
    state = sampling.random_state(rng, regs)
    split = int(rng.integers(1, len(regs)))
    left = [reg.name for reg in regs[:split]]
    sd = quantum_correlation.schmidt(state, left)
    rebuilt = sd.reconstruct()
    error = float(np.abs(rebuilt.amplitudes - state.amplitudes).max())
    spectrum = tensor_core.reduced_density(state, left).eigenvalues()
    spectrum_error = float(
        np.abs(spectrum[:sd.rank] - sd.coefficients).max()
    )
    return error < 1e-10 and spectrum_error < 1e-10, {
        'dims': dims, 'left': left, 'error': error,
        'spectrum_error': spectrum_error,
    }


def _dense_memories(state, memories):
    factors = [state]
    for memory in memories.values():
        factors.append(tensor_core.StateVector.basis(
            [memory.register], [memory.encode([])],
        ))
    return tensor_core.tensor_product(factors)


def _hybrid_trial(rng):
    """
    Two observers, each recording up to two observations of random
    nondegenerate families, against the explicit memory registers.
    """
    dims = [int(rng.integers(2, 4)) for _ in range(int(rng.integers(1, 3)))]
    regs = sampling.qudits(dims)
    state = sampling.random_state(rng, regs)
    steps = []
    for _ in range(int(rng.integers(1, 4))):
        reg = regs[int(rng.integers(len(regs)))]
        steps.append((
            ['A', 'B'][int(rng.integers(2))], reg,
            sampling.random_projector_family(rng, [reg]),
        ))
    alphabet = [str(i) for i in range(max(dims))]
    memories = collections.OrderedDict(
        (name, observers.MemoryRegister(
            'm%s' % name, alphabet,
            max(1, sum(1 for s in steps if s[0] == name)),
        ))
        for name in ('A', 'B')
    )

    hs = observers.initial(state, memories)
    dense = _dense_memories(state, memories)
    for name, reg, family in steps:
        symbols = alphabet[:reg.dimension]
        hs = observers.observe(hs, reg.name, family, name, symbols)
        dense = observers.dense_observe(
            dense, reg.name, family, memories[name], symbols,
        )
    hybrid = observers.hybrid_to_dense(hs, memories)
    dense = dense.permuted(hybrid.names)
    error = float(np.abs(hybrid.amplitudes - dense.amplitudes).max())
    return error < 1e-10, {
        'dims': dims,
        'steps': [(name, reg.name) for name, reg, _ in steps],
        'error': error,
    }


Suite = collections.namedtuple('Suite', 'trials trial')

_SUITES = {
    'donald': Suite(1000, _donald_trial),
    'process1': Suite(1000, _process1_trial),
    'nosignal': Suite(100, _nosignal_trial),
    'uncertainty': Suite(50, _uncertainty_trial),
    'unitary': Suite(100, _unitary_trial),
    'schmidt': Suite(200, _schmidt_trial),
    'hybrid': Suite(100, _hybrid_trial),
}


def names():
    return sorted(_SUITES)


def _run_chunk(suite, seed, trials):
    failures = []
    for i in trials:
        ok, inputs = suite.trial(sampling.trial_rng(seed, i))
        if not ok:
            logging.debug('Trial %d of seed %d failed: %s', i, seed, inputs)
            failures.append({'seed': [seed, i], 'inputs': inputs})
    return failures


def verify(name, seed, trials=None):
    try:
        suite = _SUITES[name]
    except KeyError:
        raise UnknownSuite(
            'Unknown suite %r, expected one of %s' % (name, names())
        )
    trials = suite.trials if trials is None else trials
    budget = config.get_int('suite_budget', constants.DEFAULT_SUITE_BUDGET)
    chunks = [range(i, trials, WORKERS) for i in range(WORKERS)]
    with utils.EggTimer(budget) as timer:
        results = utils.run_vector(
            _run_chunk, [(suite, seed, chunk) for chunk in chunks],
            name=name,
        )
    if timer.elapsed():
        logging.warning(
            'Suite %s took %.1f s, over its %d s budget',
            name, timer.seconds(), budget,
        )
    failures = sorted(
        (f for chunk in results for f in chunk), key=lambda f: f['seed'][1],
    )
    logging.info('Suite %s seed %d: %d trials, %d failures',
                 name, seed, trials, len(failures))
    return clean({
        'suite': name,
        'seed': seed,
        'trials': trials,
        'failures': failures,
    })
