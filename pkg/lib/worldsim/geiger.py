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
Toy Geiger counter: a particle either outside or inside a chamber of n gas
atoms. Inside, it ionizes the first atom, and each ionized atom ionizes
the next one, every step a rotation by c pi/2. With c = 1 the cascade is
all or nothing, so the microstates fall into the undischarged (few ions)
and discharged (many ions) groups with the particle's weights.
"""
import collections
import logging
import math

import numpy as np

from . import branching
from . import constants
from . import quantum_correlation
from . import tensor_core
from .errors import ParamError, SizeError

PARTICLE = tensor_core.Register.finite('particle', ['out', 'in'])


def atom(i):
    return tensor_core.Register.finite('a%d' % i, ['0', '1'])


def _rotation(angle):
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, -s], [s, c]])


def controlled_rotation(control, target, angle, on=1):
    """
    Rotate target by angle when control is in basis state `on`.
    """
    blocks = [np.eye(2), np.eye(2)]
    blocks[on] = _rotation(angle)
    matrix = np.zeros((4, 4))
    for value in range(2):
        matrix[2 * value:2 * value + 2, 2 * value:2 * value + 2] = \
            blocks[value]
    return tensor_core.LinearOperator([control, target], matrix, unitary=True)


def cascade(n_atoms, c):
    angle = c * math.pi / 2
    atoms = [atom(i) for i in range(1, n_atoms + 1)]
    ops = [controlled_rotation(PARTICLE, atoms[0], angle)]
    for prev, nxt in zip(atoms, atoms[1:]):
        ops.append(controlled_rotation(prev, nxt, angle))
    return atoms, ops


GeigerRun = collections.namedtuple(
    'GeigerRun', 'microstates grouped medium_mass bimodal particle',
)


def particle_family():
    """
    Projectors of the particle position, from the observable counting the
    particle inside.
    """
    return quantum_correlation.ProjectorFamily.from_observable(
        [PARTICLE], np.diag([0.0, 1.0]), labels=PARTICLE.labels,
        name=PARTICLE.name,
    )


def ionized(branch):
    return sum(
        1 for name, value in branch.label.items()
        if name != 'particle' and value == '1'
    )


def geiger_run(n_atoms, c=1.0, b=0.0, threshold=0.5, band=(0.1, 0.9),
               epsilon=1e-6):
    """
    Grouped weights U (fewer than threshold * n ions) and D, and the mass
    whose ion fraction lies strictly inside band.
    """
    if n_atoms < 1 or n_atoms > constants.MAX_ATOMS:
        raise SizeError(
            'n_atoms must lie in 1..%d, got %d' % (constants.MAX_ATOMS, n_atoms)
        )
    b = complex(b)
    if abs(b) > 1 + constants.NORM_TOL:
        raise ParamError('|b| must not exceed 1')
    if not 0 < threshold < 1:
        raise ParamError('threshold is a fraction of the atoms')
    lo, hi = band
    if not 0 <= lo < hi <= 1:
        raise ParamError('band must be an increasing pair of fractions')
    a = math.sqrt(max(0.0, 1 - abs(b) ** 2))

    atoms, ops = cascade(n_atoms, c)
    zero = np.zeros(2 ** n_atoms)
    zero[0] = 1
    state = tensor_core.StateVector(
        [PARTICLE] + atoms, np.kron([a, b], zero),
    )
    state = tensor_core.evolve(ops, state)
    marginal = quantum_correlation.square_amplitude_distribution(
        state, particle_family(),
    )
    particle = collections.OrderedDict(
        zip(PARTICLE.labels, marginal.probs.tolist())
    )

    choice = collections.OrderedDict(
        (reg.name, None) for reg in state.layout
    )
    microstates = branching.decompose(state, choice)
    grouped = branching.group(
        microstates,
        lambda br: 'D' if ionized(br) >= threshold * n_atoms else 'U',
    )
    weights = collections.OrderedDict(
        (key, 0.0) for key in ('U', 'D')
    )
    weights.update(grouped.weights())
    medium = sum(
        br.weight for br in microstates
        if lo * n_atoms < ionized(br) < hi * n_atoms
    )
    logging.info('Geiger n=%d c=%g: %d microstates, U %.6g D %.6g',
                 n_atoms, c, len(microstates), weights['U'], weights['D'])
    return GeigerRun(
        microstates, weights, medium, medium < epsilon, particle,
    )
