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
Seeded random inputs for the verification suites. Trial i of a run with
seed s draws from the generator seeded with [s, i], so any failing trial
can be replayed on its own.
"""
import numpy as np
from scipy.stats import unitary_group

from . import quantum_correlation
from . import tensor_core


def trial_rng(seed, trial):
    return np.random.default_rng([seed, trial])


def qudits(dims, prefix='q'):
    return [
        tensor_core.Register.finite('%s%d' % (prefix, i), dim)
        for i, dim in enumerate(dims)
    ]


def random_state(rng, layout):
    dim = tensor_core._product([reg.dimension for reg in layout])
    amps = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return tensor_core.StateVector.from_amplitudes(layout, amps)


def random_unitary(rng, dim):
    if dim == 1:
        return np.exp(2j * np.pi * rng.random()).reshape(1, 1)
    return unitary_group.rvs(dim, random_state=rng)


def random_density(rng, registers, rank=None):
    """
    Mixed state of the given rank (full by default) with random spectrum.
    """
    dim = tensor_core._product([reg.dimension for reg in registers])
    rank = dim if rank is None else rank
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal(
        (dim, rank)
    )
    rho = g.dot(g.conj().T)
    rho = (rho + rho.conj().T) / 2
    return tensor_core.DensityMatrix(registers, rho / np.trace(rho).real)


def random_projector_family(rng, registers, degenerate=False):
    """
    Projector family in a Haar-random basis. With degenerate set, random
    consecutive basis vectors share an outcome.
    """
    dim = tensor_core._product([reg.dimension for reg in registers])
    u = random_unitary(rng, dim)
    if not degenerate or dim == 1:
        return quantum_correlation.ProjectorFamily.from_basis(
            registers, ['a%d' % i for i in range(dim)], u.T,
        )
    sizes = []
    left = dim
    while left:
        size = int(rng.integers(1, left + 1))
        sizes.append(size)
        left -= size
    blocks = []
    start = 0
    for i, size in enumerate(sizes):
        blocks.append(('a%d' % i, i, u.T[start:start + size]))
        start += size
    return quantum_correlation.ProjectorFamily.from_blocks(registers, blocks)
