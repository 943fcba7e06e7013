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
von Neumann measurement: a system coordinate q coupled to a pointer
coordinate r through H = -i q d/dr, kinetic energies neglected, so that

    Psi(t)(q, r) = phi(q) eta(r - q t).

Times are restricted to shifts that land on the r lattice, where the
solution is an exact index shift.
"""
import collections
import logging

import numpy as np

from . import classical_info
from . import constants
from . import tensor_core
from .errors import AlignmentError, GridTooSmall, KindError, ParamError

# allowed distance of q t / dr from an integer
ALIGNMENT_TOL = 1e-9


def _sample(reg, f):
    if reg.kind != tensor_core.GRID:
        raise KindError('Register %s is not a grid' % reg.name)
    if callable(f):
        values = np.array([f(x) for x in reg.positions()], dtype=complex)
    else:
        values = np.array(f, dtype=complex).reshape(-1)
    if values.size != reg.dimension:
        raise ParamError('%s needs %d samples' % (reg.name, reg.dimension))
    norm = np.linalg.norm(values)
    if norm < constants.ALGEBRA_TOL:
        raise ParamError('%s wave function vanishes' % reg.name)
    return values / norm


class PointerParams(object):
    """
    phi and eta are sampled functions or arrays of amplitudes on the q and
    r grids; times are the coupling times to report.
    """
    def __init__(self, q, phi, r, eta, times=(0.0, 1.0)):
        self.q = q
        self.r = r
        self.phi = _sample(q, phi)
        self.eta = _sample(r, eta)
        self.times = [float(t) for t in times]
        if not self.times:
            raise ParamError('At least one coupling time is needed')
        if any(t < 0 for t in self.times):
            raise ParamError('Coupling times must be non negative')


def cell_shifts(q, r, t):
    """
    Pointer displacement, in r cells, of every q cell after time t.
    """
    shifts = q.positions() * t / r.width
    rounded = np.round(shifts)
    if np.abs(shifts - rounded).max() > ALIGNMENT_TOL:
        raise AlignmentError(
            't=%g moves the pointer by %s cells, not a whole number' % (
                t, shifts[np.argmax(np.abs(shifts - rounded))],
            )
        )
    return rounded.astype(int)


def coupled_state(params, t):
    q, r = params.q, params.r
    shifts = cell_shifts(q, r, t)
    support = np.flatnonzero(np.abs(params.eta) > 0)
    lo, hi = support[0], support[-1]
    psi = np.zeros((q.dimension, r.dimension), dtype=complex)
    for i, (amp, s) in enumerate(zip(params.phi, shifts)):
        if amp == 0:
            continue
        if lo + s < 0 or hi + s >= r.dimension:
            raise GridTooSmall(
                'Pointer for q=%g leaves the r grid at t=%g' % (
                    q.positions()[i], t,
                )
            )
        psi[i, lo + s:hi + s + 1] = amp * params.eta[lo:hi + 1]
    return tensor_core.StateVector([q, r], psi.reshape(-1))


def joint_distribution(state):
    q, r = state.layout
    return classical_info.FiniteDistribution(
        [('q', range(q.dimension)), ('r', range(r.dimension))],
        state.probabilities(),
    )


PointerRun = collections.namedtuple('PointerRun', 'rows state criterion')


def von_neumann_run(params):
    """
    C_qr, I_q and I_r at every requested time, and whether the coupling
    generates a measurement of q by r: C_qr reaches its maximum -I_q(0)
    while I_q stays constant.
    """
    rows = []
    state = None
    for t in params.times:
        state = coupled_state(params, t)
        P = joint_distribution(state)
        rows.append(collections.OrderedDict([
            ('t', t),
            ('C', classical_info.correlation(P, [['q'], ['r']])),
            ('I_q', classical_info.information(
                classical_info.marginal(P, ['q']))),
            ('I_r', classical_info.information(
                classical_info.marginal(P, ['r']))),
        ]))
    initial = classical_info.information(classical_info.FiniteDistribution(
        [('q', range(params.q.dimension))], np.abs(params.phi) ** 2,
    ))
    drift = max(abs(row['I_q'] - initial) for row in rows)
    reached = any(
        abs(row['C'] + initial) < constants.EIGEN_TOL
        for row in rows if row['t'] > 0
    )
    criterion = collections.OrderedDict([
        ('max_correlation', -initial),
        ('reached', reached),
        ('I_q_drift', drift),
        ('I_q_constant', drift < 1e-9),
        ('generates_measurement', reached and drift < 1e-9),
    ])
    logging.info('Pointer run: C(t) = %s', [row['C'] for row in rows])
    return PointerRun(rows, state, criterion)
