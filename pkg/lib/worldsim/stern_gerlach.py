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
Stern-Gerlach spin measurement on a spin x z-grid universe.

The magnet is kept only through its coupling mu sigma_z (B0 + z B1),
acting for a short time as the diagonal phases exp(-+i (b0 + b1 z)),
which kick the two spin components to wavenumbers -+b1. Free flight is
the exact kinetic phase exp(-i k^2 t / 2) on the periodic grid (hbar =
m = 1). Running the whole evolution backwards restores the initial
state.
"""
import collections
import logging

import numpy as np

from . import classical_info
from . import constants
from . import quantum_correlation
from . import tensor_core
from .errors import NormError, ParamError

SPIN = tensor_core.Register.finite('spin', ['up', 'down'])


class SternGerlachParams(object):
    def __init__(self, c1, c2, cells=1024, width=0.05, packet_width=1.0,
                 b0=0.0, b1=10.0, flight_times=(0.0, ), recombine=False):
        c1, c2 = complex(c1), complex(c2)
        if abs(abs(c1) ** 2 + abs(c2) ** 2 - 1) > constants.NORM_TOL:
            raise ParamError('|c1|^2 + |c2|^2 must be 1')
        if cells < 2 or cells % 2:
            raise ParamError('The z grid needs an even number of cells')
        if not width > 0 or not packet_width > 0:
            raise ParamError('Grid and packet widths must be positive')
        flight_times = [float(t) for t in flight_times]
        if not flight_times or any(t < 0 for t in flight_times):
            raise ParamError('Flight times must be non negative')
        self.c1 = c1
        self.c2 = c2
        self.cells = int(cells)
        self.width = float(width)
        self.packet_width = float(packet_width)
        self.b0 = float(b0)
        self.b1 = float(b1)
        self.flight_times = flight_times
        self.recombine = bool(recombine)

    def z_register(self):
        return tensor_core.Register.grid('z', self.cells, self.width)


def gaussian_packet(z, packet_width):
    """
    (pi a^2)^(-1/4) exp(-z^2 / 2a^2) sampled on the grid, normalized as
    amplitudes.
    """
    x = z.positions()
    amps = np.exp(-x ** 2 / (2 * packet_width ** 2)).astype(complex)
    return amps / np.linalg.norm(amps)


def initial_state(params):
    z = params.z_register()
    packet = gaussian_packet(z, params.packet_width)
    spin = np.array([params.c1, params.c2])
    return tensor_core.StateVector([SPIN, z], np.kron(spin, packet))


def coupling(params, z, sign=1):
    """
    Diagonal coupling phases; sign=-1 gives the inverse.
    """
    x = z.positions()
    phase = params.b0 + params.b1 * x
    values = np.concatenate([
        np.exp(-1j * sign * phase), np.exp(1j * sign * phase),
    ])
    return tensor_core.LinearOperator.diagonal([SPIN, z], values)


def free_flight(state, t):
    """
    Split-step kinetic propagation of the z factor by time t; negative t
    propagates backwards.
    """
    z = state.register('z')
    k = 2 * np.pi * np.fft.fftfreq(z.dimension, d=z.width)
    psi = state.tensor()
    axis = state.axis('z')
    shape = [1] * psi.ndim
    shape[axis] = z.dimension
    kinetic = np.exp(-0.5j * k ** 2 * t).reshape(shape)
    out = np.fft.ifft(np.fft.fft(psi, axis=axis) * kinetic, axis=axis)
    return tensor_core.StateVector(state.layout, out.reshape(-1))


def check_grid(state):
    """
    GridTooSmall unless both position and wavenumber distributions stay
    clear of the grid edges.
    """
    probs = np.abs(state.tensor()) ** 2
    quantum_correlation.check_edges(probs.sum(axis=0), 'position')
    dual = tensor_core.fourier_dual(state, 'z')
    quantum_correlation.check_edges(
        (np.abs(dual.tensor()) ** 2).sum(axis=0), 'wavenumber',
    )


def conditional_wavenumbers(state):
    """
    <k> of the z packet given each spin value, None where that spin
    component is absent.
    """
    dual = tensor_core.fourier_dual(state, 'z')
    k = dual.register('z').positions()
    out = collections.OrderedDict()
    for i, label in enumerate(SPIN.labels):
        component = dual.tensor()[i]
        weight = np.sum(np.abs(component) ** 2)
        if weight < constants.ZERO_WEIGHT:
            out[label] = None
            continue
        out[label] = float(np.sum(k * np.abs(component) ** 2) / weight)
    return out


def spin_position_correlation(state):
    """
    Classical correlation between the spin value and the z cell.
    """
    P = classical_info.FiniteDistribution(
        [('spin', SPIN.labels), ('z', range(state.register('z').dimension))],
        state.probabilities(),
    )
    return classical_info.correlation(P, [['spin'], ['z']])


def conditional_positions(state):
    z = state.register('z').positions()
    out = collections.OrderedDict()
    for i, label in enumerate(SPIN.labels):
        p = np.abs(state.tensor()[i]) ** 2
        if p.sum() < constants.ZERO_WEIGHT:
            out[label] = None
            continue
        out[label] = float(np.sum(z * p) / p.sum())
    return out


SternGerlachRun = collections.namedtuple(
    'SternGerlachRun', 'rows wavenumbers state fidelity',
)


def stern_gerlach_run(params):
    psi0 = initial_state(params)
    check_grid(psi0)
    z = psi0.register('z')
    coupled = tensor_core.apply_operator(coupling(params, z), psi0)
    check_grid(coupled)
    wavenumbers = conditional_wavenumbers(coupled)

    rows = []
    state = coupled
    for t in params.flight_times:
        state = free_flight(coupled, t)
        check_grid(state)
        positions = conditional_positions(state)
        separation = None
        if None not in positions.values():
            separation = abs(positions['up'] - positions['down'])
        rows.append(collections.OrderedDict([
            ('t', t),
            ('canonical_correlation',
             quantum_correlation.canonical_correlation(state, ['spin'])),
            ('spin_position_correlation', spin_position_correlation(state)),
            ('separation', separation),
        ]))

    fidelity = None
    if params.recombine:
        back = free_flight(state, -params.flight_times[-1])
        back = tensor_core.apply_operator(coupling(params, z, -1), back)
        fidelity = abs(psi0.inner(back))
        if fidelity > 1 + constants.NORM_TOL:
            raise NormError('Fidelity %.15g above one' % fidelity)
    logging.info(
        'Stern-Gerlach: k given spin %s, final C %.6g',
        dict(wavenumbers), rows[-1]['canonical_correlation'],
    )
    return SternGerlachRun(rows, wavenumbers, state, fidelity)
