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
Mach-Zehnder interferometer universe: a photon, two movable half-silvered
mirrors M1 and M3, two fixed mirrors M2 and M4 and the detectors DH and DV,
optionally with momentum detectors DP1 and DP3 on the movable mirrors.

A movable mirror has three relevant states: at rest '0' and two
directions 'perp', 'perp*' orthogonal to it. A photon deflected by the
mirror leaves it kicked,

    p1 = alpha |0> + beta |perp>
    p3 = alpha |0> + beta (-alpha^2 |perp> + sqrt(1 - alpha^4) |perp*>)

so <0|p1> = <0|p3> = alpha and <p1|p3> = alpha^4, the overlap of two
opposite Gaussian kicks.
"""
import cmath
import collections
import logging
import math

import numpy as np
import scipy.linalg

from . import branching
from . import constants
from . import quantum_correlation
from . import tensor_core
from .errors import NullRelativeState, ParamError
from .quantum_correlation import ProjectorFamily

PI = 'PI'
PS = 'PS'
GENERAL = 'general'
MODES = (PI, PS, GENERAL)

STEPS = ('initial', 'M1', 'M2/M4', 'detect')

PHOTON = tensor_core.Register.finite('photon', ['H', 'V'])
M1 = tensor_core.Register.finite('M1', ['0', 'perp', 'perp*'])
M2 = tensor_core.Register.finite('M2', ['0'])
M3 = tensor_core.Register.finite('M3', ['0', 'perp', 'perp*'])
M4 = tensor_core.Register.finite('M4', ['0'])
DH = tensor_core.Register.finite('DH', ['0', '1'])
DV = tensor_core.Register.finite('DV', ['0', '1'])
DP1 = tensor_core.Register.finite('DP1', ['0', '1'])
DP3 = tensor_core.Register.finite('DP3', ['0', '1'])

# photon, M1, M3 labels of the seven general worlds
WORLDS = collections.OrderedDict([
    ('I', ('H', '0', '0')),
    ('II', ('V', '0', '0')),
    ('III', ('H', 'moved', '0')),
    ('IV', ('H', '0', 'moved')),
    ('V', ('V', 'moved', '0')),
    ('VI', ('V', '0', 'moved')),
    ('VII', ('V', 'moved', 'moved')),
])


def mirror_overlap(a, k):
    """
    <psi_0|psi_p> = exp(-a^2 k^2 / 4) for a Gaussian packet of width a
    kicked to wavenumber k.
    """
    if not a > 0:
        raise ParamError('Packet width must be positive, got %r' % (a, ))
    if not k >= 0:
        raise ParamError('Wavenumber must be non negative, got %r' % (k, ))
    return math.exp(-a * a * k * k / 4)


class MziParams(object):
    def __init__(self, theta=0.0, mode=PI, alpha=None, a=None, k=None,
                 dp_detector=False):
        theta = float(theta)
        if not math.isfinite(theta):
            raise ParamError('theta must be finite')
        if mode not in MODES:
            raise ParamError(
                'Unknown mirror mode %r, expected one of %s' % (mode, MODES)
            )
        if mode == GENERAL:
            if alpha is None:
                if a is None or k is None:
                    raise ParamError(
                        'The general mode needs alpha or both a and k'
                    )
                alpha = mirror_overlap(float(a), float(k))
            alpha = float(alpha)
            if not 0 <= alpha <= 1:
                raise ParamError('alpha must lie in [0, 1], got %r' % alpha)
        elif alpha is not None:
            raise ParamError('alpha is only set in the general mode')
        self.theta = theta
        self.mode = mode
        self._alpha = alpha
        self.a = a
        self.k = k
        self.dp_detector = bool(dp_detector)

    @property
    def alpha(self):
        if self.mode == PI:
            return 1.0
        if self.mode == PS:
            return 0.0
        return self._alpha

    @property
    def beta(self):
        return math.sqrt(max(0.0, 1 - self.alpha ** 2))

    def to_json_obj(self):
        obj = {
            'theta': self.theta,
            'mode': self.mode,
            'alpha': self.alpha,
            'dp_detector': self.dp_detector,
        }
        if self.a is not None:
            obj['a'] = self.a
            obj['k'] = self.k
        return obj


def layout(dp_detector=False):
    regs = [PHOTON, M1, M2, M3, M4, DH, DV]
    if dp_detector:
        regs += [DP1, DP3]
    return regs


def kicked_states(alpha):
    """
    (rest, p1, p3) in the mirror basis 0, perp, perp*.
    """
    beta = math.sqrt(max(0.0, 1 - alpha ** 2))
    rest = np.array([1, 0, 0], dtype=complex)
    p1 = np.array([alpha, beta, 0], dtype=complex)
    p3 = np.array([
        alpha,
        -beta * alpha ** 2,
        beta * math.sqrt(max(0.0, 1 - alpha ** 4)),
    ], dtype=complex)
    return rest, p1, p3


def _photon(label):
    return np.eye(2)[PHOTON.index(label)]


def _bit(value):
    return np.eye(2)[value]


def _complete(targets, columns):
    """
    Unitary on targets taking the basis states of `columns` (input index
    -> output vector) to the given orthonormal outputs. The remaining
    inputs, in index order, take an orthonormal basis of the complement.
    """
    dim = tensor_core._product([reg.dimension for reg in targets])
    inputs = sorted(columns)
    isometry = np.array([columns[i] for i in inputs]).T
    complement = scipy.linalg.null_space(isometry.conj().T)
    matrix = np.zeros((dim, dim), dtype=complex)
    free = iter(complement.T)
    for i in range(dim):
        matrix[:, i] = columns[i] if i in columns else next(free)
    return tensor_core.LinearOperator(targets, matrix, unitary=True)


def half_silvered(mirror, sign, alpha, dp=None):
    """
    Photon interaction with a movable half-silvered mirror,
        H,0 -> (H,0 + sign V,p1) / sqrt(2)
        V,0 -> (V,0 - sign H,p3) / sqrt(2)
    with the momentum detector dp, if any, flipped by every kick.
    """
    rest, p1, p3 = kicked_states(alpha)
    targets = [PHOTON, mirror] + ([dp] if dp is not None else [])
    dims = [reg.dimension for reg in targets]

    def ket(photon, mirror_state, kicked):
        out = np.kron(_photon(photon), mirror_state)
        if dp is not None:
            out = np.kron(out, _bit(1 if kicked else 0))
        return out

    zeros = [0] * (len(targets) - 2)
    h0 = int(np.ravel_multi_index([0, 0] + zeros, dims))
    v0 = int(np.ravel_multi_index([1, 0] + zeros, dims))
    s = 1 / math.sqrt(2)
    columns = {
        h0: s * (ket('H', rest, False) + sign * ket('V', p1, True)),
        v0: s * (ket('V', rest, False) - sign * ket('H', p3, True)),
    }
    return _complete(targets, columns)


def sample_phase(theta):
    return tensor_core.LinearOperator.diagonal(
        [PHOTON], [cmath.exp(1j * theta), 1],
    )


def fixed_mirrors():
    """
    M2 and M4 together: each swaps the arms with a pi phase.
    """
    return tensor_core.LinearOperator(
        [PHOTON], [[0, -1], [-1, 0]], unitary=True,
    )


def detection():
    """
    The photon flips DH in the H arm and DV in the V arm.
    """
    images = []
    for p in range(2):
        for h in range(2):
            for v in range(2):
                if p == 0:
                    images.append(4 * p + 2 * (1 - h) + v)
                else:
                    images.append(4 * p + 2 * h + (1 - v))
    return tensor_core.LinearOperator.permutation([PHOTON, DH, DV], images)


def stage_operators(params):
    """
    Operators of each step after the initial one, in order.
    """
    alpha = params.alpha
    dp1 = DP1 if params.dp_detector else None
    dp3 = DP3 if params.dp_detector else None
    return [
        ('M1', [half_silvered(M1, -1, alpha, dp1)]),
        ('M2/M4', [sample_phase(params.theta), fixed_mirrors()]),
        ('detect', [half_silvered(M3, +1, alpha, dp3), detection()]),
    ]


def initial_state(dp_detector=False):
    regs = layout(dp_detector)
    return tensor_core.StateVector.basis(regs, ['H'] + ['0'] * (len(regs) - 1))


def mirror_family(mirror):
    rest, p1, p3 = kicked_states(0.0)
    return ProjectorFamily.from_blocks(
        [mirror], [('0', 0, [rest]), ('moved', 1, [p1, p3])],
        name=mirror.name,
    )


def basis_choice(dp_detector=False):
    choice = collections.OrderedDict()
    choice['photon'] = None
    if dp_detector:
        choice['DP1'] = None
        choice['DP3'] = None
    else:
        choice['M1'] = mirror_family(M1)
        choice['M3'] = mirror_family(M3)
    choice['DH'] = None
    choice['DV'] = None
    return choice


def _evolver(ops, regs):
    def evolve_fn(amps):
        for op in ops:
            amps = tensor_core.evolve_amplitudes(op, regs, amps)
        return amps
    return evolve_fn


MziRun = collections.namedtuple(
    'MziRun', 'params state final tree detector_weights worlds checks',
)


def _test_phases(branch_set):
    return dict(
        (b.id, cmath.exp(1j * (i + 1))) for i, b in enumerate(branch_set)
    )


def mzi_run(params):
    regs = layout(params.dp_detector)
    choice = basis_choice(params.dp_detector)
    state = initial_state(params.dp_detector)
    previous = branching.decompose(state, choice)
    tree = branching.extend_tree(
        branching.WorldTree(), STEPS[0], None, previous,
    )
    invariant = True
    for step, ops in stage_operators(params):
        state = tensor_core.evolve(ops, state)
        current = branching.decompose(state, choice)
        edges = branching.parent_map(previous, _evolver(ops, regs), current)
        invariant = invariant and branching.rephasing_invariant(
            previous, _evolver(ops, regs), current, _test_phases(current),
        )
        tree = branching.extend_tree(tree, step, edges, current)
        previous = current
        logging.debug('MZI step %s: %d branches', step, len(current))

    final = previous
    detectors = collections.OrderedDict([
        ('DH', sum(b.weight for b in final if b.label['DH'] == '1')),
        ('DV', sum(b.weight for b in final if b.label['DV'] == '1')),
    ])
    worlds = None
    if not params.dp_detector:
        worlds = world_weights(final)
    checks = closed_form_checks(params, state, final)
    checks['phase_invariance'] = invariant
    logging.info(
        'MZI %s theta=%.6g alpha=%.6g: %d worlds, DH %.6g DV %.6g',
        params.mode, params.theta, params.alpha, len(final),
        detectors['DH'], detectors['DV'],
    )
    return MziRun(params, state, final, tree, detectors, worlds, checks)


def world_weights(final):
    out = collections.OrderedDict()
    for name, (photon, m1, m3) in WORLDS.items():
        out[name] = sum(
            b.weight for b in final
            if (b.label['photon'], b.label['M1'], b.label['M3']) ==
            (photon, m1, m3)
        )
    return out


def _ket(regs, labels, mirrors):
    """
    Product basis vector of regs with the mirror registers set to the
    given vectors.
    """
    pieces = []
    for reg in regs:
        if reg.name in mirrors:
            pieces.append(([reg.name], mirrors[reg.name]))
        else:
            vec = np.zeros(reg.dimension, dtype=complex)
            vec[reg.index(labels.get(reg.name, '0'))] = 1
            pieces.append(([reg.name], vec))
    return tensor_core.assemble(regs, pieces)


def general_final(alpha, theta):
    """
    Closed form of the final state for mirror overlap alpha.
    """
    regs = layout()
    beta = math.sqrt(max(0.0, 1 - alpha ** 2))
    rest = np.array([1, 0, 0], dtype=complex)
    perp = np.array([0, 1, 0], dtype=complex)
    _, _, p3 = kicked_states(alpha)
    perp3 = (p3 - alpha * rest) / beta if beta > 0 else \
        np.array([0, 0, 1], dtype=complex)
    phase = cmath.exp(1j * theta)
    h = {'photon': 'H', 'DH': '1'}
    v = {'photon': 'V', 'DV': '1'}
    terms = [
        (alpha * (1 + phase), h, rest, rest),
        (alpha ** 2 - phase, v, rest, rest),
        (beta, h, perp, rest),
        (beta * phase, h, rest, perp3),
        (alpha * beta, v, perp, rest),
        (alpha * beta, v, rest, perp),
        (beta ** 2, v, perp, perp),
    ]
    amps = sum(
        c / 2 * _ket(regs, labels, {'M1': m1, 'M3': m3})
        for c, labels, m1, m3 in terms
    )
    return tensor_core.StateVector(regs, amps)


def pi_final(theta):
    regs = layout()
    phase = cmath.exp(1j * theta)
    amps = (1 + phase) / 2 * _ket(regs, {'photon': 'H', 'DH': '1'}, {}) + \
        (1 - phase) / 2 * _ket(regs, {'photon': 'V', 'DV': '1'}, {})
    return tensor_core.StateVector(regs, amps)


def ps_final(theta):
    regs = layout()
    phase = cmath.exp(1j * theta)
    rest = np.array([1, 0, 0], dtype=complex)
    perp = np.array([0, 1, 0], dtype=complex)
    perp3 = np.array([0, 0, 1], dtype=complex)
    h = {'photon': 'H', 'DH': '1'}
    v = {'photon': 'V', 'DV': '1'}
    amps = (
        _ket(regs, h, {'M1': perp, 'M3': rest}) +
        phase * _ket(regs, h, {'M1': rest, 'M3': perp3}) -
        phase * _ket(regs, v, {'M1': rest, 'M3': rest}) +
        _ket(regs, v, {'M1': perp, 'M3': perp})
    ) / 2
    return tensor_core.StateVector(regs, amps)


def printed_first_coefficient(alpha, theta):
    """
    First coefficient of the general final state as commonly printed,
    (1/2) alpha e^{i theta/2} cos^2(theta/2).
    """
    return alpha * cmath.exp(0.5j * theta) * math.cos(theta / 2) ** 2 / 2


def closed_form_checks(params, state, final):
    """
    Distances of the evolved state from the closed forms and from the
    branch reconstruction.
    """
    checks = collections.OrderedDict()
    rebuilt = sum(b.vector() for b in final)
    checks['reconstruction'] = float(np.abs(rebuilt - state.amplitudes).max())
    checks['orthogonality'] = float(final.orthogonality_defect())
    if params.dp_detector:
        return checks
    closed = general_final(params.alpha, params.theta)
    checks['closed_form'] = float(
        np.abs(closed.amplitudes - state.amplitudes).max()
    )
    if params.mode == PI:
        checks['pi_form'] = float(np.abs(
            pi_final(params.theta).amplitudes - state.amplitudes).max())
    if params.mode == PS:
        checks['ps_form'] = float(np.abs(
            ps_final(params.theta).amplitudes - state.amplitudes).max())
    true_first = params.alpha * (1 + cmath.exp(1j * params.theta)) / 2
    printed = printed_first_coefficient(params.alpha, params.theta)
    checks['printed_first_coefficient_agrees'] = bool(
        abs(true_first - printed) < constants.EIGEN_TOL
    )
    return checks


PHOTON_PM = ProjectorFamily.from_basis(
    [PHOTON], ['+', '-'],
    np.array([[1, 1], [1, -1]]) / math.sqrt(2), [1, -1], name='A_p',
)


def approximate_measurement_state(alpha):
    """
    Photon and M1 right after M1, with the mirror restricted to 0, perp.
    """
    mirror = tensor_core.Register.finite('M1', ['0', 'perp'])
    beta = math.sqrt(max(0.0, 1 - alpha ** 2))
    amps = np.array([1, 0, -alpha, -beta]) / math.sqrt(2)
    return tensor_core.StateVector([PHOTON, mirror], amps)


def alpha_tilde(alpha):
    return (math.sqrt(1 + alpha) + math.sqrt(1 - alpha)) / 2


def rebase_approximate_measurement(alpha):
    """
    Read the post-M1 state in the photon basis +/- and the mirror basis
    psi_1, psi_2 = (|0> -+ |perp>)/sqrt(2). For small alpha the mirror
    state given + (-) is close to psi_1 (psi_2).
    """
    alpha = float(alpha)
    if not 0 <= alpha <= 1:
        raise ParamError('alpha must lie in [0, 1], got %r' % alpha)
    state = approximate_measurement_state(alpha)
    mirror = state.register('M1')
    s = 1 / math.sqrt(2)
    mirror_basis = np.array([[s, -s], [s, s]])
    b_m = ProjectorFamily.from_basis(
        [mirror], ['1', '2'], mirror_basis, [1, 2], name='B_M',
    )
    branches = branching.rebase(state, collections.OrderedDict([
        ('photon', PHOTON_PM), ('M1', b_m),
    ]))

    beta = math.sqrt(max(0.0, 1 - alpha ** 2))
    targets = {'+': mirror_basis[0], '-': mirror_basis[1]}
    conditional = collections.OrderedDict()
    for label in PHOTON_PM.labels:
        eta = tensor_core.StateVector([PHOTON], PHOTON_PM.vectors(label)[0])
        try:
            rel = quantum_correlation.relative_state(state, eta)
        except NullRelativeState:
            conditional[label] = None
            continue
        amps = rel.amplitudes
        conditional[label] = {
            'state': amps,
            'fidelity': abs(np.vdot(targets[label], amps)) ** 2,
            'coefficients': [
                np.vdot(mirror_basis[0], amps), np.vdot(mirror_basis[1], amps),
            ],
        }

    expected = collections.OrderedDict([
        ('fidelity', (1 + beta) / 2),
        ('alpha_tilde', alpha_tilde(alpha)),
        ('cross_coefficient', alpha / (2 * alpha_tilde(alpha))),
    ])
    correlation = quantum_correlation.observable_correlation(
        state, PHOTON_PM, b_m,
    )
    form = quantum_correlation.schmidt(state, ['photon'])
    canonical = quantum_correlation.canonical_correlation(state, ['photon'])
    return {
        'alpha': alpha,
        'state': state,
        'branches': branches,
        'conditional': conditional,
        'expected': expected,
        'correlation': correlation,
        'canonical_correlation': canonical,
        'schmidt_degenerate': form.degenerate,
    }
