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
Dense complex linear algebra over ordered products of labeled registers.

Amplitudes are stored row-major over the layout order. Every value built
here is immutable once constructed.
"""
import functools
import numbers

import numpy as np
import scipy.linalg

from . import constants
from .errors import (
    AxisError,
    KindError,
    NameCollision,
    NormError,
    NotUnitary,
    ShapeError,
    UseOuterProductInstead,
)

FINITE = 'finite'
GRID = 'grid'
MEMORY = 'memory'
KINDS = (FINITE, GRID, MEMORY)


def _product(dims):
    return int(np.prod(dims, dtype=np.int64))


def _check_unique_names(registers):
    names = [reg.name for reg in registers]
    seen = set()
    for name in names:
        if name in seen:
            raise NameCollision('Register %s appears more than once' % name)
        seen.add(name)
    return names


def canonical_phase(amplitudes):
    """
    Rotate the array so its first nonzero entry (row-major) is real
    positive.
    """
    amps = np.array(amplitudes, dtype=complex)
    nonzero = np.flatnonzero(np.abs(amps) > constants.ALGEBRA_TOL)
    if not nonzero.size:
        return amps
    lead = amps.flat[nonzero[0]]
    return amps * (abs(lead) / lead)


class Register(object):
    def __init__(self, name, labels, kind=FINITE, width=None):
        if not isinstance(name, str) or not name:
            raise ShapeError('Register name must be a non empty string')
        if kind not in KINDS:
            raise KindError('Unknown register kind %r' % (kind, ))
        labels = tuple(labels)
        if not labels:
            raise ShapeError('Register %s has no basis labels' % name)
        if len(set(labels)) != len(labels):
            raise ShapeError('Register %s has repeated labels' % name)
        if kind == GRID:
            if width is None or not width > 0:
                raise ShapeError(
                    'Grid register %s needs a positive cell width' % name
                )
            width = float(width)
        elif width is not None:
            raise KindError('Only grid registers have a cell width')

        self._name = name
        self._kind = kind
        self._labels = labels
        self._width = width
        self._index = dict((label, i) for i, label in enumerate(labels))

    @classmethod
    def finite(cls, name, labels):
        if isinstance(labels, numbers.Integral):
            labels = [str(i) for i in range(labels)]
        return cls(name, labels)

    @classmethod
    def grid(cls, name, cells, width, origin=None):
        """
        A grid of `cells` cell centers spaced by `width`. Without an origin
        the grid is centered: x_i = (i - cells/2) * width.
        """
        if cells < 1:
            raise ShapeError('Grid register %s needs cells' % name)
        if origin is None:
            origin = -0.5 * cells * width
        centers = origin + width * np.arange(cells)
        return cls(name, [float(c) for c in centers], kind=GRID, width=width)

    @property
    def name(self):
        return self._name

    @property
    def kind(self):
        return self._kind

    @property
    def labels(self):
        return self._labels

    @property
    def dimension(self):
        return len(self._labels)

    @property
    def width(self):
        return self._width

    @property
    def origin(self):
        if self._kind != GRID:
            raise KindError('Register %s is not a grid' % self._name)
        return self._labels[0]

    def positions(self):
        if self._kind != GRID:
            raise KindError('Register %s is not a grid' % self._name)
        return np.array(self._labels, dtype=float)

    def index(self, label):
        try:
            return self._index[label]
        except KeyError:
            raise AxisError(
                'Label %r is not a basis label of %s' % (label, self._name)
            )

    def _key(self):
        return (self._name, self._kind, self._labels, self._width)

    def __eq__(self, other):
        return isinstance(other, Register) and self._key() == other._key()

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        return 'Register(%s, %s, %d)' % (
            self._name, self._kind, self.dimension,
        )


class StateVector(object):
    """
    Normalized amplitudes over a layout, rotated so the first nonzero
    amplitude (row-major) is real positive. Code that needs the phase
    relation between components works on raw arrays (contract, assemble,
    permute_amplitudes, evolve_amplitudes).
    """
    def __init__(self, layout, amplitudes):
        layout = tuple(layout)
        _check_unique_names(layout)
        amps = np.array(amplitudes, dtype=complex).reshape(-1)
        size = _product([reg.dimension for reg in layout])
        if amps.size != size:
            raise ShapeError(
                'Expected %d amplitudes for layout %s, got %d' % (
                    size, [reg.name for reg in layout], amps.size,
                )
            )
        norm = np.linalg.norm(amps)
        if abs(norm - 1) > constants.NORM_TOL:
            raise NormError('State norm is %.15g, expected 1' % norm)
        amps = canonical_phase(amps / norm)
        amps.setflags(write=False)
        self._layout = layout
        self._amplitudes = amps

    @classmethod
    def from_amplitudes(cls, layout, amplitudes):
        """
        Normalize first; the constructor only accepts unit vectors.
        """
        amps = np.array(amplitudes, dtype=complex).reshape(-1)
        norm = np.linalg.norm(amps)
        if norm < constants.ALGEBRA_TOL:
            raise NormError('Cannot normalize a null vector')
        return cls(layout, amps / norm)

    @classmethod
    def basis(cls, layout, labels):
        layout = tuple(layout)
        if isinstance(labels, dict):
            try:
                labels = [labels[reg.name] for reg in layout]
            except KeyError as e:
                raise AxisError('No basis label given for %s' % e.args[0])
        labels = list(labels)
        if len(labels) != len(layout):
            raise ShapeError('Need one basis label per register')
        dims = [reg.dimension for reg in layout]
        index = [reg.index(label) for reg, label in zip(layout, labels)]
        amps = np.zeros(_product(dims), dtype=complex)
        amps[np.ravel_multi_index(index, dims) if dims else 0] = 1
        return cls(layout, amps)

    @property
    def layout(self):
        return self._layout

    @property
    def names(self):
        return tuple(reg.name for reg in self._layout)

    @property
    def dims(self):
        return tuple(reg.dimension for reg in self._layout)

    @property
    def amplitudes(self):
        return self._amplitudes

    def axis(self, name):
        for i, reg in enumerate(self._layout):
            if reg.name == name:
                return i
        raise AxisError('No register %s in layout %s' % (name, self.names))

    def register(self, name):
        return self._layout[self.axis(name)]

    def tensor(self):
        return self._amplitudes.reshape(self.dims)

    def probabilities(self):
        return np.abs(self._amplitudes) ** 2

    def permuted(self, names):
        return StateVector(
            *permute_amplitudes(self._layout, self._amplitudes, names)
        )

    def inner(self, other):
        """
        <self|other>, matching registers by name.
        """
        if other.names != self.names:
            other = other.permuted(self.names)
        if other.dims != self.dims:
            raise ShapeError('Layouts differ in dimensions')
        return complex(np.vdot(self._amplitudes, other.amplitudes))

    def fidelity(self, other):
        return abs(self.inner(other)) ** 2

    def __repr__(self):
        return 'StateVector(%s)' % (', '.join(self.names), )


class LinearOperator(object):
    def __init__(self, targets, matrix, unitary=False):
        targets = tuple(targets)
        if not targets:
            raise ShapeError('Operator needs at least one target register')
        _check_unique_names(targets)
        dims = tuple(reg.dimension for reg in targets)
        size = _product(dims)
        matrix = np.array(matrix, dtype=complex)
        if matrix.shape != (size, size):
            raise ShapeError(
                'Operator on %s needs a %dx%d matrix, got %s' % (
                    [reg.name for reg in targets], size, size, matrix.shape,
                )
            )
        if unitary:
            defect = np.max(
                np.abs(matrix.conj().T.dot(matrix) - np.eye(size))
            )
            if defect > constants.ALGEBRA_TOL:
                raise NotUnitary(
                    'U^dagger U deviates from identity by %.3g' % defect
                )
        matrix.setflags(write=False)
        self._targets = targets
        self._dims = dims
        self._matrix = matrix
        self._unitary = bool(unitary)

    @classmethod
    def diagonal(cls, targets, values):
        values = np.asarray(values, dtype=complex).reshape(-1)
        unitary = bool(
            np.all(np.abs(np.abs(values) - 1) < constants.ALGEBRA_TOL)
        )
        return cls(targets, np.diag(values), unitary=unitary)

    @classmethod
    def permutation(cls, targets, images):
        """
        Basis permutation sending basis index i to images[i].
        """
        size = _product([reg.dimension for reg in targets])
        if sorted(images) != list(range(size)):
            raise ShapeError('Images do not form a permutation')
        matrix = np.zeros((size, size))
        matrix[list(images), list(range(size))] = 1
        return cls(targets, matrix, unitary=True)

    @property
    def targets(self):
        return self._targets

    @property
    def names(self):
        return tuple(reg.name for reg in self._targets)

    @property
    def dims(self):
        return self._dims

    @property
    def matrix(self):
        return self._matrix

    @property
    def unitary(self):
        return self._unitary

    def dagger(self):
        return LinearOperator(
            self._targets, self._matrix.conj().T, unitary=self._unitary,
        )

    def compose(self, other):
        """
        The operator applying `other` first, then self.
        """
        if other.names != self.names or other.dims != self.dims:
            raise ShapeError('Composed operators must share their targets')
        return LinearOperator(
            self._targets,
            self._matrix.dot(other.matrix),
            unitary=self._unitary and other.unitary,
        )


class DensityMatrix(object):
    def __init__(self, registers, matrix):
        registers = tuple(registers)
        _check_unique_names(registers)
        size = _product([reg.dimension for reg in registers])
        matrix = np.array(matrix, dtype=complex)
        if matrix.shape != (size, size):
            raise ShapeError('Density matrix must be %dx%d' % (size, size))
        if np.max(np.abs(matrix - matrix.conj().T)) > constants.ALGEBRA_TOL:
            raise ShapeError('Density matrix is not Hermitian')
        trace = np.trace(matrix).real
        if abs(trace - 1) > constants.ALGEBRA_TOL:
            raise NormError('Density matrix trace is %.15g' % trace)
        matrix = (matrix + matrix.conj().T) / 2
        eigenvalues = scipy.linalg.eigvalsh(matrix)
        if eigenvalues[0] < -constants.EIGEN_TOL:
            raise NormError(
                'Density matrix has eigenvalue %.3g' % eigenvalues[0]
            )
        eigenvalues = np.clip(eigenvalues, 0, None)[::-1]
        matrix.setflags(write=False)
        eigenvalues.setflags(write=False)
        self._registers = registers
        self._matrix = matrix
        self._eigenvalues = eigenvalues

    @classmethod
    def from_state(cls, state):
        amps = state.amplitudes
        return cls(state.layout, np.outer(amps, amps.conj()))

    @property
    def registers(self):
        return self._registers

    @property
    def names(self):
        return tuple(reg.name for reg in self._registers)

    @property
    def dims(self):
        return tuple(reg.dimension for reg in self._registers)

    @property
    def matrix(self):
        return self._matrix

    def eigenvalues(self):
        """
        Descending, with round-off negatives clamped to zero.
        """
        return self._eigenvalues


def _target_axes(names, layout):
    layout_names = [reg.name for reg in layout]
    axes = []
    for name in names:
        try:
            axes.append(layout_names.index(name))
        except ValueError:
            raise AxisError(
                'Register %s is not in layout %s' % (name, layout_names)
            )
    return axes


def evolve_amplitudes(op, layout, amplitudes):
    """
    Apply op to a raw amplitude array over layout; no normalization.
    """
    layout = tuple(layout)
    axes = _target_axes(op.names, layout)
    for axis, dim in zip(axes, op.dims):
        if layout[axis].dimension != dim:
            raise ShapeError(
                'Operator acts on %s with dimension %d, state has %d' % (
                    layout[axis].name, dim, layout[axis].dimension,
                )
            )
    dims = [reg.dimension for reg in layout]
    psi = np.asarray(amplitudes, dtype=complex).reshape(dims)
    k = len(axes)
    mat = op.matrix.reshape(op.dims + op.dims)
    out = np.tensordot(mat, psi, axes=(list(range(k, 2 * k)), axes))
    out = np.moveaxis(out, list(range(k)), axes)
    return out.reshape(-1)


def apply_operator(op, state):
    amps = evolve_amplitudes(op, state.layout, state.amplitudes)
    if not op.unitary:
        norm = np.linalg.norm(amps)
        if norm < constants.ALGEBRA_TOL:
            raise NormError('Operator annihilates the state')
        amps = amps / norm
    return StateVector(state.layout, amps)


def evolve(ops, state):
    return functools.reduce(
        lambda acc, op: apply_operator(op, acc), ops, state,
    )


def tensor_product(factors):
    factors = list(factors)
    if not factors:
        raise ShapeError('Nothing to multiply')
    layout = []
    for factor in factors:
        layout.extend(factor.layout)
    _check_unique_names(layout)
    amps = functools.reduce(np.kron, [f.amplitudes for f in factors])
    return StateVector(layout, amps)


def permute_amplitudes(layout, amplitudes, names):
    """
    Reorder a raw amplitude array over layout into the order of names,
    returning the new layout and amplitudes. Phases are left alone.
    """
    layout = tuple(layout)
    names = list(names)
    if sorted(names) != sorted(reg.name for reg in layout):
        raise AxisError('Cannot reorder %s into %s' % (
            [reg.name for reg in layout], names,
        ))
    axes = _target_axes(names, layout)
    dims = [reg.dimension for reg in layout]
    psi = np.asarray(amplitudes, dtype=complex).reshape(dims)
    return (
        tuple(layout[i] for i in axes),
        psi.transpose(axes).reshape(-1),
    )


def contract(layout, amplitudes, names, vector):
    """
    Apply the bra of `vector` (over the registers `names`) to an amplitude
    array, returning the remaining layout and amplitudes.
    """
    layout = tuple(layout)
    axes = _target_axes(names, layout)
    dims = [reg.dimension for reg in layout]
    psi = np.asarray(amplitudes, dtype=complex).reshape(dims)
    vec = np.asarray(vector, dtype=complex).reshape([dims[a] for a in axes])
    out = np.tensordot(vec.conj(), psi, axes=(list(range(len(axes))), axes))
    rest = tuple(reg for i, reg in enumerate(layout) if i not in axes)
    return rest, np.asarray(out).reshape(-1)


def assemble(layout, pieces):
    """
    Outer product of (register names, amplitudes) pieces, rearranged into
    the order of layout.
    """
    layout = tuple(layout)
    dims = dict((reg.name, reg.dimension) for reg in layout)
    order = []
    tensor = np.ones((), dtype=complex)
    for names, amps in pieces:
        names = list(names)
        order.extend(names)
        shape = [dims[name] for name in names]
        tensor = np.multiply.outer(
            tensor, np.asarray(amps, dtype=complex).reshape(shape),
        )
    layout_names = [reg.name for reg in layout]
    if sorted(order) != sorted(layout_names):
        raise AxisError('Pieces %s do not cover %s' % (order, layout_names))
    perm = [order.index(name) for name in layout_names]
    return tensor.transpose(perm).reshape(-1)


def reduced_density(state, keep):
    """
    Trace out every register not in keep. The result lists the kept
    registers in the order given.
    """
    keep = list(keep)
    if not keep:
        raise AxisError('At least one register must be kept')
    axes = [state.axis(name) for name in keep]
    if len(set(axes)) != len(axes):
        raise AxisError('Register kept twice')
    if len(axes) == len(state.layout):
        raise UseOuterProductInstead(
            'Keeping every register; use DensityMatrix.from_state'
        )
    rest = [i for i in range(len(state.layout)) if i not in axes]
    kept_dim = _product([state.layout[i].dimension for i in axes])
    m = state.tensor().transpose(axes + rest).reshape(kept_dim, -1)
    return DensityMatrix(
        [state.layout[i] for i in axes], m.dot(m.conj().T),
    )


def fourier_dual(state, name):
    """
    Unitary DFT of a grid register with k = 2*pi*frequency. The output
    register keeps the name and carries the centered dual grid
    k_j = (j - N/2) * dk, dk = 2*pi / (N * dx).
    """
    axis = state.axis(name)
    reg = state.layout[axis]
    if reg.kind != GRID:
        raise KindError('Register %s is not a grid' % name)
    cells = reg.dimension
    dual = Register.grid(name, cells, 2 * np.pi / (cells * reg.width))
    shape = [1] * len(state.layout)
    shape[axis] = cells
    sign = ((-1.0) ** np.arange(cells)).reshape(shape)
    phase = np.exp(-1j * dual.positions() * reg.origin).reshape(shape)
    out = np.fft.fft(state.tensor() * sign, axis=axis) / np.sqrt(cells)
    layout = list(state.layout)
    layout[axis] = dual
    return StateVector(layout, (out * phase).reshape(-1))
