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
Information calculus on quantum states: square-amplitude distributions of
observables, relative states, the canonical (Schmidt) representation and
its correlation, operator information and its bound by the canonical
correlation, the entropic uncertainty check on grid wave functions, and
the density-matrix information that Process 1 can only lower.
"""
import logging

import numpy as np
import scipy.linalg

from . import classical_info
from . import constants
from . import tensor_core
from .errors import (
    AxisError,
    BasisError,
    GridTooSmall,
    KindError,
    NullRelativeState,
    ShapeError,
    SubsystemOverlap,
)


class Outcome(object):
    def __init__(self, label, eigenvalue, projector):
        self.label = label
        self.eigenvalue = eigenvalue
        self.projector = projector
        self.multiplicity = int(round(np.trace(projector).real))

    def __repr__(self):
        return 'Outcome(%r, %g, m=%d)' % (
            self.label, self.eigenvalue, self.multiplicity,
        )


class ProjectorFamily(object):
    """
    Complete family of orthogonal projectors on a subset of registers,
    each tagged with a label and an eigenvalue.
    """
    def __init__(self, registers, outcomes, name=None):
        registers = tuple(registers)
        tensor_core._check_unique_names(registers)
        dim = tensor_core._product([reg.dimension for reg in registers])
        built = []
        for label, eigenvalue, projector in outcomes:
            projector = np.array(projector, dtype=complex)
            if projector.shape != (dim, dim):
                raise ShapeError(
                    'Projector %r has shape %s, expected %s' % (
                        label, projector.shape, (dim, dim),
                    )
                )
            projector.setflags(write=False)
            built.append(Outcome(label, float(eigenvalue), projector))
        if not built:
            raise BasisError('A projector family needs at least one outcome')
        labels = [outcome.label for outcome in built]
        if len(set(labels)) != len(labels):
            raise BasisError('Outcome labels repeat: %s' % labels)
        self._registers = registers
        self._outcomes = tuple(built)
        self._name = name
        self._check()

    def _check(self):
        tol = constants.EIGEN_TOL
        dim = self.dimension
        total = np.zeros((dim, dim), dtype=complex)
        for i, a in enumerate(self._outcomes):
            p = a.projector
            if np.abs(p - p.conj().T).max() > tol:
                raise BasisError('Projector %r is not Hermitian' % a.label)
            if a.multiplicity < 1:
                raise BasisError('Projector %r is null' % a.label)
            for b in self._outcomes[i:]:
                expected = p if a is b else 0
                if np.abs(p.dot(b.projector) - expected).max() > tol:
                    raise BasisError(
                        'Projectors %r and %r are not orthogonal '
                        'idempotents' % (a.label, b.label)
                    )
            total += p
        if np.abs(total - np.eye(dim)).max() > tol:
            raise BasisError('Projectors do not sum to the identity')

    @classmethod
    def from_basis(cls, registers, labels, vectors, eigenvalues=None,
                   name=None):
        """
        Nondegenerate family from an orthonormal basis, vectors given as
        rows.
        """
        vectors = np.array(vectors, dtype=complex)
        labels = list(labels)
        if vectors.ndim != 2 or vectors.shape[0] != len(labels):
            raise ShapeError('Need one basis vector per label')
        gram = vectors.conj().dot(vectors.T)
        if np.abs(gram - np.eye(len(labels))).max() > constants.EIGEN_TOL:
            raise BasisError('Basis vectors are not orthonormal')
        if eigenvalues is None:
            eigenvalues = range(len(labels))
        return cls(
            registers,
            [
                (label, mu, np.outer(v, v.conj()))
                for label, mu, v in zip(labels, eigenvalues, vectors)
            ],
            name=name,
        )

    @classmethod
    def computational(cls, register):
        return cls.from_basis(
            [register],
            register.labels,
            np.eye(register.dimension),
            name=register.name,
        )

    @classmethod
    def from_observable(cls, registers, matrix, labels=None, name=None):
        """
        Spectral projectors of a Hermitian matrix, eigenvalues within
        EIGEN_TOL merged into one degenerate outcome. Outcomes ascend in
        eigenvalue.
        """
        matrix = np.array(matrix, dtype=complex)
        if np.abs(matrix - matrix.conj().T).max() > constants.ALGEBRA_TOL:
            raise BasisError('Observable is not Hermitian')
        values, vectors = scipy.linalg.eigh(matrix)
        groups = []
        for i, mu in enumerate(values):
            if groups and abs(mu - groups[-1][0]) < constants.EIGEN_TOL:
                groups[-1][1].append(i)
            else:
                groups.append((mu, [i]))
        if labels is None:
            labels = ['%.12g' % mu for mu, _ in groups]
        labels = list(labels)
        if len(labels) != len(groups):
            raise ShapeError(
                'Observable has %d distinct eigenvalues, got %d labels' % (
                    len(groups), len(labels),
                )
            )
        outcomes = []
        for label, (mu, columns) in zip(labels, groups):
            v = vectors[:, columns]
            outcomes.append((label, mu, v.dot(v.conj().T)))
        return cls(registers, outcomes, name=name)

    @classmethod
    def from_blocks(cls, registers, blocks, name=None):
        """
        Family whose outcomes project on the spans of the given vector
        blocks, [(label, eigenvalue, [vectors])]. The vectors of all blocks
        together must form an orthonormal basis.
        """
        outcomes = []
        for label, mu, vectors in blocks:
            v = np.array(vectors, dtype=complex).reshape(len(vectors), -1)
            outcomes.append((label, mu, v.T.dot(v.conj())))
        return cls(registers, outcomes, name=name)

    @property
    def registers(self):
        return self._registers

    @property
    def names(self):
        return tuple(reg.name for reg in self._registers)

    @property
    def dimension(self):
        return tensor_core._product([reg.dimension for reg in self._registers])

    @property
    def outcomes(self):
        return self._outcomes

    @property
    def labels(self):
        return tuple(outcome.label for outcome in self._outcomes)

    @property
    def name(self):
        return self._name or ','.join(self.names)

    def is_nondegenerate(self):
        return all(outcome.multiplicity == 1 for outcome in self._outcomes)

    def outcome(self, label):
        for outcome in self._outcomes:
            if outcome.label == label:
                return outcome
        raise AxisError('No outcome %r in %s' % (label, self.name))

    def vectors(self, label):
        """
        Orthonormal basis (rows, canonical phase) of one outcome's range.
        """
        outcome = self.outcome(label)
        values, vectors = scipy.linalg.eigh(outcome.projector)
        columns = vectors[:, values > 0.5]
        return np.array([
            tensor_core.canonical_phase(columns[:, i])
            for i in range(columns.shape[1])
        ])

    def adapted_basis(self):
        """
        (outcome index, vector) pairs spanning the whole space, grouped by
        outcome.
        """
        out = []
        for i, outcome in enumerate(self._outcomes):
            for v in self.vectors(outcome.label):
                out.append((i, v))
        return out

    def reordered(self, names):
        """
        Same family acting on the registers in the order of names.
        """
        names = list(names)
        if names == list(self.names):
            return self
        if sorted(names) != sorted(self.names):
            raise AxisError('Cannot reorder %s into %s' % (self.names, names))
        perm = [self.names.index(name) for name in names]
        dims = [reg.dimension for reg in self._registers]
        k = len(dims)
        outcomes = []
        for outcome in self._outcomes:
            p = outcome.projector.reshape(dims + dims)
            p = p.transpose(perm + [k + i for i in perm])
            outcomes.append(
                (outcome.label, outcome.eigenvalue,
                 p.reshape(self.dimension, self.dimension))
            )
        return ProjectorFamily(
            [self._registers[i] for i in perm], outcomes, name=self._name,
        )

    def observable(self):
        return sum(
            outcome.eigenvalue * outcome.projector
            for outcome in self._outcomes
        )


class SchmidtDecomposition(object):
    def __init__(self, left, right, coefficients, left_states, right_states):
        self.left = tuple(left)
        self.right = tuple(right)
        self.coefficients = coefficients
        self.left_states = left_states
        self.right_states = right_states

    @property
    def rank(self):
        return len(self.coefficients)

    @property
    def degenerate(self):
        gaps = np.abs(np.diff(self.coefficients))
        return bool(np.any(gaps < constants.EIGEN_TOL))

    def reconstruct(self):
        amps = sum(
            np.sqrt(lam) * np.kron(phi, chi)
            for lam, phi, chi in zip(
                self.coefficients, self.left_states, self.right_states,
            )
        )
        return tensor_core.StateVector(self.left + self.right, amps)


def _split(state, left):
    left = list(left)
    if not left:
        raise AxisError('Left part of a bipartition is empty')
    left_axes = [state.axis(name) for name in left]
    if len(set(left_axes)) != len(left_axes):
        raise AxisError('Register listed twice in %s' % left)
    right_axes = [
        i for i in range(len(state.layout)) if i not in left_axes
    ]
    if not right_axes:
        raise AxisError('Right part of a bipartition is empty')
    return left_axes, right_axes


def _family_dims(state, family):
    for reg in family.registers:
        if state.register(reg.name).dimension != reg.dimension:
            raise ShapeError('Family %s does not fit the state' % family.name)


def _joint_weights(state, families):
    """
    P[i, j, ...] = <psi| P_i P_j ... |psi> for families on disjoint
    register subsets.
    """
    seen = set()
    for family in families:
        _family_dims(state, family)
        overlap = seen.intersection(family.names)
        if overlap:
            raise SubsystemOverlap(
                'Registers %s are measured twice' % sorted(overlap)
            )
        seen.update(family.names)

    names = [name for family in families for name in family.names]
    rest = [name for name in state.names if name not in names]
    ordered = state.permuted(names + rest)
    psi = ordered.amplitudes.reshape(
        [family.dimension for family in families] + [-1]
    )
    shape = [len(family.outcomes) for family in families]
    probs = np.zeros(shape)
    for index in np.ndindex(*shape):
        chi = psi
        for axis, (family, i) in enumerate(zip(families, index)):
            p = family.outcomes[i].projector
            chi = np.moveaxis(
                np.tensordot(p, chi, axes=([1], [axis])), 0, axis,
            )
        probs[index] = np.vdot(psi, chi).real
    return np.clip(probs, 0, None)


def square_amplitude_joint(state, A, B):
    """
    Joint distribution of the outcomes of A and B in state, with the
    outcome multiplicities as information measures.
    """
    probs = _joint_weights(state, [A, B])
    return classical_info.FiniteDistribution(
        [(A.name, A.labels), (B.name, B.labels)],
        probs / probs.sum(),
        [
            [o.multiplicity for o in A.outcomes],
            [o.multiplicity for o in B.outcomes],
        ],
    )


def square_amplitude_distribution(state, A):
    probs = _joint_weights(state, [A])
    return classical_info.FiniteDistribution(
        [(A.name, A.labels)],
        probs / probs.sum(),
        [[o.multiplicity for o in A.outcomes]],
    )


def relative_state(state, eta):
    """
    Normalized <eta|Psi> over the registers not covered by eta.
    """
    names = list(eta.names)
    for reg in eta.layout:
        if state.register(reg.name).dimension != reg.dimension:
            raise ShapeError('Relative state mismatch on %s' % reg.name)
    rest, amps = tensor_core.contract(
        state.layout, state.amplitudes, names, eta.amplitudes,
    )
    if not rest:
        raise AxisError('eta covers the whole state')
    norm = np.linalg.norm(amps)
    if norm < constants.ALGEBRA_TOL:
        raise NullRelativeState(
            'State has no component along the given %s state' % names
        )
    return tensor_core.StateVector(rest, amps / norm)


def schmidt(state, left):
    """
    Canonical representation over (left, rest). Coefficients are the
    Schmidt probabilities, descending, with the left states phase-oriented.
    """
    left_axes, right_axes = _split(state, left)
    left_regs = [state.layout[i] for i in left_axes]
    right_regs = [state.layout[i] for i in right_axes]
    m = state.tensor().transpose(left_axes + right_axes).reshape(
        tensor_core._product([reg.dimension for reg in left_regs]), -1,
    )
    u, s, vh = scipy.linalg.svd(m, full_matrices=False)
    keep = s > constants.ALGEBRA_TOL
    lefts = []
    rights = []
    for j in np.flatnonzero(keep):
        phi = u[:, j]
        oriented = tensor_core.canonical_phase(phi)
        phase = np.vdot(phi, oriented)
        lefts.append(oriented)
        rights.append(vh[j, :] * phase.conjugate())
    lam = s[keep] ** 2
    lam = lam / lam.sum()
    return SchmidtDecomposition(
        left_regs, right_regs, lam, np.array(lefts), np.array(rights),
    )


def _entropy(values):
    values = np.asarray(values, dtype=float)
    values = values[values > constants.LOG_FLOOR]
    return float(-np.sum(values * np.log(values)))


def canonical_correlation(state, left):
    return _entropy(schmidt(state, left).coefficients)


def density_information(rho):
    """
    Tr(rho ln rho), zero for pure states.
    """
    return -_entropy(rho.eigenvalues())


def _align(rho, family):
    if sorted(rho.names) != sorted(family.names):
        raise AxisError(
            'Family on %s does not act on %s' % (family.names, rho.names)
        )
    family = family.reordered(rho.names)
    if family.dimension != rho.matrix.shape[0]:
        raise ShapeError('Family does not fit the density matrix')
    return family


def operator_information(rho, A):
    """
    sum_i Tr(rho P_i) ln(Tr(rho P_i) / m_i).
    """
    A = _align(rho, A)
    total = 0.0
    for outcome in A.outcomes:
        p = np.trace(rho.matrix.dot(outcome.projector)).real
        if p > constants.LOG_FLOOR:
            total += p * np.log(p / outcome.multiplicity)
    return float(total)


def observable_correlation(state, A, B):
    """
    C_AB = I_AB - I_A - I_B, never above the canonical correlation of
    any bipartition separating A from B.
    """
    joint = classical_info.information(square_amplitude_joint(state, A, B))

    def marginal(family):
        if len(family.names) == len(state.names):
            rho = tensor_core.DensityMatrix.from_state(state)
        else:
            rho = tensor_core.reduced_density(state, family.names)
        return operator_information(rho, family)

    return joint - marginal(A) - marginal(B)


def process1_channel(rho, A):
    """
    Nonselective measurement rho -> sum_i P_i rho P_i.
    """
    A = _align(rho, A)
    out = sum(
        o.projector.dot(rho.matrix).dot(o.projector) for o in A.outcomes
    )
    out = (out + out.conj().T) / 2
    return tensor_core.DensityMatrix(rho.registers, out)


def edge_mass(probs, fraction=constants.EDGE_FRACTION):
    probs = np.asarray(probs, dtype=float)
    band = max(1, probs.size // fraction)
    return max(probs[:band].sum(), probs[-band:].sum())


def check_edges(probs, what='wave packet'):
    mass = edge_mass(probs)
    if mass > constants.EDGE_MASS:
        raise GridTooSmall(
            '%s carries %.3g of its weight near the grid edge' % (what, mass)
        )


def _grid_distribution(state, name):
    reg = state.register(name)
    if reg.kind != tensor_core.GRID:
        raise KindError('Register %s is not a grid' % name)
    if len(state.layout) == 1:
        probs = state.probabilities()
    else:
        axis = state.axis(name)
        probs = (np.abs(state.tensor()) ** 2).sum(
            axis=tuple(i for i in range(len(state.layout)) if i != axis)
        )
    return reg, probs


def grid_information(probs, width):
    """
    Differential information sum p ln(p / width).
    """
    probs = np.asarray(probs, dtype=float)
    mask = probs > constants.LOG_FLOOR
    return float(np.sum(probs[mask] * np.log(probs[mask] / width)))


def info_uncertainty(state, register=None):
    """
    (I_x, I_k) of a grid register, position and wavenumber. Their sum
    stays below ln(1/(pi e)) up to discretization error.
    """
    if register is None:
        grids = [
            reg.name for reg in state.layout if reg.kind == tensor_core.GRID
        ]
        if len(grids) != 1:
            raise KindError('Name the grid register to use, found %s' % grids)
        register = grids[0]
    reg, px = _grid_distribution(state, register)
    check_edges(px, 'position distribution')
    dual_state = tensor_core.fourier_dual(state, register)
    dual, pk = _grid_distribution(dual_state, register)
    check_edges(pk, 'wavenumber distribution')
    ix = grid_information(px, reg.width)
    ik = grid_information(pk, dual.width)
    logging.debug('I_x = %.12g, I_k = %.12g', ix, ik)
    return ix, ik


UNCERTAINTY_BOUND = -(1 + np.log(np.pi))
