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
Branch decomposition of a universe state.

A basis choice assigns a projector family to some registers. Every
nonzero joint outcome of those families is a branch: its label is the
outcome per family, its amplitude carries the square-amplitude weight, and
whatever the label does not fix (unlabeled registers, degenerate
outcomes) is kept as a normalized residual state.

Branch sets are layered into world trees whose edges carry the amplitude
a parent branch feeds into a child branch after one evolution step.
"""
import collections
import logging

import numpy as np

from . import classical_info
from . import constants
from . import tensor_core
from .errors import (
    AxisError,
    NormError,
    PartitionError,
    TreeError,
)
from .quantum_correlation import ProjectorFamily


def _fmt(x):
    return float('%.12g' % x)


def label_id(label):
    return ','.join('%s=%s' % (k, v) for k, v in label.items())


class Branch(object):
    def __init__(self, layout, label, amplitude, kets=(), residual=None,
                 id=None):
        self._layout = tuple(layout)
        self._label = collections.OrderedDict(label)
        self._amplitude = complex(amplitude)
        self._kets = tuple(kets)
        self._residual = residual
        self._id = id if id is not None else label_id(self._label)

    @property
    def id(self):
        return self._id

    @property
    def label(self):
        return self._label

    @property
    def amplitude(self):
        return self._amplitude

    @property
    def weight(self):
        return abs(self._amplitude) ** 2

    @property
    def residual(self):
        return self._residual

    @property
    def kets(self):
        return self._kets

    @property
    def layout(self):
        return self._layout

    def unit_vector(self):
        pieces = list(self._kets)
        if self._residual is not None:
            pieces.append((self._residual.names, self._residual.amplitudes))
        return tensor_core.assemble(self._layout, pieces)

    def vector(self):
        """
        amplitude * (label kets x residual) over the full layout.
        """
        return self._amplitude * self.unit_vector()

    def rephased(self, phase):
        """
        Same branch with kets scaled by phase and amplitude by its inverse.
        """
        phase = complex(phase)
        if not self._kets:
            return self
        names, ket = self._kets[0]
        kets = ((names, np.asarray(ket) * phase), ) + self._kets[1:]
        return Branch(
            self._layout, self._label, self._amplitude / phase, kets,
            self._residual, self._id,
        )

    def __repr__(self):
        return 'Branch(%s, w=%.6g)' % (self._id, self.weight)


class BranchSet(object):
    def __init__(self, layout, branches, pruned_mass=0.0, pruned_count=0):
        self._layout = tuple(layout)
        self._branches = tuple(branches)
        ids = [b.id for b in self._branches]
        if len(set(ids)) != len(ids):
            raise AxisError('Branch ids repeat: %s' % ids)
        total = sum(b.weight for b in self._branches) + pruned_mass
        if abs(total - 1) > constants.EIGEN_TOL:
            raise NormError('Branch weights sum to %.15g' % total)
        self._pruned_mass = float(pruned_mass)
        self._pruned_count = int(pruned_count)

    def __iter__(self):
        return iter(self._branches)

    def __len__(self):
        return len(self._branches)

    def __getitem__(self, id):
        for branch in self._branches:
            if branch.id == id:
                return branch
        raise KeyError(id)

    @property
    def layout(self):
        return self._layout

    @property
    def branches(self):
        return self._branches

    @property
    def ids(self):
        return tuple(b.id for b in self._branches)

    @property
    def pruned_mass(self):
        return self._pruned_mass

    @property
    def pruned_count(self):
        return self._pruned_count

    def rephased(self, phases):
        """
        Same set with each branch rephased by phases[id] (default 1).
        """
        return BranchSet(
            self._layout,
            [b.rephased(phases.get(b.id, 1)) for b in self._branches],
            self._pruned_mass, self._pruned_count,
        )

    def weights(self):
        return collections.OrderedDict(
            (b.id, b.weight) for b in self._branches
        )

    def total_weight(self):
        return sum(b.weight for b in self._branches)

    def reconstruct(self):
        """
        Superposition of all branches. Pruned components are lost, so the
        norm is checked at the NORM_TOL level only.
        """
        amps = sum(b.vector() for b in self._branches)
        return tensor_core.StateVector(
            self._layout, amps / np.linalg.norm(amps),
        )

    def orthogonality_defect(self):
        vectors = [b.unit_vector() for b in self._branches]
        worst = 0.0
        for i, u in enumerate(vectors):
            for v in vectors[i + 1:]:
                worst = max(worst, abs(np.vdot(u, v)))
        return worst

    def to_json_obj(self):
        return [
            {
                'id': b.id,
                'label': dict((k, str(v)) for k, v in b.label.items()),
                'weight': _fmt(b.weight),
                'amplitude_re': _fmt(b.amplitude.real),
                'amplitude_im': _fmt(b.amplitude.imag),
            }
            for b in self._branches
        ]


def _as_family(state, name, choice):
    if isinstance(choice, ProjectorFamily):
        return choice
    reg = state.register(name)
    if choice is None:
        return ProjectorFamily.computational(reg)
    labels, vectors = choice
    return ProjectorFamily.from_basis([reg], labels, vectors, name=name)


def _families(state, basis_choice):
    families = []
    seen = set()
    for name, choice in basis_choice.items():
        family = _as_family(state, name, choice)
        for reg in family.registers:
            if state.register(reg.name).dimension != reg.dimension:
                raise AxisError('Family %s does not fit %s' % (
                    family.name, reg.name,
                ))
            if reg.name in seen:
                raise AxisError('Register %s labeled twice' % reg.name)
            seen.add(reg.name)
        families.append(family)
    if not families:
        raise AxisError('Nothing to label')
    return families


def _outcome_weights(psi, families):
    """
    Weight of every joint outcome, psi shaped [d_f..., rest].
    """
    weights = np.abs(psi) ** 2
    weights = weights.sum(axis=-1)
    for axis, family in enumerate(families):
        member = np.zeros((family.dimension, len(family.outcomes)))
        for row, (i, v) in enumerate(family.adapted_basis()):
            member[row, i] = 1
        weights = np.moveaxis(
            np.tensordot(weights, member, axes=([axis], [0])), -1, axis,
        )
    return weights


def decompose(state, basis_choice):
    """
    Branch set of state under basis_choice, an ordered mapping from a
    register name to a ProjectorFamily (which may cover several
    registers), None for the computational basis, or a (labels, vectors)
    pair with vectors as rows.
    """
    families = _families(state, basis_choice)
    labeled = [name for family in families for name in family.names]
    rest = [name for name in state.names if name not in labeled]
    # raw reorder keeps the global phase of state
    _, amps = tensor_core.permute_amplitudes(
        state.layout, state.amplitudes, labeled + rest,
    )
    rest_regs = [state.register(name) for name in rest]
    psi = amps.reshape(
        [family.dimension for family in families] + [-1]
    )
    # basis rows of each family in adapted order
    bases = [
        np.array([v for _, v in family.adapted_basis()])
        for family in families
    ]
    coeffs = psi
    for axis, basis in enumerate(bases):
        coeffs = np.moveaxis(
            np.tensordot(basis.conj(), coeffs, axes=([1], [axis])), 0, axis,
        )
    weights = _outcome_weights(coeffs, families)

    light = weights < constants.ZERO_WEIGHT
    pruned_mass = float(weights[light].sum())
    pruned_count = int(light.sum())
    branches = [
        _branch(state.layout, families, rest_regs, psi, tuple(index))
        for index in np.argwhere(~light)
    ]
    logging.debug(
        'Decomposed %s into %d branches, pruned %d (mass %.3g)',
        state.names, len(branches), pruned_count, pruned_mass,
    )
    return BranchSet(state.layout, branches, pruned_mass, pruned_count)


def _branch(layout, families, rest_regs, psi, index):
    label = collections.OrderedDict()
    kets = []
    chi = psi
    residual_families = []
    # last axis first so earlier axis numbers stay valid
    for axis in reversed(range(len(families))):
        family = families[axis]
        outcome = family.outcomes[index[axis]]
        label[family.name] = outcome.label
        if outcome.multiplicity == 1:
            ket = family.vectors(outcome.label)[0]
            kets.append((family.names, ket))
            chi = np.tensordot(ket.conj(), chi, axes=([0], [axis]))
        else:
            chi = np.moveaxis(
                np.tensordot(outcome.projector, chi, axes=([1], [axis])),
                0, axis,
            )
            residual_families.append(family)
    label = collections.OrderedDict(reversed(list(label.items())))
    kets.reverse()
    residual_families.reverse()

    residual_regs = [
        reg for family in residual_families for reg in family.registers
    ] + list(rest_regs)
    if not residual_regs:
        return Branch(layout, label, complex(chi.reshape(())), kets)

    chi = chi.reshape(-1)
    norm = np.linalg.norm(chi)
    in_layout = [reg.name for reg in layout if reg in residual_regs]
    unit_layout, unit = tensor_core.permute_amplitudes(
        residual_regs, chi / norm, in_layout,
    )
    canon = tensor_core.canonical_phase(unit)
    amplitude = np.vdot(canon, unit) * norm
    residual = tensor_core.StateVector(unit_layout, canon)
    return Branch(layout, label, amplitude, kets, residual)


def rebase(state, bases):
    """
    decompose over alternative orthonormal per-register bases, each given
    as (labels, vectors) or as a ProjectorFamily.
    """
    choice = collections.OrderedDict()
    for name, basis in bases.items():
        if isinstance(basis, ProjectorFamily):
            choice[name] = basis
        else:
            labels, vectors = basis
            choice[name] = ProjectorFamily.from_basis(
                [state.register(name)], labels, vectors, name=name,
            )
    return decompose(state, choice)


def group(branch_set, blocks):
    """
    Merge branches. blocks is a Partition over branch ids or a callable
    mapping a branch to its block label. The merged branch keeps the label
    entries its members share; everything else moves to its residual.
    """
    if not isinstance(blocks, classical_info.Partition):
        members = collections.OrderedDict()
        for branch in branch_set:
            members.setdefault(blocks(branch), []).append(branch)
    else:
        blocks.check(branch_set.ids)
        members = collections.OrderedDict(
            (block, []) for block in blocks.blocks
        )
        for branch in branch_set:
            members[blocks.block_of(branch.id)].append(branch)

    layout = branch_set.layout
    grouped = []
    for block, branches in members.items():
        if not branches:
            raise PartitionError('Block %r has no branches' % (block, ))
        grouped.append(_merge(layout, block, branches))
    return BranchSet(
        layout, grouped, branch_set.pruned_mass, branch_set.pruned_count,
    )


def _common_kets(branches):
    first = branches[0]
    common = []
    shared_label = collections.OrderedDict()
    for key, value in first.label.items():
        if all(b.label.get(key) == value for b in branches[1:]):
            shared_label[key] = value
    for names, ket in first.kets:
        same = True
        for b in branches[1:]:
            match = [k for n, k in b.kets if n == names]
            if not match or not np.allclose(
                    match[0], ket, atol=constants.ALGEBRA_TOL):
                same = False
                break
        if same:
            common.append((names, ket))
    return shared_label, common


def _merge(layout, block, branches):
    if len(branches) == 1:
        b = branches[0]
        return Branch(layout, b.label, b.amplitude, b.kets, b.residual,
                      id=str(block))
    label, kets = _common_kets(branches)
    v = sum(b.vector() for b in branches)
    names = [name for ket_names, _ in kets for name in ket_names]
    chi_layout = layout
    chi = v
    for ket_names, ket in kets:
        chi_layout, chi = tensor_core.contract(
            chi_layout, chi, ket_names, ket,
        )
    norm = np.linalg.norm(chi)
    if not chi_layout:
        return Branch(layout, label, complex(chi.reshape(())), kets,
                      id=str(block))
    canon = tensor_core.canonical_phase(chi / norm)
    amplitude = np.vdot(canon, chi)
    residual = tensor_core.StateVector(chi_layout, canon)
    logging.debug('Merged %d branches into %s over %s',
                  len(branches), block, names)
    return Branch(layout, label, amplitude, kets, residual, id=str(block))


class Layer(object):
    def __init__(self, step, branch_set, parents):
        self.step = step
        self.branch_set = branch_set
        # child id -> [(parent id, amplitude)]
        self.parents = parents


class WorldTree(object):
    def __init__(self, layers=()):
        self._layers = tuple(layers)

    @property
    def layers(self):
        return self._layers

    def __len__(self):
        return len(self._layers)

    def leaves(self):
        if not self._layers:
            return ()
        return self._layers[-1].branch_set.branches

    def to_json_obj(self):
        steps = []
        for layer in self._layers:
            branches = []
            for b in sorted(layer.branch_set, key=lambda b: b.id):
                parents = sorted(layer.parents.get(b.id, ()))
                branches.append({
                    'id': b.id,
                    'label': dict((k, str(v)) for k, v in b.label.items()),
                    'weight': _fmt(b.weight),
                    'parents': [
                        {
                            'id': pid,
                            'amplitude_re': _fmt(amp.real),
                            'amplitude_im': _fmt(amp.imag),
                        }
                        for pid, amp in parents
                    ],
                })
            steps.append({'name': layer.step, 'branches': branches})
        return {'steps': steps}


def extend_tree(tree, step, parent_map, branch_set):
    """
    New tree with one more layer. parent_map maps child id to a list of
    (parent id, amplitude) pairs; the first layer takes no parents.
    """
    parent_map = dict(parent_map or {})
    if not tree.layers:
        if parent_map:
            raise TreeError('The first layer cannot have parents')
        return WorldTree([Layer(step, branch_set, {})])

    previous = tree.layers[-1].branch_set
    known = set(previous.ids)
    children = set(branch_set.ids)
    fed = collections.defaultdict(float)
    split = collections.defaultdict(lambda: True)
    for child, edges in parent_map.items():
        if child not in children:
            raise TreeError('Unknown child %s in step %s' % (child, step))
        for pid, amp in edges:
            if pid not in known:
                raise TreeError(
                    'Dangling parent %s for %s in step %s' % (pid, child, step)
                )
            fed[pid] += abs(amp) ** 2
            split[pid] = split[pid] and len(edges) == 1
    # only pure splits conserve weight; merging children may interfere
    for pid in fed:
        if not split[pid]:
            continue
        if abs(fed[pid] - previous[pid].weight) > constants.EIGEN_TOL:
            raise TreeError(
                'Branch %s of weight %.12g feeds %.12g into step %s' % (
                    pid, previous[pid].weight, fed[pid], step,
                )
            )
    parents = dict(
        (child, sorted((pid, complex(amp)) for pid, amp in edges))
        for child, edges in parent_map.items()
    )
    return WorldTree(tree.layers + (Layer(step, branch_set, parents), ))


def parent_map(previous, evolve_fn, current):
    """
    Edges from each branch of previous to each branch of current: the
    amplitude of the child's unit vector in the evolved parent component.
    evolve_fn maps an amplitude array over the layout to its image.
    """
    units = [(c.id, c.unit_vector()) for c in current]
    images = [(p.id, evolve_fn(p.vector())) for p in previous]
    # current may sit at another global phase than the raw images
    overlap = np.vdot(
        sum(image for _, image in images), sum(c.vector() for c in current),
    )
    phase = 1.0
    if abs(overlap) > constants.ALGEBRA_TOL:
        phase = overlap / abs(overlap)
    edges = collections.defaultdict(list)
    for pid, image in images:
        image = phase * image
        for cid, u in units:
            amp = complex(np.vdot(u, image))
            if abs(amp) ** 2 > constants.ZERO_WEIGHT:
                edges[cid].append((pid, amp))
    return dict(edges)


def rephasing_invariant(previous, evolve_fn, current, phases):
    """
    Whether rephasing the branches of current leaves their weights and the
    parent edge magnitudes unchanged.
    """
    moved = current.rephased(phases)
    tol = constants.ALGEBRA_TOL
    for b in current:
        if abs(moved[b.id].weight - b.weight) > tol:
            return False
        if np.abs(moved[b.id].vector() - b.vector()).max() > tol:
            return False

    def magnitudes(edges):
        return dict(
            ((cid, pid), abs(amp))
            for cid, pairs in edges.items() for pid, amp in pairs
        )

    before = magnitudes(parent_map(previous, evolve_fn, current))
    after = magnitudes(parent_map(previous, evolve_fn, moved))
    return set(before) == set(after) and all(
        abs(before[k] - after[k]) < tol for k in before
    )


def interference(tree):
    """
    Per step, the children fed by more than one parent.
    """
    return [
        (layer.step, sorted(
            cid for cid, edges in layer.parents.items() if len(edges) > 1
        ))
        for layer in tree.layers
    ]


def render_graphviz(tree_obj):
    lines = ['digraph worlds {', '    rankdir=LR;']
    for i, step in enumerate(tree_obj['steps']):
        for b in step['branches']:
            node = '%d:%s' % (i, b['id'])
            shape = 'doublecircle' if len(b['parents']) > 1 else 'ellipse'
            lines.append('    "%s" [label="%s\\n%s\\nw=%.12g", shape=%s];' % (
                node, step['name'], b['id'], b['weight'], shape,
            ))
            for p in b['parents']:
                lines.append('    "%d:%s" -> "%s" [label="%.12g%+.12gi"];' % (
                    i - 1, p['id'], node, p['amplitude_re'],
                    p['amplitude_im'],
                ))
    lines.append('}')
    return '\n'.join(lines) + '\n'
