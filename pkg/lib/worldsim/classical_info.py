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
Joint, marginal and conditional distributions over labeled finite axes,
information (negative entropy, in nats) relative to optional information
measures, correlation between groups of axes, refinement, and the
continuous limit through nested dyadic partitions.
"""
import json
import logging

import numpy as np

from . import constants
from .errors import (
    AxisError,
    ConditionOnNull,
    GroupingError,
    NormError,
    PartitionError,
    ShapeError,
)


def _xlogy(p, q):
    """
    Elementwise p * ln(q) with 0 ln 0 = 0.
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    mask = p > constants.LOG_FLOOR
    out = np.zeros(np.broadcast(p, q).shape)
    out[mask] = p[mask] * np.log(np.broadcast_to(q, out.shape)[mask])
    return out


class FiniteDistribution(object):
    def __init__(self, axes, probs, measure_weights=None):
        axes = tuple((name, tuple(labels)) for name, labels in axes)
        if not axes:
            raise AxisError('A distribution needs at least one axis')
        names = [name for name, _ in axes]
        if len(set(names)) != len(names):
            raise AxisError('Axis names must be unique: %s' % names)
        shape = tuple(len(labels) for _, labels in axes)

        probs = np.array(probs, dtype=float)
        if probs.size != int(np.prod(shape)):
            raise ShapeError(
                'Expected %d probabilities, got %d' % (
                    int(np.prod(shape)), probs.size,
                )
            )
        probs = probs.reshape(shape)
        if probs.min() < -constants.ALGEBRA_TOL:
            raise NormError('Negative probability %.3g' % probs.min())
        probs = np.clip(probs, 0, None)
        total = probs.sum()
        if abs(total - 1) > constants.ALGEBRA_TOL:
            raise NormError('Probabilities sum to %.15g' % total)

        weights = self._check_weights(axes, measure_weights)
        probs.setflags(write=False)
        self._axes = axes
        self._probs = probs
        self._weights = weights

    @staticmethod
    def _check_weights(axes, measure_weights):
        if measure_weights is None:
            return None
        if isinstance(measure_weights, dict):
            measure_weights = [measure_weights.get(name) for name, _ in axes]
        measure_weights = list(measure_weights)
        if len(measure_weights) != len(axes):
            raise ShapeError('Need one measure weight vector per axis')
        weights = []
        for (name, labels), w in zip(axes, measure_weights):
            if w is None:
                weights.append(None)
                continue
            w = np.array(w, dtype=float).reshape(-1)
            if w.size != len(labels):
                raise ShapeError('Measure weights of %s mislabeled' % name)
            if not np.all(w > 0):
                raise NormError(
                    'Measure weights of %s must be positive' % name
                )
            w.setflags(write=False)
            weights.append(w)
        if all(w is None for w in weights):
            return None
        return tuple(weights)

    @classmethod
    def from_json(cls, obj):
        """
        {axes: [{name, labels}], probs: [...], measure_weights?: [...]},
        probs nested or flat row-major.
        """
        try:
            axes = [(ax['name'], ax['labels']) for ax in obj['axes']]
            probs = obj['probs']
        except (KeyError, TypeError) as e:
            raise ShapeError('Malformed distribution document: %s' % e)
        return cls(axes, probs, obj.get('measure_weights'))

    @classmethod
    def load(cls, path):
        with open(path) as f:
            return cls.from_json(json.load(f))

    def to_json_obj(self):
        obj = {
            'axes': [
                {'name': name, 'labels': list(labels)}
                for name, labels in self._axes
            ],
            'probs': self._probs.reshape(-1).tolist(),
        }
        if self._weights is not None:
            obj['measure_weights'] = [
                None if w is None else w.tolist() for w in self._weights
            ]
        return obj

    @property
    def axes(self):
        return self._axes

    @property
    def names(self):
        return tuple(name for name, _ in self._axes)

    @property
    def probs(self):
        return self._probs

    @property
    def measure_weights(self):
        return self._weights

    def axis(self, name):
        for i, (axis_name, _) in enumerate(self._axes):
            if axis_name == name:
                return i
        raise AxisError('No axis %s in %s' % (name, self.names))

    def labels(self, name):
        return self._axes[self.axis(name)][1]

    def weight_of(self, name):
        if self._weights is None:
            return None
        return self._weights[self.axis(name)]

    def without_weights(self):
        return FiniteDistribution(self._axes, self._probs)

    def measure(self):
        """
        Product of the per-axis information measures over the full grid.
        """
        total = np.ones(self._probs.shape)
        if self._weights is None:
            return total
        for i, w in enumerate(self._weights):
            if w is None:
                continue
            shape = [1] * len(self._axes)
            shape[i] = w.size
            total = total * w.reshape(shape)
        return total


def _axes_of(P, names):
    names = list(names)
    if not names:
        raise AxisError('No axes selected')
    axes = [P.axis(name) for name in names]
    if len(set(axes)) != len(axes):
        raise AxisError('Axis selected twice: %s' % names)
    return axes


def marginal(P, keep):
    keep_axes = sorted(_axes_of(P, keep))
    drop = tuple(i for i in range(len(P.axes)) if i not in keep_axes)
    probs = P.probs.sum(axis=drop) if drop else P.probs
    weights = None
    if P.measure_weights is not None:
        weights = [P.measure_weights[i] for i in keep_axes]
    return FiniteDistribution(
        [P.axes[i] for i in keep_axes],
        probs / probs.sum(),
        weights,
    )


def conditional(P, fixed):
    """
    Distribution of the remaining axes with the axes in `fixed`
    (name -> label) held at the given labels.
    """
    fixed = dict(fixed)
    if not fixed:
        raise AxisError('Nothing to condition on')
    index = [slice(None)] * len(P.axes)
    for name, label in fixed.items():
        axis = P.axis(name)
        labels = P.axes[axis][1]
        if label not in labels:
            raise AxisError('Label %r is not on axis %s' % (label, name))
        index[axis] = labels.index(label)
    rest = [i for i, ix in enumerate(index) if isinstance(ix, slice)]
    if not rest:
        raise AxisError('Every axis is fixed')

    block = P.probs[tuple(index)]
    total = block.sum()
    if total < constants.LOG_FLOOR:
        raise ConditionOnNull('P(%s) = 0' % (fixed, ))
    weights = None
    if P.measure_weights is not None:
        weights = [P.measure_weights[i] for i in rest]
    return FiniteDistribution(
        [P.axes[i] for i in rest], block / total, weights,
    )


def information(P):
    """
    I = sum P ln(P / measure); with unit measure I lies in [-ln m, 0].
    """
    return float(_xlogy(P.probs, P.probs).sum() - _xlogy(
        P.probs, P.measure()).sum())


def correlation(P, grouping):
    """
    C = I_joint - sum over groups of I_group, each group a list of axis
    names. The information measures cancel and are ignored.
    """
    groups = [list(group) for group in grouping]
    if len(groups) < 2:
        raise GroupingError('Correlation needs at least two groups')
    seen = []
    for group in groups:
        if not group:
            raise GroupingError('Empty group')
        seen.extend(group)
    if len(set(seen)) != len(seen):
        raise GroupingError('Groups overlap: %s' % groups)
    if sorted(seen) != sorted(P.names):
        raise GroupingError(
            'Groups %s do not cover axes %s' % (groups, P.names)
        )
    bare = P.without_weights()
    joint = information(bare)
    return joint - sum(
        information(marginal(bare, group)) for group in groups
    )


class Partition(object):
    """
    Map of source labels to block labels. Blocks are listed in order of
    first appearance unless given explicitly.
    """
    def __init__(self, mapping, blocks=None):
        mapping = dict(mapping)
        images = []
        for label in mapping:
            if mapping[label] not in images:
                images.append(mapping[label])
        if blocks is None:
            blocks = images
        blocks = list(blocks)
        if len(set(blocks)) != len(blocks):
            raise PartitionError('Repeated block labels')
        empty = [block for block in blocks if block not in images]
        if empty:
            raise PartitionError('Blocks %s have no members' % empty)
        stray = [image for image in images if image not in blocks]
        if stray:
            raise PartitionError('Labels mapped to unknown blocks %s' % stray)
        self._mapping = mapping
        self._blocks = tuple(blocks)

    @classmethod
    def identity(cls, labels):
        return cls(dict((label, label) for label in labels))

    @classmethod
    def from_blocks(cls, blocks):
        """
        Build from {block label: [source labels]}.
        """
        mapping = {}
        for block, members in blocks.items():
            for member in members:
                if member in mapping:
                    raise PartitionError(
                        'Label %r placed in two blocks' % (member, )
                    )
                mapping[member] = block
        return cls(mapping, list(blocks))

    @property
    def blocks(self):
        return self._blocks

    def block_of(self, label):
        try:
            return self._mapping[label]
        except KeyError:
            raise PartitionError('Label %r is not partitioned' % (label, ))

    def check(self, labels):
        labels = list(labels)
        missing = [label for label in labels if label not in self._mapping]
        if missing:
            raise PartitionError('Labels %s are not partitioned' % missing)
        extra = [label for label in self._mapping if label not in labels]
        if extra:
            raise PartitionError('Partition names unknown labels %s' % extra)

    def matrix(self, labels):
        """
        One-hot (len(labels) x len(blocks)) membership matrix.
        """
        self.check(labels)
        out = np.zeros((len(labels), len(self._blocks)))
        for i, label in enumerate(labels):
            out[i, self._blocks.index(self._mapping[label])] = 1
        return out


def coarsen(P, partitions):
    """
    Merge labels of the axes named in partitions (axis name -> Partition).
    Measure weights of a block are the summed weights of its members.
    """
    probs = P.probs
    axes = list(P.axes)
    weights = None
    if P.measure_weights is not None:
        weights = list(P.measure_weights)
    for name, partition in partitions.items():
        axis = P.axis(name)
        labels = list(P.axes[axis][1])
        member = partition.matrix(labels)
        probs = np.moveaxis(
            np.tensordot(probs, member, axes=([axis], [0])), -1, axis,
        )
        axes[axis] = (name, partition.blocks)
        if weights is not None and weights[axis] is not None:
            weights[axis] = weights[axis].dot(member)
    return FiniteDistribution(axes, probs / probs.sum(), weights)


def continuous_correlation(density, levels, cell_area=1.0):
    """
    Correlations C_1 <= ... <= C_levels of a density sampled on a uniform
    X x Y grid, the n-th evaluated on 2^n x 2^n nested dyadic blocks.
    Each grid side must be divisible by 2^levels.
    """
    density = np.asarray(density, dtype=float)
    if density.ndim != 2:
        raise ShapeError('Density must be sampled on a two axis grid')
    if levels < 1:
        raise PartitionError('At least one nesting level is needed')
    if density.min() < 0:
        raise NormError('Density is negative somewhere')
    total = density.sum() * cell_area
    if abs(total - 1) > constants.NORM_TOL:
        raise NormError('Density integrates to %.15g' % total)
    nx, ny = density.shape
    blocks = 2 ** levels
    if nx % blocks or ny % blocks:
        raise PartitionError(
            'Grid %dx%d cannot be split into %d dyadic blocks' % (
                nx, ny, blocks,
            )
        )

    cells = density / density.sum()
    sequence = []
    for level in range(1, levels + 1):
        side = 2 ** level
        coarse = cells.reshape(side, nx // side, side, ny // side).sum(
            axis=(1, 3)
        )
        P = FiniteDistribution(
            [('x', range(side)), ('y', range(side))], coarse,
        )
        sequence.append(correlation(P, [['x'], ['y']]))
    logging.debug('Nested correlations: %s', sequence)
    return sequence
