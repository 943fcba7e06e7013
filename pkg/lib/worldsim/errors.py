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


class WorldsimError(RuntimeError):
    pass


class NameCollision(WorldsimError):
    pass


class ShapeError(WorldsimError):
    pass


class NotUnitary(WorldsimError):
    pass


class UseOuterProductInstead(WorldsimError):
    pass


class KindError(WorldsimError):
    pass


class AxisError(WorldsimError):
    pass


class ConditionOnNull(WorldsimError):
    pass


class GroupingError(WorldsimError):
    pass


class PartitionError(WorldsimError):
    pass


class NormError(WorldsimError):
    pass


class SubsystemOverlap(WorldsimError):
    pass


class NullRelativeState(WorldsimError):
    pass


class GridTooSmall(WorldsimError):
    pass


class BasisError(WorldsimError):
    pass


class TreeError(WorldsimError):
    pass


class AlphabetError(WorldsimError):
    pass


class DegenerateObservable(WorldsimError):
    pass


class UnknownObserver(WorldsimError):
    pass


class EmptyNotebook(WorldsimError):
    pass


class SizeError(WorldsimError):
    pass


class ParamError(WorldsimError):
    pass


class AlignmentError(WorldsimError):
    pass


class ConfigError(WorldsimError):
    """
    Invalid scenario configuration. `field` is the dotted path of the
    offending value, e.g. 'params.theta'.
    """
    def __init__(self, field, message):
        super(ConfigError, self).__init__('%s: %s' % (field, message))
        self.field = field
        self.message = message


class ConfigParseError(WorldsimError):
    def __init__(self, path, line, column, message):
        super(ConfigParseError, self).__init__(
            '%s:%d:%d: %s' % (path, line, column, message)
        )
        self.path = path
        self.line = line
        self.column = column


class UnknownSuite(WorldsimError):
    pass


class MissingTree(WorldsimError):
    pass
