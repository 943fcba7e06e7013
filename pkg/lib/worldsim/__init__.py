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
worldsim: state-vector universes decomposed into branches, with the
information and correlation measures used to read them.
"""
from . import branching
from . import classical_info
from . import config
from . import errors
from . import paths
from . import quantum_correlation
from . import tensor_core
from . import utils

__all__ = [
    'branching',
    'classical_info',
    'config',
    'errors',
    'paths',
    'quantum_correlation',
    'tensor_core',
    'utils',
]

__version__ = '0.1.0'
