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

# algebraic identities (unitarity, hermiticity, traces)
ALGEBRA_TOL = 1e-12
# eigen-decompositions, projector families, branch-set sums
EIGEN_TOL = 1e-10
# accepted deviation of a user supplied norm before renormalizing
NORM_TOL = 1e-10
# branches lighter than this are pruned
ZERO_WEIGHT = 1e-12
# probabilities below this are exact zeros for 0 ln 0
LOG_FLOOR = 1e-300

# wave packets must keep less than EDGE_MASS in the outer
# 1/EDGE_FRACTION of a grid, on either side
EDGE_FRACTION = 16
EDGE_MASS = 1e-9

DEFAULT_MAX_BRANCHES = 2 ** 20
MAX_SPINS = 20
# above this spin runs are tallied per up-count instead of per branch
EXPLICIT_SPIN_BRANCHES = 2 ** 12
MAX_ATOMS = 20
DEFAULT_SUITE_BUDGET = 30

SYSTEM_CONFIG_DIR = '/etc/worldsim.d'
