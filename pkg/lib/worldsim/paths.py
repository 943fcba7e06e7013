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
import os


class Paths(object):
    def __init__(self, prefix):
        self._prefix = prefix

    def prefix(self):
        return self._prefix

    def _prefixed(self, *args):
        return os.path.join(self.prefix(), *args)

    def resolve(self, path):
        if os.path.isabs(path):
            return path
        return self._prefixed(path)

    def lock(self, path):
        return '%s.lock' % path

    def staging(self, path):
        return '%s.tmp' % path
