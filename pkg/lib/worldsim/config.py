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
Layered worldsim settings.

A key is looked up in the environment (WORLDSIM_OUTPUT_DIR only), then in
the user file ~/.worldsim, then in the *.conf files of /etc/worldsim.d, all
under a [worldsim] section. The first source holding the key wins and its
value is cached for the life of the process.
"""
import configparser
import functools
import glob
import logging
import os

from . import constants

SECTION = 'worldsim'
ENV_PREFIX = 'WORLDSIM_'

_SYSTEM_CONFIG_DIR = constants.SYSTEM_CONFIG_DIR
_USER_CONFIG = os.path.join(os.path.expanduser('~'), '.worldsim')

# the only keys the environment may set
_ENV_KEYS = ('output_dir', )


def _get_environ():
    return os.environ


def _get_from_env(key):
    if key not in _ENV_KEYS:
        raise KeyError(key)
    return _get_environ()[ENV_PREFIX + key.upper()]


def _get_from_files(paths, key):
    parser = configparser.ConfigParser(interpolation=None)
    parser.read(paths, encoding='utf-8')
    try:
        return parser.get(SECTION, key)
    except configparser.Error:
        raise KeyError(key)


def _get_from_dir(path, key):
    # read in name order, so 20-local.conf overrides 10-defaults.conf
    return _get_from_files(sorted(glob.glob(os.path.join(path, '*.conf'))), key)


def _get_providers():
    return [
        ('environment', _get_from_env),
        (_USER_CONFIG, functools.partial(_get_from_files, [_USER_CONFIG])),
        (
            _SYSTEM_CONFIG_DIR,
            functools.partial(_get_from_dir, _SYSTEM_CONFIG_DIR),
        ),
    ]

_cache = {}
_GET_DEFAULT = object()


def get(key, default=_GET_DEFAULT):
    if key in _cache:
        return _cache[key]

    for source, provider in _get_providers():
        try:
            val = provider(key)
        except KeyError:
            continue
        logging.debug('Config key %s=%r from %s', key, val, source)
        _cache[key] = val
        return val

    if default is _GET_DEFAULT:
        raise KeyError(key)
    return default


def get_int(key, default=_GET_DEFAULT):
    val = get(key, default)
    try:
        return int(val)
    except (TypeError, ValueError):
        raise ValueError('Config key %s is not an integer: %r' % (key, val))
