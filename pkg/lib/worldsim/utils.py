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
Helpers shared by sweeps, suites and the command line.
"""
import json
import logging
import logging.config
import os
import queue
import sys
import threading
import time

from . import config


def _worker(func, results):
    try:
        results.put((func(), None))
    except Exception:
        logging.exception('Worker %s failed', threading.current_thread().name)
        results.put((None, sys.exc_info()))


def bind_all(target, argss):
    return [(lambda args=args: target(*args)) for args in argss]


class VectorThread:
    """
    One thread per callable; join_all returns their values in the order the
    callables were given.
    """
    def __init__(self, targets, name='worldsim'):
        self.targets = targets
        self.name = name
        self._handles = []
        self._outcomes = None

    def start_all(self):
        for i, target in enumerate(self.targets):
            results = queue.Queue(maxsize=1)
            t = threading.Thread(
                target=_worker,
                args=(target, results),
                name='%s-%d' % (self.name, i),
            )
            t.start()
            self._handles.append((t, results))

    def join_all(self, raise_exceptions=True):
        if self._outcomes is None:
            for t, _ in self._handles:
                t.join()
            self._outcomes = [results.get() for _, results in self._handles]
        if raise_exceptions:
            for _, exc_info in self._outcomes:
                if exc_info is not None:
                    raise exc_info[1].with_traceback(exc_info[2])
        return [value for value, _ in self._outcomes]


def run_vector(target, argss, name='worldsim'):
    """
    Run target over every argument tuple in parallel, results in the order
    of argss.
    """
    vt = VectorThread(bind_all(target, argss), name=name)
    vt.start_all()
    return vt.join_all()


class RollbackContext(object):
    '''
    Undo actions run when the block exits, first registered by prependDefer
    first. An error raised by the block wins over an error raised by an
    undo; otherwise the earliest undo error is raised.

        with RollbackContext() as rollback:
            write_staging()
            rollback.prependDefer(remove_staging)
    '''
    def __init__(self):
        self._undo = []

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc_value, traceback):
        first_error = None
        for func, args, kwargs in self._undo:
            try:
                func(*args, **kwargs)
            except Exception:
                logging.debug('Undo %r failed', func, exc_info=True)
                if first_error is None:
                    first_error = sys.exc_info()
        if exc_type is None and first_error is not None:
            raise first_error[1].with_traceback(first_error[2])

    def defer(self, func, *args, **kwargs):
        self._undo.append((func, args, kwargs))

    def prependDefer(self, func, *args, **kwargs):
        self._undo.insert(0, (func, args, kwargs))

    def clear(self):
        del self._undo[:]


class EggTimer:
    """Wall clock budget in seconds, measured from entering the block."""
    def __init__(self, timeout):
        self.timeout = timeout
        self._start = None

    def __enter__(self):
        self._start = time.monotonic()
        return self

    def __exit__(self, *_):
        pass

    def seconds(self):
        return time.monotonic() - self._start

    def elapsed(self):
        return self.seconds() > self.timeout


def setup_logging(level=None):
    if level is None:
        level = config.get('log_level', 'info')
    logging.config.fileConfig(
        os.path.join(os.path.dirname(__file__), 'worldsim.log.conf'),
        defaults={'log_level': level.upper()},
        disable_existing_loggers=False,
    )


def json_dumps(obj):
    """Reports: sorted keys, four space indent, trailing newline."""
    return json.dumps(obj, indent=4, sort_keys=True) + '\n'
