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
import json
import logging
import threading
import time

import pytest

import worldsim.utils as utils


def test_run_vector_keeps_order():
    def slow_square(x, delay):
        time.sleep(delay)
        return x * x

    results = utils.run_vector(
        slow_square, [(1, 0.05), (2, 0.0), (3, 0.02)],
    )
    assert results == [1, 4, 9]


def test_vector_thread_reraises():
    def boom():
        raise ValueError('boom')

    vt = utils.VectorThread([lambda: 1, boom])
    vt.start_all()
    with pytest.raises(ValueError):
        vt.join_all()


def test_vector_thread_collects_without_raising():
    def boom():
        raise ValueError('boom')

    vt = utils.VectorThread([lambda: 1, boom])
    vt.start_all()
    assert vt.join_all(raise_exceptions=False) == [1, None]


def test_rollback_runs_in_order_on_failure():
    calls = []
    with pytest.raises(RuntimeError):
        with utils.RollbackContext() as rollback:
            rollback.defer(calls.append, 'second')
            rollback.prependDefer(calls.append, 'first')
            raise RuntimeError('step failed')
    assert calls == ['first', 'second']


def test_rollback_clear():
    calls = []
    with utils.RollbackContext() as rollback:
        rollback.defer(calls.append, 'undo')
        rollback.clear()
    assert calls == []


def test_rollback_raises_undo_error():
    def bad_undo():
        raise OSError('undo failed')

    with pytest.raises(OSError):
        with utils.RollbackContext() as rollback:
            rollback.defer(bad_undo)


def test_egg_timer():
    with utils.EggTimer(0) as timer:
        time.sleep(0.01)
    assert timer.elapsed()
    assert timer.seconds() > 0
    with utils.EggTimer(3600) as timer:
        pass
    assert not timer.elapsed()


def test_json_dumps_is_stable():
    text = utils.json_dumps({'b': 1, 'a': [1.5, 2]})
    assert text.endswith('\n')
    assert text.index('"a"') < text.index('"b"')
    assert text == utils.json_dumps({'a': [1.5, 2], 'b': 1})
    assert json.loads(text) == {'a': [1.5, 2], 'b': 1}


def test_setup_logging_level():
    utils.setup_logging('warning')
    assert logging.getLogger().level == logging.WARNING
    utils.setup_logging('debug')
    assert logging.getLogger().level == logging.DEBUG


def test_vector_threads_are_named():
    names = utils.run_vector(
        lambda: threading.current_thread().name, [(), ()], name='sweep',
    )
    assert names == ['sweep-0', 'sweep-1']
