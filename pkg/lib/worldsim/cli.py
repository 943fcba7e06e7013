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
import argparse
import json
import logging
import sys

from . import branching
from . import scenarios
from . import suites
from . import utils
from .errors import (
    ConfigError,
    ConfigParseError,
    MissingTree,
    UnknownSuite,
    WorldsimError,
)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_PARSE = 2
EXIT_CONFIG = 3
EXIT_UNKNOWN_SUITE = 4
EXIT_MISSING_TREE = 5


def _emit(text, path):
    if path is None:
        sys.stdout.write(text)
    else:
        scenarios.write_output(text, path)


def do_run(args):
    cfg = scenarios.load_config(args.config)
    scenarios.apply_overrides(cfg, args.set)
    if args.format is not None:
        cfg.output['format'] = args.format
    path = args.out if args.out is not None else cfg.output.get('path')
    report = scenarios.run_config(cfg)
    _emit(scenarios.render(report, cfg.output['format']), path)
    return EXIT_OK if scenarios.passed(report) else EXIT_FAILED


def do_verify(args):
    report = suites.verify(args.suite, args.seed, args.trials)
    _emit(utils.json_dumps(report), args.out)
    return EXIT_FAILED if report['failures'] else EXIT_OK


def do_export_tree(args):
    try:
        with open(args.report, encoding='utf-8') as f:
            report = json.load(f)
    except OSError as e:
        raise ConfigParseError(args.report, 1, 1, e.strerror or str(e))
    except json.JSONDecodeError as e:
        raise ConfigParseError(args.report, e.lineno, e.colno, e.msg)
    tree = scenarios.tree_of(report)
    if args.style == 'graphviz':
        text = branching.render_graphviz(tree)
    else:
        text = utils.json_dumps(tree)
    _emit(text, args.out)
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog='worldsim',
        description='Branching state-vector universes and their reports',
    )
    parser.add_argument(
        '--log-level', default=None,
        help='Logging level, overrides the log_level config key',
    )
    subparsers = parser.add_subparsers(dest='command')
    subparsers.required = True

    run = subparsers.add_parser('run', help='Run a scenario config')
    run.add_argument('config', help='Scenario config file')
    run.add_argument(
        '--set', action='append', default=[], metavar='KEY=VALUE',
        help='Override a config value, e.g. theta=0.5 or output.format=csv',
    )
    run.add_argument('--format', choices=scenarios.FORMATS, default=None)
    run.add_argument('--out', default=None, help='Report path')
    run.set_defaults(func=do_run)

    verify = subparsers.add_parser('verify', help='Run a seeded suite')
    verify.add_argument('suite', help='One of %s' % ', '.join(suites.names()))
    verify.add_argument('seed', type=int)
    verify.add_argument('--trials', type=int, default=None)
    verify.add_argument('--out', default=None)
    verify.set_defaults(func=do_verify)

    export = subparsers.add_parser(
        'export-tree', help='Render the world tree of a JSON report',
    )
    export.add_argument('report')
    export.add_argument(
        '--style', choices=('json', 'graphviz'), default='json',
    )
    export.add_argument('--out', default=None)
    export.set_defaults(func=do_export_tree)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    utils.setup_logging(args.log_level)
    try:
        return args.func(args)
    except ConfigParseError as e:
        logging.error('%s', e)
        return EXIT_PARSE
    except ConfigError as e:
        logging.error('Invalid value for %s: %s', e.field, e.message)
        return EXIT_CONFIG
    except UnknownSuite as e:
        logging.error('%s', e)
        return EXIT_UNKNOWN_SUITE
    except MissingTree as e:
        logging.error('%s', e)
        return EXIT_MISSING_TREE
    except WorldsimError as e:
        logging.error('%s', e)
        return EXIT_FAILED
