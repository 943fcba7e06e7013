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
Scenario configs, the scenario registry and report output.

A config is an INI file:

    [scenario]
    name = mzi
    seed = 42

    [params]
    theta = 1.5707963267948966
    mode = PI

    [sweep]
    param = theta
    values = [0, 1.0471975511965976, 3.141592653589793]

    [output]
    format = json
    path = mzi.json

Values are JSON literals; anything that does not look like one is taken as
a bare string.
"""
import collections
import configparser
import csv
import fractions
import io
import json
import logging
import math
import os
import re

import lockfile
import numpy as np

from . import branching
from . import config
from . import constants
from . import geiger
from . import mzi
from . import observers
from . import paths
from . import pointer
from . import stern_gerlach
from . import tensor_core
from . import utils
from .errors import (
    ConfigError,
    ConfigParseError,
    MissingTree,
    NormError,
    WorldsimError,
)

FORMATS = ('json', 'csv', 'tree')


def _round(x):
    return float('%.12g' % x)


def clean(obj):
    """
    JSON-ready copy with floats at 12 significant digits.
    """
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _round(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return {'re': _round(obj.real), 'im': _round(obj.imag)}
    if isinstance(obj, np.ndarray):
        return [clean(x) for x in obj.tolist()]
    if isinstance(obj, dict):
        return dict((str(k), clean(v)) for k, v in obj.items())
    if isinstance(obj, (list, tuple)):
        return [clean(x) for x in obj]
    if isinstance(obj, fractions.Fraction):
        return str(obj)
    return obj


class Param(object):
    def __init__(self, convert, default=None):
        self.convert = convert
        self.default = default


def _float(value):
    if isinstance(value, bool):
        raise ValueError('expected a number')
    value = float(value)
    if not math.isfinite(value):
        raise ValueError('expected a finite number')
    return value


def _optional_float(value):
    return None if value is None else _float(value)


def _int(value):
    if isinstance(value, bool) or int(value) != value:
        raise ValueError('expected an integer')
    return int(value)


def _bool(value):
    if isinstance(value, bool):
        return value
    if value in ('true', 'yes', 'on', '1', 1):
        return True
    if value in ('false', 'no', 'off', '0', 0):
        return False
    raise ValueError('expected a boolean')


def _complex(value):
    """
    A number, a [re, im] pair or a Python complex literal such as 0.6j.
    """
    if isinstance(value, bool):
        raise ValueError('expected a number')
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise ValueError('expected [re, im]')
        return complex(_float(value[0]), _float(value[1]))
    return complex(value)


def _complex_list(value):
    if not isinstance(value, (list, tuple)):
        raise ValueError('expected a list')
    return [_complex(v) for v in value]


def _float_list(value):
    if not isinstance(value, (list, tuple)):
        value = [value]
    return [_float(v) for v in value]


def _choice(*options):
    def convert(value):
        if value not in options:
            raise ValueError('expected one of %s' % (list(options), ))
        return value
    return convert


def _validate(name, schema, raw):
    params = collections.OrderedDict()
    unknown = sorted(set(raw) - set(schema))
    if unknown:
        raise ConfigError(
            'params.%s' % unknown[0],
            'unknown parameter of scenario %s' % name,
        )
    for key, param in schema.items():
        if key not in raw:
            params[key] = param.default
            continue
        try:
            params[key] = param.convert(raw[key])
        except (TypeError, ValueError) as e:
            raise ConfigError('params.%s' % key, str(e))
    return params


def _assertion(name, passed):
    return {'name': name, 'pass': bool(passed)}


def _exact_weights(weights):
    out = []
    for w in weights:
        guess = fractions.Fraction(w).limit_denominator(1 << 20)
        if abs(float(guess) - w) > constants.ALGEBRA_TOL:
            return None
        out.append(guess)
    return out


def _branch_rows(branch_set):
    return [[b.id, b.weight] for b in branch_set]


def _mzi_params(params):
    kwargs = dict(
        theta=params['theta'], mode=params['mode'],
        dp_detector=params['dp_detector'],
    )
    if params['mode'] == mzi.GENERAL:
        kwargs.update(alpha=params['alpha'], a=params['a'], k=params['k'])
    return mzi.MziParams(**kwargs)


def run_mzi(params):
    try:
        p = _mzi_params(params)
    except WorldsimError as e:
        raise ConfigError('params', str(e))
    run = mzi.mzi_run(p)
    final = run.final
    weights = [b.weight for b in final]
    tol = constants.ALGEBRA_TOL
    assertions = [
        _assertion('total_weight', abs(final.total_weight() +
                                       final.pruned_mass - 1) < 1e-10),
        _assertion('reconstruction', run.checks['reconstruction'] < 1e-10),
        _assertion('orthogonal', run.checks['orthogonality'] < 1e-10),
        _assertion('phase_invariance', run.checks['phase_invariance']),
    ]
    if 'closed_form' in run.checks:
        assertions.append(
            _assertion('closed_form', run.checks['closed_form'] < 1e-10)
        )
    if p.mode == mzi.PS or p.dp_detector:
        assertions.append(_assertion('four_equal_worlds', len(final) == 4 and
                                     all(abs(w - 0.25) < tol
                                         for w in weights)))
    elif p.mode == mzi.PI:
        half = p.theta / 2
        assertions.append(_assertion('detector_weights', (
            abs(run.detector_weights['DH'] - math.cos(half) ** 2) < tol and
            abs(run.detector_weights['DV'] - math.sin(half) ** 2) < tol
        )))
    elif 0 < p.alpha < 1:
        assertions.append(_assertion('seven_worlds', len(final) == 7))

    quantities = collections.OrderedDict([
        ('alpha', p.alpha),
        ('detector_weights', run.detector_weights),
        ('checks', run.checks),
        ('interference', branching.interference(run.tree)),
        ('pruned_mass', final.pruned_mass),
    ])
    if run.worlds is not None:
        quantities['worlds'] = run.worlds
    report = {
        'branches': final.to_json_obj(),
        'quantities': quantities,
        'assertions': assertions,
        'table': {'columns': ['id', 'weight'], 'rows': _branch_rows(final)},
        'tree': run.tree.to_json_obj(),
    }
    rational = p.mode == mzi.PS or p.dp_detector or (
        p.mode == mzi.PI and any(
            abs(p.theta - v) < 1e-15 for v in (0, math.pi / 2, math.pi))
    )
    if rational:
        exact = _exact_weights(weights)
        if exact is not None:
            report['rational_weights'] = dict(
                (b.id, str(w)) for b, w in zip(final, exact)
            )
    return report


def run_rebase(params):
    alpha = params['alpha']
    if not 0 <= alpha <= 1:
        raise ConfigError('params.alpha', 'must lie in [0, 1]')
    out = mzi.rebase_approximate_measurement(alpha)
    expected = out['expected']
    conditional = collections.OrderedDict()
    fidelity_ok = True
    for label, info in out['conditional'].items():
        if info is None:
            conditional[label] = None
            continue
        conditional[label] = collections.OrderedDict([
            ('fidelity', info['fidelity']),
            ('coefficients', info['coefficients']),
        ])
        fidelity_ok = fidelity_ok and abs(
            info['fidelity'] - expected['fidelity']) < 1e-10
    assertions = [
        _assertion('conditional_fidelity', fidelity_ok),
        _assertion('donald_bound', out['correlation'] <=
                   out['canonical_correlation'] + 1e-9),
    ]
    if alpha == 0:
        assertions.append(_assertion(
            'perfect_correlation',
            abs(out['correlation'] - math.log(2)) < 1e-10,
        ))
    branches = out['branches']
    return {
        'branches': branches.to_json_obj(),
        'quantities': collections.OrderedDict([
            ('conditional', conditional),
            ('expected', expected),
            ('correlation', out['correlation']),
            ('canonical_correlation', out['canonical_correlation']),
            ('schmidt_degenerate', out['schmidt_degenerate']),
        ]),
        'assertions': assertions,
        'table': {'columns': ['id', 'weight'],
                  'rows': _branch_rows(branches)},
    }


def run_spins(params):
    try:
        run = observers.repeated_spin_run(
            params['n'], params['a'], params['b'],
        )
    except WorldsimError as e:
        raise ConfigError('params', str(e))
    n = params['n']
    p = abs(params['a']) ** 2
    binomial = [
        math.comb(n, m) * p ** m * (1 - p) ** (n - m) for m in range(n + 1)
    ]
    got = list(run.grouped.values())
    assertions = [
        _assertion('branch_count', run.branch_count == 2 ** n),
        _assertion('binomial', all(
            abs(g - w) < constants.ALGEBRA_TOL for g, w in zip(got, binomial)
        )),
    ]
    report = {
        'branches': [
            {'id': 'm=%d' % m, 'weight': w} for m, w in run.grouped.items()
        ],
        'quantities': collections.OrderedDict([
            ('branch_count', run.branch_count),
            ('zero_weight', run.zero_weight),
        ]),
        'assertions': assertions,
        'table': {
            'columns': ['m', 'weight'],
            'rows': [[m, w] for m, w in run.grouped.items()],
        },
    }
    if run.exact is not None:
        report['rational_weights'] = dict(
            ('m=%d' % m, str(w)) for m, w in run.exact.items()
        )
    return report


def run_observers(params):
    case = params['case']
    case_params = dict(
        (k, v) for k, v in params.items() if k != 'case' and v is not None
    )
    _, out = observers.multi_observer_case(case, case_params)
    return {
        'branches': out['branches'],
        'quantities': {'case': case},
        'assertions': out['assertions'],
        'table': {
            'columns': ['memories', 'weight'],
            'rows': [
                [' '.join('%s%s' % (k, v) for k, v in sorted(
                    b['memories'].items())), b['weight']]
                for b in out['branches']
            ],
        },
    }


def _profile(kind, width, center=0.0):
    if kind == 'uniform':
        return lambda x: 1.0
    if kind == 'delta':
        return lambda x: 1.0 if abs(x - center) < 1e-9 else 0.0
    return lambda x: math.exp(-(x - center) ** 2 / (2 * width ** 2))


def run_pointer(params):
    q = tensor_core.Register.grid('q', params['q_cells'], params['q_width'])
    r = tensor_core.Register.grid('r', params['r_cells'], params['r_width'])
    center = r.positions()[r.dimension // 2]
    try:
        p = pointer.PointerParams(
            q, _profile(params['phi'], params['phi_width']),
            r, _profile(params['eta'], params['eta_width'], center),
            params['times'],
        )
        run = pointer.von_neumann_run(p)
    except WorldsimError as e:
        raise ConfigError('params', str(e))
    rows = run.rows
    assertions = [
        _assertion('initially_uncorrelated', rows[0]['t'] > 0 or
                   abs(rows[0]['C']) < 1e-10),
        _assertion('I_q_constant', run.criterion['I_q_constant']),
    ]
    if params['eta'] == 'delta' and any(row['t'] > 0 for row in rows):
        assertions.append(_assertion(
            'generates_measurement', run.criterion['generates_measurement'],
        ))
    return {
        'branches': [],
        'quantities': collections.OrderedDict([
            ('rows', rows), ('criterion', run.criterion),
        ]),
        'assertions': assertions,
        'table': {
            'columns': ['t', 'C', 'I_q', 'I_r'],
            'rows': [list(row.values()) for row in rows],
        },
    }


def run_stern_gerlach(params):
    try:
        p = stern_gerlach.SternGerlachParams(**params)
        run = stern_gerlach.stern_gerlach_run(p)
    except WorldsimError as e:
        raise ConfigError('params', str(e))
    rows = run.rows
    assertions = [_assertion('correlation_fixed_by_coupling', all(
        abs(row['canonical_correlation'] -
            rows[0]['canonical_correlation']) < 1e-9
        for row in rows
    ))]
    if run.fidelity is not None:
        assertions.append(
            _assertion('recombination', run.fidelity >= 1 - 1e-10)
        )
    return {
        'branches': [],
        'quantities': collections.OrderedDict([
            ('wavenumbers', run.wavenumbers),
            ('rows', rows),
            ('fidelity', run.fidelity),
        ]),
        'assertions': assertions,
        'table': {
            'columns': list(rows[0]),
            'rows': [list(row.values()) for row in rows],
        },
    }


def run_geiger(params):
    try:
        run = geiger.geiger_run(
            params['n_atoms'], params['c'], params['b'],
            params['threshold'], (params['band_low'], params['band_high']),
            params['epsilon'],
        )
    except WorldsimError as e:
        raise ConfigError('params', str(e))
    b2 = abs(params['b']) ** 2
    assertions = [
        _assertion('bimodal', run.bimodal),
        _assertion('particle_weight', abs(run.particle['in'] - b2) < 1e-10),
    ]
    if params['c'] == 1:
        assertions.append(_assertion('grouped_weights', (
            abs(run.grouped['U'] - (1 - b2)) < 1e-10 and
            abs(run.grouped['D'] - b2) < 1e-10
        )))
        assertions.append(_assertion('counter_tracks_particle', (
            abs(run.grouped['D'] - run.particle['in']) < 1e-10
        )))
    return {
        'branches': [
            {'id': k, 'weight': w} for k, w in run.grouped.items()
        ],
        'quantities': collections.OrderedDict([
            ('microstates', len(run.microstates)),
            ('medium_mass', run.medium_mass),
            ('particle_in', run.particle['in']),
        ]),
        'assertions': assertions,
        'table': {
            'columns': ['group', 'weight'],
            'rows': [[k, w] for k, w in run.grouped.items()],
        },
    }


Scenario = collections.namedtuple('Scenario', 'schema run')

_SCENARIOS = {
    'mzi': Scenario(collections.OrderedDict([
        ('theta', Param(_float, 0.0)),
        ('mode', Param(_choice(*mzi.MODES), mzi.PI)),
        ('alpha', Param(_optional_float)),
        ('a', Param(_optional_float)),
        ('k', Param(_optional_float)),
        ('dp_detector', Param(_bool, False)),
    ]), run_mzi),
    'rebase': Scenario(collections.OrderedDict([
        ('alpha', Param(_float, 0.0)),
    ]), run_rebase),
    'spins': Scenario(collections.OrderedDict([
        ('n', Param(_int, 2)),
        ('a', Param(_complex, 1 / math.sqrt(2))),
        ('b', Param(_complex, 1 / math.sqrt(2))),
    ]), run_spins),
    'observers': Scenario(collections.OrderedDict([
        ('case', Param(_int, 1)),
        ('amplitudes', Param(_complex_list,
                             [1 / math.sqrt(2), 1 / math.sqrt(2)])),
        ('notebook', Param(_bool, False)),
        ('first', Param(str)),
        ('second', Param(str)),
    ]), run_observers),
    'pointer': Scenario(collections.OrderedDict([
        ('q_cells', Param(_int, 8)),
        ('q_width', Param(_float, 1.0)),
        ('r_cells', Param(_int, 64)),
        ('r_width', Param(_float, 1.0)),
        ('phi', Param(_choice('uniform', 'gaussian'), 'uniform')),
        ('phi_width', Param(_float, 1.0)),
        ('eta', Param(_choice('delta', 'gaussian'), 'delta')),
        ('eta_width', Param(_float, 1.0)),
        ('times', Param(_float_list, [0.0, 1.0])),
    ]), run_pointer),
    'stern_gerlach': Scenario(collections.OrderedDict([
        ('c1', Param(_complex, 1 / math.sqrt(2))),
        ('c2', Param(_complex, 1 / math.sqrt(2))),
        ('cells', Param(_int, 1024)),
        ('width', Param(_float, 0.05)),
        ('packet_width', Param(_float, 1.0)),
        ('b0', Param(_float, 0.0)),
        ('b1', Param(_float, 10.0)),
        ('flight_times', Param(_float_list, [0.0, 0.5, 1.0])),
        ('recombine', Param(_bool, True)),
    ]), run_stern_gerlach),
    'geiger': Scenario(collections.OrderedDict([
        ('n_atoms', Param(_int, 10)),
        ('c', Param(_float, 1.0)),
        ('b', Param(_complex, 1 / math.sqrt(2))),
        ('threshold', Param(_float, 0.5)),
        ('band_low', Param(_float, 0.1)),
        ('band_high', Param(_float, 0.9)),
        ('epsilon', Param(_float, 1e-6)),
    ]), run_geiger),
}


def names():
    return sorted(_SCENARIOS)


def _scenario(name):
    try:
        return _SCENARIOS[name]
    except KeyError:
        raise ConfigError(
            'scenario.name', 'unknown scenario %r, expected one of %s' % (
                name, names(),
            )
        )


def _check_weights(report):
    branches = report.get('branches')
    if not branches:
        return
    total = sum(b['weight'] for b in branches)
    pruned = report.get('quantities', {}).get('pruned_mass', 0.0)
    if abs(total + pruned - 1) > constants.EIGEN_TOL:
        raise NormError('Reported weights sum to %.15g' % total)


def run_scenario(name, raw_params):
    scenario = _scenario(name)
    params = _validate(name, scenario.schema, raw_params)
    logging.info('Running scenario %s', name)
    report = scenario.run(params)
    report['scenario'] = name
    report['params'] = params
    report = clean(report)
    _check_weights(report)
    return report


class RunConfig(object):
    def __init__(self, scenario, params=None, sweep=None, output=None,
                 seed=0, path=None):
        self.scenario = scenario
        self.params = collections.OrderedDict(params or {})
        self.sweep = sweep
        self.output = dict({'format': 'json', 'path': None}, **(output or {}))
        self.seed = seed
        self.path = path

    def validate(self):
        scenario = _scenario(self.scenario)
        if self.output['format'] not in FORMATS:
            raise ConfigError(
                'output.format', 'expected one of %s' % (list(FORMATS), ),
            )
        if self.sweep is not None:
            param, values = self.sweep
            if param not in scenario.schema:
                raise ConfigError(
                    'sweep.param', 'scenario %s has no parameter %r' % (
                        self.scenario, param,
                    )
                )
            if not isinstance(values, list) or not values:
                raise ConfigError('sweep.values', 'expected a non empty list')
        _validate(self.scenario, scenario.schema, self.params)
        return self


def _parse_value(text):
    try:
        return json.loads(text)
    except ValueError:
        return text


def _option_positions(lines):
    """
    (section, key) -> (line number, column of the value), 1-based.
    """
    positions = {}
    section = None
    header = re.compile(r'\s*\[([^\]]+)\]')
    option = re.compile(r'\s*([^=:\s][^=:]*?)\s*[=:]\s*')
    for number, line in enumerate(lines, 1):
        m = header.match(line)
        if m:
            section = m.group(1).strip()
            continue
        m = option.match(line)
        if m and section is not None and not line.lstrip().startswith(
                ('#', ';')):
            positions[(section, m.group(1).lower())] = (number, m.end() + 1)
    return positions


def load_config(path):
    try:
        with open(path, encoding='utf-8') as f:
            text = f.read()
    except OSError as e:
        raise ConfigParseError(path, 1, 1, e.strerror or str(e))
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text, source=path)
    except configparser.MissingSectionHeaderError as e:
        raise ConfigParseError(path, e.lineno, 1, 'missing section header')
    except configparser.ParsingError as e:
        line, content = e.errors[0]
        raise ConfigParseError(path, line, 1, 'cannot parse %s' % content)
    except (configparser.DuplicateOptionError,
            configparser.DuplicateSectionError) as e:
        raise ConfigParseError(path, e.lineno or 1, 1, e.message)

    positions = _option_positions(text.splitlines())

    def value(section, key):
        raw = parser.get(section, key)
        stripped = raw.strip()
        if stripped[:1] in ('[', '{', '"'):
            try:
                return json.loads(stripped)
            except ValueError as e:
                line, column = positions.get((section, key), (1, 1))
                raise ConfigParseError(
                    path, line + e.lineno - 1,
                    column + e.colno - 1 if e.lineno == 1 else e.colno,
                    e.msg,
                )
        return _parse_value(stripped)

    if not parser.has_option('scenario', 'name'):
        raise ConfigError('scenario.name', 'missing')
    seed = 0
    if parser.has_option('scenario', 'seed'):
        seed = value('scenario', 'seed')
        if isinstance(seed, bool) or not isinstance(seed, int):
            raise ConfigError('scenario.seed', 'expected an integer')
    params = collections.OrderedDict()
    if parser.has_section('params'):
        for key in parser.options('params'):
            params[key] = value('params', key)
    sweep = None
    if parser.has_section('sweep'):
        if not parser.has_option('sweep', 'param'):
            raise ConfigError('sweep.param', 'missing')
        if not parser.has_option('sweep', 'values'):
            raise ConfigError('sweep.values', 'missing')
        sweep = (value('sweep', 'param'), value('sweep', 'values'))
    output = {}
    if parser.has_section('output'):
        for key in parser.options('output'):
            output[key] = value('output', key)
    return RunConfig(
        parser.get('scenario', 'name').strip(), params, sweep, output, seed,
        path,
    )


def apply_overrides(cfg, overrides):
    """
    Apply key=value settings; bare keys name scenario parameters.
    """
    for item in overrides:
        if '=' not in item:
            raise ConfigError('--set', 'expected key=value, got %r' % item)
        key, text = item.split('=', 1)
        key = key.strip()
        value = _parse_value(text.strip())
        section, _, name = key.rpartition('.')
        if section in ('', 'params'):
            cfg.params[name] = value
        elif section == 'output':
            cfg.output[name] = value
        elif section == 'sweep' and name in ('param', 'values'):
            param, values = cfg.sweep or (None, None)
            cfg.sweep = (
                value if name == 'param' else param,
                value if name == 'values' else values,
            )
        elif section == 'scenario' and name == 'seed':
            cfg.seed = value
        else:
            raise ConfigError(key, 'cannot be overridden')
    return cfg


def run_config(cfg):
    cfg.validate()
    if cfg.sweep is None:
        return run_scenario(cfg.scenario, cfg.params)
    param, values = cfg.sweep

    def one(value):
        params = collections.OrderedDict(cfg.params)
        params[param] = value
        return run_scenario(cfg.scenario, params)

    runs = utils.run_vector(one, [(v, ) for v in values])
    assertions = [
        {'name': '%s=%s/%s' % (param, json.dumps(v), a['name']),
         'pass': a['pass']}
        for v, run in zip(values, runs) for a in run['assertions']
    ]
    return clean({
        'scenario': cfg.scenario,
        'params': cfg.params,
        'sweep': {'param': param, 'values': values},
        'runs': runs,
        'assertions': assertions,
    })


def passed(report):
    return all(a['pass'] for a in report['assertions'])


def _csv(columns, rows):
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(columns)
    for row in rows:
        writer.writerow([
            '%.12g' % x if isinstance(x, float) else x for x in row
        ])
    return buf.getvalue()


def render(report, fmt='json'):
    if fmt == 'json':
        return utils.json_dumps(report)
    if fmt == 'csv':
        if 'runs' in report:
            param = report['sweep']['param']
            columns = [param] + report['runs'][0]['table']['columns']
            rows = [
                [value] + row
                for value, run in zip(report['sweep']['values'],
                                      report['runs'])
                for row in run['table']['rows']
            ]
            return _csv(columns, rows)
        return _csv(report['table']['columns'], report['table']['rows'])
    if fmt == 'tree':
        return utils.json_dumps(tree_of(report))
    raise ConfigError('output.format', 'unknown format %r' % (fmt, ))


def tree_of(report):
    if 'tree' in report:
        return report['tree']
    raise MissingTree('Report of %s has no world tree' % report.get(
        'scenario', 'unknown scenario'))


def output_paths():
    return paths.Paths(config.get('output_dir', os.getcwd()))


def write_output(text, path):
    """
    Replace path with text under a lock, through a staging file.
    """
    p = output_paths()
    dest = p.resolve(path)
    staging = p.staging(dest)
    with lockfile.LockFile(p.lock(dest)):
        with utils.RollbackContext() as rollback:
            rollback.prependDefer(
                lambda: os.path.exists(staging) and os.unlink(staging)
            )
            with open(staging, 'w', encoding='utf-8', newline='') as f:
                f.write(text)
            os.rename(staging, dest)
    logging.info('Wrote %s', dest)
    return dest
