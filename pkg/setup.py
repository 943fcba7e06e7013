import os

import setuptools

setuptools.setup(
    name='worldsim',
    version=os.environ.get('WORLDSIM_VERSION', '0.1.0'),
    description=(
        'Simulate quantum universes as branching state vectors and report '
        'their information and correlation'
    ),
    license='GNU GPLv2+',
    package_dir={
        'worldsim': 'lib/worldsim',
    },
    packages=['worldsim'],
    package_data={
        'worldsim': [
            '*.log.conf',
        ],
    },
    python_requires='>=3.8',
    install_requires=[
        'lockfile',
        'numpy',
        'scipy',
    ],
    extras_require={
        'test': ['pytest>=7'],
    },
    scripts=[
        'bin/worldsim',
    ],
    data_files=[
        (
            'share/worldsim/scenarios',
            [
                'config/scenarios/geiger.cfg',
                'config/scenarios/mzi.cfg',
                'config/scenarios/mzi_general.cfg',
                'config/scenarios/mzi_sweep.cfg',
                'config/scenarios/observers.cfg',
                'config/scenarios/pointer.cfg',
                'config/scenarios/rebase.cfg',
                'config/scenarios/spins.cfg',
                'config/scenarios/stern_gerlach.cfg',
            ],
        ),
        (
            '/etc/worldsim.d/',
            [
                'etc/worldsim.d/worldsim.conf',
            ],
        ),
    ],
)
