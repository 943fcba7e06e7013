import math

import pytest

import worldsim.geiger as geiger
from worldsim.errors import ParamError, SizeError

S = 1 / math.sqrt(2)


def test_full_cascade_groups_into_two_worlds():
    run = geiger.geiger_run(6, c=1.0, b=S)
    assert run.grouped['U'] == pytest.approx(0.5, abs=1e-12)
    assert run.grouped['D'] == pytest.approx(0.5, abs=1e-12)
    assert run.medium_mass == pytest.approx(0, abs=1e-12)
    assert run.bimodal
    assert len(run.microstates) == 2


@pytest.mark.parametrize('b', [0.0, 0.6, 1.0])
def test_grouped_weights_follow_the_particle(b):
    run = geiger.geiger_run(4, b=b)
    assert run.grouped['D'] == pytest.approx(b ** 2, abs=1e-12)
    assert run.grouped['U'] == pytest.approx(1 - b ** 2, abs=1e-12)


def test_partial_cascade_is_not_bimodal():
    run = geiger.geiger_run(6, c=0.5, b=1.0)
    assert run.medium_mass > 1e-3
    assert not run.bimodal
    assert sum(run.grouped.values()) == pytest.approx(1, abs=1e-12)


def test_ionized_count():
    run = geiger.geiger_run(3, b=1.0)
    branch, = run.microstates
    assert geiger.ionized(branch) == 3


def test_validation():
    with pytest.raises(SizeError):
        geiger.geiger_run(0)
    with pytest.raises(SizeError):
        geiger.geiger_run(21)
    with pytest.raises(ParamError):
        geiger.geiger_run(3, b=2)
    with pytest.raises(ParamError):
        geiger.geiger_run(3, threshold=1)
    with pytest.raises(ParamError):
        geiger.geiger_run(3, band=(0.9, 0.1))


@pytest.mark.parametrize('c', [1.0, 0.5])
def test_cascade_leaves_particle_marginal_alone(c):
    run = geiger.geiger_run(5, c=c, b=0.6)
    assert list(run.particle) == ['out', 'in']
    assert run.particle['in'] == pytest.approx(0.36, abs=1e-12)
    assert run.particle['out'] == pytest.approx(0.64, abs=1e-12)


def test_particle_family_is_position_projector():
    family = geiger.particle_family()
    assert family.labels == ('out', 'in')
    assert family.outcome('in').eigenvalue == pytest.approx(1)
    assert family.outcome('out').multiplicity == 1
