"""Shared model and design fixtures.

The designed trajectories are session-scoped because the quadrature
design diagonalizes along a 2001-point grid; the ring designs in
particular are the expensive ones and are reused by the protocol,
many-body, and acceptance tests.
"""

import pytest

from faquad import model, protocol


@pytest.fixture(scope="session")
def two_level_spec():
    return model.two_level(U=22.3, delta_start=66.7, delta_end=0.0)


@pytest.fixture(scope="session")
def two_level_faquad(two_level_spec):
    return protocol.design_faquad(two_level_spec)


@pytest.fixture(scope="session")
def two_level_la(two_level_spec):
    return protocol.design_local_adiabatic(two_level_spec)


@pytest.fixture(scope="session")
def splitting_spec():
    return model.bose_hubbard3(U=33.45, delta_start=100.0, delta_end=0.0)


@pytest.fixture(scope="session")
def splitting_faquad(splitting_spec):
    return protocol.design_faquad(splitting_spec)


@pytest.fixture(scope="session")
def cotunneling_spec():
    return model.bose_hubbard3(U=22.3, delta_start=66.7, delta_end=-66.7)


@pytest.fixture(scope="session")
def cotunneling_faquad(cotunneling_spec):
    return protocol.design_faquad(cotunneling_spec)


@pytest.fixture(scope="session")
def ring_spec():
    return model.ring(u0=0.5, K=40)


@pytest.fixture(scope="session")
def ring_faquad_n3(ring_spec):
    return protocol.design_faquad(ring_spec, pair=(3, 4))


@pytest.fixture(scope="session")
def ring_faquad_n9(ring_spec):
    return protocol.design_faquad(ring_spec, pair=(9, 10))
