import sys

import numpy as np
import pytest
from hypothesis import settings

from heisenlab.models import ModelSpec, build_fock_model

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")


@pytest.fixture(scope="session")
def harmonic32():
    return build_fock_model(ModelSpec(dim=32))


@pytest.fixture(scope="session")
def harmonic64():
    return build_fock_model(ModelSpec(dim=64))


@pytest.fixture(scope="session")
def quartic32():
    return build_fock_model(ModelSpec(dim=32, lam=0.1))


@pytest.fixture(scope="session")
def quartic96():
    return build_fock_model(ModelSpec(dim=96, lam=0.1))


def random_hermitian(rng, n):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return (a + a.conj().T) / 2


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not getattr(mod, "RESULTS", None):
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
