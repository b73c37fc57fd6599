import time

import numpy as np
import pytest

from tensortom.fields import INCOMPRESSIBLE, TRACEFREE, BumpPhantom, default_phantom
from tensortom.grid import GridSpec
from tensortom.pipeline import ReconstructionConfig, invert
from tensortom.transform import oracle_modes, sample_sinogram

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def acceptance():
    """Record one PASS/FAIL line per criterion; printed now and in the terminal summary."""

    def record(number: int, title: str, passed: bool, detail: str) -> bool:
        line = f"criterion {number:2d} {'PASS' if passed else 'FAIL'}  {title}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return passed

    return record


class RoundTrip:
    """Default-configuration forward projection and inversion of a default phantom."""

    def __init__(self, kind: str):
        self.phantom = BumpPhantom(default_phantom(kind))
        self.cfg = ReconstructionConfig(cls=kind)
        t0 = time.perf_counter()
        self.sinogram = sample_sinogram(self.phantom, self.cfg.mu, self.cfg.n_beta, self.cfg.n_phi)
        t1 = time.perf_counter()
        self.F, self.report = invert(self.sinogram, self.cfg)
        t2 = time.perf_counter()
        self.truth = self.phantom.sample(self.cfg.grid)
        self.forward_seconds = t1 - t0
        self.invert_seconds = t2 - t1


@pytest.fixture(scope="session")
def roundtrips():
    cache: dict = {}

    def get(kind: str) -> RoundTrip:
        if kind not in cache:
            cache[kind] = RoundTrip(kind)
        return cache[kind]

    return get


@pytest.fixture(scope="session")
def oracle_grid_modes():
    """Characteristics-oracle modes u_0 ... u_-6 of the default phantoms on the n=65 grid."""
    cache: dict = {}

    def get(kind: str, mu: float = 1.0, n: int = 65):
        key = (kind, mu, n)
        if key not in cache:
            ph = BumpPhantom(default_phantom(kind))
            g = GridSpec(n)
            U = np.zeros((7, n, n), dtype=complex)
            U[:, g.inside] = oracle_modes(ph, mu, g.z[g.inside], 6)
            cache[key] = (ph, g, U)
        return cache[key]

    return get


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


KINDS = (INCOMPRESSIBLE, TRACEFREE)
