from __future__ import annotations

import random

import numpy as np
import pytest

from fitfree.catalog import CATALOG_NAMES, catalog_group


@pytest.fixture(scope="session")
def catalog():
    return {name: catalog_group(name) for name in CATALOG_NAMES}


@pytest.fixture
def rng():
    return random.Random(20261015)


@pytest.fixture
def nprng():
    return np.random.default_rng(20261015)


def pytest_terminal_summary(terminalreporter):
    from helpers import ACCEPTANCE_LINES

    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
