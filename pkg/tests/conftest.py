import shutil
from importlib import resources
from pathlib import Path

import numpy as np
import pytest

from emopattern.config import load_config
from emopattern.pipeline import run


def random_connected(rng, n, p=0.4):
    """Random symmetric 0/1 matrix: a random spanning tree plus extra edges."""
    a = np.zeros((n, n), dtype=np.int64)
    order = rng.permutation(n)
    for k in range(1, n):
        i, j = order[k], order[rng.integers(k)]
        a[i, j] = a[j, i] = 1
    extra = np.triu(rng.random((n, n)) < p, 1)
    a |= extra | extra.T
    np.fill_diagonal(a, 0)
    return a


def random_graph(rng, n, p=0.5):
    upper = np.triu(rng.random((n, n)) < p, 1).astype(np.int64)
    return upper | upper.T


def copy_toy(dest):
    src = resources.files("emopattern") / "data" / "toy"
    dest = Path(dest)
    dest.mkdir(parents=True, exist_ok=True)
    for item in src.iterdir():
        if item.is_file():
            shutil.copyfile(item, dest / item.name)
    return dest / "toy.cfg"


@pytest.fixture
def toy_dir(tmp_path):
    return copy_toy(tmp_path / "toy").parent


@pytest.fixture(scope="session")
def toy_run(tmp_path_factory):
    """One full pipeline run on the bundled toy corpus, shared across tests."""
    cfg_path = copy_toy(tmp_path_factory.mktemp("toyrun"))
    cfg = load_config(cfg_path)
    manifest = run(cfg)
    return cfg, manifest


# one line per acceptance criterion, filled by test_acceptance.py
ACCEPTANCE = []


def record(name, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}"
    ACCEPTANCE.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
