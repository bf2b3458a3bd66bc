import pytest

from hrerank import parse_matrix

from _support import DATA_DIR


def _load(name: str):
    return parse_matrix((DATA_DIR / name).read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def example1():
    return _load("example1.txt")


@pytest.fixture(scope="session")
def example2():
    return _load("example2.txt")


@pytest.fixture(scope="session")
def example3():
    return _load("example3.txt")


@pytest.fixture(scope="session")
def example4():
    return _load("example4.txt")
