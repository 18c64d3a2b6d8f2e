import pathlib

import pytest

REPO_ROOT = pathlib.Path(__file__).resolve().parent.parent


@pytest.fixture(scope="session")
def repo_root() -> pathlib.Path:
    return REPO_ROOT


@pytest.fixture(scope="session")
def networks_dir() -> pathlib.Path:
    return REPO_ROOT / "networks"


@pytest.fixture(scope="session")
def fixtures_dir() -> pathlib.Path:
    return REPO_ROOT / "fixtures"


@pytest.fixture(scope="session")
def tiny3(networks_dir):
    from safemob.network import load_network_file

    return load_network_file(networks_dir / "tiny3.json")
