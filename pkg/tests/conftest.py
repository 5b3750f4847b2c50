import pytest


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "slow: full sampler runs at realistic settings")
