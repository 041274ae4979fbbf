"""Shared fixtures plus the acceptance-checklist terminal summary."""

from __future__ import annotations

import pytest

from proxmix import load_scene
from proxmix.demo import write_demo
from proxmix.render import TrackBundle

# Verdict lines recorded by tests/test_acceptance.py; replayed after the
# run because output capture would otherwise hide them on a green run.
ACCEPTANCE_KEY = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[ACCEPTANCE_KEY] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash[ACCEPTANCE_KEY]
    if lines:
        terminalreporter.section("acceptance checklist")
        for line in lines:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def demo_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("demo")
    write_demo(out)
    return out


@pytest.fixture(scope="session")
def scene(demo_dir):
    return load_scene(demo_dir / "scene.json")


@pytest.fixture(scope="session")
def tracks(scene):
    return TrackBundle.from_scene(scene)
