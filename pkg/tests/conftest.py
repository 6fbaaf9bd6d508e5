import sys
import math

import pytest

from cgi_sim import (AtomSpecies, ExperimentParams, IdealPotential, LaserConfig,
                     PhysicalConstants, default_profile_spec, run_cgi_with_trajectories,
                     synthesize_profile)

INF_C = PhysicalConstants(c=math.inf)
TABLE1_PARAMS = ExperimentParams(z0=5.0, v0=6.0, T_R=0.6)


@pytest.fixture(scope="session")
def laser():
    return LaserConfig()


@pytest.fixture(scope="session")
def atom():
    return AtomSpecies()


@pytest.fixture(scope="session")
def synth():
    return synthesize_profile(default_profile_spec())


@pytest.fixture(scope="session")
def ideal_cgi(laser, atom):
    """Catalogue kinematics in the curved ideal field, with trajectories."""
    return run_cgi_with_trajectories(laser, TABLE1_PARAMS, IdealPotential(9.81, -2.7e-6), atom, INF_C)


@pytest.fixture(scope="session")
def flat_cgi(laser, atom):
    return run_cgi_with_trajectories(laser, TABLE1_PARAMS, IdealPotential(9.81, 0.0), atom, INF_C)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
