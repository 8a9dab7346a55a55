"""Shared fixtures: synthetic profiles and pre-segmented action sets.

The four-profile fixture keeps the classes separable through every model
representation: speeds, jitters, turn rates and inter-event times differ per
subject, and each subject works in a disjoint screen region so the raw
coordinate representation carries the separation too. Speeds are kept small
(under 3 px/s) because the neural paths consume unscaled signals and large
input magnitudes stall their optimization.
"""

import numpy as np
import pytest

from mousedyn.events import SyntheticProfile, synthesize_session
from mousedyn import pipeline

FIXTURE_SEED = 11


def four_profiles() -> list[SyntheticProfile]:
    return [
        SyntheticProfile(subject=1, mean_speed=0.15, speed_jitter=0.015,
                         turn_std=0.10, dt_mean=0.006,
                         origin=(0.0, 0.0), bounds=(400.0, 300.0), start=(200.0, 150.0)),
        SyntheticProfile(subject=2, mean_speed=0.60, speed_jitter=0.060,
                         turn_std=0.45, dt_mean=0.008,
                         origin=(1520.0, 0.0), bounds=(400.0, 300.0), start=(1720.0, 150.0)),
        SyntheticProfile(subject=3, mean_speed=1.40, speed_jitter=0.140,
                         turn_std=0.90, dt_mean=0.010,
                         origin=(0.0, 780.0), bounds=(400.0, 300.0), start=(200.0, 930.0)),
        SyntheticProfile(subject=4, mean_speed=2.60, speed_jitter=0.260,
                         turn_std=1.60, dt_mean=0.012,
                         origin=(1520.0, 780.0), bounds=(400.0, 300.0), start=(1720.0, 930.0)),
    ]


def synthesize_profiles(profiles, n_actions: int, block_len: int = 10):
    return [
        synthesize_session(p, seed=[FIXTURE_SEED, p.subject],
                           n_events=block_len * n_actions + 1)
        for p in profiles
    ]


@pytest.fixture(scope="session")
def sessions4():
    """Four well-separated users, 500 actions each."""
    return synthesize_profiles(four_profiles(), n_actions=500)


@pytest.fixture(scope="session")
def actions4(sessions4):
    return pipeline.actions_from_sessions(sessions4, 10)


@pytest.fixture(scope="session")
def two_user_sessions():
    """Two separable users, 21 actions each; small enough for CLI tests."""
    profiles = [p for p in four_profiles() if p.subject in (1, 4)]
    return synthesize_profiles(profiles, n_actions=21)


@pytest.fixture()
def rng():
    return np.random.default_rng(0)
