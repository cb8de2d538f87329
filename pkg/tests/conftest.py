"""Shared fixtures: seeded generators, curve factories and mocap fixture files."""

import os

import numpy as np
import pytest

from sigshape.core import curve as cv
from sigshape.core import lie

FIXTURES = os.path.join(os.path.dirname(__file__), 'fixtures')


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


@pytest.fixture
def make_curve(rng):
    """random_curve bound to the test's generator."""
    def factory(n_segments=6, d=2, **kwargs):
        return cv.random_curve(rng, n_segments, d, **kwargs)
    return factory


@pytest.fixture
def make_warp(rng):
    def factory(n_breakpoints=16, slope_range=(0.25, 4.0)):
        return cv.random_reparameterization(rng, n_breakpoints, slope_range)
    return factory


@pytest.fixture
def line_curve():
    """One joint rotating about a fixed axis: c(t) = exp(t b)."""
    def factory(b, segments=1):
        b = np.asarray(b, dtype=float)
        frames = [lie.pose_exp(k * b / segments) for k in range(segments + 1)]
        return cv.from_frames(frames)
    return factory


@pytest.fixture
def fixture_path():
    def resolve(name):
        return os.path.join(FIXTURES, name)
    return resolve


@pytest.fixture
def fixture_text(fixture_path):
    def read(name):
        with open(fixture_path(name), encoding='utf-8') as f:
            return f.read()
    return read
