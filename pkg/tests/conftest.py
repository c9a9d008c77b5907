"""Shared fixtures and random-profile helpers for the test suite."""

from __future__ import annotations

import random

import pytest

from jurymarkets import BeliefProfile, CompetenceProfile, SignalProfile, beliefs_from_signals

# The two worked scenarios used throughout: a five-agent jury with one
# strong expert, and a four-agent jury whose linear-weight election ties.
EXAMPLE_1_Q = (0.9, 0.7, 0.6, 0.6, 0.6)
EXAMPLE_1_Y = ("A", "B", "B", "B", "A")
EXAMPLE_2_Q = (0.8, 0.6, 0.6, 0.6)
EXAMPLE_2_Y = ("A", "B", "B", "B")


@pytest.fixture
def example1():
    q = CompetenceProfile(EXAMPLE_1_Q)
    y = SignalProfile(EXAMPLE_1_Y)
    return q, y, beliefs_from_signals(q, y)


@pytest.fixture
def example2():
    q = CompetenceProfile(EXAMPLE_2_Q)
    y = SignalProfile(EXAMPLE_2_Y)
    return q, y, beliefs_from_signals(q, y)


def random_competences(rng: random.Random, n: int) -> CompetenceProfile:
    """Competences drawn uniformly from a band safely inside (0.5, 1)."""
    return CompetenceProfile(tuple(rng.uniform(0.55, 0.95) for _ in range(n)))


def random_beliefs(rng: random.Random, n: int) -> BeliefProfile:
    """Beliefs drawn uniformly from a band safely inside (0, 1)."""
    return BeliefProfile(tuple(rng.uniform(0.05, 0.95) for _ in range(n)))


def random_signals(rng: random.Random, n: int) -> SignalProfile:
    return SignalProfile(tuple(rng.choice(("A", "B")) for _ in range(n)))
