from fractions import Fraction
from itertools import product

import numpy as np
import pytest

from tubular_tools.fixtures import fixture_graph, fixture_set, fixture_walls
from tubular_tools.gpq import GpqSpec, make_gpq
from tubular_tools.walls import WallGraph


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def raag_path():
    return fixture_graph("raag_path3")


@pytest.fixture
def example1():
    return fixture_graph("example1"), fixture_set("example1")


@pytest.fixture
def example2():
    return fixture_graph("example2"), fixture_set("example2")


@pytest.fixture
def dilated():
    return fixture_graph("dilated"), fixture_walls("dilated")


@pytest.fixture
def g13():
    return make_gpq(GpqSpec(p=1, q=3))[1]


def closed_walk_dilations(w: WallGraph, max_length: int):
    """Dilation of every closed walk of at most max_length steps, by brute force."""
    steps_from = {v.id: [] for v in w.vertices}
    for e in w.edges:
        steps_from[e.from_].append((e.to, e.ratio()))
        steps_from[e.to].append((e.from_, 1 / e.ratio()))

    def walk(start, at, dil, depth):
        if depth > 0 and at == start:
            yield dil
        if depth == max_length:
            return
        for nxt, ratio in steps_from[at]:
            yield from walk(start, nxt, dil * ratio, depth + 1)

    for v in steps_from:
        yield from walk(v, v, Fraction(1), 0)


def brute_force_span(g1, g2, box: int = 20):
    return {(a * g1[0] + b * g2[0], a * g1[1] + b * g2[1]) for a, b in product(range(-box, box + 1), repeat=2)}
