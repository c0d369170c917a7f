import os

import networkx as nx
import numpy as np

from .equitable import EquitableSet, load_set
from .errors import InputError
from .gpq import GpqSpec, make_gpq
from .graph import TubularGraph, load_graph
from .walls import WallGraph, load_walls

DATA_DIR = os.path.join(os.path.dirname(__file__), "data")

GRAPH_FIXTURES = {
    "example1": "example1.json",  # Wise's non-Hopfian tubular group
    "example2": "example2.json",  # Gersten's example, equitable but not fortified
    "raag_path3": "raag_path3.json",  # <a,b,c,d | [a,b], [b,c], [c,d]>
    "star3": "star3.json",
    "dilated": "dilated.json",
}

SET_FIXTURES = {
    "example1": "example1_equitable.json",
    "example2": "example2_equitable.json",
}

WALL_FIXTURES = {
    "dilated": "dilated_walls.json",
}


def _path(table: dict[str, str], name: str, what: str) -> str:
    if name not in table:
        raise InputError(f"unknown {what} fixture {name!r}; choose from {sorted(table)}")
    return os.path.join(DATA_DIR, table[name])


def fixture_graph(name: str) -> TubularGraph:
    """A shipped graph by name; "gpq:P,Q" builds G_{P,Q}."""
    if name.startswith("gpq:"):
        return make_gpq(parse_gpq_name(name))[0]
    return load_graph(_path(GRAPH_FIXTURES, name, "graph"))


def fixture_set(name: str) -> EquitableSet:
    return load_set(_path(SET_FIXTURES, name, "equitable set"))


def fixture_walls(name: str) -> WallGraph:
    return load_walls(_path(WALL_FIXTURES, name, "wall graph"))


def parse_gpq_name(name: str) -> GpqSpec:
    try:
        p, q = (int(x) for x in name.removeprefix("gpq:").split(","))
    except ValueError:
        raise InputError(f"expected gpq:P,Q, got {name!r}") from None
    return GpqSpec.of(p, q)


def random_tree(rng: np.random.Generator, n_vertices: int, entry_range: tuple[int, int] = (-5, 5)) -> TubularGraph:
    """Random tree of tori: a uniform labelled tree with random orientations and nonzero inclusion entries."""
    lo, hi = entry_range
    entries = [x for x in range(lo, hi + 1) if x != 0]

    def vec():
        return [int(rng.choice(entries)), int(rng.choice(entries))]

    vertices = [f"v{i}" for i in range(n_vertices)]
    if n_vertices == 1:
        return TubularGraph(vertices=tuple(vertices))
    tree = nx.from_prufer_sequence([int(x) for x in rng.integers(0, n_vertices, size=n_vertices - 2)])
    edges = []
    for i, (u, v) in enumerate(sorted(tree.edges())):
        if rng.random() < 0.5:
            u, v = v, u
        edges.append({"id": f"e{i}", "minus": f"v{u}", "plus": f"v{v}", "z_minus": vec(), "z_plus": vec()})
    return TubularGraph.model_validate({"vertices": vertices, "edges": edges})
