import json
import logging
from enum import Enum

import networkx as nx
from pydantic import BaseModel, ValidationError, model_validator

from .errors import InputError
from .lattice import LatticeVector, primitive_decompose

logger = logging.getLogger(__name__)


class GraphEdge(BaseModel, frozen=True):
    id: str
    minus: str
    plus: str
    z_minus: LatticeVector
    z_plus: LatticeVector

    def is_loop(self) -> bool:
        return self.minus == self.plus

    def end_vertex(self, end: "EdgeEnd") -> str:
        return self.minus if end == EdgeEnd.MINUS else self.plus

    def inclusion(self, end: "EdgeEnd") -> LatticeVector:
        return self.z_minus if end == EdgeEnd.MINUS else self.z_plus


class EdgeEnd(str, Enum):
    MINUS = "minus"
    PLUS = "plus"


class TubularGraph(BaseModel, frozen=True):
    """A finite graph of groups with Z^2 vertex groups and Z edge groups.

    Edges are directed records; each carries the inclusion of the edge group
    generator into the vertex group at its minus and plus ends.
    """
    vertices: tuple[str, ...]
    edges: tuple[GraphEdge, ...] = ()

    @model_validator(mode="after")
    def _check_references(self):
        if len(self.vertices) == 0:
            raise ValueError("graph has no vertices")
        seen: set[str] = set()
        for i, v in enumerate(self.vertices):
            if v in seen:
                raise ValueError(f"vertices[{i}]: duplicate vertex id {v!r}")
            seen.add(v)
        edge_ids: set[str] = set()
        for i, e in enumerate(self.edges):
            where = f"edges[{i}] (id {e.id!r})"
            if e.id in edge_ids:
                raise ValueError(f"{where}: duplicate edge id")
            edge_ids.add(e.id)
            for end in (e.minus, e.plus):
                if end not in seen:
                    raise ValueError(f"{where}: unknown vertex {end!r}")
            if e.z_minus.is_zero():
                raise ValueError(f"{where}: z_minus is a zero inclusion vector")
            if e.z_plus.is_zero():
                raise ValueError(f"{where}: z_plus is a zero inclusion vector")
        return self

    def edge(self, edge_id: str) -> GraphEdge:
        for e in self.edges:
            if e.id == edge_id:
                return e
        raise InputError(f"unknown edge {edge_id!r}")

    def incident(self, v: str) -> list[tuple[GraphEdge, EdgeEnd]]:
        """All edge ends at v in edge order; a loop at v contributes both of its ends."""
        if v not in self.vertices:
            raise InputError(f"unknown vertex {v!r}")
        ends = []
        for e in self.edges:
            if e.minus == v:
                ends.append((e, EdgeEnd.MINUS))
            if e.plus == v:
                ends.append((e, EdgeEnd.PLUS))
        return ends


def _input_error(err: ValidationError, what: str) -> InputError:
    lines = []
    for item in err.errors():
        loc = "".join(f"[{p}]" if isinstance(p, int) else f".{p}" for p in item["loc"]).lstrip(".")
        lines.append(f"{loc or what}: {item['msg']}")
    return InputError(f"invalid {what}: " + "; ".join(lines))


def parse_graph(text: str | bytes) -> TubularGraph:
    try:
        g = TubularGraph.model_validate_json(text)
    except ValidationError as err:
        raise _input_error(err, "graph document") from None
    if not nx.is_connected(to_networkx(g)):
        logger.warning("graph is not connected; whole-group statements apply per component")
    return g


def load_graph(path: str) -> TubularGraph:
    with open(path, "r") as f:
        return parse_graph(f.read())


def dumps(data) -> str:
    return json.dumps(data, sort_keys=True, indent=2) + "\n"


def serialize_graph(g: TubularGraph) -> str:
    return dumps(g.model_dump(mode="json"))


def to_networkx(g: TubularGraph) -> nx.MultiGraph:
    G = nx.MultiGraph()
    G.add_nodes_from(g.vertices)
    for e in g.edges:
        G.add_edge(e.minus, e.plus, key=e.id)
    return G


def is_tree(g: TubularGraph) -> bool:
    return nx.is_tree(to_networkx(g))


def parallelism_classes(g: TubularGraph, v: str) -> list[LatticeVector]:
    """Distinct canonical primitive directions of all edge inclusions at a vertex.

    Args:
        g (TubularGraph): The graph of groups.
        v (str): Vertex id.

    Raises:
        InputError: If v is not a vertex of g.

    Returns:
        list[LatticeVector]: Sorted canonical primitives, one per parallelism class.
    """
    classes = {primitive_decompose(e.inclusion(end))[0] for e, end in g.incident(v)}
    return sorted(classes)


def class_counts(g: TubularGraph) -> dict[str, int]:
    return {v: len(parallelism_classes(g, v)) for v in g.vertices}


class ScreenVerdict(str, Enum):
    NOT_COCOMPACTLY_CUBULATED = "NotCocompactlyCubulated"
    INCONCLUSIVE = "InconclusiveRequiresBSCheck"


def cubulation_screen(g: TubularGraph) -> ScreenVerdict:
    # acting geometrically on a CAT(0) cube complex needs <= 2 classes per vertex;
    # the unbalanced Baumslag-Solitar half of the classification is not decided here
    if any(n >= 3 for n in class_counts(g).values()):
        return ScreenVerdict.NOT_COCOMPACTLY_CUBULATED
    return ScreenVerdict.INCONCLUSIVE
