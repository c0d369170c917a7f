import logging
from collections import defaultdict
from enum import Enum
from fractions import Fraction
from typing import Annotated, Hashable, Iterable, NamedTuple, Sequence

import networkx as nx
from pydantic import BaseModel, ConfigDict, Field, PlainSerializer, ValidationError, model_validator

from .equitable import CheckReport, EquitableSet, Violation, _report, edge_end_sum, verify_equitable
from .errors import InputError, MaterializationLimitError
from .graph import EdgeEnd, TubularGraph, _input_error, dumps
from .lattice import BigInt, LatticeVector, canonical, intersection_number, is_primitive

logger = logging.getLogger(__name__)

Rational = Annotated[Fraction, PlainSerializer(lambda q: str(q), return_type=str)]


class WallVertex(BaseModel, frozen=True):
    id: int
    over: str
    element: LatticeVector


class WallEdge(BaseModel, frozen=True):
    model_config = ConfigDict(populate_by_name=True)

    id: int
    over: str
    from_: int = Field(alias="from")
    to: int
    minus_count: BigInt = Field(gt=0)
    plus_count: BigInt = Field(gt=0)

    def ratio(self) -> Fraction:
        return Fraction(self.minus_count, self.plus_count)


class WallGraph(BaseModel, frozen=True):
    """Explicit immersed-wall graph. Wall vertices stand for single circles; each
    wall edge joins the circle on the minus side of a Γ-edge to one on the plus side."""
    vertices: tuple[WallVertex, ...] = ()
    edges: tuple[WallEdge, ...] = ()

    @model_validator(mode="after")
    def _check_references(self):
        ids: set[int] = set()
        for i, v in enumerate(self.vertices):
            if v.id in ids:
                raise ValueError(f"vertices[{i}]: duplicate wall vertex id {v.id}")
            ids.add(v.id)
        edge_ids: set[int] = set()
        for i, e in enumerate(self.edges):
            if e.id in edge_ids:
                raise ValueError(f"edges[{i}] (id {e.id}): duplicate wall edge id")
            edge_ids.add(e.id)
            for end in (e.from_, e.to):
                if end not in ids:
                    raise ValueError(f"edges[{i}] (id {e.id}): unknown wall vertex {end}")
        return self

    def vertex_map(self) -> dict[int, WallVertex]:
        return {v.id: v for v in self.vertices}

    def edge_map(self) -> dict[int, WallEdge]:
        return {e.id: e for e in self.edges}


class Direction(str, Enum):
    FORWARD = "forward"
    REVERSE = "reverse"


class PathStep(NamedTuple):
    edge: int
    direction: Direction


class Witness(BaseModel, frozen=True):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    path: tuple[PathStep, ...]
    dilation: Rational


class UndilatedReport(BaseModel, frozen=True):
    ok: bool
    witness: Witness | None = None

    def __bool__(self):
        return self.ok


def parse_walls(text: str | bytes) -> WallGraph:
    try:
        return WallGraph.model_validate_json(text)
    except ValidationError as err:
        raise _input_error(err, "wall graph document") from None


def load_walls(path: str) -> WallGraph:
    with open(path, "r") as f:
        return parse_walls(f.read())


def serialize_walls(w: WallGraph) -> str:
    return dumps(w.model_dump(mode="json", by_alias=True))


def _check_size(required: int, limit: int | None):
    if limit is not None and required > limit:
        raise MaterializationLimitError(required, limit)


def build_walls(g: TubularGraph, s: EquitableSet, limit: int | None = None) -> WallGraph:
    """Materialize the wall graph of an equitable set with the canonical grid pairing.

    Intersection points on each side of a Γ-edge are ordered by (element, copy,
    point within copy) and paired in order.

    Args:
        g (TubularGraph): The graph of groups.
        s (EquitableSet): Equitable set covering every vertex of g.
        limit (int | None, optional): Maximum number of wall vertices plus wall edges. Defaults to None (unbounded).

    Raises:
        InputError: If s is not equitable.
        MaterializationLimitError: If the wall graph would exceed the limit.

    Returns:
        WallGraph: One wall vertex per curve copy, one wall edge per paired intersection point.
    """
    report = verify_equitable(g, s)
    if not report.ok:
        raise InputError("set is not equitable: " + "; ".join(v.detail for v in report.violations))
    n_edges = sum(edge_end_sum(g, s, e.id, EdgeEnd.MINUS) for e in g.edges)
    n_vertices = sum(entry.count for v in g.vertices for entry in s.entries(v))
    _check_size(n_vertices + n_edges, limit)

    vertices = []
    copies: dict[str, list[tuple[LatticeVector, list[int]]]] = {}
    for v in g.vertices:
        copies[v] = []
        for entry in sorted(s.entries(v), key=lambda entry: entry.element):
            ids = list(range(len(vertices), len(vertices) + entry.count))
            vertices.extend(WallVertex.model_construct(id=i, over=v, element=entry.element) for i in ids)
            copies[v].append((entry.element, ids))

    def points(v: str, z: LatticeVector):
        for element, ids in copies[v]:
            n = intersection_number(element, z)
            for i in ids:
                for _ in range(n):
                    yield i, n

    edges = []
    for e in g.edges:
        for (src, k), (dst, l) in zip(points(e.minus, e.z_minus), points(e.plus, e.z_plus)):
            edges.append(WallEdge.model_construct(
                id=len(edges), over=e.id, to=dst, **{"from": src}, minus_count=k, plus_count=l))
    logger.debug("built %d wall vertices and %d wall edges", len(vertices), len(edges))
    return WallGraph.model_construct(vertices=tuple(vertices), edges=tuple(edges))


def validate_walls(g: TubularGraph, w: WallGraph, require_bijection: bool = True) -> CheckReport:
    """Check that a wall graph projects onto g with correct intersection counts.

    With require_bijection, every intersection point of every wall vertex must
    be used by exactly one wall edge over each incident Γ-edge end.
    """
    violations = []
    vmap = w.vertex_map()
    for v in w.vertices:
        if v.over not in g.vertices:
            violations.append(Violation(kind="projection", object=f"wall vertex {v.id}",
                                        detail=f"lies over unknown vertex {v.over!r}"))
        if not is_primitive(v.element) or canonical(v.element) != v.element:
            violations.append(Violation(kind="non-primitive", object=f"wall vertex {v.id}",
                                        detail=f"element {tuple(v.element)} is not a canonical primitive"))
    edge_ids = {e.id for e in g.edges}
    used: dict[tuple[str, EdgeEnd, int], int] = defaultdict(int)
    for we in w.edges:
        where = f"wall edge {we.id}"
        if we.over not in edge_ids:
            violations.append(Violation(kind="projection", object=where, detail=f"lies over unknown edge {we.over!r}"))
            continue
        e = g.edge(we.over)
        src, dst = vmap[we.from_], vmap[we.to]
        if src.over != e.minus or dst.over != e.plus:
            violations.append(Violation(
                kind="projection", object=where,
                detail=f"endpoints lie over {src.over!r}, {dst.over!r} but edge {e.id!r} joins {e.minus!r}, {e.plus!r}"))
            continue
        k = intersection_number(src.element, e.z_minus)
        l = intersection_number(dst.element, e.z_plus)
        if (k, l) != (we.minus_count, we.plus_count):
            violations.append(Violation(
                kind="count-mismatch", object=where,
                detail=f"stored counts ({we.minus_count}, {we.plus_count}) but intersection numbers are ({k}, {l})",
                minus_sum=k, plus_sum=l))
        used[(e.id, EdgeEnd.MINUS, src.id)] += 1
        used[(e.id, EdgeEnd.PLUS, dst.id)] += 1
    if require_bijection:
        for e in g.edges:
            for end in EdgeEnd:
                z = e.inclusion(end)
                for v in w.vertices:
                    if v.over != e.end_vertex(end):
                        continue
                    need = intersection_number(v.element, z)
                    have = used[(e.id, end, v.id)]
                    if need != have:
                        violations.append(Violation(
                            kind="pairing", object=f"wall vertex {v.id}",
                            detail=f"has {need} intersection points with edge {e.id!r} ({end.value} end) "
                                   f"but {have} wall edges use them"))
    return _report(violations)


def dilation(w: WallGraph, path: Sequence[PathStep | tuple[int, str]]) -> Fraction:
    """Exact dilation of an edge path: minus/plus for each forward step, plus/minus for each reverse step."""
    emap = w.edge_map()
    result = Fraction(1)
    at = None
    for i, (edge_id, direction) in enumerate(path):
        if edge_id not in emap:
            raise InputError(f"path[{i}]: unknown wall edge {edge_id}")
        e = emap[edge_id]
        direction = Direction(direction)
        start, end = (e.from_, e.to) if direction == Direction.FORWARD else (e.to, e.from_)
        if at is not None and start != at:
            raise InputError(f"path[{i}]: wall edge {edge_id} does not start at wall vertex {at}")
        result *= e.ratio() if direction == Direction.FORWARD else 1 / e.ratio()
        at = end
    return result


def _find_dilated_cycle(nodes: Iterable[Hashable], edges: Sequence[tuple[int, Hashable, Hashable, Fraction]]):
    """Spanning-tree potentials over every component.

    Returns None when every non-tree edge agrees with the potentials, otherwise
    the fundamental cycle of the first failing edge as (steps, dilation).
    """
    G = nx.MultiGraph()
    G.add_nodes_from(nodes)
    ratios = {}
    ends = {}
    for key, u, v, ratio in edges:
        G.add_edge(u, v, key=key)
        ratios[key] = ratio
        ends[key] = (u, v)

    phi: dict[Hashable, Fraction] = {}
    parent: dict[Hashable, tuple[Hashable, int]] = {}
    depth: dict[Hashable, int] = {}
    for comp in sorted(nx.connected_components(G), key=min):
        root = min(comp)
        phi[root] = Fraction(1)
        depth[root] = 0
        for a, b, key in nx.edge_bfs(G, root):
            u, v = ends[key]
            if b not in phi:
                # tree edge reached from a
                phi[b] = phi[a] * ratios[key] if a == u else phi[a] / ratios[key]
                parent[b] = (a, key)
                depth[b] = depth[a] + 1
                continue
            if phi[v] == phi[u] * ratios[key]:
                continue
            return _fundamental_cycle(u, v, key, parent, depth, ends), phi[v] / (phi[u] * ratios[key])
    return None


def _fundamental_cycle(u, v, key, parent, depth, ends) -> list[PathStep]:
    def step(x, k):
        # traverse tree edge k from x toward its parent
        return PathStep(k, Direction.FORWARD if ends[k][0] == x else Direction.REVERSE)

    def flip(p: PathStep):
        return PathStep(p.edge, Direction.REVERSE if p.direction == Direction.FORWARD else Direction.FORWARD)

    up_u, up_v = [], []
    a, b = u, v
    while depth[a] > depth[b]:
        p, k = parent[a]
        up_u.append(step(a, k))
        a = p
    while depth[b] > depth[a]:
        p, k = parent[b]
        up_v.append(step(b, k))
        b = p
    while a != b:
        p, k = parent[a]
        up_u.append(step(a, k))
        a = p
        p, k = parent[b]
        up_v.append(step(b, k))
        b = p
    return up_u + [flip(s) for s in reversed(up_v)] + [PathStep(key, Direction.REVERSE)]


def check_undilated(w: WallGraph) -> UndilatedReport:
    found = _find_dilated_cycle(
        (v.id for v in w.vertices),
        [(e.id, e.from_, e.to, e.ratio()) for e in w.edges],
    )
    if found is None:
        return UndilatedReport(ok=True)
    path, dil = found
    logger.info("dilated closed path through %d wall edges, dilation %s", len(path), dil)
    return UndilatedReport(ok=False, witness=Witness(path=tuple(path), dilation=dil))


def components(w: WallGraph) -> list[list[int]]:
    G = nx.MultiGraph()
    G.add_nodes_from(v.id for v in w.vertices)
    G.add_edges_from((e.from_, e.to, e.id) for e in w.edges)
    return sorted((sorted(c) for c in nx.connected_components(G)), key=lambda c: c[0])


def _counts_agree(groups: dict) -> bool:
    return all(len(counts) <= 1 for counts in groups.values())


def check_propdil(w: WallGraph) -> bool:
    comp_of = {v: i for i, comp in enumerate(components(w)) for v in comp}
    groups: dict[tuple[int, str], set[tuple[int, int]]] = defaultdict(set)
    for e in w.edges:
        groups[(comp_of[e.from_], e.over)].add((e.minus_count, e.plus_count))
    return _counts_agree(groups)


class ClassNode(BaseModel, frozen=True):
    """Copies of wall class `cls` over one Γ-vertex."""
    cls: int
    vertex: str
    element: LatticeVector
    count: BigInt = Field(gt=0)


class ClassEdge(BaseModel, frozen=True):
    """Grid-paired wall edges of class `cls` over one Γ-edge; k and l are per-copy intersection counts."""
    cls: int
    over: str
    minus: str
    plus: str
    k: BigInt = Field(gt=0)
    l: BigInt = Field(gt=0)
    pairing: str = "grid"


class CompressedWallGraph(BaseModel, frozen=True):
    nodes: tuple[ClassNode, ...] = ()
    edges: tuple[ClassEdge, ...] = ()

    @model_validator(mode="after")
    def _check_balanced(self):
        counts = {}
        for i, n in enumerate(self.nodes):
            if (n.cls, n.vertex) in counts:
                raise ValueError(f"nodes[{i}]: duplicate class node ({n.cls}, {n.vertex!r})")
            counts[(n.cls, n.vertex)] = n.count
        for i, e in enumerate(self.edges):
            where = f"edges[{i}] (class {e.cls}, edge {e.over!r})"
            for v in (e.minus, e.plus):
                if (e.cls, v) not in counts:
                    raise ValueError(f"{where}: no class node over vertex {v!r}")
            lhs = counts[(e.cls, e.minus)] * e.k
            rhs = counts[(e.cls, e.plus)] * e.l
            if lhs != rhs:
                raise ValueError(f"{where}: unbalanced expansion {lhs} != {rhs}")
        return self

    def node(self, cls: int, vertex: str) -> ClassNode:
        for n in self.nodes:
            if n.cls == cls and n.vertex == vertex:
                return n
        raise InputError(f"no class node ({cls}, {vertex!r})")


def parse_compressed(text: str | bytes) -> CompressedWallGraph:
    try:
        return CompressedWallGraph.model_validate_json(text)
    except ValidationError as err:
        raise _input_error(err, "compressed wall graph document") from None


def serialize_compressed(c: CompressedWallGraph) -> str:
    return dumps(c.model_dump(mode="json"))


def materialized_size(c: CompressedWallGraph) -> int:
    counts = {(n.cls, n.vertex): n.count for n in c.nodes}
    return sum(counts.values()) + sum(counts[(e.cls, e.minus)] * e.k for e in c.edges)


def expand(c: CompressedWallGraph, limit: int | None = None) -> WallGraph:
    """Explicit wall graph realizing the copy counts, grid-paired per class edge.

    Raises:
        MaterializationLimitError: If wall vertices plus wall edges exceed the limit.
    """
    _check_size(materialized_size(c), limit)
    vertices = []
    first_id = {}
    for n in c.nodes:
        base = len(vertices)
        first_id[(n.cls, n.vertex)] = base
        vertices.extend(
            WallVertex.model_construct(id=base + i, over=n.vertex, element=n.element)
            for i in range(n.count))
    edges = []
    for ce in c.edges:
        src0 = first_id[(ce.cls, ce.minus)]
        dst0 = first_id[(ce.cls, ce.plus)]
        total = c.node(ce.cls, ce.minus).count * ce.k
        for t in range(total):
            edges.append(WallEdge.model_construct(
                id=len(edges), over=ce.over, to=dst0 + t // ce.l, **{"from": src0 + t // ce.k},
                minus_count=ce.k, plus_count=ce.l))
    return WallGraph.model_construct(vertices=tuple(vertices), edges=tuple(edges))


def check_class_undilated(c: CompressedWallGraph) -> UndilatedReport:
    """Undilated check on the class graph; steps in a witness index into `c.edges`."""
    found = _find_dilated_cycle(
        ((n.cls, n.vertex) for n in c.nodes),
        [(i, (e.cls, e.minus), (e.cls, e.plus), Fraction(e.k, e.l)) for i, e in enumerate(c.edges)],
    )
    if found is None:
        return UndilatedReport(ok=True)
    path, dil = found
    return UndilatedReport(ok=False, witness=Witness(path=tuple(path), dilation=dil))


def check_class_propdil(c: CompressedWallGraph) -> bool:
    G = nx.MultiGraph()
    G.add_nodes_from((n.cls, n.vertex) for n in c.nodes)
    G.add_edges_from(((e.cls, e.minus), (e.cls, e.plus), i) for i, e in enumerate(c.edges))
    comp_of = {}
    for i, comp in enumerate(nx.connected_components(G)):
        for node in comp:
            comp_of[node] = i
    groups: dict[tuple[int, str], set[tuple[int, int]]] = defaultdict(set)
    for e in c.edges:
        groups[(comp_of[(e.cls, e.minus)], e.over)].add((e.k, e.l))
    return _counts_agree(groups)
