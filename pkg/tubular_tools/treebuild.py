import hashlib
import logging
from collections import deque
from enum import Enum

import networkx as nx
from pydantic import BaseModel

from .equitable import EquitableSet, SetEntry, verify_equitable, verify_fortified, verify_primitive
from .errors import CertificationError, MaterializationLimitError, NotATreeError
from .graph import (EdgeEnd, ScreenVerdict, TubularGraph, class_counts, cubulation_screen, dumps,
                    parallelism_classes, serialize_graph, to_networkx)
from .lattice import BigInt, LatticeVector, intersection_number, primitive_sequence
from .walls import (ClassEdge, ClassNode, CompressedWallGraph, Witness, check_class_propdil,
                    check_class_undilated, check_propdil, check_undilated, expand, materialized_size,
                    validate_walls)

logger = logging.getLogger(__name__)

DEFAULT_EXPAND_LIMIT = 1_000_000


class TraceStep(BaseModel, frozen=True):
    edge: str
    parent: str
    child: str
    aligned: int
    k: tuple[BigInt, ...]
    l: tuple[BigInt, ...]
    factors: tuple[BigInt, ...]


class ConstructionTrace(BaseModel, frozen=True):
    base_vertex: str
    m: int
    small_case: bool
    elements: dict[str, tuple[LatticeVector, ...]]
    permutations: dict[str, tuple[int, ...]]
    steps: tuple[TraceStep, ...]


def padded_elements(g: TubularGraph, v: str, m: int) -> list[LatticeVector]:
    """One canonical primitive per local parallelism class, padded with fillers up to m."""
    elements = parallelism_classes(g, v)
    fillers = primitive_sequence()
    while len(elements) < m:
        c = next(fillers)
        if c not in elements:
            elements.append(c)
    return elements


def _require_tree(g: TubularGraph):
    G = to_networkx(g)
    if not nx.is_connected(G):
        raise NotATreeError("graph is disconnected")
    if G.number_of_edges() != G.number_of_nodes() - 1:
        raise NotATreeError("graph has a cycle")


def _align(elements: list[LatticeVector], z: LatticeVector, r: int) -> list[int]:
    """Permutation putting the element parallel to z at slot r, the rest in list order."""
    zero = [i for i, c in enumerate(elements) if intersection_number(c, z) == 0]
    assert len(zero) == 1
    rest = [i for i in range(len(elements)) if i != zero[0]]
    return rest[:r] + zero + rest[r:]


def construct_tree_walls(g: TubularGraph) -> tuple[EquitableSet, CompressedWallGraph, ConstructionTrace]:
    """Build a fortified primitive equitable set on a tree with walls of constant dilation.

    Walk the tree breadth first from a vertex with the most parallelism classes.
    Wall class s over the child is joined to class s over the parent; when the
    parent side needs l_s intersection points per child copy, the current
    component of class s is multiplied by l_s so that the grid pairing balances.

    Args:
        g (TubularGraph): Graph of groups whose underlying graph is a tree.

    Raises:
        NotATreeError: If the underlying graph is disconnected or has a cycle.

    Returns:
        EquitableSet: The constructed set.
        CompressedWallGraph: Wall classes with copy counts and per-copy intersection counts.
        ConstructionTrace: Base vertex, aligned element lists and per-edge factors.
    """
    _require_tree(g)
    n_classes = class_counts(g)
    m = max(2, max(n_classes.values()))
    base = min(g.vertices, key=lambda v: (-n_classes[v], v))

    order = {base: padded_elements(g, base, m)}
    permutations = {base: tuple(range(m))}
    counts: dict[tuple[int, str], int] = {(s, base): 1 for s in range(m)}
    G = nx.Graph()
    G.add_nodes_from(counts)
    class_edges = []
    steps = []

    queue = deque([base])
    while queue:
        p = queue.popleft()
        for e, p_end in sorted(g.incident(p), key=lambda t: t[0].id):
            c_end = EdgeEnd.PLUS if p_end == EdgeEnd.MINUS else EdgeEnd.MINUS
            c = e.end_vertex(c_end)
            if c in order:
                continue
            z_p, z_c = e.inclusion(p_end), e.inclusion(c_end)
            k = [intersection_number(x, z_p) for x in order[p]]
            r = k.index(0)
            child = padded_elements(g, c, m)
            perm = _align(child, z_c, r)
            order[c] = [child[i] for i in perm]
            permutations[c] = tuple(perm)
            l = [intersection_number(x, z_c) for x in order[c]]

            factors = []
            for s in range(m):
                if s == r:
                    counts[(s, c)] = 1
                    G.add_node((s, c))
                    factors.append(1)
                    continue
                for node in nx.node_connected_component(G, (s, p)):
                    counts[node] *= l[s]
                counts[(s, c)] = counts[(s, p)] // l[s] * k[s]
                G.add_edge((s, p), (s, c))
                factors.append(l[s])
                if p_end == EdgeEnd.MINUS:
                    class_edges.append(dict(cls=s, over=e.id, minus=p, plus=c, k=k[s], l=l[s]))
                else:
                    class_edges.append(dict(cls=s, over=e.id, minus=c, plus=p, k=l[s], l=k[s]))
            steps.append(TraceStep(edge=e.id, parent=p, child=c, aligned=r, k=tuple(k), l=tuple(l),
                                   factors=tuple(factors)))
            logger.debug("edge %s: %s -> %s aligned at %d, factors %s", e.id, p, c, r, factors)
            queue.append(c)

    s_set = EquitableSet({
        v: tuple(sorted((SetEntry(element=order[v][s], count=counts[(s, v)]) for s in range(m)),
                        key=lambda entry: entry.element))
        for v in g.vertices
    })
    compressed = CompressedWallGraph(
        nodes=tuple(ClassNode(cls=s, vertex=v, element=order[v][s], count=counts[(s, v)])
                    for v in g.vertices for s in range(m)),
        edges=tuple(ClassEdge(**ce) for ce in class_edges),
    )
    trace = ConstructionTrace(
        base_vertex=base,
        m=m,
        small_case=max(n_classes.values()) <= 2,
        elements={v: tuple(order[v]) for v in g.vertices},
        permutations=permutations,
        steps=tuple(steps),
    )
    return s_set, compressed, trace


class CheckLevel(str, Enum):
    EXPLICIT = "explicit"
    CLASS_GRAPH = "class-graph"


class EdgeTable(BaseModel, frozen=True):
    edge: str
    aligned: int
    k: tuple[BigInt, ...]
    l: tuple[BigInt, ...]


class Certificate(BaseModel, frozen=True):
    status: str
    graph_hash: str
    m: int
    base_vertex: str
    small_case: bool
    elements: EquitableSet
    edge_tables: tuple[EdgeTable, ...]
    pairing: str = "grid"
    checks: dict[str, bool]
    check_level: CheckLevel
    materialized_size: BigInt
    screen: ScreenVerdict
    consequences: tuple[str, ...]
    witness: Witness | None = None

    def raise_for_status(self):
        if self.status != "certified":
            failed = sorted(name for name, ok in self.checks.items() if not ok)
            raise CertificationError(f"construction failed independent checks: {failed}")


def graph_hash(g: TubularGraph) -> str:
    return hashlib.sha256(serialize_graph(g).encode()).hexdigest()


def certify_virtually_special(g: TubularGraph, expand_limit: int = DEFAULT_EXPAND_LIMIT) -> Certificate:
    """Run the tree construction and re-verify every condition with the independent checkers.

    The wall conditions are checked on the explicit expansion when it fits
    within expand_limit, otherwise on the class graph. A failing check yields
    an "internal-error" certificate.
    """
    s_set, compressed, trace = construct_tree_walls(g)
    checks = {
        "equitable": verify_equitable(g, s_set).ok,
        "fortified": verify_fortified(g, s_set).ok,
        "primitive": verify_primitive(s_set).ok,
    }
    size = materialized_size(compressed)
    class_undilated = check_class_undilated(compressed)
    class_propdil = check_class_propdil(compressed)
    try:
        w = expand(compressed, expand_limit)
    except MaterializationLimitError as err:
        logger.info("%s; checking walls on the class graph", err)
        level = CheckLevel.CLASS_GRAPH
        checks["propdil"] = class_propdil
        undilated = class_undilated
    else:
        level = CheckLevel.EXPLICIT
        undilated = check_undilated(w)
        checks["propdil"] = check_propdil(w)
        checks["walls_valid"] = validate_walls(g, w).ok
        if undilated.ok != class_undilated.ok or checks["propdil"] != class_propdil:
            logger.error("class-graph and explicit wall checks disagree")
            checks["class_agreement"] = False
    checks["undilated"] = undilated.ok

    status = "certified" if all(checks.values()) else "internal-error"
    if status != "certified":
        logger.error("certification failed for graph %s: %s", graph_hash(g)[:12], checks)
    return Certificate(
        status=status,
        graph_hash=graph_hash(g),
        m=trace.m,
        base_vertex=trace.base_vertex,
        small_case=trace.small_case,
        elements=s_set,
        edge_tables=tuple(EdgeTable(edge=st.edge, aligned=st.aligned, k=st.k, l=st.l) for st in trace.steps),
        checks=checks,
        check_level=level,
        materialized_size=size,
        screen=cubulation_screen(g),
        consequences=("virtually special", "linear over Z") if status == "certified" else (),
        witness=undilated.witness,
    )


def serialize_certificate(cert: Certificate) -> str:
    return dumps(cert.model_dump(mode="json"))
