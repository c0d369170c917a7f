from collections import defaultdict
from typing import Iterable, Mapping

from pydantic import BaseModel, Field, RootModel, ValidationError, field_validator

from .errors import CoverageError, InputError
from .graph import EdgeEnd, TubularGraph, _input_error, dumps
from .lattice import (BigInt, LatticeVector, as_vector, canonical, intersection_number, parse_monomial,
                      primitive_decompose)


class SetEntry(BaseModel, frozen=True):
    element: LatticeVector
    count: BigInt = Field(gt=0)

    @field_validator("element", mode="before")
    @classmethod
    def _monomial(cls, v):
        # "a^2 b^-1" is accepted in place of [2, -1]
        return parse_monomial(v) if isinstance(v, str) else v


class EquitableSet(RootModel[dict[str, tuple[SetEntry, ...]]], frozen=True):
    """Per-vertex multiset of curves, stored as (element, copy count) entries.

    Sets built through `normalize_curves` or the tree construction hold
    canonical primitive elements only; sets read from JSON are taken as given
    and re-validated by `verify_primitive`.
    """

    def entries(self, v: str) -> tuple[SetEntry, ...]:
        if v not in self.root:
            raise CoverageError(f"equitable set does not cover vertex {v!r}")
        return self.root[v]

    def vertices(self) -> list[str]:
        return list(self.root)

    def scaled(self, factor: int) -> "EquitableSet":
        return EquitableSet({
            v: tuple(SetEntry(element=s.element, count=s.count * factor) for s in entries)
            for v, entries in self.root.items()
        })


def make_set(data: Mapping[str, Iterable[tuple[Iterable[int], int]]]) -> EquitableSet:
    return EquitableSet({
        v: tuple(SetEntry(element=as_vector(c), count=n) for c, n in entries)
        for v, entries in data.items()
    })


def normalize_curves(curves: Mapping[str, Iterable[Iterable[int]]]) -> EquitableSet:
    """Build a set from raw curves, one copy per listed curve.

    A non-primitive curve n*c is read as n parallel disjoint copies of the
    primitive curve c; copies in the same class are merged into one entry.
    """
    out = {}
    for v, vs in curves.items():
        counts: dict[LatticeVector, int] = defaultdict(int)
        for c in vs:
            prim, n = primitive_decompose(as_vector(c))
            counts[prim] += n
        out[v] = tuple(SetEntry(element=c, count=n) for c, n in sorted(counts.items()))
    return EquitableSet(out)


def parse_set(text: str | bytes) -> EquitableSet:
    try:
        return EquitableSet.model_validate_json(text)
    except ValidationError as err:
        raise _input_error(err, "equitable set document") from None


def load_set(path: str) -> EquitableSet:
    with open(path, "r") as f:
        return parse_set(f.read())


def serialize_set(s: EquitableSet) -> str:
    return dumps(s.model_dump(mode="json"))


class Violation(BaseModel, frozen=True):
    kind: str
    object: str
    detail: str
    minus_sum: BigInt | None = None
    plus_sum: BigInt | None = None


class CheckReport(BaseModel, frozen=True):
    ok: bool
    violations: tuple[Violation, ...] = ()

    def __bool__(self):
        return self.ok


def _report(violations: list[Violation]) -> CheckReport:
    return CheckReport(ok=len(violations) == 0, violations=tuple(violations))


def _require_coverage(g: TubularGraph, s: EquitableSet):
    missing = [v for v in g.vertices if v not in s.root]
    if missing:
        raise CoverageError(f"equitable set does not cover vertices {missing}")


def edge_end_sum(g: TubularGraph, s: EquitableSet, edge_id: str, end: EdgeEnd | str) -> int:
    """Sum of count * intersection number of the set at one end of an edge with its inclusion.

    Args:
        g (TubularGraph): The graph of groups.
        s (EquitableSet): Set covering the end's vertex.
        edge_id (str): Edge id.
        end (EdgeEnd | str): "minus" or "plus".

    Returns:
        int: Number of intersection points on that side of the edge.
    """
    e = g.edge(edge_id)
    end = EdgeEnd(end)
    z = e.inclusion(end)
    return sum(entry.count * intersection_number(entry.element, z)
               for entry in s.entries(e.end_vertex(end)) if not entry.element.is_zero())


def _not_all_parallel(entries: Iterable[SetEntry]) -> bool:
    # zero curves are left to verify_primitive
    return len({primitive_decompose(entry.element)[0] for entry in entries if not entry.element.is_zero()}) >= 2


def verify_equitable(g: TubularGraph, s: EquitableSet) -> CheckReport:
    _require_coverage(g, s)
    violations = []
    for e in g.edges:
        lhs = edge_end_sum(g, s, e.id, EdgeEnd.MINUS)
        rhs = edge_end_sum(g, s, e.id, EdgeEnd.PLUS)
        if lhs != rhs:
            violations.append(Violation(
                kind="unbalanced-edge", object=e.id,
                detail=f"intersection totals differ across edge {e.id!r}: {lhs} at {e.minus!r} vs {rhs} at {e.plus!r}",
                minus_sum=lhs, plus_sum=rhs,
            ))
    for v in g.vertices:
        if not _not_all_parallel(s.entries(v)):
            violations.append(Violation(
                kind="all-parallel", object=v,
                detail=f"curves at vertex {v!r} are all parallel (need >= 2 classes)",
            ))
    return _report(violations)


def verify_fortified(g: TubularGraph, s: EquitableSet) -> CheckReport:
    # "parallel to an element" and "an element with zero intersection" coincide on the torus
    _require_coverage(g, s)
    violations = []
    for e in g.edges:
        for end in EdgeEnd:
            z = e.inclusion(end)
            v = e.end_vertex(end)
            if not any(not entry.element.is_zero() and intersection_number(entry.element, z) == 0
                       for entry in s.entries(v)):
                violations.append(Violation(
                    kind="unfortified-end", object=f"{e.id}:{end.value}",
                    detail=f"no curve at vertex {v!r} is parallel to inclusion {tuple(z)} of edge {e.id!r}",
                ))
    return _report(violations)


def verify_primitive(s: EquitableSet) -> CheckReport:
    violations = []
    for v, entries in s.root.items():
        if len(entries) == 0:
            violations.append(Violation(kind="empty-vertex", object=v, detail=f"no curves at vertex {v!r}"))
        seen: set[LatticeVector] = set()
        for i, entry in enumerate(entries):
            if entry.element.is_zero():
                violations.append(Violation(kind="zero-curve", object=f"{v}[{i}]", detail="zero curve"))
                continue
            prim, n = primitive_decompose(entry.element)
            if n == 1 and canonical(entry.element) != entry.element:
                violations.append(Violation(
                    kind="non-canonical", object=f"{v}[{i}]",
                    detail=f"{tuple(entry.element)} is primitive but not sign-normalized; use {tuple(prim)}",
                ))
            elif n != 1:
                violations.append(Violation(
                    kind="non-primitive", object=f"{v}[{i}]",
                    detail=f"{tuple(entry.element)} is not primitive; "
                           f"use {tuple(prim)} x {n * entry.count}",
                ))
            elif prim in seen:
                violations.append(Violation(kind="duplicate", object=f"{v}[{i}]",
                                            detail=f"{tuple(prim)} listed twice at vertex {v!r}"))
            seen.add(prim)
    return _report(violations)


def check_all(g: TubularGraph, s: EquitableSet) -> dict[str, CheckReport]:
    if not isinstance(s, EquitableSet):
        raise InputError("expected an EquitableSet")
    return {
        "equitable": verify_equitable(g, s),
        "fortified": verify_fortified(g, s),
        "primitive": verify_primitive(s),
    }
