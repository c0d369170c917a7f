import pytest

from tubular_tools.equitable import (check_all, edge_end_sum, make_set, normalize_curves, parse_set, serialize_set,
                                     verify_equitable, verify_fortified, verify_primitive)
from tubular_tools.errors import CoverageError, InputError
from tubular_tools.graph import TubularGraph
from tubular_tools.lattice import LatticeVector as V


def single_edge(z_minus, z_plus, loop=False):
    plus = "v0" if loop else "v1"
    return TubularGraph.model_validate({
        "vertices": ["v0"] if loop else ["v0", "v1"],
        "edges": [{"id": "e", "minus": "v0", "plus": plus, "z_minus": z_minus, "z_plus": z_plus}],
    })


@pytest.mark.parametrize("entries, z, expected", [
    ([((0, 1), 1)], (1, 0), 1),
    ([((1, 0), 2), ((0, 1), 3)], (1, 1), 5),
    ([((1, 0), 7)], (1, 0), 0),
])
def test_edge_end_sum(entries, z, expected):
    g = single_edge(z, (1, 0), loop=True)
    s = make_set({"v0": entries})
    assert edge_end_sum(g, s, "e", "minus") == expected


def test_edge_without_curves_is_balanced():
    g = TubularGraph.model_validate({"vertices": ["v0", "v1"]})
    s = make_set({"v0": [((1, 0), 1), ((0, 1), 1)], "v1": [((1, 0), 1), ((0, 1), 1)]})
    assert verify_equitable(g, s).ok


def test_single_edge_balance():
    g = single_edge((1, 0), (0, 1))
    s = make_set({"v0": [((0, 1), 1), ((1, 0), 1)], "v1": [((0, 1), 1), ((1, 0), 1)]})
    assert verify_equitable(g, s).ok

    heavy = make_set({"v0": [((0, 1), 2), ((1, 0), 1)], "v1": [((0, 1), 1), ((1, 0), 1)]})
    report = verify_equitable(g, heavy)
    assert not report
    [violation] = report.violations
    assert violation.kind == "unbalanced-edge"
    assert violation.object == "e"
    assert (violation.minus_sum, violation.plus_sum) == (2, 1)


def test_all_parallel_vertex_is_a_violation():
    g = TubularGraph.model_validate({"vertices": ["v0"]})
    report = verify_equitable(g, make_set({"v0": [((1, 0), 3)]}))
    assert [(v.kind, v.object) for v in report.violations] == [("all-parallel", "v0")]


def test_missing_vertex_is_a_coverage_error():
    g = single_edge((1, 0), (0, 1))
    with pytest.raises(CoverageError, match="v1"):
        verify_equitable(g, make_set({"v0": [((1, 0), 1), ((0, 1), 1)]}))
    with pytest.raises(InputError):
        verify_fortified(g, make_set({"v0": [((1, 0), 1), ((0, 1), 1)]}))


def test_fortified_ends():
    g = single_edge((2, 0), (1, 1))
    s = make_set({"v0": [((1, 0), 1), ((0, 1), 1)], "v1": [((1, 0), 1), ((0, 1), 1)]})
    report = verify_fortified(g, s)
    assert [v.object for v in report.violations] == ["e:plus"]


def test_example1_set(example1):
    g, s = example1
    assert edge_end_sum(g, s, "e0", "minus") == edge_end_sum(g, s, "e0", "plus") == 4
    assert edge_end_sum(g, s, "e1", "minus") == edge_end_sum(g, s, "e1", "plus") == 4
    reports = check_all(g, s)
    assert all(reports.values())


def test_example2_set_is_equitable_but_not_fortified(example2):
    g, s = example2
    assert verify_equitable(g, s).ok
    fortified = verify_fortified(g, s)
    assert not fortified.ok
    assert {v.object for v in fortified.violations} == {"s:plus", "t:plus"}
    assert verify_primitive(s).ok


def test_primitive_repair_hint():
    assert verify_primitive(make_set({"v": [((1, 2), 5)]})).ok
    report = verify_primitive(parse_set('{"v": [{"element": [2, 4], "count": 1}]}'))
    [violation] = report.violations
    assert violation.kind == "non-primitive"
    assert "(1, 2) x 2" in violation.detail


def test_primitive_rejects_empty_zero_and_duplicates():
    s = parse_set('{"u": [], "v": [{"element": [0, 0], "count": 1}],'
                  ' "w": [{"element": [1, 1], "count": 1}, {"element": [1, 1], "count": 2}]}')
    kinds = {(v.kind, v.object) for v in verify_primitive(s).violations}
    assert kinds == {("empty-vertex", "u"), ("zero-curve", "v[0]"), ("duplicate", "w[1]")}


def test_normalize_curves_merges_multiples():
    s = normalize_curves({"v": [(2, 4), (-1, -2), (0, 3), (1, 0)]})
    assert [(e.element, e.count) for e in s.entries("v")] == [(V(0, 1), 3), (V(1, 0), 1), (V(1, 2), 3)]
    assert verify_primitive(s).ok


def test_scaling_preserves_checks(example1, example2):
    for g, s in (example1, example2):
        before = {k: r.ok for k, r in check_all(g, s).items()}
        after = {k: r.ok for k, r in check_all(g, s.scaled(7)).items()}
        assert before == after


def test_adding_curves_only_increases_sums(example1):
    g, s = example1
    bigger = make_set({"v": [((0, 1), 1), ((1, 0), 1), ((1, 1), 3), ((1, 2), 1)]})
    for e in g.edges:
        for end in ("minus", "plus"):
            assert edge_end_sum(g, bigger, e.id, end) >= edge_end_sum(g, s, e.id, end)


def test_big_counts_travel_as_strings():
    s = make_set({"v": [((1, 0), 10**40), ((0, 1), 1)]})
    text = serialize_set(s)
    assert f'"{10**40}"' in text
    assert parse_set(text) == s


def test_nonpositive_count_is_rejected():
    with pytest.raises(InputError, match="count"):
        parse_set('{"v": [{"element": [1, 0], "count": 0}]}')


def test_zero_curve_is_reported_by_check_all(example1):
    g, _ = example1
    s = parse_set('{"v": [{"element": [0, 1], "count": 1}, {"element": [1, 0], "count": 1},'
                  ' {"element": [1, 1], "count": 3}, {"element": [0, 0], "count": 2}]}')
    reports = check_all(g, s)
    assert reports["equitable"].ok
    assert reports["fortified"].ok
    assert [(v.kind, v.object) for v in reports["primitive"].violations] == [("zero-curve", "v[3]")]


def test_non_canonical_element_has_its_own_kind():
    report = verify_primitive(parse_set('{"v": [{"element": [-1, 2], "count": 1}, {"element": [1, 0], "count": 1}]}'))
    [violation] = report.violations
    assert (violation.kind, violation.object) == ("non-canonical", "v[0]")
    assert "(1, -2)" in violation.detail


def test_elements_accept_monomials(example1):
    _, s = example1
    text = ('{"v": [{"element": "b", "count": 1}, {"element": "a", "count": 1},'
            ' {"element": "a b", "count": 3}]}')
    assert parse_set(text) == s
    assert parse_set('{"v": [{"element": "a^2 b^-1", "count": 1}]}').entries("v")[0].element == V(2, -1)
    with pytest.raises(InputError, match="unknown generator"):
        parse_set('{"v": [{"element": "a c", "count": 1}]}')
