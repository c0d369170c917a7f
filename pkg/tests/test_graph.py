import json
import logging

import pytest

from tubular_tools.errors import InputError
from tubular_tools.fixtures import fixture_graph
from tubular_tools.graph import (EdgeEnd, ScreenVerdict, class_counts, cubulation_screen, is_tree, parallelism_classes,
                                 parse_graph, serialize_graph, to_networkx)
from tubular_tools.lattice import LatticeVector as V


def graph_doc(**overrides):
    doc = {
        "vertices": ["v0", "v1"],
        "edges": [{"id": "e0", "minus": "v0", "plus": "v1", "z_minus": [1, 0], "z_plus": [1, 1]}],
    }
    doc.update(overrides)
    return json.dumps(doc)


def test_parse_raag_path(raag_path):
    assert raag_path.vertices == ("v0", "v1", "v2")
    assert raag_path.edge("e1").z_minus == V(0, 1)
    assert class_counts(raag_path) == {"v0": 1, "v1": 2, "v2": 1}
    assert parallelism_classes(raag_path, "v1") == [V(0, 1), V(1, 0)]
    assert is_tree(raag_path)


def test_roundtrip(raag_path):
    assert parse_graph(serialize_graph(raag_path)) == raag_path
    assert serialize_graph(raag_path) == serialize_graph(parse_graph(serialize_graph(raag_path)))


@pytest.mark.parametrize("edges, message", [
    ([{"id": "e0", "minus": "v0", "plus": "v9", "z_minus": [1, 0], "z_plus": [1, 1]}],
     r"edges\[0\] \(id 'e0'\): unknown vertex 'v9'"),
    ([{"id": "e0", "minus": "v0", "plus": "v1", "z_minus": [0, 0], "z_plus": [1, 1]}],
     r"edges\[0\] \(id 'e0'\): z_minus is a zero inclusion vector"),
    ([{"id": "e0", "minus": "v0", "plus": "v1", "z_minus": [1, 0], "z_plus": [1, 1]},
      {"id": "e0", "minus": "v1", "plus": "v0", "z_minus": [1, 0], "z_plus": [1, 1]}],
     r"edges\[1\] \(id 'e0'\): duplicate edge id"),
])
def test_parse_errors_name_the_object(edges, message):
    with pytest.raises(InputError, match=message):
        parse_graph(graph_doc(edges=edges))


def test_parse_rejects_bad_documents():
    with pytest.raises(InputError, match="duplicate vertex id 'v0'"):
        parse_graph(graph_doc(vertices=["v0", "v0", "v1"]))
    with pytest.raises(InputError, match="no vertices"):
        parse_graph(graph_doc(vertices=[], edges=[]))
    with pytest.raises(InputError, match="invalid graph document"):
        parse_graph("{not json")
    with pytest.raises(InputError, match="z_plus"):
        parse_graph(graph_doc(edges=[{"id": "e0", "minus": "v0", "plus": "v1", "z_minus": [1, 0]}]))


def test_disconnected_graph_warns(caplog):
    with caplog.at_level(logging.WARNING, logger="tubular_tools.graph"):
        g = parse_graph(graph_doc(edges=[]))
    assert not is_tree(g)
    assert "not connected" in caplog.text


def test_loops_contribute_both_ends(example1):
    g, _ = example1
    ends = g.incident("v")
    assert [(e.id, end) for e, end in ends] == [
        ("e0", EdgeEnd.MINUS), ("e0", EdgeEnd.PLUS), ("e1", EdgeEnd.MINUS), ("e1", EdgeEnd.PLUS)]
    assert g.edge("e0").is_loop()
    with pytest.raises(InputError, match="unknown vertex"):
        g.incident("w")
    with pytest.raises(InputError, match="unknown edge"):
        g.edge("e7")


def test_networkx_view(example1):
    g, _ = example1
    G = to_networkx(g)
    assert G.number_of_nodes() == 1
    assert sorted(k for _, _, k in G.edges(keys=True)) == ["e0", "e1"]
    assert not is_tree(g)


@pytest.mark.parametrize("name, classes, verdict", [
    ("example1", 3, ScreenVerdict.NOT_COCOMPACTLY_CUBULATED),
    ("example2", 3, ScreenVerdict.NOT_COCOMPACTLY_CUBULATED),
    ("raag_path3", 2, ScreenVerdict.INCONCLUSIVE),
    ("star3", 3, ScreenVerdict.NOT_COCOMPACTLY_CUBULATED),
])
def test_cubulation_screen(name, classes, verdict):
    g = fixture_graph(name)
    assert max(class_counts(g).values()) == classes
    assert cubulation_screen(g) == verdict
