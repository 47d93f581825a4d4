import pytest

from src.constants import InstanceFamilies
from src.exc import ValidationException
from src.frontend import parse_database
from src.instances import InstanceParams, gen_instance
from tests.conftest import load_schema


def edge_count(family, size):
    return len(gen_instance(family, InstanceParams(size=size)).relation("edge"))


@pytest.mark.parametrize(
    "family, size, edges",
    [
        (InstanceFamilies.chain, 4, 3),
        (InstanceFamilies.cycle, 4, 4),
        (InstanceFamilies.cycle, 1, 0),
        (InstanceFamilies.complete, 3, 6),
        (InstanceFamilies.grid_ladder, 3, 14),
    ],
)
def test_graph_families(family, size, edges):
    assert edge_count(family, size) == edges


def test_ladder_has_two_rails():
    db = gen_instance(InstanceFamilies.grid_ladder, InstanceParams(size=3))
    assert db.extent("node") == ("n1", "n2", "n3", "n4", "n5", "n6")
    assert ("n1", "n4") in db.relation("edge") and ("n4", "n1") in db.relation("edge")


def test_random_graphs_are_reproducible():
    params = InstanceParams(size=8, probability=0.5, seed=7)
    first = gen_instance(InstanceFamilies.random_gnp, params)
    assert first.relation("edge") == gen_instance(InstanceFamilies.random_gnp, params).relation("edge")
    assert all((target, source) in first.relation("edge") for source, target in first.relation("edge"))


def test_random_graphs_need_a_seed():
    with pytest.raises(ValidationException) as e:
        gen_instance(InstanceFamilies.random_gnp, InstanceParams(size=3, probability=0.5))
    assert "seed" in str(e.value)


def test_numbers():
    db = gen_instance(InstanceFamilies.numbers, InstanceParams(size=3))
    assert db.extent("num") == (1, 2, 3)
    assert db.facts == {}


def test_colors():
    db = gen_instance(InstanceFamilies.complete, InstanceParams(size=2, colors=2))
    assert db.extent("color") == ("c1", "c2")


def test_text_parses_back():
    schema = load_schema("coloring")
    db = gen_instance(InstanceFamilies.cycle, InstanceParams(size=5, colors=3))
    assert parse_database(db.to_text(), schema) == db


def test_chain_text():
    db = gen_instance(InstanceFamilies.chain, InstanceParams(size=3))
    assert db.to_text() == "node(n1).\nnode(n2).\nnode(n3).\nedge(n1,n2).\nedge(n2,n3).\n"
