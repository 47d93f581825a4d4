import pytest

from src.constants import RuleKinds, SolveModes
from src.driver import PipelineOptions, run_query
from src.exc import OracleBoundException
from src.fixpoint import Interpretation, evaluate_stratified
from src.frontend import Atom, Database, Literal, Variable, parse_database, parse_program
from src.oracle import (
    enumerate_stable_models,
    guess_answer,
    iter_answers,
    oracle_answer,
    st_transform,
)
from tests.conftest import load_query

X = Variable("X")

# region rewriting


def test_partition_rules_become_guarded_rules():
    rules = st_transform(load_query("vertex_cover").program)
    assert all(rule.kind == RuleKinds.standard for rule in rules)
    assert rules[0].head == (Atom("v", (X,)),)
    assert rules[0].body[0][-1] == Literal(Atom("nv", (X,)), negated=True)
    assert rules[2].head[0].predicate == "constraint__st1"


def test_generalized_partition_adds_a_uniqueness_check():
    rules = st_transform(load_query("coloring").program)
    assert [rule.head[0].predicate for rule in rules] == [
        "col",
        "diff_col__st1",
        "constraint__st2",
        "constraint__st3",
    ]


# endregion

# region stable models


def test_even_loop_has_two_stable_models():
    models = enumerate_stable_models(parse_program("p :- not q.\nq :- not p.").rules, Database())
    assert [model.atoms() for model in models] == [[("p", ())], [("q", ())]]


def test_odd_loop_has_none():
    assert enumerate_stable_models(parse_program("p :- not p.").rules, Database()) == []


def test_partition_over_an_isolated_node(graph_schema):
    db = parse_database("node(a).\n", graph_schema)
    models = enumerate_stable_models(st_transform(load_query("vertex_cover").program), db)
    assert [model.restrict(["v", "nv"]).atoms() for model in models] == [[("nv", ("a",))], [("v", ("a",))]]


def test_stratified_program_has_its_fixpoint_as_only_model(corpus):
    _, query, db = corpus("graph", "transitive_closure", "graph4")
    rules = st_transform(query.program)
    (model,) = enumerate_stable_models(rules, db)
    assert model == evaluate_stratified(rules, Interpretation.from_database(db))
    assert len(model.relation("tc")) == 6


def test_bound(corpus):
    _, query, db = corpus("graph", "vertex_cover", "graph4")
    with pytest.raises(OracleBoundException) as e:
        oracle_answer(query, db, bound=3)
    assert e.value.atoms == 4


# endregion

# region answers


def test_vertex_cover(corpus):
    _, query, db = corpus("graph", "vertex_cover", "graph4")
    answers = list(iter_answers(oracle_answer(query, db)))
    assert answers == [frozenset({("a",), ("c",)}), frozenset({("b",), ("c",)})]


@pytest.mark.parametrize(
    "schema_name, program_name, facts_name",
    [
        ("graph", "vertex_cover", "graph4"),
        ("graph", "vertex_cover_subset", "graph4"),
        ("graph", "edge_dominating_set", "graph4"),
        ("coloring", "coloring", "graph4_colors"),
    ],
)
def test_pipeline_agrees_with_stable_models(corpus, schema_name, program_name, facts_name):
    schema, query, db = corpus(schema_name, program_name, facts_name)
    answer = run_query(schema, query, db, PipelineOptions(mode=SolveModes.all))
    assert set(answer.relations) == oracle_answer(query, db)


@pytest.mark.parametrize(
    "schema_name, program_name, facts_name, count",
    [
        ("numbers", "queens", "queens4", 2),
        ("numbers", "latin_squares", "latin3", 12),
        ("numbers", "latin_squares", "latin3_preassigned", 1),
        ("graph", "dominating_set", "graph4", 2),
        ("sat", "max_sat", "sat", 1),
    ],
)
def test_guess_enumeration(corpus, schema_name, program_name, facts_name, count):
    schema, query, db = corpus(schema_name, program_name, facts_name)
    answers = guess_answer(query, db)
    assert len(answers) == count
    assert set(run_query(schema, query, db, PipelineOptions(mode=SolveModes.all)).relations) == answers


# endregion
