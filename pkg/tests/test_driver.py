import pytest

from src.analysis import analyse
from src.constants import AnswerStatus, InstanceFamilies, SolveModes
from src.driver import Pipeline, PipelineOptions, run_query
from src.exc import ResourceLimitException
from src.frontend import Query, parse_database, parse_program
from src.instances import InstanceParams, gen_instance
from tests.conftest import load_query, load_schema


def relations(*rows):
    return frozenset(frozenset((value,) if isinstance(value, str) else value for value in row) for row in rows)


ALL = PipelineOptions(mode=SolveModes.all)
OPT = PipelineOptions(mode=SolveModes.opt)

# region optimization goals


class TestOptimization:
    def test_vertex_cover(self, corpus):
        schema, query, db = corpus("graph", "vertex_cover", "graph4")
        answer = run_query(schema, query, db, OPT)
        assert answer.status == AnswerStatus.answer
        assert answer.objective_value == 2
        assert answer.relation in relations(["a", "c"], ["b", "c"])

    def test_every_optimal_vertex_cover(self, corpus):
        schema, query, db = corpus("graph", "vertex_cover", "graph4")
        assert set(run_query(schema, query, db, ALL).relations) == relations(["a", "c"], ["b", "c"])

    def test_subset_formulation_agrees(self, corpus):
        schema, query, db = corpus("graph", "vertex_cover_subset", "graph4")
        assert set(run_query(schema, query, db, ALL).relations) == relations(["a", "c"], ["b", "c"])

    def test_min_coloring(self, corpus):
        schema, query, db = corpus("coloring", "min_coloring", "graph4_colors")
        answer = run_query(schema, query, db, OPT)
        assert answer.objective_value == 3
        assert answer.relation == frozenset({("red",), ("green",), ("blue",)})
        assert answer.solver_calls == 1
        assert answer.warnings == ()

    def test_edge_dominating_set(self, corpus):
        schema, query, db = corpus("graph", "edge_dominating_set", "graph4")
        answer = run_query(schema, query, db, ALL)
        assert answer.objective_value == 1
        assert set(answer.relations) == relations([("a", "c")], [("b", "c")])

    def test_dominating_set(self, corpus):
        schema, query, db = corpus("graph", "dominating_set", "graph4")
        answer = run_query(schema, query, db, ALL)
        assert answer.objective_value == 2
        assert set(answer.relations) == relations(["b", "d"], ["c", "d"])

    def test_max_sat(self, corpus):
        schema, query, db = corpus("sat", "max_sat", "sat")
        answer = run_query(schema, query, db, OPT)
        assert answer.objective_value == 3
        assert answer.relation == frozenset({("c1",), ("c3",), ("c4",)})


# endregion

# region plain goals


class TestPlainGoals:
    def test_first_coloring(self, corpus):
        schema, query, db = corpus("coloring", "coloring", "graph4_colors")
        answer = run_query(schema, query, db)
        assert len(answer.relations) == 1
        colors = dict(answer.relation)
        assert len(colors) == 4
        assert all(colors[source] != colors[target] for source, target in db.relation("edge"))

    def test_every_coloring(self, corpus):
        schema, query, db = corpus("coloring", "coloring", "graph4_colors")
        assert len(run_query(schema, query, db, ALL).relations) == 12

    def test_deterministic_program(self, graph_schema):
        db = gen_instance(InstanceFamilies.chain, InstanceParams(size=4))
        answer = run_query(graph_schema, load_query("transitive_closure"), db)
        assert len(answer.relation) == 6
        assert answer.objective_value is None

    def test_latin_square_with_preassigned_cells(self, corpus):
        schema, query, db = corpus("numbers", "latin_squares", "latin3_preassigned")
        answer = run_query(schema, query, db, ALL)
        assert len(answer.relations) == 1
        assert {(1, 1, 1), (2, 2, 3)} <= answer.relation

    def test_queens(self, corpus):
        schema, query, db = corpus("numbers", "queens", "queens4")
        answer = run_query(schema, query, db, ALL)
        assert set(answer.relations) == {
            frozenset({(1, 2), (2, 4), (3, 1), (4, 3)}),
            frozenset({(1, 3), (2, 1), (3, 4), (4, 2)}),
        }

    def test_unconstrained_goal_is_evaluated_afterwards(self, graph_schema, graph4):
        program = parse_program("v(X) <~ node(X).\nv(X) | v(Y) <- edge(X,Y).\nw(X) :- node(X), not v(X).\n? w(X).")
        options = PipelineOptions(plain_goal_constrains=False)
        answer = run_query(graph_schema, Query.from_program(program), graph4, options)
        cover = {node for (node,) in graph4.relation("node")} - {node for (node,) in answer.relation}
        assert all(source in cover or target in cover for source, target in graph4.relation("edge"))
        assert [step.step for step in answer.trace] == ["M1", "M2", "M4"]


# endregion

# region recursive checks


class TestRecursiveChecks:
    def test_hamiltonian_cycle(self, graph_schema):
        db = gen_instance(InstanceFamilies.cycle, InstanceParams(size=4))
        answer = run_query(graph_schema, load_query("hamiltonian_cycle"), db)
        assert answer.status == AnswerStatus.answer
        assert answer.relation == db.relation("edge")
        assert answer.solver_calls == 1
        assert answer.candidates > 1

    def test_no_hamiltonian_cycle(self, graph_schema):
        db = gen_instance(InstanceFamilies.chain, InstanceParams(size=4))
        answer = run_query(graph_schema, load_query("hamiltonian_cycle"), db)
        assert answer.status == AnswerStatus.no_solution
        assert answer.relations == ()

    def test_candidate_cap(self, graph_schema):
        db = gen_instance(InstanceFamilies.cycle, InstanceParams(size=4))
        with pytest.raises(ResourceLimitException) as e:
            run_query(graph_schema, load_query("hamiltonian_cycle"), db, PipelineOptions(candidate_cap=1))
        assert e.value.kind == "candidate"


# endregion


def test_trace_is_printed(capsys, corpus):
    schema, query, db = corpus("graph", "vertex_cover", "graph4")
    pipeline = Pipeline(analysis=analyse(query.program, schema), db=db, options=PipelineOptions(trace=True))
    answer = pipeline.run()
    assert [step.step for step in answer.trace] == ["M1", "M2"]
    assert "M2" in capsys.readouterr().out
    assert pipeline.model is not None and pipeline.prelude is not None


def test_primes_need_no_solver():
    schema = load_schema("integers")
    query = load_query("primes")
    answer = run_query(schema, query, parse_database("", schema))
    assert len(answer.relation) == 8
    assert answer.solver_calls == 0


def test_empty_intersections_are_warned_about(coloring_schema, graph4_colors):
    program = parse_program("q(X) :- node(X), color(X).\n? q(X).")
    answer = run_query(coloring_schema, Query.from_program(program), graph4_colors)
    assert answer.status == AnswerStatus.answer
    assert answer.relation == frozenset()
    assert len(answer.warnings) == 1
