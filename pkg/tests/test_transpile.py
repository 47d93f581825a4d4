import pytest

from src.analysis import analyse
from src.constants import Passes
from src.driver import transpile_query
from src.exc import TranspileException
from src.fixpoint import Interpretation, evaluate_stratified
from src.frontend import parse_program
from src.transpile import emit_fixp_script, emit_opl, print_model
from src.transpile.model import BooleanArray, IntArray, RangeDecl
from src.utils import opl_tokens
from tests.conftest import CORPUS, GOLDEN, load_query


def assert_same_opl(text: str, golden: str) -> None:
    assert opl_tokens(text) == opl_tokens((GOLDEN / golden).read_text())


@pytest.fixture()
def min_coloring(coloring_schema):
    return analyse(load_query("min_coloring").program, coloring_schema)


# region constraint models


@pytest.mark.parametrize(
    "passes, golden",
    [
        ((), "min_coloring.mod"),
        ((Passes.range_restriction,), "min_coloring_restricted.mod"),
    ],
)
def test_min_coloring_model(min_coloring, passes, golden):
    assert_same_opl(print_model(transpile_query(min_coloring, passes)), golden)


def test_min_coloring_optimized_model(min_coloring):
    model = transpile_query(min_coloring)
    assert_same_opl(emit_opl(model), "min_coloring_optimized.mod")
    assert model.array("col") == IntArray("col", ("node",), "intcolor")
    assert model.array("used_color") == BooleanArray("used_color", ("intcolor",))
    assert model.ranges() == {"intcolor": RangeDecl("intcolor", "color", 1)}


def test_unoptimized_declarations(min_coloring):
    model = transpile_query(min_coloring, ())
    assert [decl.name for decl in model.decision_arrays()] == ["col", "used_color"]
    assert model.objective is not None


def test_plain_goal_has_no_objective(coloring_schema):
    model = transpile_query(analyse(load_query("coloring").program, coloring_schema), ())
    assert model.objective is None


def test_optimized_goal_with_recursive_checks_is_rejected(graph_schema):
    text = (CORPUS / "hamiltonian_cycle.npd").read_text().replace("? path(X,Y).", "? min |path(X,Y)|.")
    program = parse_program(text)
    with pytest.raises(TranspileException):
        transpile_query(analyse(program, graph_schema))


# endregion

# region opl text


def test_data_section(min_coloring, graph4_colors):
    text = emit_opl(transpile_query(min_coloring), graph4_colors)
    assert "{string} node = {a, b, c, d};" in text
    assert "{string} color = {red, green, blue};" in text
    assert "tuple edge_type { string a1; string a2; };" in text
    assert "{edge_type} edge = {<a,b>, <a,c>, <b,c>, <c,d>};" in text
    assert text.index("{string} node") < text.index("dvar int col[node] in intcolor;")


def test_known_arrays_are_initialized(graph_schema, graph4):
    program = parse_program(
        "tc(X,Y) :- edge(X,Y).\ntc(X,Y) :- tc(X,Z), edge(Z,Y).\nv(X) <~ node(X).\n"
        ":- tc(X,Y), v(X), v(Y).\n? v(X)."
    )
    analysis = analyse(program, graph_schema)
    base = Interpretation.from_database(graph4.with_domains(analysis.schema))
    known = evaluate_stratified(analysis.partition.p1, base)
    text = emit_opl(transpile_query(analysis), graph4, known)
    assert "int tc[node,node] = [[0, 1, 1, 1], [0, 0, 1, 1], [0, 0, 0, 1], [0, 0, 0, 0]];" in text


def test_fixpoint_script(graph_schema):
    analysis = analyse(load_query("transitive_closure").program, graph_schema)
    script = emit_fixp_script(list(analysis.partition.p1), analysis.schema)
    assert "int tc[node][node];" in script
    assert "execute {" in script
    assert "while (modified) {" in script
    assert script.index("// exit rule") < script.index("// recursive rule")


def test_fixpoint_script_without_rules(graph_schema):
    assert emit_fixp_script([], graph_schema) == ""


# endregion
