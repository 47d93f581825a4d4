import re

import pytest
from click.testing import CliRunner

from npdl import main
from src.utils import opl_tokens
from tests.conftest import CORPUS, GOLDEN


def corpus_path(name: str) -> str:
    return str(CORPUS / name)


GRAPH = corpus_path("graph.nps")
GRAPH4 = corpus_path("graph4.npf")
COLORING = corpus_path("coloring.nps")
GRAPH4_COLORS = corpus_path("graph4_colors.npf")

DECLARATION = re.compile(r"^(?:\{\w+\}|int|range|tuple|dvar int|dvar boolean) (\w+)")


@pytest.fixture()
def runner():
    return CliRunner()


# region solve


class TestSolve:
    def test_optimal_answer(self, runner):
        result = runner.invoke(main, ["solve", GRAPH, corpus_path("vertex_cover.npd"), GRAPH4, "--mode", "opt"])
        assert result.exit_code == 0
        assert result.output.startswith("% objective: 2\n")
        assert "v(c)." in result.output

    def test_every_answer(self, runner):
        result = runner.invoke(main, ["solve", GRAPH, corpus_path("vertex_cover.npd"), GRAPH4, "--mode", "all"])
        assert result.exit_code == 0
        assert "% answer 2\n" in result.output
        assert "% answer 3\n" not in result.output

    def test_no_solution(self, runner):
        result = runner.invoke(main, ["solve", GRAPH, corpus_path("hamiltonian_cycle.npd"), GRAPH4])
        assert result.exit_code == 1
        assert result.output == "% no solution\n"

    def test_candidate_cap(self, runner, tmp_path):
        facts = tmp_path / "cycle.npf"
        facts.write_text(
            "node(n1). node(n2). node(n3). node(n4).\nedge(n1,n2). edge(n2,n3). edge(n3,n4). edge(n4,n1).\n"
        )
        result = runner.invoke(
            main, ["solve", GRAPH, corpus_path("hamiltonian_cycle.npd"), str(facts), "--candidate-cap", "1"]
        )
        assert result.exit_code == 3
        assert "candidate" in result.output

    def test_emit_solved_model(self, runner, tmp_path):
        target = tmp_path / "vertex_cover.mod"
        result = runner.invoke(
            main, ["solve", GRAPH, corpus_path("vertex_cover.npd"), GRAPH4, "--emit-opl", str(target)]
        )
        assert result.exit_code == 0
        assert "dvar" in target.read_text()

    def test_derived_facts_are_rejected(self, runner, tmp_path):
        facts = tmp_path / "colors.npf"
        facts.write_text((CORPUS / "graph4_colors.npf").read_text() + "used_color(red).\n")
        result = runner.invoke(main, ["solve", COLORING, corpus_path("min_coloring.npd"), str(facts)])
        assert result.exit_code == 2
        assert "used_color" in result.output

    def test_output_is_reproducible(self, runner):
        arguments = ["solve", COLORING, corpus_path("coloring.npd"), GRAPH4_COLORS, "--mode", "all"]
        first = runner.invoke(main, arguments)
        assert first.exit_code == 0
        assert first.output.count("% answer") == 12
        assert runner.invoke(main, arguments).output == first.output

    def test_syntax_error(self, runner, tmp_path):
        program = tmp_path / "broken.npd"
        program.write_text("v(X) :- node(X)\n? v(X).\n")
        result = runner.invoke(main, ["solve", GRAPH, str(program), GRAPH4])
        assert result.exit_code == 2
        assert "Syntax error" in result.output


# endregion

# region check and eval


def test_check(runner):
    result = runner.invoke(main, ["check", GRAPH, corpus_path("vertex_cover.npd")])
    assert result.exit_code == 0
    assert result.output.startswith("P1:\n")


def test_check_warns_about_empty_intersections(runner, tmp_path):
    program = tmp_path / "both.npd"
    program.write_text("q(X) :- node(X), color(X).\n? q(X).\n")
    result = runner.invoke(main, ["check", COLORING, str(program), GRAPH4_COLORS])
    assert result.exit_code == 0
    assert "Warning" in result.output
    assert "inter__color__node" in result.output
    assert runner.invoke(main, ["check", COLORING, str(program)]).output.startswith("P1:\n")


def test_eval(runner):
    result = runner.invoke(main, ["eval", GRAPH, corpus_path("transitive_closure.npd"), GRAPH4])
    assert result.exit_code == 0
    assert result.output.splitlines() == [
        "tc(a,b).",
        "tc(a,c).",
        "tc(a,d).",
        "tc(b,c).",
        "tc(b,d).",
        "tc(c,d).",
    ]


def test_eval_rejects_guesses(runner):
    result = runner.invoke(main, ["eval", GRAPH, corpus_path("vertex_cover.npd"), GRAPH4])
    assert result.exit_code == 2
    assert "use solve instead" in result.output


# endregion

# region emit


class TestEmit:
    def test_optimized(self, runner):
        result = runner.invoke(main, ["emit", COLORING, corpus_path("min_coloring.npd")])
        assert result.exit_code == 0
        assert opl_tokens(result.output) == opl_tokens((GOLDEN / "min_coloring_optimized.mod").read_text())

    def test_without_passes(self, runner):
        result = runner.invoke(main, ["emit", COLORING, corpus_path("min_coloring.npd"), "--opt", "none"])
        assert result.exit_code == 0
        assert opl_tokens(result.output) == opl_tokens((GOLDEN / "min_coloring.mod").read_text())

    def test_unknown_pass(self, runner):
        result = runner.invoke(main, ["emit", COLORING, corpus_path("min_coloring.npd"), "--opt", "inlining"])
        assert result.exit_code == 2

    def test_fixpoint_script(self, runner):
        result = runner.invoke(main, ["emit", GRAPH, corpus_path("transitive_closure.npd"), "--fixp"])
        assert result.exit_code == 0
        assert "while (modified) {" in result.output

    def test_data_section_declares_each_name_once(self, runner):
        result = runner.invoke(main, ["emit", COLORING, corpus_path("min_coloring.npd"), GRAPH4_COLORS])
        assert result.exit_code == 0
        names = [match.group(1) for line in result.output.splitlines() if (match := DECLARATION.match(line))]
        assert len(names) == len(set(names))
        assert {"node", "color", "edge", "col", "used_color"} <= set(names)

    def test_output_file(self, runner, tmp_path):
        target = tmp_path / "min_coloring.mod"
        result = runner.invoke(main, ["emit", COLORING, corpus_path("min_coloring.npd"), "-o", str(target)])
        assert result.exit_code == 0
        assert result.output == ""
        assert opl_tokens(target.read_text()) == opl_tokens((GOLDEN / "min_coloring_optimized.mod").read_text())


# endregion

# region gen and oracle


def test_gen(runner):
    result = runner.invoke(main, ["gen", "chain", "--size", "3"])
    assert result.exit_code == 0
    assert result.output == "node(n1).\nnode(n2).\nnode(n3).\nedge(n1,n2).\nedge(n2,n3).\n"


def test_gen_random_needs_a_seed(runner):
    result = runner.invoke(main, ["gen", "random-gnp", "--size", "3", "--probability", "0.5"])
    assert result.exit_code == 2


def test_random_graphs_are_reproducible(runner):
    arguments = ["gen", "random-gnp", "--size", "6", "--probability", "0.5", "--seed", "3"]
    first = runner.invoke(main, arguments)
    assert first.exit_code == 0
    assert runner.invoke(main, arguments).output == first.output


def test_oracle(runner):
    result = runner.invoke(main, ["oracle", GRAPH, corpus_path("vertex_cover.npd"), GRAPH4])
    assert result.exit_code == 0
    assert result.output == "% answer 1\nv(a).\nv(c).\n% answer 2\nv(b).\nv(c).\n"


def test_oracle_bound(runner):
    result = runner.invoke(main, ["oracle", GRAPH, corpus_path("vertex_cover.npd"), GRAPH4, "--bound", "2"])
    assert result.exit_code == 3


# endregion
