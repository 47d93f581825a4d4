from itertools import count, product
from types import SimpleNamespace

import pytest

from src.analysis import analyse
from src.constants import ConstraintKinds, SolveModes, SolverConfig
from src.driver import transpile_query
from src.exc import ResourceLimitException, TranspileException
from src.fixpoint import compare
from src.solver import ground, iter_solutions, search, solve
from src.solver.grounding import (
    COMPARATORS,
    FALSE,
    TRUE,
    Add,
    Arith,
    Cell,
    CellDecl,
    Cmp,
    GroundConstraint,
    GroundModel,
    Lit,
)
from tests.conftest import load_query

# region brute force


def evaluate(term, assignment):
    if isinstance(term, Lit):
        return term.value
    if isinstance(term, Cell):
        return assignment[term.index]
    if isinstance(term, Add):
        return sum(evaluate(part, assignment) for part in term.terms)
    if isinstance(term, Arith):
        left, right = evaluate(term.left, assignment), evaluate(term.right, assignment)
        return {"+": left + right, "-": left - right, "*": left * right}[term.op]
    assert isinstance(term, Cmp)
    return int(compare(COMPARATORS[term.op], evaluate(term.left, assignment), evaluate(term.right, assignment)))


def satisfies(model, assignment):
    for constraint in model.constraints:
        lhs, rhs = evaluate(constraint.lhs, assignment) != 0, evaluate(constraint.rhs, assignment) != 0
        if constraint.kind == ConstraintKinds.implication and lhs and not rhs:
            return False
        if constraint.kind == ConstraintKinds.biconditional and lhs != rhs:
            return False
    return True


def brute_force(model):
    ranges = [range(cell.low, cell.high + 1) for cell in model.cells]
    return [assignment for assignment in product(*ranges) if satisfies(model, assignment)]


# endregion


@pytest.fixture()
def coloring_model(coloring_schema, graph4_colors):
    analysis = analyse(load_query("coloring").program, coloring_schema)
    return ground(transpile_query(analysis), graph4_colors)


@pytest.fixture()
def min_coloring_model(coloring_schema, graph4_colors):
    analysis = analyse(load_query("min_coloring").program, coloring_schema)
    return ground(transpile_query(analysis), graph4_colors)


# region grounding


def test_reduced_cells(coloring_model):
    assert [(cell.array, cell.indices, cell.low, cell.high) for cell in coloring_model.cells] == [
        ("col", ("a",), 1, 3),
        ("col", ("b",), 1, 3),
        ("col", ("c",), 1, 3),
        ("col", ("d",), 1, 3),
    ]
    assert len(coloring_model.constraints) == 4


def test_empty_cell_range():
    with pytest.raises(TranspileException):
        GroundModel(cells=[CellDecl("p", (), 1, 0)])


def test_undeclared_cell():
    with pytest.raises(TranspileException):
        GroundModel(cells=[], constraints=[GroundConstraint.from_sides(ConstraintKinds.implication, Cell(0), FALSE)])


# endregion

# region search


def test_all_solutions_match_brute_force(coloring_model):
    solutions = solve(coloring_model, SolveModes.all)
    assert sorted(solution.assignment for solution in solutions) == sorted(brute_force(coloring_model))
    assert len(solutions) == 12


def test_first_solution(coloring_model):
    (solution,) = solve(coloring_model, SolveModes.first)
    assert satisfies(coloring_model, solution.assignment)
    assert solution == next(iter_solutions(coloring_model))


def test_solutions_are_deterministic(coloring_model):
    assert list(iter_solutions(coloring_model)) == list(iter_solutions(coloring_model))


def test_optimum(min_coloring_model):
    (solution,) = solve(min_coloring_model, SolveModes.opt)
    assert solution.objective_value == 3
    assert satisfies(min_coloring_model, solution.assignment)


def test_all_optimal_solutions(min_coloring_model):
    solutions = solve(min_coloring_model, SolveModes.all)
    assert len(solutions) == 12
    assert {solution.objective_value for solution in solutions} == {3}


def test_node_limit(coloring_model):
    with pytest.raises(ResourceLimitException) as e:
        solve(coloring_model, SolveModes.all, SolverConfig(node_limit=1))
    assert e.value.kind == "node"


def test_time_limit(coloring_model, monkeypatch):
    clock = count()
    monkeypatch.setattr(search, "time", SimpleNamespace(monotonic=lambda: float(next(clock))))
    monkeypatch.setattr(search, "TIME_CHECK_INTERVAL", 1)
    with pytest.raises(ResourceLimitException) as e:
        solve(coloring_model, SolveModes.all, SolverConfig(time_limit=0.5))
    assert e.value.kind == "time"


def test_unsatisfiable_model():
    never = GroundConstraint.from_sides(ConstraintKinds.implication, TRUE, Cmp("==", Cell(0), Lit(2)))
    model = GroundModel(cells=[CellDecl("p", (), 0, 1)], constraints=[never])
    assert solve(model, SolveModes.all) == []


# endregion
