"""
Chronological backtracking over the cells of a ground model, in declaration order with ascending values. Each
assignment is followed by forward checking: a constraint left with a single open cell prunes the values of that cell
which would violate it. Objectives are handled by branch-and-bound.
"""

import time
from collections import deque
from typing import Callable, Iterable, Iterator, Optional

import attr

from src.constants import TIME_CHECK_INTERVAL, ConstraintKinds, GoalModes, SolveModes, SolverConfig
from src.exc import ResourceLimitException
from src.solver.grounding import Add, Arith, Cell, Cmp, GroundConstraint, GroundModel, GroundTerm, Lit

Bounds = tuple[int, int]


@attr.s(frozen=True)
class Solution:
    assignment: tuple[int, ...] = attr.ib(converter=tuple)
    objective_value: Optional[int] = attr.ib(default=None)

    def value(self, cell: int) -> int:
        return self.assignment[cell]


# region bounds


def multiply(left: Bounds, right: Bounds) -> Bounds:
    products = [a * b for a in left for b in right]
    return min(products), max(products)


def compare_bounds(op: str, left: Bounds, right: Bounds) -> Bounds:
    (a, b), (c, d) = left, right
    if op in ("==", "!="):
        if a == b == c == d:
            equal: Optional[bool] = True
        elif b < c or d < a:
            equal = False
        else:
            equal = None
        if equal is None:
            return 0, 1
        return (1, 1) if equal == (op == "==") else (0, 0)
    if op == "<":
        decided = (b < c, a >= d)
    elif op == "<=":
        decided = (b <= c, a > d)
    elif op == ">":
        decided = (a > d, b <= c)
    else:
        decided = (a >= d, b < c)
    if decided[0]:
        return 1, 1
    if decided[1]:
        return 0, 0
    return 0, 1


def truth(bounds: Bounds) -> Optional[bool]:
    low, high = bounds
    if low > 0 or high < 0:
        return True
    if low == high == 0:
        return False
    return None


# endregion


@attr.s
class Frame:
    cell: int = attr.ib()
    values: deque[int] = attr.ib()
    mark: int = attr.ib()


class Search:
    def __init__(self, model: GroundModel, config: SolverConfig):
        self.model = model
        self.config = config
        self.domains: list[list[int]] = [list(range(cell.low, cell.high + 1)) for cell in model.cells]
        self.trail: list[tuple[int, list[int]]] = []
        self.watchers: list[list[int]] = [[] for _ in model.cells]
        for position, constraint in enumerate(model.constraints):
            for cell in constraint.cells:
                self.watchers[cell].append(position)
        self.nodes = 0
        self.started = time.monotonic()

    # region evaluation

    def bounds(self, term: GroundTerm) -> Bounds:
        if isinstance(term, Lit):
            value = term.value
            assert isinstance(value, int)
            return value, value
        if isinstance(term, Cell):
            domain = self.domains[term.index]
            return domain[0], domain[-1]
        if isinstance(term, Add):
            parts = [self.bounds(part) for part in term.terms]
            return sum(low for low, _ in parts), sum(high for _, high in parts)
        if isinstance(term, Arith):
            (a, b), (c, d) = self.bounds(term.left), self.bounds(term.right)
            if term.op == "+":
                return a + c, b + d
            if term.op == "-":
                return a - d, b - c
            return multiply((a, b), (c, d))
        return self.compare(term)

    def compare(self, term: Cmp) -> Bounds:
        if term.op in ("==", "!="):
            for cell, other in ((term.left, term.right), (term.right, term.left)):
                if isinstance(cell, Cell) and len(self.domains[cell.index]) > 1:
                    low, high = self.bounds(other)
                    if low == high and low not in self.domains[cell.index]:
                        return (0, 0) if term.op == "==" else (1, 1)
        return compare_bounds(term.op, self.bounds(term.left), self.bounds(term.right))

    def status(self, constraint: GroundConstraint) -> Optional[bool]:
        """
        True when the constraint holds under every completion of the current domains, False when it holds under none.
        """

        lhs, rhs = truth(self.bounds(constraint.lhs)), truth(self.bounds(constraint.rhs))
        if constraint.kind == ConstraintKinds.implication:
            if lhs is False or rhs is True:
                return True
            if lhs is True and rhs is False:
                return False
            return None
        if lhs is None or rhs is None:
            return None
        return lhs == rhs

    def status_with(self, constraint: GroundConstraint, cell: int, value: int) -> Optional[bool]:
        saved = self.domains[cell]
        self.domains[cell] = [value]
        try:
            return self.status(constraint)
        finally:
            self.domains[cell] = saved

    def objective_bounds(self) -> Bounds:
        objective = self.model.objective
        assert objective is not None
        parts = [self.bounds(term) for term in objective.terms]
        return (
            objective.constant + sum(low for low, _ in parts),
            objective.constant + sum(high for _, high in parts),
        )

    # endregion

    # region propagation

    def set_domain(self, cell: int, values: list[int]) -> None:
        self.trail.append((cell, self.domains[cell]))
        self.domains[cell] = values

    def undo(self, mark: int) -> None:
        while len(self.trail) > mark:
            cell, values = self.trail.pop()
            self.domains[cell] = values

    def propagate(self, positions: Iterable[int]) -> bool:
        pending = deque(positions)
        queued = set(pending)
        while pending:
            position = pending.popleft()
            queued.discard(position)
            constraint = self.model.constraints[position]
            status = self.status(constraint)
            if status is False:
                return False
            if status is True:
                continue
            open_cells = [cell for cell in constraint.cells if len(self.domains[cell]) > 1]
            if len(open_cells) != 1:
                continue
            (cell,) = open_cells
            kept = [value for value in self.domains[cell] if self.status_with(constraint, cell, value) is not False]
            if len(kept) == len(self.domains[cell]):
                continue
            if not kept:
                return False
            self.set_domain(cell, kept)
            for watcher in self.watchers[cell]:
                if watcher not in queued:
                    queued.add(watcher)
                    pending.append(watcher)
        return True

    def assign(self, cell: int, value: int) -> bool:
        self.set_domain(cell, [value])
        return self.propagate(self.watchers[cell])

    # endregion

    def count_node(self) -> None:
        self.nodes += 1
        if self.nodes > self.config.node_limit:
            raise ResourceLimitException("node", self.config.node_limit)
        if self.nodes % TIME_CHECK_INTERVAL == 0 and time.monotonic() - self.started > self.config.time_limit:
            raise ResourceLimitException("time", self.config.time_limit)

    def next_cell(self) -> Optional[int]:
        return next((cell for cell, domain in enumerate(self.domains) if len(domain) > 1), None)

    def solution(self) -> Optional[Solution]:
        if not all(self.status(constraint) is True for constraint in self.model.constraints):
            return None
        value = self.objective_bounds()[0] if self.model.objective is not None else None
        return Solution(assignment=[domain[0] for domain in self.domains], objective_value=value)

    def assignments(self, pruned: Optional[Callable[["Search"], bool]] = None) -> Iterator[Solution]:
        """
        Every solution in search order. `pruned` is asked after each propagation whether the node can still improve on
        the incumbent.
        """

        self.started = time.monotonic()
        if not self.propagate(range(len(self.model.constraints))) or (pruned is not None and pruned(self)):
            return
        if (cell := self.next_cell()) is None:
            if (solution := self.solution()) is not None:
                yield solution
            return
        stack = [Frame(cell, deque(self.domains[cell]), len(self.trail))]
        while stack:
            frame = stack[-1]
            self.undo(frame.mark)
            if not frame.values:
                stack.pop()
                continue
            value = frame.values.popleft()
            self.count_node()
            if not self.assign(frame.cell, value) or (pruned is not None and pruned(self)):
                continue
            if (cell := self.next_cell()) is None:
                if (solution := self.solution()) is not None:
                    yield solution
                continue
            stack.append(Frame(cell, deque(self.domains[cell]), len(self.trail)))
        self.undo(0)


class BoundCheck:
    """
    Branch-and-bound test against the best objective value found so far. With `keep_ties` nodes that can only equal
    the incumbent survive, so every optimal solution is reached.
    """

    def __init__(self, sense: GoalModes, keep_ties: bool):
        self.sense = sense
        self.keep_ties = keep_ties
        self.best: Optional[int] = None

    def __call__(self, search: Search) -> bool:
        if self.best is None:
            return False
        low, high = search.objective_bounds()
        if self.sense == GoalModes.min:
            return low > self.best or (not self.keep_ties and low == self.best)
        return high < self.best or (not self.keep_ties and high == self.best)

    def improves(self, value: int) -> bool:
        if self.best is None:
            return True
        return value < self.best if self.sense == GoalModes.min else value > self.best


def iter_solutions(model: GroundModel, config: SolverConfig = SolverConfig()) -> Iterator[Solution]:
    """
    Every solution of `model` lazily, in deterministic search order. The objective, if any, is only evaluated.
    """

    yield from Search(model, config).assignments()


def optimize(model: GroundModel, config: SolverConfig, keep_ties: bool) -> list[Solution]:
    assert model.objective is not None
    check = BoundCheck(model.objective.sense, keep_ties)
    best: list[Solution] = []
    for solution in Search(model, config).assignments(check):
        assert solution.objective_value is not None
        if check.improves(solution.objective_value):
            check.best = solution.objective_value
            best = [solution]
        elif keep_ties and solution.objective_value == check.best:
            best.append(solution)
    return best


def solve(
    model: GroundModel, mode: SolveModes = SolveModes.first, config: SolverConfig = SolverConfig()
) -> list[Solution]:
    """
    `first` returns at most one solution and `all` every solution. With an objective, `first` and `opt` return one
    solution proven optimal and `all` returns every optimal solution. Without one, `opt` behaves like `first`.
    """

    if model.objective is not None:
        return optimize(model, config, keep_ties=mode == SolveModes.all)
    solutions = iter_solutions(model, config)
    if mode == SolveModes.all:
        return list(solutions)
    return [solution] if (solution := next(solutions, None)) is not None else []
