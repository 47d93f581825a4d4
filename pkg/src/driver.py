import time
from typing import Iterator, Optional

import attr
import enlighten

from src.analysis import Analysis, analyse, check_database
from src.constants import PASS_PIPELINE, AnswerStatus, GoalModes, Passes, SolveModes, SolverConfig, States
from src.exc import ResourceLimitException, TranspileException
from src.fixpoint import Interpretation, evaluate_stratified, first_violated, unify
from src.frontend.schema import Database, Schema
from src.frontend.syntax import Query
from src.optimizer import optimize
from src.solver import Codebook, extract_answer, ground, iter_solutions, solve
from src.solver.search import Solution
from src.transpile import ConstraintModel, assemble_model
from src.utils import Value, bold, log_seconds_elapsed

Relation = frozenset[tuple[Value, ...]]


@attr.s(frozen=True)
class PipelineOptions:
    mode: SolveModes = attr.ib(default=SolveModes.first)
    passes: tuple[Passes, ...] = attr.ib(default=PASS_PIPELINE, converter=tuple)
    candidate_cap: Optional[int] = attr.ib(default=None)  # None examines every candidate
    plain_goal_constrains: bool = attr.ib(default=True)
    trace: bool = attr.ib(default=False)
    progress: bool = attr.ib(default=False)
    solver: SolverConfig = attr.ib(default=attr.Factory(SolverConfig))


@attr.s(frozen=True)
class TraceStep:
    step: str = attr.ib()
    atoms: int = attr.ib()
    elapsed: float = attr.ib()

    def __str__(self) -> str:
        return f"{bold(self.step)}: {self.atoms} atoms after {self.elapsed:.3f}s"


@attr.s(frozen=True)
class Answer:
    """
    `relations` holds one goal relation per accepted model: a single one unless every answer was requested.
    No-solution is distinct from an answer whose goal relation is empty.
    """

    status: AnswerStatus = attr.ib()
    relations: tuple[Relation, ...] = attr.ib(default=(), converter=tuple)
    objective_value: Optional[int] = attr.ib(default=None)
    trace: tuple[TraceStep, ...] = attr.ib(default=(), converter=tuple)
    solver_calls: int = attr.ib(default=0)
    candidates: int = attr.ib(default=0)
    warnings: tuple[str, ...] = attr.ib(default=(), converter=tuple)

    @property
    def relation(self) -> Relation:
        return self.relations[0] if self.relations else frozenset()


@attr.s(frozen=True)
class Candidate:
    model: Interpretation = attr.ib()
    solution: Optional[Solution] = attr.ib(default=None)


@attr.s
class Pipeline:
    analysis: Analysis = attr.ib()
    db: Database = attr.ib()
    options: PipelineOptions = attr.ib(default=attr.Factory(PipelineOptions))
    state: str = attr.ib(init=False, default=States.initialising)
    action: Optional[str] = attr.ib(init=False, default=None)
    manager: enlighten.Manager = attr.ib(init=False, default=None)
    status_bar: enlighten.StatusBar = attr.ib(init=False, default=None)
    candidate_bar: enlighten.Counter = attr.ib(init=False, default=None)
    prelude: Optional[Interpretation] = attr.ib(init=False, default=None)
    model: Optional[ConstraintModel] = attr.ib(init=False, default=None)
    codebook: Optional[Codebook] = attr.ib(init=False, default=None)
    steps: list[TraceStep] = attr.ib(init=False, default=attr.Factory(list))
    warnings: list[str] = attr.ib(init=False, default=attr.Factory(list))
    solver_calls: int = attr.ib(init=False, default=0)
    candidates: int = attr.ib(init=False, default=0)
    started: float = attr.ib(init=False, default=attr.Factory(time.time))

    # region initialisation

    def configure_bars(self) -> None:
        self.manager = enlighten.get_manager(enabled=self.options.progress)
        status_format = "State: {state}, Action: {action}"
        self.status_bar = self.manager.status_bar(
            status_format=status_format, state=bold(self.state), action=bold("N/A"), position=1, autorefresh=True
        )
        self.candidate_bar = self.manager.counter(desc="Candidates Examined", position=2, autorefresh=True)
        self.status_bar.refresh()

    def __attrs_post_init__(self) -> None:
        self.configure_bars()

    # endregion

    # region helpers

    @property
    def query(self) -> Query:
        return self.analysis.query

    def set_state(self, state: str, action: Optional[str] = None) -> None:
        self.state = state
        self.action = action
        self.status_bar.update(state=bold(self.state), action=bold(self.action or "N/A"))
        self.status_bar.refresh()

    def record(self, step: str, model: Interpretation) -> None:
        entry = TraceStep(step, len(model), time.time() - self.started)
        self.steps.append(entry)
        if self.options.trace:
            print(entry)

    def goal_relation(self, model: Interpretation) -> Relation:
        goal = self.query.goal_atom
        return frozenset(values for values in model.relation(goal.predicate) if unify(goal, values, {}) is not None)

    # endregion

    # region steps

    def evaluate_p1(self) -> Interpretation:
        self.set_state(States.evaluating_p1)
        base = Interpretation.from_database(self.db.with_domains(self.analysis.schema))
        m1 = evaluate_stratified(self.analysis.partition.p1, base)
        self.record("M1", m1)
        self.prelude = m1
        return m1

    def solve_p2(self, m1: Interpretation) -> Iterator[Candidate]:
        """
        Candidate models of the non-deterministic component in solver order. Only P3 checks need more than the
        candidates `solve` returns for the requested mode, so only then are solutions enumerated lazily.
        """

        if not self.analysis.partition.p2:
            yield Candidate(Interpretation())
            return
        self.set_state(States.solving_p2, "Grounding")
        model = self.model = transpile_query(self.analysis, self.options.passes)
        ground_model = ground(model, self.db, m1)
        self.codebook = Codebook.from_model(model, ground_model, self.db)
        self.set_state(States.solving_p2, f"{len(ground_model.cells)} cells")
        self.solver_calls += 1
        if self.analysis.partition.p3 and model.objective is None:
            solutions: Iterator[Solution] = iter_solutions(ground_model, self.options.solver)
        else:
            solutions = iter(solve(ground_model, self.options.mode, self.options.solver))
        for solution in solutions:
            m2 = self.codebook.decode(solution)
            self.record("M2", m2)
            yield Candidate(m2, solution)

    def check_p3(self, accumulated: Interpretation) -> Optional[Interpretation]:
        partition = self.analysis.partition
        if not partition.p3:
            return accumulated
        self.set_state(States.checking_p3, f"Candidate {self.candidates}")
        m3 = evaluate_stratified(partition.p3_s, accumulated)
        self.record("M3", m3)
        if first_violated(partition.p3_c, m3) is not None:
            return None
        return m3

    def evaluate_p4(self, accumulated: Interpretation) -> Interpretation:
        partition = self.analysis.partition
        if self.query.goal_atom.predicate not in partition.defined_in("p4"):
            return accumulated
        self.set_state(States.evaluating_p4)
        m4 = evaluate_stratified(partition.p4, accumulated)
        self.record("M4", m4)
        return m4

    def answer_for(self, candidate: Candidate, model: Interpretation) -> Relation:
        goal = self.query.goal_atom
        if candidate.solution is not None and self.codebook is not None and goal.predicate in self.codebook.dimensions:
            return extract_answer(candidate.solution, goal, self.codebook)
        return self.goal_relation(model)

    # endregion

    # region public

    def run(self) -> Answer:
        try:
            self.warnings = check_database(self.analysis, self.db)
            m1 = self.evaluate_p1()
            relations: list[Relation] = []
            for candidate in self.solve_p2(m1):
                self.candidates += 1
                self.candidate_bar.update()
                if self.options.candidate_cap is not None and self.candidates > self.options.candidate_cap:
                    raise ResourceLimitException("candidate", self.options.candidate_cap)
                checked = self.check_p3(m1.union(candidate.model))
                if checked is None:
                    continue
                relation = self.answer_for(candidate, self.evaluate_p4(checked))
                if relation not in relations:
                    relations.append(relation)
                if self.options.mode != SolveModes.all:
                    break
            self.set_state(States.finished)
        finally:
            self.manager.stop()
        if self.options.trace:
            print(f"{bold('Candidates')}: {self.candidates}, {bold('Solver calls')}: {self.solver_calls}")
            log_seconds_elapsed(self.started)
        objective_value = None
        if relations and self.query.goal_mode != GoalModes.plain:
            objective_value = len(relations[0])
        return Answer(
            status=AnswerStatus.answer if relations else AnswerStatus.no_solution,
            relations=relations,
            objective_value=objective_value,
            trace=self.steps,
            solver_calls=self.solver_calls,
            candidates=self.candidates,
            warnings=self.warnings,
        )

    # endregion


def transpile_query(analysis: Analysis, passes: tuple[Passes, ...] = PASS_PIPELINE) -> ConstraintModel:
    """
    The optimized constraint model of the non-deterministic component.
    """

    query = analysis.query
    model = assemble_model(query, analysis.partition, analysis.schema)
    if model.objective is not None and analysis.partition.p3:
        raise TranspileException(
            f"The optimized goal {query.goal_atom.predicate} cannot be combined with recursive checks"
        )
    return optimize(model, query.program, passes)


def run_query(schema: Schema, query: Query, db: Database, options: PipelineOptions = PipelineOptions()) -> Answer:
    """
    Evaluates `query` over `db` in four steps: the deterministic prelude, the solved non-deterministic core, the
    recursive checks that may reject its solutions, and the deterministic epilogue.
    """

    analysis = analyse(query.program, schema, options.plain_goal_constrains)
    return Pipeline(analysis=analysis, db=db, options=options).run()
