import os
import sys
from contextlib import contextmanager
from pathlib import Path
from typing import Callable, Iterator, Optional

import click

from src.analysis import Analysis, analyse, check_database
from src.constants import (
    DEFAULT_NODE_LIMIT,
    DEFAULT_ORACLE_BOUND,
    DEFAULT_TIME_LIMIT,
    PASS_PIPELINE,
    AnswerStatus,
    ExitCodes,
    InstanceFamilies,
    Passes,
    SolveModes,
    SolverConfig,
)
from src.driver import Answer, Pipeline, PipelineOptions, transpile_query
from src.exc import (
    Diagnostic,
    NPDatalogException,
    OracleBoundException,
    ResourceLimitException,
    ValidationException,
)
from src.fixpoint import Interpretation, evaluate_stratified
from src.frontend import Database, Query, Schema, parse_database, parse_program, parse_schema
from src.instances import InstanceParams, gen_instance
from src.oracle import iter_answers, oracle_answer
from src.transpile import emit_fixp_script, emit_opl
from src.utils import Value, bold, format_fact, tuple_sort_key

# https://stackoverflow.com/questions/12492810/python-how-can-i-make-the-ansi-escape-codes-to-work-also-in-windows
os.system("")  # enables ansi escape characters in terminal

# region inputs


@contextmanager
def located(source: str) -> Iterator[None]:
    try:
        yield
    except ValidationException as e:
        raise e.located(source) from e


def read_schema(path: str) -> Schema:
    with located(path):
        return parse_schema(Path(path).read_text(), source=path)


def read_query(path: str) -> Query:
    with located(path):
        return Query.from_program(parse_program(Path(path).read_text(), source=path))


def read_database(path: Optional[str], schema: Schema) -> Database:
    if path is None:
        return parse_database("", schema)
    with located(path):
        return parse_database(Path(path).read_text(), schema, source=path)


def read_analysis(schema: Schema, program_path: str, plain_goal_constrains: bool = True) -> Analysis:
    """
    Fact files are read against `schema` as declared; `Analysis.schema` adds the signatures of derived predicates.
    """

    query = read_query(program_path)
    with located(program_path):
        return analyse(query.program, schema, plain_goal_constrains)


def parse_passes(ctx: click.Context, param: click.Parameter, value: str) -> tuple[Passes, ...]:
    """
    `none`, `all` (the full pipeline) or a comma-separated list of pass names applied in the given order.
    """

    if value == "none":
        return ()
    if value == "all":
        return PASS_PIPELINE
    try:
        return tuple(Passes(name.strip()) for name in value.split(","))
    except ValueError:
        raise click.BadParameter(f"expected none, all or a comma-separated list of {', '.join(Passes)}") from None


# endregion

# region output


def print_warnings(warnings: list[str]) -> None:
    for warning in warnings:
        print(f"{bold('Warning')}: {warning}", file=sys.stderr)


def print_relation(predicate: str, relation: frozenset[tuple[Value, ...]]) -> None:
    for values in sorted(relation, key=tuple_sort_key):
        print(format_fact(predicate, values))


def print_answer(answer: Answer, predicate: str) -> None:
    if answer.status == AnswerStatus.no_solution:
        print("% no solution")
        return
    if answer.objective_value is not None:
        print(f"% objective: {answer.objective_value}")
    if len(answer.relations) == 1:
        print_relation(predicate, answer.relation)
        return
    for index, relation in enumerate(answer.relations, start=1):
        print(f"% answer {index}")
        print_relation(predicate, relation)


def run_reporting(command: Callable[[], ExitCodes]) -> None:
    """
    Runs `command` and exits with its code, turning the library's exceptions into their exit codes.
    """

    try:
        code = command()
    except (ResourceLimitException, OracleBoundException) as e:
        print(e.message, file=sys.stderr)
        code = ExitCodes.resource_limit
    except ValidationException as e:
        for diagnostic in e.diagnostics:
            print(diagnostic, file=sys.stderr)
        code = ExitCodes.diagnostics
    except NPDatalogException as e:
        print(e.message, file=sys.stderr)
        code = ExitCodes.diagnostics
    except Exception as e:
        print(f"An uncaught exception occurred:\n{bold(e)}\n", file=sys.stderr)
        code = ExitCodes.diagnostics
    sys.exit(int(code))


# endregion


@click.group(context_settings={"show_default": True})
def main() -> None:
    """
    Solve NP Datalog queries by compiling their non-deterministic part into a constraint model.
    """


@main.command()
@click.argument("schema_path", type=click.Path(exists=True, dir_okay=False))
@click.argument("program_path", type=click.Path(exists=True, dir_okay=False))
@click.argument("facts_path", type=click.Path(exists=True, dir_okay=False))
@click.option(
    "--mode",
    default=SolveModes.first.name,
    type=click.Choice(sorted([mode.name for mode in SolveModes]), case_sensitive=False),
    help="Report the first answer, every answer, or an optimal answer.",
)
@click.option(
    "--opt",
    "passes",
    default="all",
    callback=parse_passes,
    help="Optimizer passes to apply: none, all, or a comma-separated list of pass names.",
)
@click.option("--node-limit", default=DEFAULT_NODE_LIMIT, type=click.IntRange(1, None), help="Search node cap.")
@click.option("--time-limit", default=DEFAULT_TIME_LIMIT, type=click.FloatRange(0, None), help="Seconds per solve.")
@click.option(
    "--candidate-cap",
    default=None,
    type=click.IntRange(1, None),
    help="Give up after examining this many candidates of the non-deterministic component. Exhaustive if unset.",
)
@click.option(
    "--plain-goal-constrains/--plain-goal-free",
    default=True,
    help="Whether a plain goal on an unconstrained guess-dependent predicate is solved with the constraint model.",
)
@click.option(
    "--emit-opl", "opl_path", default=None, type=click.Path(dir_okay=False), help="Also write the solved model here."
)
@click.option("--trace", default=False, is_flag=True, help="Print the size of each intermediate model.")
@click.option("--progress", default=False, is_flag=True, help="Show a status bar while solving.")
def solve(
    schema_path: str,
    program_path: str,
    facts_path: str,
    mode: str,
    passes: tuple[Passes, ...],
    node_limit: int,
    time_limit: float,
    candidate_cap: Optional[int],
    plain_goal_constrains: bool,
    opl_path: Optional[str],
    trace: bool,
    progress: bool,
) -> None:
    """
    Answer the query in PROGRAM_PATH over the facts in FACTS_PATH.
    """

    def command() -> ExitCodes:
        schema = read_schema(schema_path)
        analysis = read_analysis(schema, program_path, plain_goal_constrains)
        db = read_database(facts_path, schema)
        options = PipelineOptions(
            mode=SolveModes[mode.lower()],
            passes=passes,
            candidate_cap=candidate_cap,
            plain_goal_constrains=plain_goal_constrains,
            trace=trace,
            progress=progress,
            solver=SolverConfig(node_limit=node_limit, time_limit=time_limit),
        )
        pipeline = Pipeline(analysis=analysis, db=db, options=options)
        answer = pipeline.run()
        print_warnings(list(answer.warnings))
        if opl_path is not None and pipeline.model is not None:
            Path(opl_path).write_text(emit_opl(pipeline.model, db, pipeline.prelude))
        print_answer(answer, analysis.query.goal_atom.predicate)
        return ExitCodes.answer if answer.status == AnswerStatus.answer else ExitCodes.no_solution

    run_reporting(command)


@main.command()
@click.argument("schema_path", type=click.Path(exists=True, dir_okay=False))
@click.argument("program_path", type=click.Path(exists=True, dir_okay=False))
@click.argument("facts_path", required=False, type=click.Path(exists=True, dir_okay=False))
def check(schema_path: str, program_path: str, facts_path: Optional[str]) -> None:
    """
    Validate a program and list the rules of each component. With FACTS_PATH the facts are checked against the
    program too.
    """

    def command() -> ExitCodes:
        schema = read_schema(schema_path)
        analysis = read_analysis(schema, program_path)
        if facts_path is not None:
            db = read_database(facts_path, schema)
            with located(facts_path):
                print_warnings(check_database(analysis, db))
        print(analysis.partition.listing(), end="")
        return ExitCodes.answer

    run_reporting(command)


@main.command(name="eval")
@click.argument("schema_path", type=click.Path(exists=True, dir_okay=False))
@click.argument("program_path", type=click.Path(exists=True, dir_okay=False))
@click.argument("facts_path", type=click.Path(exists=True, dir_okay=False))
def evaluate(schema_path: str, program_path: str, facts_path: str) -> None:
    """
    Evaluate a program without guesses or constraints by fixpoint iteration.
    """

    def command() -> ExitCodes:
        schema = read_schema(schema_path)
        analysis = read_analysis(schema, program_path)
        partition = analysis.partition
        if partition.p2 or partition.p3 or partition.p4:
            raise ValidationException(
                [
                    Diagnostic(
                        "Only deterministic programs can be evaluated directly; use solve instead",
                        source=program_path,
                    )
                ]
            )
        db = read_database(facts_path, schema)
        base = Interpretation.from_database(db.with_domains(analysis.schema))
        model = evaluate_stratified(partition.p1, base)
        goal = analysis.query.goal_atom.predicate
        print_relation(goal, model.relation(goal))
        return ExitCodes.answer

    run_reporting(command)


@main.command()
@click.argument("schema_path", type=click.Path(exists=True, dir_okay=False))
@click.argument("program_path", type=click.Path(exists=True, dir_okay=False))
@click.argument("facts_path", required=False, type=click.Path(exists=True, dir_okay=False))
@click.option("--opl/--fixp", default=True, help="Emit the constraint model, or the script for the deterministic part.")
@click.option(
    "--opt",
    "passes",
    default="all",
    callback=parse_passes,
    help="Optimizer passes to apply: none, all, or a comma-separated list of pass names.",
)
@click.option("-o", "--output", default=None, type=click.Path(dir_okay=False), help="Write here instead of stdout.")
def emit(
    schema_path: str,
    program_path: str,
    facts_path: Optional[str],
    opl: bool,
    passes: tuple[Passes, ...],
    output: Optional[str],
) -> None:
    """
    Print the OPL text for a program. With FACTS_PATH the data declarations are included.
    """

    def command() -> ExitCodes:
        schema = read_schema(schema_path)
        analysis = read_analysis(schema, program_path)
        if opl:
            model = transpile_query(analysis, passes)
            if facts_path is None:
                text = emit_opl(model)
            else:
                db = read_database(facts_path, schema)
                base = Interpretation.from_database(db.with_domains(analysis.schema))
                text = emit_opl(model, db, evaluate_stratified(analysis.partition.p1, base))
        else:
            text = emit_fixp_script(analysis.partition.p1, analysis.schema)
        if output is None:
            print(text, end="" if text.endswith("\n") else "\n")
        else:
            Path(output).write_text(text)
        return ExitCodes.answer

    run_reporting(command)


@main.command()
@click.argument(
    "family", type=click.Choice(sorted([family.value for family in InstanceFamilies]), case_sensitive=False)
)
@click.option("--size", required=True, type=click.IntRange(1, None), help="Number of nodes, rungs or integers.")
@click.option("--probability", default=None, type=click.FloatRange(0, 1), help="Edge probability of random graphs.")
@click.option("--seed", default=None, type=int, help="Seed of random graphs.")
@click.option("--colors", default=None, type=click.IntRange(1, None), help="Also declare this many colors.")
def gen(family: str, size: int, probability: Optional[float], seed: Optional[int], colors: Optional[int]) -> None:
    """
    Print a generated database as facts.
    """

    def command() -> ExitCodes:
        params = InstanceParams(size=size, probability=probability, seed=seed, colors=colors)
        print(gen_instance(InstanceFamilies(family.lower()), params).to_text(), end="")
        return ExitCodes.answer

    run_reporting(command)


@main.command(hidden=True)
@click.argument("schema_path", type=click.Path(exists=True, dir_okay=False))
@click.argument("program_path", type=click.Path(exists=True, dir_okay=False))
@click.argument("facts_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--bound", default=DEFAULT_ORACLE_BOUND, type=click.IntRange(0, None), help="Most choice atoms to guess.")
def oracle(schema_path: str, program_path: str, facts_path: str, bound: int) -> None:
    """
    Print every answer of the query by brute-force stable model enumeration.
    """

    def command() -> ExitCodes:
        schema = read_schema(schema_path)
        query = read_query(program_path)
        db = read_database(facts_path, schema)
        answers = oracle_answer(query, db, bound)
        predicate = query.goal_atom.predicate
        for index, relation in enumerate(iter_answers(answers), start=1):
            print(f"% answer {index}")
            print_relation(predicate, relation)
        return ExitCodes.answer if answers else ExitCodes.no_solution

    run_reporting(command)


if __name__ == "__main__":
    main()
