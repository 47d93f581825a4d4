import attr

from src.analysis.components import (
    Classification,
    ComponentPartition,
    Constrained,
    classify_predicates,
    mark_constrained,
    partition_components,
)
from src.analysis.graph import DependencyGraph, stratify
from src.analysis.normalize import Normalized, normalize
from src.analysis.safety import check_safety
from src.analysis.schemas import empty_intersections, infer_schemas
from src.exc import Diagnostic, ValidationException
from src.frontend.schema import Database, Schema
from src.frontend.syntax import Goal, Program, Query
from src.utils import bold


@attr.s(frozen=True)
class Analysis:
    """
    Everything the pipeline needs to know about a query: its normalized form, the schema extended with derived
    predicates and domains, and the component partition.
    """

    query: Query = attr.ib()
    schema: Schema = attr.ib()
    classification: Classification = attr.ib()
    constrained: Constrained = attr.ib()
    partition: ComponentPartition = attr.ib()


def analyse(program: Program, schema: Schema, plain_goal_constrains: bool = True) -> Analysis:
    if diagnostics := check_safety(program):
        raise ValidationException(diagnostics)
    Query.from_program(program)
    normalized = normalize(program, infer_schemas(program, schema))
    stratify(normalized.program.rules)
    query = Query.from_program(normalized.program)
    classification = classify_predicates(normalized.program)
    goal = Goal(query.goal_mode, query.goal_atom)
    constrained = mark_constrained(normalized.program, classification, goal, plain_goal_constrains)
    partition = partition_components(normalized.program, classification, constrained)
    return Analysis(
        query=query,
        schema=normalized.schema,
        classification=classification,
        constrained=constrained,
        partition=partition,
    )


def check_database(analysis: Analysis, db: Database) -> list[str]:
    """
    Rejects facts for predicates the program defines. Returns a warning per intersection domain whose extent is empty
    over `db`.
    """

    defined = analysis.classification.guess | analysis.classification.standard
    diagnostics = [
        Diagnostic(f"The facts give tuples for {predicate}, which the program defines")
        for predicate in sorted(defined)
        if db.facts.get(predicate)
    ]
    if diagnostics:
        raise ValidationException(diagnostics)
    return [
        f"The intersection domain {bold(name)} is empty, so no tuple can range over it"
        for name in empty_intersections(analysis.schema, db.with_domains(analysis.schema))
    ]


__all__ = [
    "Analysis",
    "Classification",
    "ComponentPartition",
    "Constrained",
    "DependencyGraph",
    "Normalized",
    "analyse",
    "check_database",
    "check_safety",
    "classify_predicates",
    "infer_schemas",
    "mark_constrained",
    "normalize",
    "partition_components",
    "stratify",
]
