from src.frontend.parser import parse_database, parse_program, parse_schema
from src.frontend.printer import print_program
from src.frontend.schema import Database, DerivedDomain, Schema
from src.frontend.syntax import (
    Atom,
    BinaryExpression,
    Comparison,
    Conjunction,
    Constant,
    Goal,
    Literal,
    Program,
    Query,
    Rule,
    Term,
    Variable,
)

__all__ = [
    "parse_database",
    "parse_program",
    "parse_schema",
    "print_program",
    "Database",
    "DerivedDomain",
    "Schema",
    "Atom",
    "BinaryExpression",
    "Comparison",
    "Conjunction",
    "Constant",
    "Goal",
    "Literal",
    "Program",
    "Query",
    "Rule",
    "Term",
    "Variable",
]
