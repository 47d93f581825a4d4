import os
from pathlib import Path
from typing import Callable, Optional

import pytest

from src.frontend import Database, Query, Schema, parse_database, parse_program, parse_schema

CORPUS = Path(os.path.abspath(os.path.dirname(__file__))).parent / "corpus"
GOLDEN = Path(os.path.abspath(os.path.dirname(__file__))) / "golden"


def load_schema(name: str) -> Schema:
    return parse_schema((CORPUS / f"{name}.nps").read_text(), source=f"{name}.nps")


def load_query(name: str) -> Query:
    return Query.from_program(parse_program((CORPUS / f"{name}.npd").read_text(), source=f"{name}.npd"))


def load_database(name: str, schema: Schema) -> Database:
    return parse_database((CORPUS / f"{name}.npf").read_text(), schema, source=f"{name}.npf")


Loader = Callable[[str, str, Optional[str]], tuple[Schema, Query, Database]]


@pytest.fixture()
def corpus() -> Loader:
    """
    Loads a schema, a program and optionally a fact file of the shipped corpus by name.
    """

    def load(schema_name: str, program_name: str, facts_name: Optional[str] = None) -> tuple[Schema, Query, Database]:
        schema = load_schema(schema_name)
        db = load_database(facts_name, schema) if facts_name is not None else parse_database("", schema)
        return schema, load_query(program_name), db

    return load


@pytest.fixture()
def graph_schema() -> Schema:
    return load_schema("graph")


@pytest.fixture()
def graph4(graph_schema: Schema) -> Database:
    return load_database("graph4", graph_schema)


@pytest.fixture()
def coloring_schema() -> Schema:
    return load_schema("coloring")


@pytest.fixture()
def graph4_colors(coloring_schema: Schema) -> Database:
    return load_database("graph4_colors", coloring_schema)
