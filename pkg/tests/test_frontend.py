import pytest

from src.constants import Comparators, GoalModes, RuleKinds
from src.exc import ParseException, ValidationException
from src.frontend import (
    Atom,
    BinaryExpression,
    Comparison,
    Constant,
    Literal,
    Variable,
    parse_database,
    parse_program,
    parse_schema,
    print_program,
)
from tests.conftest import CORPUS, load_schema

X, Y, C = Variable("X"), Variable("Y"), Variable("C")

# region schemas


class TestParseSchema:
    def test_domains_and_predicates(self):
        schema = parse_schema("DOMAINS: node; color. PREDICATES: edge(node,node).")
        assert schema.string_domains == ("node", "color")
        assert schema.signature("edge") == ("node", "node")
        assert schema.signature("node") == ("node",)
        assert schema.signature("missing") is None

    def test_integer_bounds_declare_the_integer_domain(self):
        schema = parse_schema("INT-DOMAINS: num. MinInt=-2. MaxInt=3.")
        assert schema.int_range == (-2, 3)
        assert schema.int_domains == ("num", "integer")
        assert schema.is_int_domain("integer")

    def test_bounds_must_come_together(self):
        with pytest.raises(ValidationException):
            parse_schema("MinInt=0.")

    def test_undeclared_domain_in_signature(self):
        with pytest.raises(ValidationException) as e:
            parse_schema("DOMAINS: node. PREDICATES: edge(node,colour).")
        assert "colour" in str(e.value)

    def test_duplicate_domain(self):
        with pytest.raises(ValidationException):
            parse_schema("DOMAINS: node; node.")


# endregion

# region programs


class TestParseProgram:
    def test_rule_kinds(self):
        program = parse_program(
            """
            v(X) (+) nv(X) :- node(X).
            (+)[C] col(X,C) :- node(X), color(C).
            s(X) <~ node(X).
            used(C) :- col(X,C).
            :- edge(X,Y), col(X,C), col(Y,C).
            ? col(X,C).
            """
        )
        assert [rule.kind for rule in program.rules] == [
            RuleKinds.partition,
            RuleKinds.generalized_partition,
            RuleKinds.subset,
            RuleKinds.standard,
            RuleKinds.constraint,
        ]
        assert program.rules[1].label == C
        assert program.goal is not None and program.goal.mode == GoalModes.plain

    def test_disjunctive_constraint_negates_its_head(self):
        program = parse_program("v(X) | v(Y) <- edge(X,Y).")
        (rule,) = program.rules
        assert rule.kind == RuleKinds.constraint
        assert rule.head == ()
        assert rule.body == (
            (
                Literal(Atom("edge", (X, Y))),
                Literal(Atom("v", (X,)), negated=True),
                Literal(Atom("v", (Y,)), negated=True),
            ),
        )

    def test_arithmetic_and_comparisons(self):
        program = parse_program(":- q(X,Y), X + 1 * Y != 2.")
        comparison = program.rules[0].body[0][1]
        assert comparison == Comparison(
            Comparators.ne, BinaryExpression("+", X, BinaryExpression("*", Constant(1), Y)), Constant(2)
        )

    def test_body_disjuncts(self):
        program = parse_program("p(X) :- q(X) ; r(X).")
        assert len(program.rules[0].body) == 2

    def test_optimization_goals(self):
        assert parse_program("? min |v(X)|.").goal.mode == GoalModes.min
        assert parse_program("? max |f(X)|.").goal.mode == GoalModes.max

    def test_at_most_one_query(self):
        with pytest.raises(ParseException):
            parse_program("? p(X). ? q(X).")

    def test_reserved_names(self):
        with pytest.raises(ParseException) as e:
            parse_program("p__1(X) :- q(X).")
        assert "reserved" in str(e.value)

    def test_partition_variable_must_be_last(self):
        with pytest.raises(ParseException):
            parse_program("(+)[C] col(C,X) :- node(X), color(C).")

    def test_syntax_error_names_the_source(self):
        with pytest.raises(ParseException) as e:
            parse_program("p(X) :- q(X) $ r(X).", source="broken.npd")
        assert e.value.source == "broken.npd"
        assert e.value.line == 1

    def test_comments_are_ignored(self):
        program = parse_program("% nothing here\np(X) :- q(X). % trailing\n")
        assert len(program.rules) == 1


@pytest.mark.parametrize("path", sorted(CORPUS.glob("*.npd")), ids=lambda path: path.stem)
def test_printed_program_parses_back(path):
    program = parse_program(path.read_text())
    assert parse_program(print_program(program)) == program


# endregion

# region databases


class TestParseDatabase:
    def test_extents_and_relations(self, graph_schema):
        db = parse_database("node(a). node(b). edge(a,b).", graph_schema)
        assert db.extent("node") == ("a", "b")
        assert db.relation("edge") == frozenset({("a", "b")})
        assert db.relation("node") == frozenset({("a",), ("b",)})

    def test_constants_outside_their_domain(self, graph_schema):
        with pytest.raises(ValidationException) as e:
            parse_database("node(a). edge(a,z).", graph_schema)
        assert "z" in str(e.value)

    def test_unknown_predicate(self, graph_schema):
        with pytest.raises(ValidationException):
            parse_database("node(a). colour(a).", graph_schema)

    def test_wrong_arity(self, graph_schema):
        with pytest.raises(ValidationException):
            parse_database("node(a). edge(a).", graph_schema)

    def test_integer_domain_is_filled_from_the_bounds(self):
        schema = load_schema("integers")
        db = parse_database("", schema)
        assert db.extent("integer") == tuple(range(1, 21))

    def test_integer_domains_reject_names(self):
        schema = load_schema("numbers")
        with pytest.raises(ValidationException):
            parse_database("num(one).", schema)

    def test_text_is_sorted_facts(self, graph_schema):
        db = parse_database("edge(b,a). node(b). node(a). edge(a,b).", graph_schema)
        assert db.to_text() == "node(b).\nnode(a).\nedge(a,b).\nedge(b,a).\n"


# endregion
