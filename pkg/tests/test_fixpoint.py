import pytest

from src.constants import Comparators
from src.fixpoint import (
    Interpretation,
    Matcher,
    compare,
    derive_once,
    evaluate_stratified,
    first_violated,
    least_model,
)
from src.frontend import Variable, parse_database, parse_program
from tests.conftest import load_query, load_schema

X, Z = Variable("X"), Variable("Z")


@pytest.fixture()
def chain4(graph_schema):
    return parse_database("node(a). node(b). node(c). node(d). edge(a,b). edge(b,c). edge(c,d).", graph_schema)


# region interpretations


class TestInterpretation:
    def test_atoms_are_ordered(self):
        interpretation = Interpretation.from_atoms([("q", ("b",)), ("p", (2,)), ("p", (1,)), ("p", ("a",))])
        assert interpretation.atoms() == [("p", (1,)), ("p", (2,)), ("p", ("a",)), ("q", ("b",))]

    def test_equality_ignores_empty_relations(self):
        with_empty = Interpretation(relations={"p": frozenset({(1,)}), "q": frozenset()})
        assert Interpretation.from_atoms([("p", (1,))]) == with_empty

    def test_to_text(self):
        interpretation = Interpretation.from_atoms([("edge", ("a", "b")), ("node", ("a",))])
        assert interpretation.to_text(["edge"]) == "edge(a,b).\n"


def test_compare_orders_integers_before_strings():
    assert compare(Comparators.lt, 10, "a")
    assert compare(Comparators.lt, 2, 10)
    assert not compare(Comparators.eq, 1, "1")


def test_matcher_joins_and_filters(graph4):
    conjunction = parse_program("p(X,Z) :- edge(X,Y), edge(Y,Z), not edge(X,Z).").rules[0].body[0]
    bindings = Matcher(Interpretation.from_database(graph4)).bindings(conjunction)
    assert sorted((binding[X], binding[Z]) for binding in bindings) == [("a", "d"), ("b", "d")]


# endregion

# region evaluation


class TestEvaluation:
    def test_transitive_closure(self, chain4):
        rules = load_query("transitive_closure").program.rules
        model = evaluate_stratified(rules, Interpretation.from_database(chain4))
        assert len(model.relation("tc")) == 6
        assert ("tc", ("a", "d")) in model

    def test_single_steps(self, chain4):
        exit_rule, recursive_rule = load_query("transitive_closure").program.rules
        base = Interpretation.from_database(chain4)
        first = derive_once(exit_rule, base)
        assert first == {("tc", ("a", "b")), ("tc", ("b", "c")), ("tc", ("c", "d"))}
        assert derive_once(recursive_rule, base.union(Interpretation.from_atoms(first))) == {
            ("tc", ("a", "c")),
            ("tc", ("b", "d")),
        }

    def test_unsatisfiable_comparison(self, graph4):
        rule = parse_program("p(X) :- node(X), X < X.").rules[0]
        assert derive_once(rule, Interpretation.from_database(graph4)) == set()

    def test_primes(self):
        schema = load_schema("integers")
        rules = load_query("primes").program.rules
        model = evaluate_stratified(rules, Interpretation.from_database(parse_database("", schema)))
        assert sorted(values[0] for values in model.relation("prime")) == [2, 3, 5, 7, 11, 13, 17, 19]

    def test_literal_composites(self):
        schema = load_schema("small_integers")
        rules = load_query("primes_literal").program.rules
        model = evaluate_stratified(rules, Interpretation.from_database(parse_database("", schema)))
        numbers = range(0, 11)
        composites = {x for x in numbers if any(x == y * z for y in numbers for z in numbers)}
        assert model.relation("composite") == frozenset((x,) for x in composites)
        assert model.relation("prime") == frozenset((x,) for x in numbers if x not in composites)
        assert model.relation("prime") == frozenset()

    def test_least_model_with_fixed_negation(self, graph4):
        rules = parse_program("p(X) :- node(X), not q(X).\nq(X) :- node(X), not p(X).").rules
        base = Interpretation.from_database(graph4)
        guess = base.union(Interpretation.from_atoms([("q", ("a",)), ("p", ("b",)), ("p", ("c",)), ("p", ("d",))]))
        assert least_model(rules, base, negation_against=guess) == guess
        other = base.union(Interpretation.from_atoms([("q", ("a",))]))
        assert least_model(rules, base, negation_against=other) != other

    def test_disjunctive_bodies(self, graph4):
        rules = parse_program("p(X) :- edge(X,c) ; edge(c,X).").rules
        model = evaluate_stratified(rules, Interpretation.from_database(graph4))
        assert model.relation("p") == frozenset({("a",), ("b",), ("d",)})


class TestConstraints:
    def test_first_violated(self, graph4):
        program = parse_program(":- edge(X,Y), edge(Y,Z).\n:- edge(X,X).")
        base = Interpretation.from_database(graph4)
        assert first_violated(program.rules[1:], base) is None
        assert first_violated(program.rules, base) is program.rules[0]

    def test_consequent_satisfies_the_constraint(self, graph4):
        program = parse_program("v(X) | v(Y) <- edge(X,Y).")
        base = Interpretation.from_database(graph4)
        assert first_violated(program.rules, base) is not None
        cover = base.union(Interpretation.from_atoms([("v", ("a",)), ("v", ("c",))]))
        assert first_violated(program.rules, cover) is None
