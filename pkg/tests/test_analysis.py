import attr
import pytest

from src.analysis import DependencyGraph, analyse, check_database, check_safety, infer_schemas, normalize, stratify
from src.constants import RuleKinds
from src.exc import UnstratifiedException, ValidationException
from src.frontend import Atom, Literal, Variable, parse_database, parse_program, print_program
from tests.conftest import load_query, load_schema

X = Variable("X")

# region safety


class TestSafety:
    def test_safe_program(self):
        assert check_safety(load_query("min_coloring").program) == []

    def test_head_variable_not_in_body(self):
        (diagnostic,) = check_safety(parse_program("p(X) :- node(Y).\n? p(X)."))
        assert diagnostic.variable == "X"
        assert diagnostic.rule_index == 0

    def test_comparisons_do_not_bind(self):
        diagnostics = check_safety(parse_program("p(X) :- node(Y), X = Y.\n? p(X)."))
        assert [diagnostic.variable for diagnostic in diagnostics] == ["X"]

    def test_negative_literals_do_not_bind(self):
        diagnostics = check_safety(parse_program("p(Y) :- node(Y), not edge(X,Y).\n? p(Y)."))
        assert [diagnostic.variable for diagnostic in diagnostics] == ["X"]

    def test_guess_heads_need_distinct_variables(self):
        diagnostics = check_safety(parse_program("v(X,X) <~ edge(X,X).\n? v(X,Y)."))
        assert diagnostics

    def test_undefined_goal(self):
        diagnostics = check_safety(parse_program("p(X) :- node(X).\n? q(X)."))
        assert "q" in str(diagnostics[0])


# endregion

# region stratification


class TestStratification:
    def test_negation_reads_lower_strata(self):
        rules = load_query("primes").program.rules
        strata = stratify(rules)
        assert [[rule.head[0].predicate for rule in stratum] for stratum in strata] == [["composite"], ["prime"]]

    def test_recursion_stays_in_one_stratum(self):
        strata = stratify(load_query("transitive_closure").program.rules)
        assert len(strata) == 1 and len(strata[0]) == 2

    def test_negative_cycle(self):
        program = parse_program("p(X) :- node(X), not q(X).\nq(X) :- node(X), not p(X).\n? p(X).")
        with pytest.raises(UnstratifiedException) as e:
            stratify(program.rules)
        assert e.value.cycle == ["p", "q"]

    def test_dependency_graph(self):
        graph = DependencyGraph.from_rules(load_query("min_coloring").program.rules)
        assert graph.reachable_from(["col"]) == {"used_color"}
        assert graph.ancestors_of(["used_color"]) == {"col", "node", "color"}
        assert graph.is_recursive("used_color") is False


# endregion

# region normalization


class TestNormalization:
    def test_binary_exclusive_disjunction_becomes_a_subset_rule(self, graph_schema):
        program = load_query("vertex_cover").program
        normalized = normalize(program, infer_schemas(program, graph_schema))
        kinds = [rule.kind for rule in normalized.program.rules]
        assert kinds == [RuleKinds.subset, RuleKinds.standard, RuleKinds.constraint]
        complement = normalized.program.rules[1]
        assert complement.body[0][-1] == Literal(Atom("v", (X,)), negated=True)

    def test_constraint_negations_move_to_the_consequent(self, graph_schema):
        program = load_query("vertex_cover_subset").program
        normalized = normalize(program, infer_schemas(program, graph_schema))
        constraint = normalized.program.rules[1]
        assert [atom.predicate for atom in constraint.head] == ["v", "v"]
        assert all(isinstance(item, Literal) and not item.negated for item in constraint.body[0])

    def test_definitions_are_merged(self, graph_schema):
        program = load_query("edge_dominating_set").program
        normalized = normalize(program, infer_schemas(program, graph_schema))
        (v_rule,) = normalized.program.definitions("v")
        assert len(v_rule.body) == 2

    def test_inferred_signatures(self, graph_schema):
        program = load_query("transitive_closure").program
        schema = infer_schemas(program, graph_schema)
        assert schema.signature("tc") == ("node", "node")

    def test_idempotent(self, coloring_schema):
        program = load_query("min_coloring").program
        once = normalize(program, infer_schemas(program, coloring_schema))
        twice = normalize(once.program, once.schema)
        assert print_program(twice.program) == print_program(once.program)


# endregion

# region components


class TestComponents:
    def test_vertex_cover(self, graph_schema):
        partition = analyse(load_query("vertex_cover").program, graph_schema).partition
        assert partition.p1 == ()
        assert partition.defined_in("p2_g") == {"v"}
        assert partition.defined_in("p2_s") == {"nv"}
        assert len(partition.p2_c) == 1
        assert partition.p3 == () and partition.p4 == ()

    def test_min_coloring(self, coloring_schema):
        partition = analyse(load_query("min_coloring").program, coloring_schema).partition
        assert partition.defined_in("p2_g") == {"col"}
        assert partition.defined_in("p2_s") == {"used_color"}
        assert [rule.kind for rule in partition.p2_c] == [RuleKinds.constraint]
        assert {predicate for predicate, _ in partition.p2_c[0].body_predicate_polarities()} == {"edge", "col"}
        assert partition.p1 == partition.p3 == partition.p4 == ()

    def test_deterministic_program(self, graph_schema):
        partition = analyse(load_query("transitive_closure").program, graph_schema).partition
        assert partition.defined_in("p1") == {"tc"}
        assert partition.p2 == ()

    def test_recursion_over_guesses_is_checked_afterwards(self, graph_schema):
        partition = analyse(load_query("hamiltonian_cycle").program, graph_schema).partition
        assert partition.defined_in("p3_s") == {"reached"}
        assert len(partition.p3_c) == 1
        assert len(partition.p2_c) == 2
        assert partition.component_of("path") == "p2"

    def test_unconstrained_plain_goal(self, graph_schema):
        program = parse_program("v(X) <~ node(X).\nw(X) :- v(X).\n? w(X).")
        assert analyse(program, graph_schema).partition.defined_in("p2_s") == {"w"}
        assert analyse(program, graph_schema, plain_goal_constrains=False).partition.defined_in("p4") == {"w"}

    def test_guess_rules_cannot_read_guesses(self, graph_schema):
        program = parse_program("v(X) <~ node(X).\nw(X) <~ v(X).\n? w(X).")
        with pytest.raises(ValidationException) as e:
            analyse(program, graph_schema)
        assert e.value.diagnostics[0].rule_index == 1

    def test_unsafe_programs_are_rejected(self, graph_schema):
        with pytest.raises(ValidationException):
            analyse(parse_program("p(X) :- node(Y).\n? p(X)."), graph_schema)

    def test_listing(self, graph_schema):
        listing = analyse(load_query("vertex_cover").program, graph_schema).partition.listing()
        assert listing.startswith("P1:\nP2 guess:\n  v(X) <~ node(X).\n")
        assert "P2 standard:\n  nv(X) :- node(X), not v(X).\n" in listing
        assert "P2 constraints:\n  :- edge(X,Y), nv(X), nv(Y).\n" in listing
        assert listing.endswith("P4:\n")


# endregion

# region databases


class TestCheckDatabase:
    def test_empty_intersection_is_reported(self, coloring_schema, graph4_colors):
        analysis = analyse(parse_program("q(X) :- node(X), color(X).\n? q(X)."), coloring_schema)
        (warning,) = check_database(analysis, graph4_colors)
        assert "inter__color__node" in warning

    def test_overlapping_domains(self, coloring_schema):
        analysis = analyse(parse_program("q(X) :- node(X), color(X).\n? q(X)."), coloring_schema)
        assert check_database(analysis, parse_database("node(a). color(a).", coloring_schema)) == []

    def test_facts_for_derived_predicates(self, coloring_schema, graph4_colors):
        analysis = analyse(load_query("min_coloring").program, coloring_schema)
        db = attr.evolve(graph4_colors, facts={**graph4_colors.facts, "used_color": frozenset({("red",)})})
        with pytest.raises(ValidationException) as e:
            check_database(analysis, db)
        assert "used_color" in str(e.value)


# endregion
