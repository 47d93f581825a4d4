"""
Translation of the non-deterministic component of a query into a constraint model.

Every derived predicate of the component becomes a boolean decision array over its signature. Derived predicates
computed beforehand become arrays of known values. Rules become quantified constraints whose bodies are arithmetic
terms: a conjunction is a product, an existential variable a sum, a negation `1 - t`, and a base or domain atom a
membership test.
"""

from typing import Optional

from src.analysis.components import ComponentPartition
from src.analysis.graph import DependencyGraph
from src.constants import OPL_COMPARATORS, ConstraintKinds, GoalModes, RuleKinds
from src.exc import TranspileException
from src.frontend.schema import Schema
from src.frontend.syntax import (
    Atom,
    BodyItem,
    Comparison,
    Conjunction,
    Constant,
    Literal,
    Query,
    Rule,
    Term,
    Variable,
    conjunction_variables,
    positive_atoms,
)
from src.transpile import model
from src.transpile.model import (
    Access,
    Binary,
    Binding,
    BooleanArray,
    Compare,
    Const,
    Constraint,
    ConstraintModel,
    Declaration,
    KnownArray,
    Membership,
    Name,
    Num,
    Objective,
    Sum,
    Truth,
    product,
    total,
)


def variable_name(variable: Variable) -> str:
    return variable.name.lower()


def body_domains(conjunction: Conjunction, schema: Schema) -> dict[Variable, str]:
    """
    The domain of each variable, taken from its first occurrence in a positive literal.
    """

    domains: dict[Variable, str] = {}
    for atom in positive_atoms(conjunction):
        signature = schema.signature(atom.predicate)
        if signature is None:
            raise TranspileException(f"The predicate {atom.predicate} has no signature")
        for arg, domain in zip(atom.args, signature):
            if isinstance(arg, Variable):
                domains.setdefault(arg, domain)
    return domains


class Translator:
    def __init__(self, schema: Schema, arrays: set[str]):
        self.schema = schema
        self.arrays = arrays

    # region terms

    def term(self, term: Term) -> model.Term:
        if isinstance(term, Variable):
            return Name(variable_name(term))
        if isinstance(term, Constant):
            return Num(term.value) if isinstance(term.value, int) else Const(term.value)
        return Binary(term.op, self.term(term.left), self.term(term.right))

    def atom(self, atom: Atom) -> model.Term:
        args = tuple(self.term(arg) for arg in atom.args)
        if atom.predicate in self.arrays:
            return Access(atom.predicate, args)
        return Membership(atom.predicate, args)

    def item(self, item: BodyItem) -> model.Term:
        if isinstance(item, Comparison):
            return Compare(OPL_COMPARATORS[item.op], self.term(item.left), self.term(item.right))
        if item.negated:
            return Binary("-", Num(1), self.atom(item.atom))
        return self.atom(item.atom)

    def bindings(self, variables: list[Variable], domains: dict[Variable, str]) -> tuple[Binding, ...]:
        bindings = []
        for variable in variables:
            if variable not in domains:
                raise TranspileException(f"The variable {variable.name} is not bound by a positive literal")
            bindings.append(Binding((variable_name(variable),), domains[variable]))
        return tuple(bindings)

    def head_bindings(self, atom: Atom) -> tuple[Binding, ...]:
        signature = self.schema.signature(atom.predicate)
        if signature is None:
            raise TranspileException(f"The predicate {atom.predicate} has no signature")
        bindings = []
        seen = set()
        for arg, domain in zip(atom.args, signature):
            if isinstance(arg, Variable) and arg not in seen:
                seen.add(arg)
                bindings.append(Binding((variable_name(arg),), domain))
        return tuple(bindings)

    # endregion

    def translate_body(self, conjunction: Conjunction, existentials: list[Variable]) -> model.Term:
        """
        The product of the literals of `conjunction`, summed over the `existentials`.
        """

        body = product([self.item(item) for item in conjunction])
        if not existentials:
            return body
        return Sum(self.bindings(existentials, body_domains(conjunction, self.schema)), (), body)

    def existential_body(self, conjunction: Conjunction, bound: set[Variable]) -> model.Term:
        existentials = [variable for variable in conjunction_variables(conjunction) if variable not in bound]
        return self.translate_body(conjunction, existentials)

    # region rules

    def translate_partition_rule(self, rule: Rule) -> list[Constraint]:
        head = rule.head[0]
        assert rule.label is not None
        label = rule.label
        signature = self.schema.signature(head.predicate)
        assert signature is not None
        labels = signature[-1]
        partitioned = [arg for arg in head.args[:-1] if isinstance(arg, Variable)]
        body = strip_label_domain(rule.conjunction, label, labels)
        bindings = self.head_bindings(head)
        cell = Access(head.predicate, tuple(self.term(arg) for arg in head.args))
        existence = Constraint(
            bindings=bindings[:-1],
            guard=(),
            kind=ConstraintKinds.implication,
            lhs=Compare(">", self.existential_body(body, set(partitioned)), Num(0)),
            rhs=Compare("==", Sum((bindings[-1],), (), cell), Num(1)),
        )
        support = Constraint(
            bindings=bindings,
            guard=(),
            kind=ConstraintKinds.implication,
            lhs=Compare(">", cell, Num(0)),
            rhs=Compare(">", self.existential_body(body, set(partitioned) | {label}), Num(0)),
        )
        return [existence, support]

    def translate_subset_rule(self, rule: Rule) -> list[Constraint]:
        head = rule.head[0]
        cell = self.atom(head)
        support = Constraint(
            bindings=self.head_bindings(head),
            guard=(),
            kind=ConstraintKinds.implication,
            lhs=Compare(">", cell, Num(0)),
            rhs=Compare(">", self.existential_body(rule.conjunction, set(head.variables())), Num(0)),
        )
        return [support]

    def translate_standard_rule(self, rule: Rule) -> list[Constraint]:
        head = rule.head[0]
        bound = set(head.variables())
        disjuncts = [self.existential_body(conjunction, bound) for conjunction in rule.body]
        definition = Constraint(
            bindings=self.head_bindings(head),
            guard=(),
            kind=ConstraintKinds.biconditional,
            lhs=Compare(">", self.atom(head), Num(0)),
            rhs=Compare(">", total(disjuncts), Num(0)),
        )
        return [definition]

    def translate_constraint(self, rule: Rule) -> list[Constraint]:
        conjunction = rule.conjunction
        variables = conjunction_variables(conjunction)
        for atom in rule.head:
            variables.extend(variable for variable in atom.variables() if variable not in variables)
        rhs: model.Term = Truth(False)
        if rule.head:
            rhs = Compare(">", total([self.atom(atom) for atom in rule.head]), Num(0))
        constraint = Constraint(
            bindings=self.bindings(variables, body_domains(conjunction, self.schema)),
            guard=(),
            kind=ConstraintKinds.implication,
            lhs=Compare(">", self.translate_body(conjunction, []), Num(0)),
            rhs=rhs,
        )
        return [constraint]

    def translate_rule(self, rule: Rule) -> list[Constraint]:
        if rule.kind == RuleKinds.generalized_partition:
            return self.translate_partition_rule(rule)
        if rule.kind == RuleKinds.subset:
            return self.translate_subset_rule(rule)
        if rule.kind == RuleKinds.constraint:
            return self.translate_constraint(rule)
        if rule.kind == RuleKinds.standard:
            return self.translate_standard_rule(rule)
        raise TranspileException(f"Exclusive disjunctions must be normalized before translation: {rule}")

    # endregion


def strip_label_domain(conjunction: Conjunction, label: Variable, domain: str) -> Conjunction:
    """
    Drops the domain literal binding the partition variable when nothing else in the body mentions it.
    """

    for index, item in enumerate(conjunction):
        if isinstance(item, Literal) and not item.negated and item.atom == Atom(domain, (label,)):
            rest = conjunction[:index] + conjunction[index + 1 :]
            if label not in conjunction_variables(rest):
                return rest
    return conjunction


def build_declarations(partition: ComponentPartition, schema: Schema) -> list[Declaration]:
    """
    A boolean decision array for every predicate defined by the non-deterministic component, in rule order, followed
    by a known-value array for every other derived predicate it reads.
    """

    decisions: dict[str, None] = {}
    for rule in partition.p2_g + partition.p2_s:
        decisions.update(dict.fromkeys(rule.head_predicates()))
    derived = {
        predicate for _, rules in partition.components() for rule in rules for predicate in rule.head_predicates()
    }
    known: dict[str, None] = {}
    for rule in partition.p2:
        for predicate in sorted(rule.mentioned_predicates()):
            if predicate in derived and predicate not in decisions:
                known.setdefault(predicate, None)

    declarations: list[Declaration] = []
    for predicate in list(decisions) + list(known):
        signature = schema.signature(predicate)
        if signature is None:
            raise TranspileException(f"The predicate {predicate} has no inferred signature")
        if predicate in decisions:
            declarations.append(BooleanArray(predicate, signature))
        else:
            declarations.append(KnownArray(predicate, signature))
    return declarations


def translate_goal(query: Query, declarations: list[Declaration], schema: Schema) -> Optional[Objective]:
    if query.goal_mode == GoalModes.plain:
        return None
    predicate = query.goal_atom.predicate
    if not any(isinstance(decl, BooleanArray) and decl.name == predicate for decl in declarations):
        raise TranspileException(
            f"The optimized goal {predicate} must be defined by the non-deterministic component of the program"
        )
    translator = Translator(schema, {predicate})
    cell = translator.atom(query.goal_atom)
    return Objective(query.goal_mode, Sum(translator.head_bindings(query.goal_atom), (), cell))


def assemble_model(query: Query, partition: ComponentPartition, schema: Schema) -> ConstraintModel:
    """
    Declarations, objective and the constraints of the non-deterministic component: guess rules first, then standard
    rules, then constraints, each group in source order.
    """

    p2_standard = list(partition.p2_s)
    graph = DependencyGraph.from_rules(p2_standard)
    for rule in p2_standard:
        if graph.is_recursive(rule.head[0].predicate):
            raise TranspileException(
                f"The predicate {rule.head[0].predicate} is recursive and cannot be translated into constraints"
            )
    declarations = build_declarations(partition, schema)
    objective = translate_goal(query, declarations, schema)
    translator = Translator(schema, {decl.name for decl in declarations if not isinstance(decl, model.RangeDecl)})
    constraints = []
    for rule in partition.p2:
        constraints.extend(translator.translate_rule(rule))
    return ConstraintModel(decls=declarations, constraints=constraints, objective=objective, schema=schema)
