"""
Rewrites a program into the canonical form the translation works on:

* every standard predicate is defined by one extended rule whose body is a disjunction of conjunctions;
* exclusive disjunctions become generalized partition or subset rules;
* no variable occurs twice among the positive literals of a conjunction with different domains;
* constants and expressions only occur in comparisons;
* negative literals of constraints are moved into the consequent, so a constraint reads `A1 | ... | Am <- body`.
"""

from typing import Iterable

import attr

from src.analysis.schemas import is_label_partition, labels_domain_name
from src.constants import RESERVED_MARKER, Comparators, DomainKinds, RuleKinds
from src.exc import Diagnostic, ValidationException
from src.frontend.schema import DerivedDomain, Schema
from src.frontend.syntax import (
    Atom,
    BodyItem,
    Comparison,
    Conjunction,
    Constant,
    Literal,
    Program,
    Rule,
    Substitution,
    Term,
    Variable,
    substitute_conjunction,
    substitute_term,
)


@attr.s(frozen=True)
class Normalized:
    program: Program = attr.ib()
    schema: Schema = attr.ib()


class FreshVariables:
    """
    Hands out variables named `<base>__<k>` that do not clash with any name in `used`.
    """

    def __init__(self, used: Iterable[Variable]):
        self.used = {variable.name for variable in used}
        self.counter = 0

    def __call__(self, base: str = "V") -> Variable:
        while True:
            self.counter += 1
            name = f"{base}{RESERVED_MARKER}{self.counter}"
            if name not in self.used:
                self.used.add(name)
                return Variable(name)


def signature_of(schema: Schema, predicate: str) -> tuple[str, ...]:
    signature = schema.signature(predicate)
    if signature is None:
        raise ValidationException([Diagnostic(f"The predicate {predicate} has no signature")])
    return signature


# region partitions


def selector_name(predicate: str) -> str:
    return f"{predicate}{RESERVED_MARKER}sel"


def rewrite_partition(
    rule: Rule, schema: Schema
) -> tuple[list[Rule], dict[str, DerivedDomain], dict[str, tuple[str, ...]]]:
    """
    Returns the replacement rules plus any label domains and signatures they introduce.
    """

    fresh = FreshVariables(rule.variables())
    if is_label_partition(rule):
        head = rule.head[0]
        label = fresh("L")
        domain = labels_domain_name(head.predicate)
        partition = Rule(
            RuleKinds.generalized_partition,
            (Atom(head.predicate, head.args[:-1] + (label,)),),
            (rule.conjunction + (Literal(Atom(domain, (label,))),),),
            label=label,
        )
        return [partition], {}, {}

    first, *others = rule.head
    if len(rule.head) == 2:
        return (
            [
                Rule(RuleKinds.subset, (first,), (rule.conjunction,)),
                Rule(RuleKinds.standard, (others[0],), (rule.conjunction + (Literal(first, negated=True),),)),
            ],
            {},
            {},
        )

    selector = selector_name(first.predicate)
    domain = labels_domain_name(selector)
    label = fresh("L")
    rules = [
        Rule(
            RuleKinds.generalized_partition,
            (Atom(selector, first.args + (label,)),),
            (rule.conjunction + (Literal(Atom(domain, (label,))),),),
            label=label,
        )
    ]
    for code, atom in enumerate(rule.head, start=1):
        rules.append(
            Rule(
                RuleKinds.standard,
                (atom,),
                ((Literal(Atom(selector, first.args + (label,))), Comparison(Comparators.eq, label, Constant(code))),),
            )
        )
    labels = DerivedDomain(kind=DomainKinds.labels, values=tuple(range(1, len(rule.head) + 1)))
    return rules, {domain: labels}, {selector: signature_of(schema, first.predicate) + (domain,)}


# endregion

# region standard rules


def canonical_head(definitions: list[Rule], fresh: FreshVariables) -> tuple[Variable, ...]:
    args = definitions[0].head[0].args
    if all(isinstance(arg, Variable) for arg in args) and len(set(args)) == len(args):
        return tuple(arg for arg in args if isinstance(arg, Variable))
    return tuple(fresh("X") for _ in args)


def merge_definitions(definitions: list[Rule], schema: Schema) -> Rule:
    """
    Merges the rules defining one predicate into a single extended rule over a shared head.
    """

    fresh = FreshVariables(variable for rule in definitions for variable in rule.variables())
    canonical = canonical_head(definitions, fresh)
    predicate = definitions[0].head[0].predicate
    conjunctions: list[Conjunction] = []
    for rule in definitions:
        substitution: Substitution = {}
        pending: list[tuple[int, Term]] = []
        for position, (arg, variable) in enumerate(zip(rule.head[0].args, canonical)):
            if isinstance(arg, Variable) and arg not in substitution:
                substitution[arg] = variable
            else:
                pending.append((position, arg))
        for variable in rule.variables():
            if variable not in substitution:
                substitution[variable] = fresh() if variable in canonical else variable
        extra: list[BodyItem] = []
        if pending:
            signature = signature_of(schema, predicate)
            for position, arg in pending:
                extra.append(Literal(Atom(signature[position], (canonical[position],))))
                extra.append(Comparison(Comparators.eq, canonical[position], substitute_term(arg, substitution)))
        for conjunction in rule.body:
            conjunctions.append(substitute_conjunction(conjunction, substitution) + tuple(extra))
    return Rule(RuleKinds.standard, (Atom(predicate, canonical),), conjunctions)


# endregion

# region conjunctions


def hoist_constants(conjunction: Conjunction, schema: Schema, fresh: FreshVariables) -> Conjunction:
    """
    Replaces every non-variable argument of a literal by a fresh variable equated to it. Fresh variables of negative
    literals are bound by the domain of their position.
    """

    items: list[BodyItem] = []
    for item in conjunction:
        if not isinstance(item, Literal) or all(isinstance(arg, Variable) for arg in item.atom.args):
            items.append(item)
            continue
        signature = signature_of(schema, item.atom.predicate)
        args = []
        bindings: list[BodyItem] = []
        comparisons: list[BodyItem] = []
        for arg, domain in zip(item.atom.args, signature):
            if isinstance(arg, Variable):
                args.append(arg)
                continue
            variable = fresh()
            args.append(variable)
            if item.negated:
                bindings.append(Literal(Atom(domain, (variable,))))
            comparisons.append(Comparison(Comparators.eq, variable, arg))
        items.extend(bindings)
        items.append(Literal(Atom(item.atom.predicate, tuple(args)), item.negated))
        items.extend(comparisons)
    return tuple(items)


def separate_domains(conjunction: Conjunction, schema: Schema, fresh: FreshVariables) -> Conjunction:
    """
    Gives every positive occurrence of a variable one domain: an occurrence whose domain differs from the first one
    is renamed apart and equated to it.
    """

    domain_of: dict[Variable, str] = {}
    items: list[BodyItem] = []
    for item in conjunction:
        if not isinstance(item, Literal) or item.negated:
            items.append(item)
            continue
        signature = signature_of(schema, item.atom.predicate)
        args = []
        equalities: list[BodyItem] = []
        for arg, domain in zip(item.atom.args, signature):
            if not isinstance(arg, Variable) or domain_of.setdefault(arg, domain) == domain:
                args.append(arg)
                continue
            variable = fresh()
            domain_of[variable] = domain
            args.append(variable)
            equalities.append(Comparison(Comparators.eq, arg, variable))
        items.append(Literal(Atom(item.atom.predicate, tuple(args))))
        items.extend(equalities)
    return tuple(items)


def normalize_conjunctions(rule: Rule, schema: Schema) -> Rule:
    fresh = FreshVariables(rule.variables())
    body = tuple(
        separate_domains(hoist_constants(conjunction, schema, fresh), schema, fresh) for conjunction in rule.body
    )
    if rule.kind != RuleKinds.constraint:
        return attr.evolve(rule, body=body)
    (conjunction,) = body or ((),)
    consequent = [item.atom for item in conjunction if isinstance(item, Literal) and item.negated]
    antecedent = tuple(item for item in conjunction if not (isinstance(item, Literal) and item.negated))
    return Rule(RuleKinds.constraint, rule.head + tuple(consequent), (antecedent,))


# endregion


def normalize(program: Program, schema: Schema) -> Normalized:
    """
    `schema` must already carry the signatures of every derived predicate. Normalizing a normalized program returns
    it unchanged.
    """

    rules: list[Rule] = []
    derived: dict[str, DerivedDomain] = {}
    signatures: dict[str, tuple[str, ...]] = {}
    for rule in program.rules:
        if rule.kind == RuleKinds.partition:
            replacement, domains, selectors = rewrite_partition(rule, schema)
            rules.extend(replacement)
            derived.update(domains)
            signatures.update(selectors)
        else:
            rules.append(rule)
    schema = schema.with_derived_domains(derived).with_predicates(signatures)

    definitions: dict[str, list[Rule]] = {}
    for rule in rules:
        if rule.kind == RuleKinds.standard:
            definitions.setdefault(rule.head[0].predicate, []).append(rule)
    merged: list[Rule] = []
    for rule in rules:
        if rule.kind != RuleKinds.standard:
            merged.append(rule)
        elif (group := definitions.pop(rule.head[0].predicate, None)) is not None:
            merged.append(merge_definitions(group, schema))

    normalized = [normalize_conjunctions(rule, schema) for rule in merged]
    return Normalized(program=Program(rules=normalized, goal=program.goal), schema=schema)
