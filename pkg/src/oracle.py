"""
Reference semantics for tests. A program is rewritten into plain rules with unstratified negation, whose stable models
are enumerated by brute force and checked against the minimal model of their reduct. A second path enumerates the
choices of the guess rules directly.
"""

from itertools import count, product
from typing import Iterable, Iterator, Optional

from src.analysis.graph import DependencyGraph
from src.analysis.normalize import FreshVariables
from src.constants import (
    DEFAULT_GUESS_BOUND,
    DEFAULT_ORACLE_BOUND,
    GUESS_RULE_KINDS,
    RESERVED_MARKER,
    ST_SUFFIX,
    Comparators,
    GoalModes,
    RuleKinds,
)
from src.exc import OracleBoundException
from src.fixpoint import (
    GroundAtom,
    Interpretation,
    Matcher,
    evaluate_stratified,
    first_violated,
    instantiate,
    least_model,
    unify,
)
from src.frontend.schema import Database
from src.frontend.syntax import Atom, BodyItem, Comparison, Conjunction, Literal, Program, Query, Rule
from src.utils import Value

Relation = frozenset[tuple[Value, ...]]
AnswerSet = frozenset[Relation]

GUESS_COPY = f"{RESERVED_MARKER}guess"

# region rewriting


class FreshPredicates:
    def __init__(self) -> None:
        self.counter = count(1)

    def __call__(self, base: str) -> str:
        return f"{base}{ST_SUFFIX}{next(self.counter)}"


def standard(head: Atom, conjunction: Conjunction) -> Rule:
    return Rule(RuleKinds.standard, (head,), (conjunction,))


def marker_rule(conjunction: Conjunction, fresh: FreshPredicates) -> Rule:
    marker = Atom(fresh("constraint"))
    return standard(marker, conjunction + (Literal(marker, negated=True),))


def rewrite_partition(rule: Rule) -> list[Rule]:
    rules = []
    for position, head in enumerate(rule.head):
        others = tuple(Literal(other, negated=True) for index, other in enumerate(rule.head) if index != position)
        rules.append(standard(head, rule.conjunction + others))
    return rules


def rewrite_generalized_partition(rule: Rule, fresh: FreshPredicates) -> list[Rule]:
    assert rule.label is not None
    head = rule.head[0]
    variables = FreshVariables(rule.variables())
    other, first, second = variables("L"), variables("L"), variables("L")
    diff = Atom(fresh(f"diff_{head.predicate}"), head.args)
    prefix = head.args[:-1]
    return [
        standard(head, rule.conjunction + (Literal(diff, negated=True),)),
        standard(
            diff,
            rule.conjunction
            + (Literal(Atom(head.predicate, prefix + (other,))), Comparison(Comparators.ne, other, rule.label)),
        ),
        marker_rule(
            rule.conjunction
            + (
                Literal(Atom(head.predicate, prefix + (first,))),
                Literal(Atom(head.predicate, prefix + (second,))),
                Comparison(Comparators.ne, first, second),
            ),
            fresh,
        ),
    ]


def rewrite_subset(rule: Rule, fresh: FreshPredicates) -> list[Rule]:
    """
    A subset rule is a binary partition whose second head is a fresh complement predicate.
    """

    head = rule.head[0]
    complement = Atom(fresh(f"not_{head.predicate}"), head.args)
    return rewrite_partition(Rule(RuleKinds.partition, (head, complement), rule.body))


def st_transform(program: Program) -> list[Rule]:
    """
    Plain rules with unstratified negation equivalent to `program`. Pairwise exclusion constraints for partition rules
    are omitted since a guess predicate has no other definition.
    """

    fresh = FreshPredicates()
    rules: list[Rule] = []
    for rule in program.rules:
        if rule.kind == RuleKinds.standard:
            rules.append(rule)
        elif rule.kind == RuleKinds.partition:
            rules.extend(rewrite_partition(rule))
        elif rule.kind == RuleKinds.generalized_partition:
            rules.extend(rewrite_generalized_partition(rule, fresh))
        elif rule.kind == RuleKinds.subset:
            rules.extend(rewrite_subset(rule, fresh))
        else:
            for conjunction in rule.body or ((),):
                consequent = tuple(Literal(atom, negated=True) for atom in rule.head)
                rules.append(marker_rule(conjunction + consequent, fresh))
    return rules


# endregion

# region stable models


def constraint_markers(rules: list[Rule]) -> set[str]:
    """
    0-ary predicates whose every rule contains their own negation. No stable model contains them.
    """

    markers = set()
    for predicate in {rule.head[0].predicate for rule in rules if rule.head and not rule.head[0].args}:
        definitions = [rule for rule in rules if predicate in rule.head_predicates()]
        if all((predicate, True) in set(rule.body_predicate_polarities()) for rule in definitions):
            markers.add(predicate)
    return markers


def guard_negations(rules: list[Rule], guessed: set[str]) -> list[Rule]:
    """
    Negative literals over `guessed` predicates read a copy of the predicate that holds the guess.
    """

    def guard(item: BodyItem) -> BodyItem:
        if isinstance(item, Literal) and item.negated and item.atom.predicate in guessed:
            return Literal(Atom(item.atom.predicate + GUESS_COPY, item.atom.args), negated=True)
        return item

    return [
        Rule(rule.kind, rule.head, tuple(tuple(guard(item) for item in conjunction) for conjunction in rule.body))
        for rule in rules
    ]


def choice_predicates(rules: list[Rule], markers: set[str]) -> set[str]:
    """
    Negated predicates whose guessed extent breaks every negative cycle, picked greedily by name.
    """

    chosen = set(markers)
    while True:
        graph = DependencyGraph.from_rules(guard_negations(rules, chosen))
        if (cycle := graph.negative_cycle()) is None:
            return chosen
        members = set(cycle)
        negated = sorted(source for source in cycle if graph.negative_edges.get(source, frozenset()) & members)
        chosen.add(negated[0])


def relaxed_model(rules: list[Rule], base: Interpretation) -> Interpretation:
    """
    The least model once negative literals are dropped: every atom some stable model could contain.
    """

    positive = [
        Rule(
            rule.kind,
            rule.head,
            tuple(
                tuple(item for item in conjunction if not (isinstance(item, Literal) and item.negated))
                for conjunction in rule.body
            ),
        )
        for rule in rules
    ]
    return least_model(positive, base)


def is_stable(rules: list[Rule], base: Interpretation, candidate: Interpretation) -> bool:
    return least_model(rules, base, negation_against=candidate) == candidate


def enumerate_stable_models(
    rules: list[Rule], db: Database, bound: int = DEFAULT_ORACLE_BOUND
) -> list[Interpretation]:
    """
    Every stable model of `rules` over `db`, in canonical order. Only the atoms of the choice predicates are guessed;
    the rest of each candidate follows by stratified evaluation and the candidate is kept when it is the minimal
    model of its own reduct.
    """

    base = Interpretation.from_database(db)
    markers = constraint_markers(rules)
    chosen = choice_predicates(rules, markers)
    enumerated = sorted(chosen - markers)
    possible = relaxed_model(rules, base)
    atoms: list[GroundAtom] = [atom for atom in possible.atoms() if atom[0] in enumerated]
    if len(atoms) > bound:
        raise OracleBoundException(len(atoms), bound)

    guarded = guard_negations(rules, chosen)
    models: dict[tuple[GroundAtom, ...], Interpretation] = {}
    for mask in range(2 ** len(atoms)):
        guess = [atom for position, atom in enumerate(atoms) if mask >> position & 1]
        copies = Interpretation.from_atoms((predicate + GUESS_COPY, values) for predicate, values in guess)
        candidate = evaluate_stratified(guarded, base.union(copies)).without(
            predicate + GUESS_COPY for predicate in chosen
        )
        if set(candidate.restrict(chosen).atoms()) != set(guess):
            continue
        if is_stable(rules, base, candidate):
            models.setdefault(tuple(candidate.atoms()), candidate)
    return [models[key] for key in sorted(models, key=repr)]


# endregion

# region guess enumeration


def guess_dependent(program: Program) -> set[str]:
    graph = DependencyGraph.from_rules(program.rules)
    guesses = {predicate for rule in program.rules if rule.is_guess for predicate in rule.head_predicates()}
    return guesses | graph.reachable_from(guesses)


def choice_groups(rule: Rule, matcher: Matcher) -> list[list[GroundAtom]]:
    """
    The alternatives of a guess rule: per body binding one of the heads of a partition; per row one label of a
    generalized partition; in or out for every head instance of a subset rule. An empty alternative means out.
    """

    groups: dict[tuple[object, ...], dict[GroundAtom, None]] = {}
    for binding in matcher.bindings(rule.conjunction):
        heads = [instantiate(atom, binding) for atom in rule.head]
        if any(head is None for head in heads):
            continue
        ground = [head for head in heads if head is not None]
        if rule.kind == RuleKinds.generalized_partition:
            predicate, values = ground[0]
            key: tuple[object, ...] = (predicate, values[:-1])
        else:
            key = tuple(ground)
        groups.setdefault(key, {}).update(dict.fromkeys(ground))
    return [list(alternatives) for _, alternatives in sorted(groups.items(), key=lambda item: repr(item[0]))]


def enumerate_guess_models(program: Program, db: Database, bound: int = DEFAULT_GUESS_BOUND) -> list[Interpretation]:
    """
    Models of `program` found by trying every combination of guess choices: the rules that do not depend on guesses
    are evaluated once, the others once per combination, and combinations violating a constraint are dropped. Guess
    rule bodies may only read the part that does not depend on guesses.
    """

    dependent = guess_dependent(program)
    standard_rules = program.rules_of_kind(RuleKinds.standard)
    fixed = evaluate_stratified(
        [rule for rule in standard_rules if rule.head[0].predicate not in dependent], Interpretation.from_database(db)
    )
    matcher = Matcher(fixed)
    options: list[list[Optional[GroundAtom]]] = []
    for rule in program.rules_of_kind(*GUESS_RULE_KINDS):
        for group in choice_groups(rule, matcher):
            if rule.kind == RuleKinds.subset:
                options.extend([[None, atom] for atom in group])
            else:
                options.append(list(group))
    combinations = 1
    for alternatives in options:
        combinations *= len(alternatives)
    if combinations > bound:
        raise OracleBoundException(combinations, bound)

    remaining = [rule for rule in standard_rules if rule.head[0].predicate in dependent]
    constraints = program.rules_of_kind(RuleKinds.constraint)
    models: dict[tuple[GroundAtom, ...], Interpretation] = {}
    for choice in product(*options):
        chosen = Interpretation.from_atoms(atom for atom in choice if atom is not None)
        model = evaluate_stratified(remaining, fixed.union(chosen))
        if first_violated(constraints, model) is None:
            models.setdefault(tuple(model.atoms()), model)
    return [models[key] for key in sorted(models, key=repr)]


# endregion

# region answers


def project_answers(models: Iterable[Interpretation], goal: Atom, mode: GoalModes) -> AnswerSet:
    """
    The goal relation of every model; for optimization goals only those of optimal cardinality.
    """

    relations = {
        frozenset(values for values in model.relation(goal.predicate) if unify(goal, values, {}) is not None)
        for model in models
    }
    if not relations or mode == GoalModes.plain:
        return frozenset(relations)
    sizes = [len(relation) for relation in relations]
    best = min(sizes) if mode == GoalModes.min else max(sizes)
    return frozenset(relation for relation in relations if len(relation) == best)


def oracle_answer(query: Query, db: Database, bound: int = DEFAULT_ORACLE_BOUND) -> AnswerSet:
    models = enumerate_stable_models(st_transform(query.program), db, bound)
    return project_answers(models, query.goal_atom, query.goal_mode)


def guess_answer(query: Query, db: Database, bound: int = DEFAULT_GUESS_BOUND) -> AnswerSet:
    """
    The answers found by enumerating the guess choices of the query program directly.
    """

    return project_answers(enumerate_guess_models(query.program, db, bound), query.goal_atom, query.goal_mode)


def iter_answers(answers: AnswerSet) -> Iterator[Relation]:
    """
    Answer relations in canonical order.
    """

    yield from sorted(answers, key=lambda relation: sorted(map(repr, relation)))


# endregion
