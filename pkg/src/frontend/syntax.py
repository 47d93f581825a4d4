from typing import Iterator, Optional, Union

import attr

from src.constants import ARITHMETIC_OPERATORS, Comparators, GoalModes, RuleKinds
from src.exc import Diagnostic, ValidationException
from src.utils import Value

# region terms


@attr.s(frozen=True)
class Variable:
    name: str = attr.ib()

    def __str__(self) -> str:
        return self.name


@attr.s(frozen=True)
class Constant:
    value: Value = attr.ib()

    def __str__(self) -> str:
        return str(self.value)


@attr.s(frozen=True)
class BinaryExpression:
    op: str = attr.ib(validator=attr.validators.in_(ARITHMETIC_OPERATORS))
    left: "Term" = attr.ib()
    right: "Term" = attr.ib()


Term = Union[Variable, Constant, BinaryExpression]


def term_variables(term: Term) -> Iterator[Variable]:
    if isinstance(term, Variable):
        yield term
    elif isinstance(term, BinaryExpression):
        yield from term_variables(term.left)
        yield from term_variables(term.right)


# endregion

# region literals


@attr.s(frozen=True)
class Atom:
    predicate: str = attr.ib()
    args: tuple[Term, ...] = attr.ib(default=(), converter=tuple)

    @property
    def arity(self) -> int:
        return len(self.args)

    def variables(self) -> Iterator[Variable]:
        for arg in self.args:
            yield from term_variables(arg)


@attr.s(frozen=True)
class Literal:
    atom: Atom = attr.ib()
    negated: bool = attr.ib(default=False)

    def variables(self) -> Iterator[Variable]:
        return self.atom.variables()


@attr.s(frozen=True)
class Comparison:
    op: Comparators = attr.ib()
    left: Term = attr.ib()
    right: Term = attr.ib()

    def variables(self) -> Iterator[Variable]:
        yield from term_variables(self.left)
        yield from term_variables(self.right)


BodyItem = Union[Literal, Comparison]
Conjunction = tuple[BodyItem, ...]


def conjunction_variables(conjunction: Conjunction) -> list[Variable]:
    """
    Variables of `conjunction` in order of first appearance.
    """

    seen: dict[Variable, None] = {}
    for item in conjunction:
        for variable in item.variables():
            seen.setdefault(variable, None)
    return list(seen)


def positive_atoms(conjunction: Conjunction) -> list[Atom]:
    return [item.atom for item in conjunction if isinstance(item, Literal) and not item.negated]


def body_predicates(conjunction: Conjunction) -> Iterator[tuple[str, bool]]:
    """
    Yields (predicate, negated) for every predicate literal of `conjunction`.
    """

    for item in conjunction:
        if isinstance(item, Literal):
            yield item.atom.predicate, item.negated


# endregion

# region substitution

Substitution = dict[Variable, Term]


def substitute_term(term: Term, substitution: Substitution) -> Term:
    if isinstance(term, Variable):
        return substitution.get(term, term)
    if isinstance(term, BinaryExpression):
        return BinaryExpression(
            term.op, substitute_term(term.left, substitution), substitute_term(term.right, substitution)
        )
    return term


def substitute_atom(atom: Atom, substitution: Substitution) -> Atom:
    return Atom(atom.predicate, tuple(substitute_term(arg, substitution) for arg in atom.args))


def substitute_item(item: BodyItem, substitution: Substitution) -> BodyItem:
    if isinstance(item, Literal):
        return Literal(substitute_atom(item.atom, substitution), item.negated)
    return Comparison(item.op, substitute_term(item.left, substitution), substitute_term(item.right, substitution))


def substitute_conjunction(conjunction: Conjunction, substitution: Substitution) -> Conjunction:
    return tuple(substitute_item(item, substitution) for item in conjunction)


# endregion

# region rules


@attr.s(frozen=True)
class Rule:
    kind: RuleKinds = attr.ib()
    head: tuple[Atom, ...] = attr.ib(converter=tuple)
    body: tuple[Conjunction, ...] = attr.ib(converter=lambda body: tuple(tuple(c) for c in body))
    label: Optional[Variable] = attr.ib(default=None)  # partition variable of generalized partition rules

    @property
    def conjunction(self) -> Conjunction:
        """
        The single conjunction of a rule that has not been normalized into an extended rule.
        """

        return self.body[0] if self.body else ()

    @property
    def is_guess(self) -> bool:
        return self.kind in (RuleKinds.partition, RuleKinds.generalized_partition, RuleKinds.subset)

    def head_predicates(self) -> list[str]:
        if self.kind == RuleKinds.constraint:
            return []
        return list(dict.fromkeys(atom.predicate for atom in self.head))

    def mentioned_predicates(self) -> set[str]:
        """
        Every predicate occurring anywhere in the rule, including the consequent of normalized constraints.
        """

        predicates = {atom.predicate for atom in self.head}
        for conjunction in self.body:
            predicates.update(predicate for predicate, _ in body_predicates(conjunction))
        return predicates

    def body_predicate_polarities(self) -> Iterator[tuple[str, bool]]:
        for conjunction in self.body:
            yield from body_predicates(conjunction)

    def variables(self) -> list[Variable]:
        seen: dict[Variable, None] = {}
        for atom in self.head:
            seen.update(dict.fromkeys(atom.variables()))
        for conjunction in self.body:
            seen.update(dict.fromkeys(conjunction_variables(conjunction)))
        if self.label is not None:
            seen.setdefault(self.label, None)
        return list(seen)


@attr.s(frozen=True)
class Goal:
    mode: GoalModes = attr.ib()
    atom: Atom = attr.ib()


@attr.s(frozen=True)
class Program:
    rules: tuple[Rule, ...] = attr.ib(default=(), converter=tuple)
    goal: Optional[Goal] = attr.ib(default=None)

    def rules_of_kind(self, *kinds: RuleKinds) -> list[Rule]:
        return [rule for rule in self.rules if rule.kind in kinds]

    def defined_predicates(self) -> list[str]:
        seen: dict[str, None] = {}
        for rule in self.rules:
            for predicate in rule.head_predicates():
                seen.setdefault(predicate, None)
        return list(seen)

    def definitions(self, predicate: str) -> list[Rule]:
        return [rule for rule in self.rules if predicate in rule.head_predicates()]


@attr.s(frozen=True)
class Query:
    program: Program = attr.ib()
    goal_mode: GoalModes = attr.ib()
    goal_atom: Atom = attr.ib()

    @classmethod
    def from_program(cls, program: Program) -> "Query":
        if program.goal is None:
            raise ValidationException([Diagnostic("The program has no query line")])
        if program.goal.atom.predicate not in program.defined_predicates():
            raise ValidationException(
                [Diagnostic(f"The goal predicate {program.goal.atom.predicate} is not defined by the program")]
            )
        return cls(program=program, goal_mode=program.goal.mode, goal_atom=program.goal.atom)


# endregion
