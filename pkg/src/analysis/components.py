from typing import Iterator

import attr

from src.analysis.graph import DependencyGraph
from src.constants import GoalModes, RuleKinds
from src.exc import Diagnostic, ValidationException
from src.frontend.printer import print_rule
from src.frontend.syntax import Goal, Program, Rule


@attr.s(frozen=True)
class Classification:
    guess: frozenset[str] = attr.ib(converter=frozenset)
    standard: frozenset[str] = attr.ib(converter=frozenset)


@attr.s(frozen=True)
class Constrained:
    dependent: frozenset[str] = attr.ib(converter=frozenset)  # standard predicates depending on a guess predicate
    constrained: frozenset[str] = attr.ib(converter=frozenset)
    recursion_dependent: frozenset[str] = attr.ib(converter=frozenset)


@attr.s(frozen=True)
class ComponentPartition:
    p1: tuple[Rule, ...] = attr.ib(default=(), converter=tuple)
    p2_g: tuple[Rule, ...] = attr.ib(default=(), converter=tuple)
    p2_s: tuple[Rule, ...] = attr.ib(default=(), converter=tuple)
    p2_c: tuple[Rule, ...] = attr.ib(default=(), converter=tuple)
    p3_s: tuple[Rule, ...] = attr.ib(default=(), converter=tuple)
    p3_c: tuple[Rule, ...] = attr.ib(default=(), converter=tuple)
    p4: tuple[Rule, ...] = attr.ib(default=(), converter=tuple)

    LABELS = {
        "p1": "P1",
        "p2_g": "P2 guess",
        "p2_s": "P2 standard",
        "p2_c": "P2 constraints",
        "p3_s": "P3 standard",
        "p3_c": "P3 constraints",
        "p4": "P4",
    }

    def components(self) -> Iterator[tuple[str, tuple[Rule, ...]]]:
        for name in self.LABELS:
            yield name, getattr(self, name)

    @property
    def p2(self) -> tuple[Rule, ...]:
        return self.p2_g + self.p2_s + self.p2_c

    @property
    def p3(self) -> tuple[Rule, ...]:
        return self.p3_s + self.p3_c

    def defined_in(self, component: str) -> set[str]:
        return {predicate for rule in getattr(self, component) for predicate in rule.head_predicates()}

    def component_of(self, predicate: str) -> str:
        """
        The name of the component defining `predicate`, with P2 guess and standard rules reported as `p2`.
        """

        for name, rules in self.components():
            if any(predicate in rule.head_predicates() for rule in rules):
                return "p2" if name.startswith("p2") else name
        raise ValueError(f"The predicate {predicate} is not defined by any component")

    def listing(self) -> str:
        lines = []
        for name, rules in self.components():
            lines.append(f"{self.LABELS[name]}:")
            lines.extend(f"  {print_rule(rule)}" for rule in rules)
        return "\n".join(lines) + "\n"


def classify_predicates(program: Program) -> Classification:
    """
    Guess predicates are the heads of partition and subset rules. Each must have exactly one definition, and no guess
    rule may read a guess predicate or anything depending on one.
    """

    diagnostics = []
    guess: dict[str, None] = {}
    for rule in program.rules:
        if rule.is_guess:
            guess.update(dict.fromkeys(rule.head_predicates()))
    for predicate in guess:
        if len(program.definitions(predicate)) > 1:
            diagnostics.append(Diagnostic(f"The guess predicate {predicate} must be defined by a single rule"))

    graph = DependencyGraph.from_rules(program.rules)
    tainted = set(guess) | graph.reachable_from(guess)
    for rule_index, rule in enumerate(program.rules):
        if not rule.is_guess:
            continue
        for predicate, _ in rule.body_predicate_polarities():
            if predicate in tainted:
                diagnostics.append(
                    Diagnostic(
                        f"The body of a partition or subset rule cannot contain the guess-dependent predicate "
                        f"{predicate}",
                        rule_index=rule_index,
                    )
                )
    if diagnostics:
        raise ValidationException(diagnostics)
    standard = [predicate for predicate in program.defined_predicates() if predicate not in guess]
    return Classification(guess=guess, standard=standard)


def mark_constrained(
    program: Program, classification: Classification, goal: Goal, plain_goal_constrains: bool = True
) -> Constrained:
    """
    A standard predicate depending on a guess predicate is constrained when a constraint or the goal reads it, or reads
    a predicate depending on it. A plain goal only counts when `plain_goal_constrains` is set.
    """

    graph = DependencyGraph.from_rules(program.rules)
    dependent = graph.reachable_from(classification.guess) & classification.standard
    roots = {
        predicate for rule in program.rules_of_kind(RuleKinds.constraint) for predicate in rule.mentioned_predicates()
    }
    if goal.mode != GoalModes.plain or plain_goal_constrains:
        roots.add(goal.atom.predicate)
    constrained = dependent & (roots | graph.ancestors_of(roots))

    standard_graph = DependencyGraph.from_rules(program.rules_of_kind(RuleKinds.standard))
    recursive = {predicate for predicate in constrained if standard_graph.is_recursive(predicate)}
    recursion_dependent = constrained & (recursive | graph.reachable_from(recursive))
    return Constrained(dependent=dependent, constrained=constrained, recursion_dependent=recursion_dependent)


def partition_components(
    program: Program, classification: Classification, constrained: Constrained
) -> ComponentPartition:
    p1: list[Rule] = []
    p2_g: list[Rule] = []
    p2_s: list[Rule] = []
    p2_c: list[Rule] = []
    p3_s: list[Rule] = []
    p3_c: list[Rule] = []
    p4: list[Rule] = []
    for rule in program.rules:
        if rule.kind == RuleKinds.constraint:
            continue
        if rule.is_guess:
            p2_g.append(rule)
            continue
        predicate = rule.head[0].predicate
        if predicate not in constrained.dependent:
            p1.append(rule)
        elif predicate in constrained.recursion_dependent:
            p3_s.append(rule)
        elif predicate in constrained.constrained:
            p2_s.append(rule)
        else:
            p4.append(rule)
    layer3 = {predicate for rule in p3_s for predicate in rule.head_predicates()}
    for rule in program.rules_of_kind(RuleKinds.constraint):
        (p3_c if rule.mentioned_predicates() & layer3 else p2_c).append(rule)
    return ComponentPartition(p1=p1, p2_g=p2_g, p2_s=p2_s, p2_c=p2_c, p3_s=p3_s, p3_c=p3_c, p4=p4)
