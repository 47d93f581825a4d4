from collections import defaultdict
from typing import Iterable, Optional

import attr

from src.constants import RuleKinds
from src.exc import UnstratifiedException
from src.frontend.syntax import Rule


@attr.s(frozen=True, hash=False)
class DependencyGraph:
    """
    Edges point from body predicates to the head predicates they help define (q -> p when q occurs in the body of
    a rule defining p). Constraints define nothing and contribute no edges.
    """

    nodes: tuple[str, ...] = attr.ib(converter=tuple)
    positive_edges: dict[str, frozenset[str]] = attr.ib()
    negative_edges: dict[str, frozenset[str]] = attr.ib()

    @classmethod
    def from_rules(cls, rules: Iterable[Rule]) -> "DependencyGraph":
        nodes: dict[str, None] = {}
        positive: dict[str, set[str]] = defaultdict(set)
        negative: dict[str, set[str]] = defaultdict(set)
        for rule in rules:
            for predicate in rule.mentioned_predicates():
                nodes.setdefault(predicate, None)
            if rule.kind == RuleKinds.constraint:
                continue
            for head in rule.head_predicates():
                for predicate, negated in rule.body_predicate_polarities():
                    (negative if negated else positive)[predicate].add(head)
        return cls(
            nodes=tuple(nodes),
            positive_edges={node: frozenset(targets) for node, targets in positive.items()},
            negative_edges={node: frozenset(targets) for node, targets in negative.items()},
        )

    def successors(self, node: str) -> frozenset[str]:
        return self.positive_edges.get(node, frozenset()) | self.negative_edges.get(node, frozenset())

    def is_negative(self, source: str, target: str) -> bool:
        return target in self.negative_edges.get(source, frozenset())

    def reachable_from(self, sources: Iterable[str]) -> set[str]:
        """
        Every predicate that depends (transitively, through at least one edge) on one of `sources`.
        """

        seen: set[str] = set()
        stack = list(sources)
        while stack:
            for target in self.successors(stack.pop()):
                if target not in seen:
                    seen.add(target)
                    stack.append(target)
        return seen

    def ancestors_of(self, targets: Iterable[str]) -> set[str]:
        """
        Every predicate that one of `targets` depends on, transitively.
        """

        reverse: dict[str, set[str]] = defaultdict(set)
        for source in self.nodes:
            for target in self.successors(source):
                reverse[target].add(source)
        seen: set[str] = set()
        stack = list(targets)
        while stack:
            for source in reverse[stack.pop()]:
                if source not in seen:
                    seen.add(source)
                    stack.append(source)
        return seen

    def strongly_connected_components(self) -> list[list[str]]:
        """
        Tarjan's algorithm, iterative. Tarjan emits dependents before their dependencies, so the result is reversed:
        every component comes after the components it depends on.
        """

        index: dict[str, int] = {}
        lowlink: dict[str, int] = {}
        on_stack: set[str] = set()
        stack: list[str] = []
        components: list[list[str]] = []
        counter = 0
        for root in self.nodes:
            if root in index:
                continue
            work: list[tuple[str, list[str]]] = [(root, sorted(self.successors(root)))]
            index[root] = lowlink[root] = counter
            counter += 1
            stack.append(root)
            on_stack.add(root)
            while work:
                node, pending = work[-1]
                if pending:
                    target = pending.pop(0)
                    if target not in index:
                        index[target] = lowlink[target] = counter
                        counter += 1
                        stack.append(target)
                        on_stack.add(target)
                        work.append((target, sorted(self.successors(target))))
                    elif target in on_stack:
                        lowlink[node] = min(lowlink[node], index[target])
                    continue
                work.pop()
                if work:
                    parent = work[-1][0]
                    lowlink[parent] = min(lowlink[parent], lowlink[node])
                if lowlink[node] == index[node]:
                    component = []
                    while True:
                        member = stack.pop()
                        on_stack.discard(member)
                        component.append(member)
                        if member == node:
                            break
                    components.append(sorted(component))
        return list(reversed(components))

    def is_recursive(self, node: str) -> bool:
        if node in self.successors(node):
            return True
        return any(node in component and len(component) > 1 for component in self.strongly_connected_components())

    def negative_cycle(self) -> Optional[list[str]]:
        for component in self.strongly_connected_components():
            members = set(component)
            for source in component:
                if self.negative_edges.get(source, frozenset()) & members:
                    return component
        return None


def stratify(rules: Iterable[Rule]) -> list[list[Rule]]:
    """
    Groups standard rules into strata such that negation only ever reads completed lower strata. Predicates read
    but not defined by `rules` are treated as given.
    """

    standard = [rule for rule in rules if rule.kind == RuleKinds.standard]
    graph = DependencyGraph.from_rules(standard)
    if (cycle := graph.negative_cycle()) is not None:
        raise UnstratifiedException(cycle)
    stratum_of: dict[str, int] = {}
    for component in graph.strongly_connected_components():
        members = set(component)
        level = 0
        for node in graph.nodes:
            for target in graph.successors(node):
                if target in members and node not in members:
                    level = max(level, stratum_of.get(node, 0) + (1 if graph.is_negative(node, target) else 0))
        for member in component:
            stratum_of[member] = level
    strata: dict[int, list[Rule]] = defaultdict(list)
    for rule in standard:
        strata[stratum_of[rule.head[0].predicate]].append(rule)
    return [strata[level] for level in sorted(strata)]
