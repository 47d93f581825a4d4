"""
Bottom-up evaluation of standard rules: naive iteration to a fixpoint, stratum by stratum.
"""

from collections import defaultdict
from typing import Iterable, Iterator, Optional

import attr

from src.analysis.graph import stratify
from src.constants import Comparators, RuleKinds
from src.frontend.schema import Database
from src.frontend.syntax import Atom, BodyItem, Comparison, Conjunction, Constant, Literal, Rule, Term, Variable
from src.utils import Value, format_fact, tuple_sort_key, value_sort_key

GroundAtom = tuple[str, tuple[Value, ...]]
Binding = dict[Variable, Value]


@attr.s(frozen=True, eq=False)
class Interpretation:
    relations: dict[str, frozenset[tuple[Value, ...]]] = attr.ib(default=attr.Factory(dict))

    # region constructors

    @classmethod
    def from_atoms(cls, atoms: Iterable[GroundAtom]) -> "Interpretation":
        relations: dict[str, set[tuple[Value, ...]]] = defaultdict(set)
        for predicate, values in atoms:
            relations[predicate].add(values)
        return cls(relations={predicate: frozenset(tuples) for predicate, tuples in relations.items()})

    @classmethod
    def from_database(cls, db: Database) -> "Interpretation":
        return cls.from_atoms(db.ground_facts())

    # endregion

    # region public

    def relation(self, predicate: str) -> frozenset[tuple[Value, ...]]:
        return self.relations.get(predicate, frozenset())

    def __contains__(self, atom: GroundAtom) -> bool:
        predicate, values = atom
        return values in self.relation(predicate)

    def __len__(self) -> int:
        return sum(len(tuples) for tuples in self.relations.values())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Interpretation):
            return NotImplemented
        return set(self.atoms()) == set(other.atoms())

    def atoms(self) -> list[GroundAtom]:
        """
        All atoms, ordered by predicate and then lexicographically by arguments.
        """

        return [
            (predicate, values)
            for predicate in sorted(self.relations)
            for values in sorted(self.relations[predicate], key=tuple_sort_key)
        ]

    def union(self, other: "Interpretation") -> "Interpretation":
        relations = dict(self.relations)
        for predicate, tuples in other.relations.items():
            relations[predicate] = relations.get(predicate, frozenset()) | tuples
        return Interpretation(relations=relations)

    def restrict(self, predicates: Iterable[str]) -> "Interpretation":
        return Interpretation(relations={predicate: self.relation(predicate) for predicate in predicates})

    def without(self, predicates: Iterable[str]) -> "Interpretation":
        excluded = set(predicates)
        return Interpretation(
            relations={predicate: tuples for predicate, tuples in self.relations.items() if predicate not in excluded}
        )

    def to_text(self, predicates: Optional[Iterable[str]] = None) -> str:
        selected = set(predicates) if predicates is not None else None
        lines = [
            format_fact(predicate, values)
            for predicate, values in self.atoms()
            if selected is None or predicate in selected
        ]
        return "\n".join(lines) + ("\n" if lines else "")

    # endregion


# region matching


def evaluate_term(term: Term, binding: Binding) -> Optional[Value]:
    """
    None when the term mentions an unbound variable or applies arithmetic to a string.
    """

    if isinstance(term, Constant):
        return term.value
    if isinstance(term, Variable):
        return binding.get(term)
    left = evaluate_term(term.left, binding)
    right = evaluate_term(term.right, binding)
    if not isinstance(left, int) or not isinstance(right, int):
        return None
    if term.op == "+":
        return left + right
    if term.op == "-":
        return left - right
    return left * right


def compare(op: Comparators, left: Value, right: Value) -> bool:
    if op == Comparators.eq:
        return left == right
    if op == Comparators.ne:
        return left != right
    left_key, right_key = value_sort_key(left), value_sort_key(right)
    if op == Comparators.lt:
        return left_key < right_key
    if op == Comparators.le:
        return left_key <= right_key
    if op == Comparators.gt:
        return left_key > right_key
    return left_key >= right_key


def instantiate(atom: Atom, binding: Binding) -> Optional[GroundAtom]:
    values = []
    for arg in atom.args:
        if (value := evaluate_term(arg, binding)) is None:
            return None
        values.append(value)
    return atom.predicate, tuple(values)


def unify(atom: Atom, values: tuple[Value, ...], binding: Binding) -> Optional[Binding]:
    if len(values) != atom.arity:
        return None
    extended = dict(binding)
    for arg, value in zip(atom.args, values):
        if isinstance(arg, Variable) and arg not in extended:
            extended[arg] = value
        elif evaluate_term(arg, extended) != value:
            return None
    return extended


class Matcher:
    """
    Enumerates the bindings satisfying a conjunction over a fixed interpretation. Positive literals are joined in
    order through per-predicate hash indexes; comparisons and negative literals are tested as soon as their variables
    are bound. Negative literals are tested against `negation_against`, which defaults to the interpretation itself.
    """

    def __init__(self, interpretation: Interpretation, negation_against: Optional[Interpretation] = None):
        self.interpretation = interpretation
        self.negation_against = negation_against if negation_against is not None else interpretation
        self.indexes: dict[tuple[str, tuple[int, ...]], dict[tuple[Value, ...], list[tuple[Value, ...]]]] = {}

    def lookup(self, predicate: str, positions: tuple[int, ...], key: tuple[Value, ...]) -> list[tuple[Value, ...]]:
        if (index := self.indexes.get((predicate, positions))) is None:
            index = defaultdict(list)
            for values in self.interpretation.relation(predicate):
                index[tuple(values[position] for position in positions)].append(values)
            self.indexes[(predicate, positions)] = index
        return index.get(key, [])

    def holds(self, item: BodyItem, binding: Binding) -> bool:
        if isinstance(item, Comparison):
            left, right = evaluate_term(item.left, binding), evaluate_term(item.right, binding)
            return left is not None and right is not None and compare(item.op, left, right)
        ground = instantiate(item.atom, binding)
        if ground is None:
            return False
        return (ground in self.negation_against) != item.negated

    def bindings(self, conjunction: Conjunction, binding: Optional[Binding] = None) -> Iterator[Binding]:
        positives = [item.atom for item in conjunction if isinstance(item, Literal) and not item.negated]
        tests = [item for item in conjunction if not (isinstance(item, Literal) and not item.negated)]
        yield from self.extend(binding or {}, positives, tests)

    def extend(self, binding: Binding, positives: list[Atom], tests: list[BodyItem]) -> Iterator[Binding]:
        pending = []
        for item in tests:
            if all(variable in binding for variable in item.variables()):
                if not self.holds(item, binding):
                    return
            else:
                pending.append(item)
        if not positives:
            if not pending:
                yield binding
            return
        atom, *rest = positives
        positions = []
        key = []
        for position, arg in enumerate(atom.args):
            if (value := evaluate_term(arg, binding)) is not None:
                positions.append(position)
                key.append(value)
        for values in self.lookup(atom.predicate, tuple(positions), tuple(key)):
            if (extended := unify(atom, values, binding)) is not None:
                yield from self.extend(extended, rest, pending)


# endregion

# region evaluation


def derive_once(
    rule: Rule, current: Interpretation, negation_against: Optional[Interpretation] = None
) -> set[GroundAtom]:
    """
    The head instances of `rule` whose body, or some disjunct of it, holds in `current`.
    """

    matcher = Matcher(current, negation_against)
    derived = set()
    for conjunction in rule.body:
        for binding in matcher.bindings(conjunction):
            for atom in rule.head:
                if (ground := instantiate(atom, binding)) is not None:
                    derived.add(ground)
    return derived


def least_model(
    rules: Iterable[Rule], base: Interpretation, negation_against: Optional[Interpretation] = None
) -> Interpretation:
    """
    Naive iteration of `rules` from `base` until nothing new is derived. With `negation_against` fixed the rules
    behave as a positive program, which makes this the minimal model of the reduct.
    """

    rules = list(rules)
    current = base
    while True:
        derived: set[GroundAtom] = set()
        for rule in rules:
            derived |= derive_once(rule, current, negation_against)
        new = {atom for atom in derived if atom not in current}
        if not new:
            return current
        current = current.union(Interpretation.from_atoms(new))


def evaluate_stratified(rules: Iterable[Rule], base: Interpretation) -> Interpretation:
    """
    The perfect model of `rules` over `base`: every stratum is iterated to its fixpoint before the next one reads it.
    """

    current = base
    for stratum in stratify(rules):
        current = least_model(stratum, current)
    return current


# endregion

# region constraints


def violations(rule: Rule, interpretation: Interpretation) -> Iterator[Binding]:
    """
    Bindings under which the body of a constraint holds while none of its consequent atoms does.
    """

    assert rule.kind == RuleKinds.constraint
    matcher = Matcher(interpretation)
    for conjunction in rule.body:
        for binding in matcher.bindings(conjunction):
            consequent = [instantiate(atom, binding) for atom in rule.head]
            if not any(ground is not None and ground in interpretation for ground in consequent):
                yield binding


def first_violated(rules: Iterable[Rule], interpretation: Interpretation) -> Optional[Rule]:
    for rule in rules:
        if next(violations(rule, interpretation), None) is not None:
            return rule
    return None


# endregion
