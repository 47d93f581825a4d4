"""
Rewrites of constraint models that keep their solution sets unchanged: range restriction, constraint simplification,
array reduction and variable deletion.
"""

from typing import Callable, Iterable, Optional

import attr

from src.constants import PASS_PIPELINE, ConstraintKinds, Passes, RuleKinds
from src.frontend.syntax import Literal, Program, Rule, Variable
from src.transpile.model import (
    Access,
    Binary,
    Binding,
    BooleanArray,
    Compare,
    Constraint,
    ConstraintModel,
    Decode,
    Declaration,
    Encode,
    IntArray,
    KnownArray,
    Membership,
    Name,
    Num,
    Objective,
    RangeDecl,
    Sum,
    Term,
    Truth,
    factors_of,
    map_children,
    names_in,
    product,
    range_name,
    transform,
    walk,
)
from src.transpile.translate import strip_label_domain

ZERO = Num(0)


def antecedent_factors(constraint: Constraint) -> Optional[list[Term]]:
    """
    The factors of an implication whose antecedent reads `product > 0`.
    """

    lhs = constraint.lhs
    if constraint.kind != ConstraintKinds.implication:
        return None
    if not isinstance(lhs, Compare) or lhs.op != ">" or lhs.right != ZERO:
        return None
    return factors_of(lhs.left)


def with_antecedent(constraint: Constraint, factors: list[Term]) -> Constraint:
    return attr.evolve(constraint, lhs=Compare(">", product(factors), ZERO))


def rewrite_constraint_terms(constraint: Constraint, rewrite: Callable[[Term], Term]) -> Constraint:
    return attr.evolve(
        constraint,
        guard=tuple(rewrite(condition) for condition in constraint.guard),
        lhs=rewrite(constraint.lhs),
        rhs=rewrite(constraint.rhs),
    )


def rewrite_objective(objective: Optional[Objective], rewrite: Callable[[Term], Term]) -> Optional[Objective]:
    if objective is None:
        return None
    term = rewrite(objective.term)
    assert isinstance(term, Sum)
    return attr.evolve(objective, term=term)


# region range restriction


def rebind(bindings: list[Binding], membership: Membership, model: ConstraintModel) -> Optional[list[Binding]]:
    """
    Replaces the single-name bindings of the membership's arguments by one binding over the relation itself. Only
    applies when every argument is bound over the domain of its position in the relation.
    """

    signature = model.schema.signature(membership.relation)
    if signature is None or not membership.args or not all(isinstance(arg, Name) for arg in membership.args):
        return None
    names = tuple(arg.name for arg in membership.args if isinstance(arg, Name))
    if len(set(names)) != len(names):
        return None
    positions = []
    for name, domain in zip(names, signature):
        position = next((index for index, binding in enumerate(bindings) if binding.names == (name,)), None)
        if position is None or bindings[position].source != domain:
            return None
        positions.append(position)
    first = min(positions)
    rebound = []
    for index, binding in enumerate(bindings):
        if index == first:
            rebound.append(Binding(names, membership.relation))
        elif index not in positions:
            rebound.append(binding)
    return rebound


def restrict(
    bindings: Iterable[Binding], factors: list[Term], model: ConstraintModel
) -> tuple[tuple[Binding, ...], list[Term]]:
    current = list(bindings)
    kept = []
    for factor in factors:
        if isinstance(factor, Membership) and (rebound := rebind(current, factor, model)) is not None:
            current = rebound
        else:
            kept.append(factor)
    return tuple(current), kept


def drop_bound_memberships(term: Term, scope: dict[tuple[str, ...], str]) -> Term:
    """
    Membership tests of exactly the tuple an enclosing binding ranges over are always 1.
    """

    if isinstance(term, Membership) and all(isinstance(arg, Name) for arg in term.args):
        names = tuple(arg.name for arg in term.args if isinstance(arg, Name))
        if scope.get(names) == term.relation:
            return Num(1)
    if isinstance(term, Sum):
        bound = {name for binding in term.bindings for name in binding.names}
        inner = {names: source for names, source in scope.items() if not bound & set(names)}
        inner.update({binding.names: binding.source for binding in term.bindings})
        return map_children(term, lambda child: drop_bound_memberships(child, inner))
    return map_children(term, lambda child: drop_bound_memberships(child, scope))


def pass_range_restriction(model: ConstraintModel) -> ConstraintModel:
    def restrict_sum(term: Term) -> Term:
        if isinstance(term, Sum):
            bindings, factors = restrict(term.bindings, factors_of(term.body), model)
            return Sum(bindings, term.guard, product(factors))
        return term

    constraints = []
    for constraint in model.constraints:
        if (factors := antecedent_factors(constraint)) is not None:
            bindings, kept = restrict(constraint.bindings, factors, model)
            constraint = with_antecedent(attr.evolve(constraint, bindings=bindings), kept)
        constraint = rewrite_constraint_terms(constraint, lambda term: transform(term, restrict_sum))
        scope = {binding.names: binding.source for binding in constraint.bindings}
        constraints.append(rewrite_constraint_terms(constraint, lambda term: drop_bound_memberships(term, scope)))
    return attr.evolve(model, constraints=constraints)


# endregion

# region constraint simplification


def compare_numbers(op: str, left: int, right: int) -> bool:
    return {
        "==": left == right,
        "!=": left != right,
        "<": left < right,
        "<=": left <= right,
        ">": left > right,
        ">=": left >= right,
    }[op]


def simplify_node(term: Term) -> Term:
    if isinstance(term, Binary):
        left, right = term.left, term.right
        if isinstance(left, Num) and isinstance(right, Num):
            if term.op == "+":
                return Num(left.value + right.value)
            if term.op == "-":
                return Num(left.value - right.value)
            return Num(left.value * right.value)
        if term.op == "*":
            if left in (Num(1), Truth(True)):
                return right
            if right in (Num(1), Truth(True)):
                return left
            if ZERO in (left, right) or Truth(False) in (left, right):
                return ZERO
        if term.op == "+" and left == ZERO:
            return right
        if term.op in ("+", "-") and right == ZERO:
            return left
    if isinstance(term, Compare):
        left, right = term.left, term.right
        if isinstance(left, Num) and isinstance(right, Num):
            return Truth(compare_numbers(term.op, left.value, right.value))
        if term.op == ">" and right == ZERO:
            if isinstance(left, Truth):
                return left
            if isinstance(left, Compare) and left.op == ">" and left.right == ZERO:
                return left
    if isinstance(term, Sum) and term.body == ZERO:
        return ZERO
    return term


def simplify(term: Term) -> Term:
    return transform(term, simplify_node)


def is_pure_comparison(term: Term) -> bool:
    """
    A comparison between bound names and constants, with no array or relation inside.
    """

    return isinstance(term, Compare) and not any(
        isinstance(node, (Access, Membership, Sum)) for node in walk(term)
    )


def push_sum_guards(term: Term) -> Term:
    if not isinstance(term, Sum):
        return term
    factors = factors_of(term.body)
    guards = [factor for factor in factors if is_pure_comparison(factor)]
    if not guards:
        return term
    rest = [factor for factor in factors if not is_pure_comparison(factor)]
    return Sum(term.bindings, term.guard + tuple(guards), product(rest))


def push_guards(constraint: Constraint) -> Constraint:
    """
    Moves comparisons between variables bound by the forall out of the antecedent and into its guard.
    """

    factors = antecedent_factors(constraint)
    if factors is None:
        return constraint
    bound = {name for binding in constraint.bindings for name in binding.names}
    guards = [factor for factor in factors if is_pure_comparison(factor) and names_in(factor) <= bound]
    if not guards:
        return constraint
    rest = [factor for factor in factors if factor not in guards]
    return with_antecedent(attr.evolve(constraint, guard=constraint.guard + tuple(guards)), rest)


def is_tautology(constraint: Constraint) -> bool:
    if constraint.kind == ConstraintKinds.biconditional:
        return constraint.lhs == constraint.rhs
    return constraint.lhs == Truth(False) or constraint.rhs == Truth(True)


def pass_constraint_simplify(model: ConstraintModel) -> ConstraintModel:
    constraints = []
    for constraint in model.constraints:
        while True:
            simplified = push_guards(rewrite_constraint_terms(constraint, simplify))
            simplified = rewrite_constraint_terms(simplified, lambda term: transform(term, push_sum_guards))
            if simplified == constraint:
                break
            constraint = simplified
        if not is_tautology(constraint):
            constraints.append(constraint)
    return attr.evolve(model, constraints=constraints, objective=rewrite_objective(model.objective, simplify))


# endregion

# region array reduction


def covers_every_index(rule: Rule, decl: BooleanArray, model: ConstraintModel) -> bool:
    """
    True when the partition body is a conjunction of domain atoms over exactly the partitioned variables, each over the
    domain of its array dimension, so every cell row receives a label.
    """

    assert rule.label is not None
    head = rule.head[0]
    body = strip_label_domain(rule.conjunction, rule.label, decl.domains[-1])
    expected = dict(zip(head.args[:-1], decl.domains[:-1]))
    seen: dict[Variable, str] = {}
    for item in body:
        if not isinstance(item, Literal) or item.negated or not model.schema.is_domain(item.atom.predicate):
            return False
        (arg,) = item.atom.args
        if not isinstance(arg, Variable) or arg in seen:
            return False
        seen[arg] = item.atom.predicate
    return seen == expected


def is_existence_constraint(constraint: Constraint, array: str, domain: str) -> bool:
    rhs = constraint.rhs
    if not isinstance(rhs, Compare) or rhs.op != "==" or rhs.right != Num(1) or not isinstance(rhs.left, Sum):
        return False
    total = rhs.left
    if len(total.bindings) != 1 or total.guard or total.bindings[0].source != domain:
        return False
    body = total.body
    return (
        isinstance(body, Access)
        and body.array == array
        and bool(body.indices)
        and body.indices[-1] == Name(total.bindings[0].names[0])
    )


@attr.s
class Reduction:
    """
    Rewrites the terms of a model once the boolean array `array` over `(..., domain)` has become an integer array.
    Dimensions over `domain` of other decision arrays are reindexed by the codes of the domain.
    """

    array: str = attr.ib()
    domain: str = attr.ib()
    code_positions: dict[str, set[int]] = attr.ib()

    @property
    def codes(self) -> str:
        return range_name(self.domain)

    def converted_names(self, terms: Iterable[Term], bindings: Iterable[Binding]) -> set[str]:
        """
        Names bound over the domain that occur in a code position somewhere in `terms`.
        """

        bindings = list(bindings)
        in_code = set()
        for term in terms:
            for node in walk(term):
                if isinstance(node, Sum):
                    bindings.extend(node.bindings)
                if isinstance(node, Access) and node.array in self.code_positions:
                    for position in self.code_positions[node.array]:
                        if position < len(node.indices) and isinstance(node.indices[position], Name):
                            in_code.add(node.indices[position].name)
        return self.bound_over(bindings, self.domain) & in_code

    @staticmethod
    def bound_over(bindings: Iterable[Binding], source: str) -> set[str]:
        return {binding.names[0] for binding in bindings if len(binding.names) == 1 and binding.source == source}

    def coded_names(self, terms: Iterable[Term], bindings: Iterable[Binding]) -> set[str]:
        """
        Names already ranging over the codes of the domain.
        """

        bindings = list(bindings)
        for term in terms:
            bindings.extend(binding for node in walk(term) if isinstance(node, Sum) for binding in node.bindings)
        return self.bound_over(bindings, self.codes)

    def rebind(self, bindings: Iterable[Binding], converted: set[str]) -> tuple[Binding, ...]:
        return tuple(
            Binding(binding.names, self.codes)
            if len(binding.names) == 1 and binding.names[0] in converted and binding.source == self.domain
            else binding
            for binding in bindings
        )

    def code(self, index: Term, converted: set[str], coded: set[str]) -> Term:
        if isinstance(index, Name) and index.name in converted | coded:
            return index
        if isinstance(index, Decode) and index.domain == self.domain:
            return index.code
        return Encode(self.domain, self.rewrite(index, converted, coded))

    def rewrite(self, term: Term, converted: set[str], coded: set[str]) -> Term:
        if isinstance(term, Name):
            return Decode(self.domain, term) if term.name in converted else term
        if isinstance(term, Access) and term.array in self.code_positions:
            positions = self.code_positions[term.array]
            indices = tuple(
                self.code(index, converted, coded) if position in positions else self.rewrite(index, converted, coded)
                for position, index in enumerate(term.indices)
            )
            if term.array == self.array:
                return Compare("==", Access(term.array, indices[:-1]), indices[-1])
            return Access(term.array, indices)
        if isinstance(term, Sum):
            inner = Sum(self.rebind(term.bindings, converted), term.guard, term.body)
            return map_children(inner, lambda child: self.rewrite(child, converted, coded))
        return map_children(term, lambda child: self.rewrite(child, converted, coded))

    def constraint(self, constraint: Constraint) -> Constraint:
        converted = self.converted_names(constraint.terms(), constraint.bindings)
        coded = self.coded_names(constraint.terms(), constraint.bindings)
        constraint = attr.evolve(constraint, bindings=self.rebind(constraint.bindings, converted))
        return rewrite_constraint_terms(constraint, lambda term: self.rewrite(term, converted, coded))

    def objective(self, objective: Optional[Objective]) -> Optional[Objective]:
        if objective is None:
            return None
        converted = self.converted_names([objective.term], ())
        coded = self.coded_names([objective.term], ())
        return rewrite_objective(objective, lambda term: self.rewrite(term, converted, coded))


def reduce_array(
    model: ConstraintModel, rule: Rule, decl: BooleanArray, pending: frozenset[str] = frozenset()
) -> ConstraintModel:
    domain = decl.domains[-1]
    full = covers_every_index(rule, decl, model)
    low = 1 if full else 0
    ranges = model.ranges()
    new_ranges = [
        RangeDecl(name, domain, start)
        for name, start in dict.fromkeys([(range_name(domain), 1), (range_name(domain, low), low)])
        if name not in ranges
    ]

    code_positions: dict[str, set[int]] = {decl.name: {len(decl.domains) - 1}}
    arrays: list[Declaration] = []
    for other in model.arrays():
        if other.name == decl.name:
            arrays.append(IntArray(decl.name, decl.domains[:-1], range_name(domain, low)))
        elif isinstance(other, KnownArray):
            arrays.append(other)
        elif domain in other.domains and other.name not in pending:
            positions = {position for position, dimension in enumerate(other.domains) if dimension == domain}
            code_positions[other.name] = positions
            reindexed = tuple(range_name(domain) if dimension == domain else dimension for dimension in other.domains)
            arrays.append(attr.evolve(other, domains=reindexed))
        else:
            arrays.append(other)

    reduction = Reduction(array=decl.name, domain=domain, code_positions=code_positions)
    constraints = [
        reduction.constraint(constraint)
        for constraint in model.constraints
        if not (full and is_existence_constraint(constraint, decl.name, domain))
    ]
    return attr.evolve(
        model,
        decls=list(ranges.values()) + new_ranges + arrays,
        constraints=constraints,
        objective=reduction.objective(model.objective),
    )


def pass_array_reduction(model: ConstraintModel, program: Program) -> ConstraintModel:
    """
    Every boolean array defined by a generalized partition rule over `(X, d)` becomes an integer array over `X` whose
    value is the code of the chosen label: `1..|d|` when every row must receive a label, `0..|d|` otherwise, 0 meaning
    no label.
    """

    rules = program.rules_of_kind(RuleKinds.generalized_partition)
    pending = {rule.head[0].predicate for rule in rules}
    for rule in rules:
        pending.discard(rule.head[0].predicate)
        decl = model.array(rule.head[0].predicate)
        if isinstance(decl, BooleanArray) and decl.domains:
            model = reduce_array(model, rule, decl, frozenset(pending))
    return model


# endregion

# region variable deletion


def equated_access(factor: Term, name: str, source: str, values: dict[str, str]) -> Optional[Access]:
    """
    The integer-array access of a factor `a[...] == name` whose values range over exactly `source`.
    """

    if not isinstance(factor, Compare) or factor.op != "==":
        return None
    for access, other in ((factor.left, factor.right), (factor.right, factor.left)):
        if (
            other == Name(name)
            and isinstance(access, Access)
            and values.get(access.array) == source
            and name not in names_in(access)
        ):
            return access
    return None


def eliminate(
    bindings: tuple[Binding, ...], factors: list[Term], elsewhere: set[str], values: dict[str, str]
) -> tuple[tuple[Binding, ...], list[Term]]:
    """
    Removes every bound name that only serves to equate integer-array accesses, chaining the accesses directly.
    """

    for binding in bindings:
        if len(binding.names) != 1 or binding.names[0] in elsewhere:
            continue
        name = binding.names[0]
        matches = [equated_access(factor, name, binding.source, values) for factor in factors]
        accesses = [(index, access) for index, access in enumerate(matches) if access is not None]
        if len(accesses) < 2:
            continue
        if any(name in names_in(factor) for index, factor in enumerate(factors) if matches[index] is None):
            continue
        (first, anchor), *rest = accesses
        equalities = [Compare("==", anchor, access) for _, access in rest]
        removed = {index for index, _ in accesses}
        rewritten: list[Term] = []
        for index, factor in enumerate(factors):
            if index == first:
                rewritten.extend(equalities)
            elif index not in removed:
                rewritten.append(factor)
        remaining = tuple(other for other in bindings if other != binding)
        return eliminate(remaining, rewritten, elsewhere, values)
    return bindings, factors


def pass_variable_deletion(model: ConstraintModel) -> ConstraintModel:
    values = {decl.name: decl.values for decl in model.decls if isinstance(decl, IntArray)}

    def delete_in_sum(term: Term) -> Term:
        if not isinstance(term, Sum):
            return term
        elsewhere = set().union(*(names_in(guard) for guard in term.guard))
        bindings, factors = eliminate(term.bindings, factors_of(term.body), elsewhere, values)
        if bindings == term.bindings:
            return term
        if not bindings:
            return product(factors)
        return Sum(bindings, term.guard, product(factors))

    constraints = []
    for constraint in model.constraints:
        if (factors := antecedent_factors(constraint)) is not None:
            elsewhere = names_in(constraint.rhs).union(*(names_in(guard) for guard in constraint.guard))
            bindings, factors = eliminate(constraint.bindings, factors, elsewhere, values)
            constraint = with_antecedent(attr.evolve(constraint, bindings=bindings), factors)
        constraint = rewrite_constraint_terms(constraint, lambda term: transform(term, delete_in_sum))
        constraints.append(constraint)
    return attr.evolve(model, constraints=constraints)


# endregion


def optimize(
    model: ConstraintModel, program: Program, passes: Iterable[Passes] = PASS_PIPELINE
) -> ConstraintModel:
    """
    Applies `passes` in order. `program` is the normalized program the model was translated from.
    """

    for name in passes:
        if name == Passes.range_restriction:
            model = pass_range_restriction(model)
        elif name == Passes.constraint_simplify:
            model = pass_constraint_simplify(model)
        elif name == Passes.array_reduction:
            model = pass_array_reduction(model, program)
        else:
            model = pass_variable_deletion(model)
    return model
