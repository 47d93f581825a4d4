"""
Solver-neutral constraint models: decision-array declarations, quantified constraints over finite domains and an
optional cardinality objective. Models print as OPL text.
"""

from typing import Callable, Iterator, Optional, Union

import attr

from src.constants import ConstraintKinds, GoalModes
from src.frontend.schema import Schema
from src.utils import Value

# region terms


@attr.s(frozen=True)
class Num:
    value: int = attr.ib()


@attr.s(frozen=True)
class Truth:
    value: bool = attr.ib()


@attr.s(frozen=True)
class Name:
    """
    A variable bound by an enclosing forall or sum.
    """

    name: str = attr.ib()


@attr.s(frozen=True)
class Const:
    """
    A domain constant appearing in an expression.
    """

    value: Value = attr.ib()


@attr.s(frozen=True)
class Access:
    array: str = attr.ib()
    indices: tuple["Term", ...] = attr.ib(default=(), converter=tuple)


@attr.s(frozen=True)
class Membership:
    """
    Tests whether a tuple belongs to a base relation or domain; printed as `(sum(<x,y> in edge) 1 > 0)`.
    """

    relation: str = attr.ib()
    args: tuple["Term", ...] = attr.ib(converter=tuple)


@attr.s(frozen=True)
class Binary:
    op: str = attr.ib(validator=attr.validators.in_(("+", "-", "*")))
    left: "Term" = attr.ib()
    right: "Term" = attr.ib()


@attr.s(frozen=True)
class Compare:
    op: str = attr.ib(validator=attr.validators.in_(("==", "!=", "<", "<=", ">", ">=")))
    left: "Term" = attr.ib()
    right: "Term" = attr.ib()


@attr.s(frozen=True)
class Binding:
    """
    `x in node` for a single name, `<x,y> in edge` for a tuple of names.
    """

    names: tuple[str, ...] = attr.ib(converter=tuple)
    source: str = attr.ib()


@attr.s(frozen=True)
class Sum:
    bindings: tuple[Binding, ...] = attr.ib(converter=tuple)
    guard: tuple["Term", ...] = attr.ib(converter=tuple)
    body: "Term" = attr.ib()


@attr.s(frozen=True)
class Decode:
    """
    The domain constant with the given 1-based code, printed `item(d, c-1)`.
    """

    domain: str = attr.ib()
    code: "Term" = attr.ib()


@attr.s(frozen=True)
class Encode:
    """
    The 1-based code of a domain constant, printed `ord(d, t)+1`.
    """

    domain: str = attr.ib()
    value: "Term" = attr.ib()


Term = Union[Num, Truth, Name, Const, Access, Membership, Binary, Compare, Sum, Decode, Encode]


def children(term: Term) -> tuple[Term, ...]:
    if isinstance(term, Access):
        return term.indices
    if isinstance(term, Membership):
        return term.args
    if isinstance(term, (Binary, Compare)):
        return term.left, term.right
    if isinstance(term, Sum):
        return term.guard + (term.body,)
    if isinstance(term, Decode):
        return (term.code,)
    if isinstance(term, Encode):
        return (term.value,)
    return ()


def walk(term: Term) -> Iterator[Term]:
    yield term
    for child in children(term):
        yield from walk(child)


def map_children(term: Term, function: Callable[[Term], Term]) -> Term:
    """
    Rebuilds `term` with `function` applied to each of its direct children.
    """

    if isinstance(term, Access):
        return Access(term.array, tuple(function(index) for index in term.indices))
    if isinstance(term, Membership):
        return Membership(term.relation, tuple(function(arg) for arg in term.args))
    if isinstance(term, Binary):
        return Binary(term.op, function(term.left), function(term.right))
    if isinstance(term, Compare):
        return Compare(term.op, function(term.left), function(term.right))
    if isinstance(term, Sum):
        return Sum(term.bindings, tuple(function(guard) for guard in term.guard), function(term.body))
    if isinstance(term, Decode):
        return Decode(term.domain, function(term.code))
    if isinstance(term, Encode):
        return Encode(term.domain, function(term.value))
    return term


def transform(term: Term, rewrite: Callable[[Term], Term]) -> Term:
    """
    Rebuilds `term` bottom-up, applying `rewrite` to every node after its children.
    """

    return rewrite(map_children(term, lambda child: transform(child, rewrite)))


def names_in(term: Term) -> set[str]:
    return {node.name for node in walk(term) if isinstance(node, Name)}


def product(factors: list[Term]) -> Term:
    if not factors:
        return Num(1)
    result = factors[0]
    for factor in factors[1:]:
        result = Binary("*", result, factor)
    return result


def factors_of(term: Term) -> list[Term]:
    if isinstance(term, Binary) and term.op == "*":
        return factors_of(term.left) + factors_of(term.right)
    return [term]


def total(terms: list[Term]) -> Term:
    if not terms:
        return Num(0)
    result = terms[0]
    for term in terms[1:]:
        result = Binary("+", result, term)
    return result


# endregion

# region declarations


@attr.s(frozen=True)
class BooleanArray:
    name: str = attr.ib()
    domains: tuple[str, ...] = attr.ib(converter=tuple)


@attr.s(frozen=True)
class IntArray:
    name: str = attr.ib()
    domains: tuple[str, ...] = attr.ib(converter=tuple)
    values: str = attr.ib()  # name of a declared range


@attr.s(frozen=True)
class KnownArray:
    """
    A predicate computed before solving; its cells are constants.
    """

    name: str = attr.ib()
    domains: tuple[str, ...] = attr.ib(converter=tuple)


@attr.s(frozen=True)
class RangeDecl:
    """
    The integer codes `low..|domain|` of a domain whose constants are stored as integers. Only the range starting at 1
    declares the cardinality; a range starting at 0 must follow it.
    """

    name: str = attr.ib()
    domain: str = attr.ib()
    low: int = attr.ib()

    @property
    def cardinality_name(self) -> str:
        return f"card{self.domain}"


Declaration = Union[BooleanArray, IntArray, KnownArray, RangeDecl]
ArrayDeclaration = Union[BooleanArray, IntArray, KnownArray]


def range_name(domain: str, low: int = 1) -> str:
    return f"int{domain}" if low == 1 else f"int{low}{domain}"


# endregion


@attr.s(frozen=True)
class Constraint:
    bindings: tuple[Binding, ...] = attr.ib(converter=tuple)
    guard: tuple[Term, ...] = attr.ib(converter=tuple)
    kind: ConstraintKinds = attr.ib()
    lhs: Term = attr.ib()
    rhs: Term = attr.ib()

    def terms(self) -> tuple[Term, ...]:
        return self.guard + (self.lhs, self.rhs)


@attr.s(frozen=True)
class Objective:
    sense: GoalModes = attr.ib(validator=attr.validators.in_((GoalModes.min, GoalModes.max)))
    term: Sum = attr.ib()


@attr.s(frozen=True, hash=False)
class ConstraintModel:
    decls: tuple[Declaration, ...] = attr.ib(default=(), converter=tuple)
    constraints: tuple[Constraint, ...] = attr.ib(default=(), converter=tuple)
    objective: Optional[Objective] = attr.ib(default=None)
    schema: Schema = attr.ib(default=attr.Factory(Schema))

    def arrays(self) -> list[ArrayDeclaration]:
        return [decl for decl in self.decls if not isinstance(decl, RangeDecl)]

    def array(self, name: str) -> Optional[ArrayDeclaration]:
        return next((decl for decl in self.arrays() if decl.name == name), None)

    def ranges(self) -> dict[str, RangeDecl]:
        return {decl.name: decl for decl in self.decls if isinstance(decl, RangeDecl)}

    def decision_arrays(self) -> list[Union[BooleanArray, IntArray]]:
        return [decl for decl in self.decls if isinstance(decl, (BooleanArray, IntArray))]


# region printing

PRECEDENCE_COMPARE = 1
PRECEDENCE_ADD = 2
PRECEDENCE_MULTIPLY = 3
PRECEDENCE_ATOM = 4


def precedence(term: Term) -> int:
    if isinstance(term, Compare):
        return PRECEDENCE_COMPARE
    if isinstance(term, Binary):
        return PRECEDENCE_MULTIPLY if term.op == "*" else PRECEDENCE_ADD
    if isinstance(term, Encode):
        return PRECEDENCE_ADD
    if isinstance(term, Sum):
        return PRECEDENCE_MULTIPLY
    return PRECEDENCE_ATOM


def print_value(value: Value) -> str:
    return str(value) if isinstance(value, int) else f'"{value}"'


def print_binding(binding: Binding) -> str:
    if len(binding.names) == 1:
        return f"{binding.names[0]} in {binding.source}"
    return f"<{','.join(binding.names)}> in {binding.source}"


def print_quantifier(bindings: tuple[Binding, ...], guard: tuple[Term, ...]) -> str:
    text = ", ".join(print_binding(binding) for binding in bindings)
    if guard:
        text += " : " + " && ".join(print_term(condition) for condition in guard)
    return f"({text})"


def print_operand(term: Term, parent: int, right: bool = False) -> str:
    text = print_term(term)
    own = precedence(term)
    if own < parent or (right and own == parent and own < PRECEDENCE_ATOM):
        return f"({text})"
    return text


def print_term(term: Term) -> str:
    if isinstance(term, Num):
        return str(term.value)
    if isinstance(term, Truth):
        return "true" if term.value else "false"
    if isinstance(term, Name):
        return term.name
    if isinstance(term, Const):
        return print_value(term.value)
    if isinstance(term, Access):
        if not term.indices:
            return term.array
        return f"{term.array}[{','.join(print_term(index) for index in term.indices)}]"
    if isinstance(term, Membership):
        if len(term.args) == 1:
            return f"(sum({print_term(term.args[0])} in {term.relation}) 1 > 0)"
        return f"(sum(<{','.join(print_term(arg) for arg in term.args)}> in {term.relation}) 1 > 0)"
    if isinstance(term, Binary):
        own = precedence(term)
        left = f"({print_term(term.left)})" if isinstance(term.left, Sum) else print_operand(term.left, own)
        right = f"({print_term(term.right)})" if isinstance(term.right, Sum) else print_operand(term.right, own, True)
        return f"{left} {term.op} {right}"
    if isinstance(term, Compare):
        left = print_operand(term.left, PRECEDENCE_ADD)
        return f"{left} {term.op} {print_operand(term.right, PRECEDENCE_ADD, right=True)}"
    if isinstance(term, Sum):
        return f"sum{print_quantifier(term.bindings, term.guard)} {print_operand(term.body, PRECEDENCE_ATOM)}"
    if isinstance(term, Decode):
        return f"item({term.domain}, {print_operand(term.code, PRECEDENCE_ADD)}-1)"
    return f"ord({term.domain}, {print_term(term.value)})+1"


def print_constraint(constraint: Constraint) -> str:
    prefix = f"forall{print_quantifier(constraint.bindings, constraint.guard)} " if constraint.bindings else ""
    return f"{prefix}{print_term(constraint.lhs)} {constraint.kind.value} {print_term(constraint.rhs)};"


def print_declaration(decl: Declaration) -> str:
    if isinstance(decl, RangeDecl) and decl.low != 1:
        return f"range {decl.name} = {decl.low}..{decl.cardinality_name};"
    if isinstance(decl, RangeDecl):
        return (
            f"int {decl.cardinality_name} = card({decl.domain});\n"
            f"range {decl.name} = {decl.low}..{decl.cardinality_name};"
        )
    dimensions = f"[{','.join(decl.domains)}]" if decl.domains else ""
    if isinstance(decl, BooleanArray):
        return f"dvar boolean {decl.name}{dimensions};"
    if isinstance(decl, IntArray):
        return f"dvar int {decl.name}{dimensions} in {decl.values};"
    return f"int {decl.name}{dimensions};"


def print_objective(objective: Objective) -> str:
    sense = "minimize" if objective.sense == GoalModes.min else "maximize"
    return f"{sense} {print_term(objective.term)};"


def print_model(model: ConstraintModel, declare: Callable[[Declaration], str] = print_declaration) -> str:
    lines = [declare(decl) for decl in model.decls]
    if model.objective is not None:
        lines.append(print_objective(model.objective))
    lines.append("subject to {")
    lines.extend(f"  {print_constraint(constraint)}" for constraint in model.constraints)
    lines.append("};")
    return "\n".join(lines) + "\n"


# endregion
