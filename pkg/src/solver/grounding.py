"""
Instantiation of a constraint model over a database: every forall and sum is expanded over its bindings, every array
access becomes a decision cell or a constant, and constant subterms are folded.
"""

from itertools import product as cartesian
from typing import Iterator, Optional, Union

import attr

from src.constants import OPL_COMPARATORS, ConstraintKinds, GoalModes
from src.exc import TranspileException
from src.fixpoint import Interpretation, compare
from src.frontend.schema import Database
from src.transpile.model import (
    Access,
    Binary,
    Binding,
    BooleanArray,
    Compare,
    Const,
    Constraint,
    ConstraintModel,
    Decode,
    Encode,
    KnownArray,
    Membership,
    Name,
    Num,
    RangeDecl,
    Sum,
    Term,
    Truth,
)
from src.utils import Value, tuple_sort_key

COMPARATORS = {opl: comparator for comparator, opl in OPL_COMPARATORS.items()}

Environment = dict[str, Value]

# region ground terms


@attr.s(frozen=True)
class Lit:
    value: Value = attr.ib()


@attr.s(frozen=True)
class Cell:
    index: int = attr.ib()


@attr.s(frozen=True)
class Arith:
    op: str = attr.ib()
    left: "GroundTerm" = attr.ib()
    right: "GroundTerm" = attr.ib()


@attr.s(frozen=True)
class Add:
    terms: tuple["GroundTerm", ...] = attr.ib(converter=tuple)


@attr.s(frozen=True)
class Cmp:
    op: str = attr.ib()
    left: "GroundTerm" = attr.ib()
    right: "GroundTerm" = attr.ib()


GroundTerm = Union[Lit, Cell, Arith, Add, Cmp]

TRUE = Lit(1)
FALSE = Lit(0)


def cells_of(term: GroundTerm) -> set[int]:
    if isinstance(term, Cell):
        return {term.index}
    if isinstance(term, (Arith, Cmp)):
        return cells_of(term.left) | cells_of(term.right)
    if isinstance(term, Add):
        return set().union(*(cells_of(part) for part in term.terms))
    return set()


def is_true(value: Value) -> bool:
    return value != 0


# endregion

# region ground model


@attr.s(frozen=True)
class CellDecl:
    array: str = attr.ib()
    indices: tuple[Value, ...] = attr.ib(converter=tuple)
    low: int = attr.ib()
    high: int = attr.ib()


@attr.s(frozen=True)
class GroundConstraint:
    kind: ConstraintKinds = attr.ib()
    lhs: GroundTerm = attr.ib()
    rhs: GroundTerm = attr.ib()
    cells: tuple[int, ...] = attr.ib(converter=tuple)

    @classmethod
    def from_sides(cls, kind: ConstraintKinds, lhs: GroundTerm, rhs: GroundTerm) -> "GroundConstraint":
        return cls(kind=kind, lhs=lhs, rhs=rhs, cells=sorted(cells_of(lhs) | cells_of(rhs)))


@attr.s(frozen=True)
class GroundObjective:
    sense: GoalModes = attr.ib()
    terms: tuple[GroundTerm, ...] = attr.ib(converter=tuple)
    constant: int = attr.ib(default=0)


@attr.s(frozen=True, hash=False)
class GroundModel:
    cells: tuple[CellDecl, ...] = attr.ib(default=(), converter=tuple)
    constraints: tuple[GroundConstraint, ...] = attr.ib(default=(), converter=tuple)
    objective: Optional[GroundObjective] = attr.ib(default=None)

    def __attrs_post_init__(self) -> None:
        for constraint in self.constraints:
            if any(index >= len(self.cells) for index in constraint.cells):
                raise TranspileException("A ground constraint references an undeclared cell")
        for cell in self.cells:
            if cell.low > cell.high:
                raise TranspileException(f"The cell {cell.array}{list(cell.indices)} has an empty range")


# endregion


class Grounder:
    def __init__(self, model: ConstraintModel, db: Database, known: Interpretation):
        self.model = model
        self.db = db.with_domains(model.schema)
        self.facts = Interpretation.from_database(self.db).union(known)
        self.known = known
        self.ranges = model.ranges()
        self.cells: list[CellDecl] = []
        self.index: dict[tuple[str, tuple[Value, ...]], int] = {}

    # region sources

    def cardinality(self, decl: RangeDecl) -> int:
        return len(self.extent(decl.domain))

    def extent(self, domain: str) -> tuple[Value, ...]:
        if not self.model.schema.is_domain(domain):
            raise TranspileException(f"The domain {domain} is not defined")
        return self.db.extent(domain)

    def values_of(self, source: str) -> list[tuple[Value, ...]]:
        """
        The tuples a binding ranges over: the codes of a range, the extent of a domain or the tuples of a relation.
        """

        if (decl := self.ranges.get(source)) is not None:
            return [(code,) for code in range(decl.low, self.cardinality(decl) + 1)]
        if self.model.schema.is_domain(source):
            return [(value,) for value in self.extent(source)]
        if source in self.model.schema.predicates:
            return sorted(self.facts.relation(source), key=tuple_sort_key)
        raise TranspileException(f"The binding source {source} is neither a range, a domain nor a relation")

    def dimension(self, name: str) -> list[Value]:
        return [values[0] for values in self.values_of(name)]

    def expand(
        self, bindings: tuple[Binding, ...], guard: tuple[Term, ...], env: Environment
    ) -> Iterator[Environment]:
        if not bindings:
            if all(is_true(self.constant(condition, env)) for condition in guard):
                yield env
            return
        binding, *rest = bindings
        for values in self.values_of(binding.source):
            if len(values) != len(binding.names):
                raise TranspileException(f"The binding {binding.names} does not match the arity of {binding.source}")
            yield from self.expand(tuple(rest), guard, {**env, **dict(zip(binding.names, values))})

    # endregion

    # region cells

    def declare_cells(self) -> None:
        for decl in self.model.decision_arrays():
            if isinstance(decl, BooleanArray):
                low, high = 0, 1
            else:
                codes = self.ranges.get(decl.values)
                if codes is None:
                    raise TranspileException(f"The range {decl.values} of {decl.name} is not declared")
                low, high = codes.low, self.cardinality(codes)
            for indices in cartesian(*(self.dimension(dimension) for dimension in decl.domains)):
                if low > high:
                    raise TranspileException(f"The integer range of {decl.name} is empty")
                self.index[(decl.name, indices)] = len(self.cells)
                self.cells.append(CellDecl(decl.name, indices, low, high))

    # endregion

    # region terms

    def constant(self, term: Term, env: Environment) -> Value:
        ground = self.term(term, env)
        if not isinstance(ground, Lit):
            raise TranspileException(f"The term {term} is not constant after grounding")
        return ground.value

    def integer(self, term: Term, env: Environment) -> int:
        value = self.constant(term, env)
        if not isinstance(value, int):
            raise TranspileException(f"The term {term} must be an integer, got {value}")
        return value

    def access(self, term: Access, env: Environment) -> GroundTerm:
        indices = tuple(self.constant(index, env) for index in term.indices)
        decl = self.model.array(term.array)
        if isinstance(decl, KnownArray):
            return TRUE if indices in self.known.relation(term.array) else FALSE
        if (index := self.index.get((term.array, indices))) is None:
            return FALSE
        return Cell(index)

    def binary(self, op: str, left: GroundTerm, right: GroundTerm) -> GroundTerm:
        if isinstance(left, Lit) and isinstance(right, Lit):
            if not isinstance(left.value, int) or not isinstance(right.value, int):
                raise TranspileException(f"Arithmetic on the non-integer constants {left.value} and {right.value}")
            if op == "+":
                return Lit(left.value + right.value)
            if op == "-":
                return Lit(left.value - right.value)
            return Lit(left.value * right.value)
        if op == "*":
            if FALSE in (left, right):
                return FALSE
            if left == TRUE:
                return right
            if right == TRUE:
                return left
        if op == "+" and left == FALSE:
            return right
        if op in ("+", "-") and right == FALSE:
            return left
        return Arith(op, left, right)

    def total(self, terms: list[GroundTerm]) -> GroundTerm:
        constant = 0
        rest = []
        for term in terms:
            if isinstance(term, Lit) and isinstance(term.value, int):
                constant += term.value
            else:
                rest.append(term)
        if not rest:
            return Lit(constant)
        if constant:
            rest.append(Lit(constant))
        return rest[0] if len(rest) == 1 else Add(rest)

    def term(self, term: Term, env: Environment) -> GroundTerm:
        if isinstance(term, Num):
            return Lit(term.value)
        if isinstance(term, Truth):
            return TRUE if term.value else FALSE
        if isinstance(term, Const):
            return Lit(term.value)
        if isinstance(term, Name):
            if term.name not in env:
                raise TranspileException(f"The name {term.name} is not bound")
            return Lit(env[term.name])
        if isinstance(term, Access):
            return self.access(term, env)
        if isinstance(term, Membership):
            values = tuple(self.constant(arg, env) for arg in term.args)
            return TRUE if values in self.facts.relation(term.relation) else FALSE
        if isinstance(term, Binary):
            return self.binary(term.op, self.term(term.left, env), self.term(term.right, env))
        if isinstance(term, Compare):
            left, right = self.term(term.left, env), self.term(term.right, env)
            if isinstance(left, Lit) and isinstance(right, Lit):
                return TRUE if compare(COMPARATORS[term.op], left.value, right.value) else FALSE
            return Cmp(term.op, left, right)
        if isinstance(term, Sum):
            return self.total([self.term(term.body, inner) for inner in self.expand(term.bindings, term.guard, env)])
        if isinstance(term, Decode):
            code = self.integer(term.code, env)
            extent = self.extent(term.domain)
            if not 1 <= code <= len(extent):
                raise TranspileException(f"The code {code} is outside the domain {term.domain}")
            return Lit(extent[code - 1])
        value = self.constant(term.value, env)
        extent = self.extent(term.domain)
        return Lit(extent.index(value) + 1 if value in extent else -1)

    # endregion

    def constraint(self, constraint: Constraint) -> Iterator[GroundConstraint]:
        for env in self.expand(constraint.bindings, constraint.guard, {}):
            lhs, rhs = self.term(constraint.lhs, env), self.term(constraint.rhs, env)
            if constraint.kind == ConstraintKinds.implication:
                if (isinstance(lhs, Lit) and not is_true(lhs.value)) or (isinstance(rhs, Lit) and is_true(rhs.value)):
                    continue
            elif isinstance(lhs, Lit) and isinstance(rhs, Lit) and is_true(lhs.value) == is_true(rhs.value):
                continue
            yield GroundConstraint.from_sides(constraint.kind, lhs, rhs)

    def ground(self) -> GroundModel:
        self.declare_cells()
        constraints = [ground for constraint in self.model.constraints for ground in self.constraint(constraint)]
        objective = None
        if (source := self.model.objective) is not None:
            terms = []
            constant = 0
            for env in self.expand(source.term.bindings, source.term.guard, {}):
                term = self.term(source.term.body, env)
                if isinstance(term, Lit):
                    constant += term.value if isinstance(term.value, int) else 0
                else:
                    terms.append(term)
            objective = GroundObjective(source.sense, terms, constant)
        return GroundModel(cells=self.cells, constraints=constraints, objective=objective)


def ground(model: ConstraintModel, db: Database, known: Optional[Interpretation] = None) -> GroundModel:
    """
    Instantiates `model` over `db`. Known-value arrays read their cells from `known`; base relations and domains come
    from `db`.
    """

    return Grounder(model, db, known if known is not None else Interpretation()).ground()
