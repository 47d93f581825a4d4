from typing import Iterator, Optional

import attr

from src.constants import INTEGER_DOMAIN, DomainKinds
from src.exc import Diagnostic, ValidationException
from src.utils import Value, format_fact, tuple_sort_key


@attr.s(frozen=True)
class DerivedDomain:
    """
    A domain that is not declared by the user: the union or intersection of other domains, or a fixed list
    of label constants introduced when normalizing partition rules.
    """

    kind: DomainKinds = attr.ib()
    parts: tuple[str, ...] = attr.ib(default=(), converter=tuple)
    values: tuple[Value, ...] = attr.ib(default=(), converter=tuple)


@attr.s(frozen=True, hash=False)
class Schema:
    string_domains: tuple[str, ...] = attr.ib(default=(), converter=tuple)
    int_domains: tuple[str, ...] = attr.ib(default=(), converter=tuple)
    int_range: Optional[tuple[int, int]] = attr.ib(default=None)
    predicates: dict[str, tuple[str, ...]] = attr.ib(default=attr.Factory(dict))
    derived_domains: dict[str, DerivedDomain] = attr.ib(default=attr.Factory(dict))

    # region initialisation

    def validate(self) -> None:
        diagnostics = []
        declared = list(self.string_domains) + list(self.int_domains) + list(self.derived_domains)
        for name in sorted({name for name in declared if declared.count(name) > 1}):
            diagnostics.append(Diagnostic(f"The domain {name} is declared more than once"))
        if self.int_range is not None and self.int_range[0] > self.int_range[1]:
            diagnostics.append(Diagnostic(f"MinInt {self.int_range[0]} is greater than MaxInt {self.int_range[1]}"))
        for predicate, signature in self.predicates.items():
            if predicate in declared:
                diagnostics.append(Diagnostic(f"The predicate {predicate} has the same name as a domain"))
            for domain in signature:
                if domain not in declared:
                    diagnostics.append(
                        Diagnostic(f"The signature of {predicate} references the undeclared domain {domain}")
                    )
        if diagnostics:
            raise ValidationException(diagnostics)

    def __attrs_post_init__(self) -> None:
        self.validate()

    # endregion

    # region public

    @property
    def domains(self) -> list[str]:
        return list(self.string_domains) + list(self.int_domains) + list(self.derived_domains)

    def is_domain(self, name: str) -> bool:
        return name in self.string_domains or name in self.int_domains or name in self.derived_domains

    def is_int_domain(self, name: str) -> bool:
        if name in self.int_domains:
            return True
        derived = self.derived_domains.get(name)
        if derived is None:
            return False
        if derived.kind == DomainKinds.labels:
            return all(isinstance(value, int) for value in derived.values)
        if derived.kind == DomainKinds.union:
            return all(self.is_int_domain(part) for part in derived.parts)
        return any(self.is_int_domain(part) for part in derived.parts)

    def signature(self, predicate: str) -> Optional[tuple[str, ...]]:
        """
        Domain predicates are unary predicates whose single argument ranges over the domain itself.
        """

        if self.is_domain(predicate):
            return (predicate,)
        return self.predicates.get(predicate)

    def with_predicates(self, signatures: dict[str, tuple[str, ...]]) -> "Schema":
        return attr.evolve(self, predicates={**self.predicates, **signatures})

    def with_derived_domains(self, derived: dict[str, DerivedDomain]) -> "Schema":
        return attr.evolve(self, derived_domains={**self.derived_domains, **derived})

    # endregion


@attr.s(frozen=True, hash=False)
class Database:
    extents: dict[str, tuple[Value, ...]] = attr.ib(default=attr.Factory(dict))
    facts: dict[str, frozenset[tuple[Value, ...]]] = attr.ib(default=attr.Factory(dict))

    def extent(self, domain: str) -> tuple[Value, ...]:
        if domain not in self.extents:
            raise ValidationException([Diagnostic(f"The domain {domain} has no extent in the database")])
        return self.extents[domain]

    def relation(self, predicate: str) -> frozenset[tuple[Value, ...]]:
        if predicate in self.extents:
            return frozenset((value,) for value in self.extents[predicate])
        return self.facts.get(predicate, frozenset())

    def ground_facts(self) -> Iterator[tuple[str, tuple[Value, ...]]]:
        for domain, extent in self.extents.items():
            for value in extent:
                yield domain, (value,)
        for predicate, tuples in self.facts.items():
            for values in tuples:
                yield predicate, values

    def with_domains(self, schema: Schema) -> "Database":
        """
        Materializes the derived domains of `schema` as named extents, in declaration order.
        """

        extents = dict(self.extents)
        for name, derived in schema.derived_domains.items():
            if derived.kind == DomainKinds.labels:
                extents[name] = tuple(derived.values)
            elif derived.kind == DomainKinds.union:
                merged: dict[Value, None] = {}
                for part in derived.parts:
                    merged.update(dict.fromkeys(extents.get(part, ())))
                extents[name] = tuple(merged)
            else:
                first, *rest = derived.parts
                extents[name] = tuple(
                    value for value in extents.get(first, ()) if all(value in extents.get(part, ()) for part in rest)
                )
        return attr.evolve(self, extents=extents)

    def to_text(self) -> str:
        """
        Serializes the database as a fact file: domain facts first, then base facts, each sorted.
        """

        lines = []
        for domain in sorted(self.extents):
            lines.extend(format_fact(domain, (value,)) for value in self.extents[domain])
        for predicate in sorted(self.facts):
            lines.extend(
                format_fact(predicate, values) for values in sorted(self.facts[predicate], key=tuple_sort_key)
            )
        return "\n".join(lines) + ("\n" if lines else "")


def integer_extent(schema: Schema) -> tuple[int, ...]:
    if schema.int_range is None:
        return ()
    min_int, max_int = schema.int_range
    return tuple(range(min_int, max_int + 1))


def implicit_int_domains(schema: Schema) -> tuple[str, ...]:
    if schema.int_range is not None and INTEGER_DOMAIN not in schema.int_domains:
        return (INTEGER_DOMAIN,)
    return ()
