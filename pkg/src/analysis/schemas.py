from collections import defaultdict
from typing import Optional

from src.constants import RESERVED_MARKER, DomainKinds, RuleKinds
from src.exc import Diagnostic, ValidationException
from src.frontend.schema import Database, DerivedDomain, Schema
from src.frontend.syntax import Atom, Conjunction, Constant, Program, Rule, Variable, positive_atoms


def labels_domain_name(predicate: str) -> str:
    return f"labels{RESERVED_MARKER}{predicate}"


def is_label_partition(rule: Rule) -> bool:
    """
    True for exclusive disjunctions over one predicate with distinct constants in the last position.
    """

    return rule.kind == RuleKinds.partition and len({atom.predicate for atom in rule.head}) == 1


class DomainNamer:
    """
    Creates derived union and intersection domains on demand, flattening nested unions.
    """

    def __init__(self, schema: Schema):
        self.schema = schema
        self.derived: dict[str, DerivedDomain] = {}

    def parts_of(self, name: str, kind: DomainKinds) -> list[str]:
        derived = self.derived.get(name) or self.schema.derived_domains.get(name)
        if derived is not None and derived.kind == kind:
            return list(derived.parts)
        return [name]

    def combine(self, domains: set[str], kind: DomainKinds) -> str:
        parts = sorted({part for domain in domains for part in self.parts_of(domain, kind)})
        if len(parts) == 1:
            return parts[0]
        name = RESERVED_MARKER.join([kind.value] + parts)
        if name not in self.derived and not self.schema.is_domain(name):
            self.derived[name] = DerivedDomain(kind=kind, parts=tuple(parts))
        return name


def variable_domains(
    conjunction: Conjunction, signature_of: "SignatureLookup", namer: DomainNamer
) -> dict[Variable, str]:
    """
    The domain of each variable bound by the positive literals of `conjunction`. A variable fed by several distinct
    domains ranges over their intersection.
    """

    found: dict[Variable, set[str]] = defaultdict(set)
    for atom in positive_atoms(conjunction):
        signature = signature_of(atom.predicate)
        if signature is None or len(signature) != atom.arity:
            continue
        for arg, domain in zip(atom.args, signature):
            if isinstance(arg, Variable):
                found[arg].add(domain)
    return {variable: namer.combine(domains, DomainKinds.intersection) for variable, domains in found.items()}


class SignatureLookup:
    def __init__(self, schema: Schema, positions: dict[str, list[set[str]]], namer: DomainNamer):
        self.schema = schema
        self.positions = positions
        self.namer = namer

    def __call__(self, predicate: str) -> Optional[tuple[str, ...]]:
        if (signature := self.schema.signature(predicate)) is not None:
            return signature
        if (positions := self.positions.get(predicate)) is None or not all(positions):
            return None
        return tuple(self.namer.combine(domains, DomainKinds.union) for domains in positions)


def head_contributions(rule: Rule, signature_of: SignatureLookup, namer: DomainNamer) -> list[tuple[Atom, int, str]]:
    contributions = []
    for conjunction in rule.body:
        domains = variable_domains(conjunction, signature_of, namer)
        for atom in rule.head:
            for position, arg in enumerate(atom.args):
                if isinstance(arg, Variable) and arg in domains:
                    contributions.append((atom, position, domains[arg]))
                elif isinstance(arg, Constant) and is_label_partition(rule) and position == atom.arity - 1:
                    contributions.append((atom, position, labels_domain_name(atom.predicate)))
    return contributions


def infer_schemas(program: Program, schema: Schema) -> Schema:
    """
    Gives every derived predicate a signature. Alternative rules feeding one argument from different domains make it
    range over their union; one conjunct feeding it from several domains makes it range over their intersection.
    """

    namer = DomainNamer(schema)
    labels: dict[str, DerivedDomain] = {}
    for rule in program.rules:
        if is_label_partition(rule):
            predicate = rule.head[0].predicate
            values = tuple(atom.args[-1].value for atom in rule.head if isinstance(atom.args[-1], Constant))
            labels[labels_domain_name(predicate)] = DerivedDomain(kind=DomainKinds.labels, values=values)
    schema = schema.with_derived_domains(labels)
    namer.schema = schema

    idb = [predicate for predicate in program.defined_predicates() if schema.signature(predicate) is None]
    arities: dict[str, int] = {}
    for rule in program.rules:
        for atom in rule.head if rule.kind != RuleKinds.constraint else ():
            arities.setdefault(atom.predicate, atom.arity)
    positions: dict[str, list[set[str]]] = {predicate: [set() for _ in range(arities[predicate])] for predicate in idb}
    signature_of = SignatureLookup(schema, positions, namer)

    changed = True
    while changed:
        changed = False
        for rule in program.rules:
            if rule.kind == RuleKinds.constraint:
                continue
            for atom, position, domain in head_contributions(rule, signature_of, namer):
                if atom.predicate in positions and domain not in positions[atom.predicate][position]:
                    positions[atom.predicate][position].add(domain)
                    changed = True

    diagnostics = []
    signatures: dict[str, tuple[str, ...]] = {}
    for predicate in idb:
        if (signature := signature_of(predicate)) is None:
            diagnostics.append(Diagnostic(f"Cannot infer the domains of the arguments of {predicate}"))
        else:
            signatures[predicate] = signature
    if diagnostics:
        raise ValidationException(diagnostics)

    referenced = set()
    stack = [domain for signature in signatures.values() for domain in signature]
    while stack:
        domain = stack.pop()
        if domain in namer.derived and domain not in referenced:
            referenced.add(domain)
            stack.extend(namer.derived[domain].parts)
    ordered = ordered_derived_domains({name: namer.derived[name] for name in referenced})
    return schema.with_derived_domains(ordered).with_predicates(signatures)


def ordered_derived_domains(derived: dict[str, DerivedDomain]) -> dict[str, DerivedDomain]:
    """
    Orders derived domains so that every domain comes after its parts, which is the order they are materialized in.
    """

    ordered: dict[str, DerivedDomain] = {}

    def visit(name: str) -> None:
        if name in ordered or name not in derived:
            return
        for part in derived[name].parts:
            visit(part)
        ordered[name] = derived[name]

    for name in sorted(derived):
        visit(name)
    return ordered


def empty_intersections(schema: Schema, db: Database) -> list[str]:
    """
    Intersection domains with an empty extent; predicates ranging over them are necessarily empty.
    """

    return [
        name
        for name, derived in schema.derived_domains.items()
        if derived.kind == DomainKinds.intersection and not db.extents.get(name)
    ]
