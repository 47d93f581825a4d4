"""
Text emitters: OPL models with their data section, and OPL-Script programs emulating the fixpoint of stratified
standard rules.
"""

from itertools import count
from typing import Optional

from src.analysis.graph import stratify
from src.constants import INTEGER_DOMAIN, OPL_COMPARATORS, DomainKinds
from src.fixpoint import Interpretation
from src.frontend.schema import Database, Schema
from src.frontend.syntax import Atom, Comparison, Conjunction, Constant, Literal, Rule, Term, Variable
from src.transpile.model import ConstraintModel, Declaration, KnownArray, print_declaration, print_model
from src.utils import Value, tuple_sort_key

# region data section


def set_type(schema: Schema, domain: str) -> str:
    return "int" if schema.is_int_domain(domain) else "string"


def print_set(values: tuple[Value, ...]) -> str:
    return "{" + ", ".join(str(value) for value in values) + "}"


def tuple_type_name(predicate: str) -> str:
    return f"{predicate}_type"


def domain_lines(schema: Schema, db: Database) -> list[str]:
    lines = []
    for domain in schema.string_domains:
        lines.append(f"{{string}} {domain} = {print_set(db.extents.get(domain, ()))};")
    for domain in schema.int_domains:
        if domain == INTEGER_DOMAIN and schema.int_range is not None:
            min_int, max_int = schema.int_range
            lines.append(f"int MinInt = {min_int};")
            lines.append(f"int MaxInt = {max_int};")
            lines.append(f"{{int}} {INTEGER_DOMAIN} = asSet(MinInt .. MaxInt);")
        else:
            lines.append(f"{{int}} {domain} = {print_set(db.extents.get(domain, ()))};")
    for name, derived in schema.derived_domains.items():
        if derived.kind == DomainKinds.labels:
            definition = print_set(derived.values)
        else:
            definition = f" {derived.kind.value} ".join(derived.parts)
        lines.append(f"{{{set_type(schema, name)}}} {name} = {definition};")
    return lines


def relation_lines(schema: Schema, db: Database, declared: set[str]) -> list[str]:
    """
    Unary relations become sets; wider ones become sets of a tuple type with fields `a1..an`. Relations the model
    declares itself are left out.
    """

    lines = []
    for predicate in sorted(set(db.facts) - declared):
        signature = schema.predicates[predicate]
        tuples = sorted(db.facts[predicate], key=tuple_sort_key)
        if not signature:
            lines.append(f"int {predicate} = {1 if tuples else 0};")
        elif len(signature) == 1:
            members = tuple(values[0] for values in tuples)
            lines.append(f"{{{set_type(schema, signature[0])}}} {predicate} = {print_set(members)};")
        else:
            fields = " ".join(
                f"{set_type(schema, domain)} a{position};" for position, domain in enumerate(signature, start=1)
            )
            lines.append(f"tuple {tuple_type_name(predicate)} {{ {fields} }};")
            elements = ", ".join("<" + ",".join(str(value) for value in values) + ">" for values in tuples)
            lines.append(f"{{{tuple_type_name(predicate)}}} {predicate} = {{{elements}}};")
    return lines


def known_initializer(decl: KnownArray, db: Database, relation: frozenset[tuple[Value, ...]]) -> str:
    """
    Nested 0/1 initializer over the extents of the array's domains, in extent order.
    """

    def nest(prefix: tuple[Value, ...], depth: int) -> str:
        if depth == len(decl.domains):
            return "1" if prefix in relation else "0"
        cells = [nest(prefix + (value,), depth + 1) for value in db.extents.get(decl.domains[depth], ())]
        return "[" + ", ".join(cells) + "]"

    return nest((), 0)


# endregion


def emit_opl(model: ConstraintModel, db: Optional[Database] = None, known: Optional[Interpretation] = None) -> str:
    """
    The model as OPL text. With a database the data declarations come first and known-value arrays are printed with
    their initializers, filled from the true atoms of `known`.
    """

    if db is None:
        return print_model(model)
    extended = db.with_domains(model.schema)

    def declare(decl: Declaration) -> str:
        text = print_declaration(decl)
        if isinstance(decl, KnownArray):
            relation = known.relation(decl.name) if known is not None else frozenset()
            values = known_initializer(decl, extended, relation)
            return text[:-1] + f" = {values};"
        return text

    data = domain_lines(model.schema, db) + relation_lines(model.schema, db, {decl.name for decl in model.decls})
    return "\n".join(data) + ("\n" if data else "") + print_model(model, declare)


# region scripts


class ScriptWriter:
    """
    Compiles the conjunctions of extended rules into nested `for` loops over relations and domains, guarded by one
    `if` on the remaining literals.
    """

    def __init__(self, schema: Schema, derived: set[str]):
        self.schema = schema
        self.derived = derived
        self.lines: list[str] = []

    def emit(self, depth: int, text: str) -> None:
        self.lines.append("  " * depth + text)

    def expression(self, term: Term, env: dict[Variable, str]) -> str:
        if isinstance(term, Variable):
            return env[term]
        if isinstance(term, Constant):
            return str(term.value) if isinstance(term.value, int) else f'"{term.value}"'
        return f"({self.expression(term.left, env)} {term.op} {self.expression(term.right, env)})"

    def cell(self, atom: Atom, env: dict[Variable, str]) -> str:
        return atom.predicate + "".join(f"[{self.expression(arg, env)}]" for arg in atom.args)

    def member(self, atom: Atom, env: dict[Variable, str]) -> str:
        if atom.arity == 1:
            return f"{self.expression(atom.args[0], env)} in {atom.predicate}"
        return "<" + ",".join(self.expression(arg, env) for arg in atom.args) + f"> in {atom.predicate}"

    def compile(self, conjunction: Conjunction) -> tuple[list[str], list[str], dict[Variable, str]]:
        loops: list[str] = []
        conditions: list[str] = []
        env: dict[Variable, str] = {}
        cursors = count(1)
        literals = [item for item in conjunction if isinstance(item, Literal) and not item.negated]
        for atom in (literal.atom for literal in literals):
            signature = self.schema.signature(atom.predicate) or ()
            if atom.predicate in self.derived:
                for arg, domain in zip(atom.args, signature):
                    if isinstance(arg, Variable) and arg not in env:
                        env[arg] = arg.name.lower()
                        loops.append(f"for (var {env[arg]} in {domain})")
                conditions.append(f"{self.cell(atom, env)} == 1")
            elif atom.arity == 1 and isinstance(atom.args[0], Variable) and atom.args[0] not in env:
                env[atom.args[0]] = atom.args[0].name.lower()
                loops.append(f"for (var {env[atom.args[0]]} in {atom.predicate})")
            elif atom.arity <= 1:
                conditions.append(self.member(atom, env) if atom.arity else f"{atom.predicate} == 1")
            else:
                cursor = f"e{next(cursors)}"
                loops.append(f"for (var {cursor} in {atom.predicate})")
                for position, arg in enumerate(atom.args, start=1):
                    field = f"{cursor}.a{position}"
                    if isinstance(arg, Variable) and arg not in env:
                        env[arg] = field
                    else:
                        conditions.append(f"{field} == {self.expression(arg, env)}")
        for item in conjunction:
            if isinstance(item, Comparison):
                left, right = self.expression(item.left, env), self.expression(item.right, env)
                conditions.append(f"{left} {OPL_COMPARATORS[item.op]} {right}")
            elif item.negated and item.atom.predicate in self.derived:
                conditions.append(f"{self.cell(item.atom, env)} == 0")
            elif item.negated:
                conditions.append(f"!({self.member(item.atom, env)})")
        return loops, conditions, env

    def write_conjunction(self, depth: int, head: Atom, conjunction: Conjunction, recursive: bool) -> None:
        loops, conditions, env = self.compile(conjunction)
        for offset, loop in enumerate(loops):
            self.emit(depth + offset, loop)
        depth += len(loops)
        target = self.cell(head, env)
        if recursive:
            conditions.append(f"{target} == 0")
        if not conditions:
            self.emit(depth, f"{target} = 1;")
            return
        self.emit(depth, f"if ({' && '.join(conditions)}) {{")
        self.emit(depth + 1, f"{target} = 1;")
        if recursive:
            self.emit(depth + 1, "modified = true;")
        self.emit(depth, "}")


def emit_fixp_script(rules: list[Rule], schema: Schema) -> str:
    """
    One integer array per derived predicate, then an `execute` block evaluating each stratum: conjunctions reading
    nothing of their own stratum run once, the others inside a `while (modified)` naive iteration.
    """

    strata = stratify(rules)
    defined = [rule.head[0].predicate for stratum in strata for rule in stratum]
    writer = ScriptWriter(schema, set(defined))
    for predicate in defined:
        signature = schema.signature(predicate) or ()
        writer.emit(0, f"// {predicate} declaration")
        writer.emit(0, f"int {predicate}{''.join(f'[{domain}]' for domain in signature)};")
    if not strata:
        return "\n".join(writer.lines) + ("\n" if writer.lines else "")

    writer.emit(0, "execute {")
    declared_modified = False
    for stratum in strata:
        heads = {rule.head[0].predicate for rule in stratum}
        exits = []
        recursive = []
        for rule in stratum:
            for conjunction in rule.body:
                reads = {item.atom.predicate for item in conjunction if isinstance(item, Literal)}
                (recursive if reads & heads else exits).append((rule.head[0], conjunction))
        if exits:
            writer.emit(1, "// exit rule")
        for head, conjunction in exits:
            writer.write_conjunction(1, head, conjunction, recursive=False)
        if not recursive:
            continue
        writer.emit(1, "// recursive rule")
        writer.emit(1, "modified = true;" if declared_modified else "var modified = true;")
        declared_modified = True
        writer.emit(1, "while (modified) {")
        writer.emit(2, "modified = false;")
        for head, conjunction in recursive:
            writer.write_conjunction(2, head, conjunction, recursive=True)
        writer.emit(1, "}")
    writer.emit(0, "}")
    return "\n".join(writer.lines) + "\n"


# endregion

