"""
Parsers for the three file formats:

* `.nps` schema files: `DOMAINS: node; color. INT-DOMAINS: num. PREDICATES: edge(node,node). MinInt=0. MaxInt=10.`
* `.npd` program files: rules followed by one query line such as `? min |used_color(C)|.`
* `.npf` fact files: ground facts such as `node(a). edge(a,b).`
"""

from functools import cache
from typing import Any, Union

from lark import Lark, Token, Transformer, v_args
from lark.exceptions import UnexpectedCharacters, UnexpectedEOF, UnexpectedInput, VisitError

from src.constants import INTEGER_DOMAIN, RESERVED_MARKER, Comparators, GoalModes, RuleKinds
from src.exc import Diagnostic, ParseException, ValidationException
from src.frontend.schema import Database, Schema, implicit_int_domains, integer_extent
from src.frontend.syntax import (
    Atom,
    BinaryExpression,
    Comparison,
    Constant,
    Goal,
    Literal,
    Program,
    Rule,
    Term,
    Variable,
)
from src.utils import Value

# region grammars

COMMON = r"""
    NAME: /[a-z][A-Za-z0-9_]*/
    INT: /[0-9]+/
    COMMENT: /%[^\n]*/

    %import common.WS
    %ignore WS
    %ignore COMMENT
"""

SCHEMA_GRAMMAR = (
    r"""
    start: section*
    ?section: "DOMAINS" ":" names "."                       -> string_domains
            | "INT-DOMAINS" ":" names "."                   -> int_domains
            | "PREDICATES" ":" signature (";" signature)* "." -> predicates
            | "MinInt" "=" signed_int "."                   -> min_int
            | "MaxInt" "=" signed_int "."                   -> max_int
    names: NAME (";" NAME)*
    signature: NAME ["(" NAME ("," NAME)* ")"]
    signed_int: INT | "-" INT -> negative_int
"""
    + COMMON
)

PROGRAM_GRAMMAR = (
    r"""
    start: (rule | query)*
    ?rule: standard | partition | generalized_partition | subset | constraint | disjunctive_constraint
    standard: atom [":-" body] "."
    partition: atom ("(+)" atom)+ ":-" conjunction "."
    generalized_partition: "(+)" "[" VAR "]" atom ":-" conjunction "."
    subset: atom "<~" conjunction "."
    constraint: ":-" conjunction "."
    disjunctive_constraint: atom ("|" atom)* "<-" [conjunction] "."
    query: "?" goal "."
    ?goal: atom                   -> plain_goal
         | "min" "|" atom "|"     -> min_goal
         | "max" "|" atom "|"     -> max_goal
    body: conjunction (";" conjunction)*
    conjunction: literal ("," literal)*
    ?literal: atom                -> positive
            | "not" atom          -> negative
            | sum COMPARATOR sum  -> comparison
    atom: NAME ["(" sum ("," sum)* ")"]
    ?sum: product
        | sum "+" product         -> add
        | sum "-" product         -> subtract
    ?product: operand
            | product "*" operand -> multiply
    ?operand: VAR                 -> variable
            | NAME                -> name_constant
            | INT                 -> int_constant
            | "-" INT             -> negative_constant
            | "(" sum ")"
    COMPARATOR: "!=" | "<=" | ">=" | "=" | "<" | ">"
    VAR: /[A-Z][A-Za-z0-9_]*/
"""
    + COMMON
)

FACTS_GRAMMAR = (
    r"""
    start: fact*
    fact: NAME ["(" value ("," value)* ")"] "."
    ?value: NAME   -> name_value
          | INT    -> int_value
          | "-" INT -> negative_value
"""
    + COMMON
)


@cache
def schema_parser() -> Lark:
    return Lark(SCHEMA_GRAMMAR, parser="lalr", propagate_positions=True)


@cache
def program_parser() -> Lark:
    return Lark(PROGRAM_GRAMMAR, parser="lalr", propagate_positions=True)


@cache
def facts_parser() -> Lark:
    return Lark(FACTS_GRAMMAR, parser="lalr", propagate_positions=True)


# endregion

# region transformers


class SchemaTransformer(Transformer[Token, Schema]):
    def names(self, names: list[Token]) -> list[str]:
        return [str(name) for name in names]

    def signature(self, items: list[Any]) -> tuple[str, tuple[str, ...]]:
        name, *domains = items
        return str(name), tuple(str(domain) for domain in domains if domain is not None)

    def signed_int(self, items: list[Token]) -> int:
        return int(items[0])

    def negative_int(self, items: list[Token]) -> int:
        return -int(items[0])

    def string_domains(self, items: list[list[str]]) -> tuple[str, list[str]]:
        return "string_domains", items[0]

    def int_domains(self, items: list[list[str]]) -> tuple[str, list[str]]:
        return "int_domains", items[0]

    def predicates(self, items: list[tuple[str, tuple[str, ...]]]) -> tuple[str, list[tuple[str, tuple[str, ...]]]]:
        return "predicates", items

    def min_int(self, items: list[int]) -> tuple[str, int]:
        return "min_int", items[0]

    def max_int(self, items: list[int]) -> tuple[str, int]:
        return "max_int", items[0]

    def start(self, sections: list[tuple[str, Any]]) -> Schema:
        string_domains: list[str] = []
        int_domains: list[str] = []
        predicates: dict[str, tuple[str, ...]] = {}
        bounds: dict[str, int] = {}
        diagnostics = []
        for key, content in sections:
            if key == "string_domains":
                string_domains.extend(content)
            elif key == "int_domains":
                int_domains.extend(content)
            elif key == "predicates":
                for name, signature in content:
                    if name in predicates:
                        diagnostics.append(Diagnostic(f"The predicate {name} is declared more than once"))
                    predicates[name] = signature
            else:
                bounds[key] = content
        if ("min_int" in bounds) != ("max_int" in bounds):
            diagnostics.append(Diagnostic("MinInt and MaxInt must be declared together"))
        if diagnostics:
            raise ValidationException(diagnostics)
        int_range = (bounds["min_int"], bounds["max_int"]) if "min_int" in bounds and "max_int" in bounds else None
        schema = Schema(
            string_domains=string_domains, int_domains=int_domains, int_range=int_range, predicates=predicates
        )
        if implicit := implicit_int_domains(schema):
            schema = Schema(
                string_domains=string_domains,
                int_domains=list(int_domains) + list(implicit),
                int_range=int_range,
                predicates=predicates,
            )
        return schema


class ProgramTransformer(Transformer[Token, Program]):
    # region terms

    def variable(self, items: list[Token]) -> Variable:
        return Variable(str(items[0]))

    def name_constant(self, items: list[Token]) -> Constant:
        return Constant(str(items[0]))

    def int_constant(self, items: list[Token]) -> Constant:
        return Constant(int(items[0]))

    def negative_constant(self, items: list[Token]) -> Constant:
        return Constant(-int(items[0]))

    def add(self, items: list[Term]) -> BinaryExpression:
        return BinaryExpression("+", items[0], items[1])

    def subtract(self, items: list[Term]) -> BinaryExpression:
        return BinaryExpression("-", items[0], items[1])

    def multiply(self, items: list[Term]) -> BinaryExpression:
        return BinaryExpression("*", items[0], items[1])

    # endregion

    # region literals

    def atom(self, items: list[Any]) -> Atom:
        name, *args = items
        if RESERVED_MARKER in str(name):
            raise ValueError(f"Predicate names containing '{RESERVED_MARKER}' are reserved: {name}")
        return Atom(str(name), tuple(arg for arg in args if arg is not None))

    def positive(self, items: list[Atom]) -> Literal:
        return Literal(items[0])

    def negative(self, items: list[Atom]) -> Literal:
        return Literal(items[0], negated=True)

    def comparison(self, items: list[Any]) -> Comparison:
        left, op, right = items
        return Comparison(Comparators(str(op)), left, right)

    def conjunction(self, items: list[Any]) -> tuple[Any, ...]:
        return tuple(items)

    def body(self, items: list[tuple[Any, ...]]) -> tuple[tuple[Any, ...], ...]:
        return tuple(items)

    # endregion

    # region rules

    def standard(self, items: list[Any]) -> Rule:
        head, body = items
        return Rule(RuleKinds.standard, (head,), body if body is not None else ((),))

    def partition(self, items: list[Any]) -> Rule:
        *heads, conjunction = items
        validate_partition_heads(heads)
        return Rule(RuleKinds.partition, tuple(heads), (conjunction,))

    def generalized_partition(self, items: list[Any]) -> Rule:
        label_token, head, conjunction = items
        label = Variable(str(label_token))
        if not head.args or head.args[-1] != label:
            raise ValueError(f"The partition variable {label} must be the last argument of {head.predicate}")
        return Rule(RuleKinds.generalized_partition, (head,), (conjunction,), label=label)

    def subset(self, items: list[Any]) -> Rule:
        head, conjunction = items
        return Rule(RuleKinds.subset, (head,), (conjunction,))

    def constraint(self, items: list[Any]) -> Rule:
        return Rule(RuleKinds.constraint, (), (items[0],))

    def disjunctive_constraint(self, items: list[Any]) -> Rule:
        *heads, conjunction = items
        negated = tuple(Literal(head, negated=True) for head in heads)
        return Rule(RuleKinds.constraint, (), ((conjunction or ()) + negated,))

    # endregion

    # region query

    def plain_goal(self, items: list[Atom]) -> Goal:
        return Goal(GoalModes.plain, items[0])

    def min_goal(self, items: list[Atom]) -> Goal:
        return Goal(GoalModes.min, items[0])

    def max_goal(self, items: list[Atom]) -> Goal:
        return Goal(GoalModes.max, items[0])

    def query(self, items: list[Goal]) -> Goal:
        return items[0]

    def start(self, items: list[Union[Rule, Goal]]) -> Program:
        rules = [item for item in items if isinstance(item, Rule)]
        goals = [item for item in items if isinstance(item, Goal)]
        if len(goals) > 1:
            raise ValueError("A program may contain at most one query line")
        return Program(rules=rules, goal=goals[0] if goals else None)

    # endregion


def validate_partition_heads(heads: list[Atom]) -> None:
    """
    Partition heads either use pairwise-distinct predicates over one argument vector, or one predicate whose last
    arguments are pairwise-distinct constants.
    """

    predicates = [head.predicate for head in heads]
    if len(set(predicates)) == len(predicates):
        if any(head.args != heads[0].args for head in heads):
            raise ValueError("Exclusive disjunction heads must share the same argument vector")
        return
    if len(set(predicates)) != 1:
        raise ValueError("Exclusive disjunction heads mix distinct predicates with repeated ones")
    if any(not head.args or not isinstance(head.args[-1], Constant) for head in heads):
        raise ValueError("Exclusive disjunction over one predicate needs a constant in the last position")
    if any(head.args[:-1] != heads[0].args[:-1] for head in heads):
        raise ValueError("Exclusive disjunction heads must share the same argument vector")
    labels = [head.args[-1] for head in heads]
    if len(set(labels)) != len(labels):
        raise ValueError("Exclusive disjunction labels must be pairwise distinct")


@v_args(inline=True)
class FactsTransformer(Transformer[Token, list[tuple[str, tuple[Value, ...]]]]):
    def name_value(self, token: Token) -> str:
        return str(token)

    def int_value(self, token: Token) -> int:
        return int(token)

    def negative_value(self, token: Token) -> int:
        return -int(token)

    def fact(self, name: Token, *values: Any) -> tuple[str, tuple[Value, ...]]:
        return str(name), tuple(value for value in values if value is not None)

    def start(self, *facts: tuple[str, tuple[Value, ...]]) -> list[tuple[str, tuple[Value, ...]]]:
        return list(facts)


# endregion

# region public


def run_parser(parser: Lark, transformer: Transformer[Token, Any], text: str, source: str) -> Any:
    try:
        tree = parser.parse(text)
    except (UnexpectedCharacters, UnexpectedEOF, UnexpectedInput) as e:
        line = getattr(e, "line", 0) or 0
        column = getattr(e, "column", 0) or 0
        raise ParseException(source, line, column, str(e).splitlines()[0])
    try:
        return transformer.transform(tree)
    except VisitError as e:
        if isinstance(e.orig_exc, ValidationException):
            raise e.orig_exc
        meta = getattr(e.obj, "meta", None)
        line = getattr(meta, "line", 0) if meta is not None and not meta.empty else 0
        column = getattr(meta, "column", 0) if meta is not None and not meta.empty else 0
        raise ParseException(source, line, column, str(e.orig_exc))


def parse_schema(text: str, source: str = "<schema>") -> Schema:
    return run_parser(schema_parser(), SchemaTransformer(), text, source)


def parse_program(text: str, source: str = "<program>") -> Program:
    return run_parser(program_parser(), ProgramTransformer(), text, source)


def parse_database(text: str, schema: Schema, source: str = "<facts>") -> Database:
    facts: list[tuple[str, tuple[Value, ...]]] = run_parser(facts_parser(), FactsTransformer(), text, source)
    diagnostics = []
    extents: dict[str, dict[Value, None]] = {domain: {} for domain in schema.string_domains}
    extents.update({domain: {} for domain in schema.int_domains})
    relations: dict[str, set[tuple[Value, ...]]] = {predicate: set() for predicate in schema.predicates}
    base_facts = []
    for predicate, values in facts:
        if predicate in extents:
            if len(values) != 1:
                diagnostics.append(Diagnostic(f"The domain fact {predicate} must have exactly one argument"))
            elif predicate in schema.int_domains and not isinstance(values[0], int):
                diagnostics.append(Diagnostic(f"The integer domain {predicate} cannot contain {values[0]}"))
            else:
                extents[predicate][values[0]] = None
        elif predicate in relations:
            base_facts.append((predicate, values))
        else:
            diagnostics.append(Diagnostic(f"The fact {predicate} does not match any declared domain or predicate"))
    if schema.int_range is not None:
        for value in integer_extent(schema):
            extents.setdefault(INTEGER_DOMAIN, {})[value] = None
    for predicate, values in base_facts:
        signature = schema.predicates[predicate]
        if len(values) != len(signature):
            diagnostics.append(
                Diagnostic(f"The fact {predicate} has {len(values)} arguments but its signature has {len(signature)}")
            )
            continue
        for value, domain in zip(values, signature):
            if value not in extents.get(domain, {}):
                diagnostics.append(Diagnostic(f"The constant {value} of {predicate} is not in the domain {domain}"))
                break
        else:
            relations[predicate].add(values)
    if diagnostics:
        raise ValidationException(diagnostics)
    return Database(
        extents={domain: tuple(extent) for domain, extent in extents.items()},
        facts={predicate: frozenset(tuples) for predicate, tuples in relations.items()},
    )


# endregion
