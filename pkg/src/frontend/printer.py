from src.constants import GoalModes, RuleKinds
from src.frontend.syntax import (
    Atom,
    BodyItem,
    Conjunction,
    Constant,
    Goal,
    Literal,
    Program,
    Rule,
    Term,
    Variable,
)

PRECEDENCE = {"+": 1, "-": 1, "*": 2}


def print_term(term: Term, parent_precedence: int = 0, right: bool = False) -> str:
    if isinstance(term, Variable):
        return term.name
    if isinstance(term, Constant):
        return str(term.value)
    precedence = PRECEDENCE[term.op]
    text = f"{print_term(term.left, precedence)} {term.op} {print_term(term.right, precedence, right=True)}"
    if precedence < parent_precedence or (right and precedence == parent_precedence):
        return f"({text})"
    return text


def print_atom(atom: Atom) -> str:
    if not atom.args:
        return atom.predicate
    return f"{atom.predicate}({','.join(print_term(arg) for arg in atom.args)})"


def print_body_item(item: BodyItem) -> str:
    if isinstance(item, Literal):
        return f"not {print_atom(item.atom)}" if item.negated else print_atom(item.atom)
    return f"{print_term(item.left)} {item.op.value} {print_term(item.right)}"


def print_conjunction(conjunction: Conjunction) -> str:
    return ", ".join(print_body_item(item) for item in conjunction)


def print_rule(rule: Rule) -> str:
    body = " ; ".join(print_conjunction(conjunction) for conjunction in rule.body)
    if rule.kind == RuleKinds.standard:
        head = print_atom(rule.head[0])
        return f"{head}." if not any(rule.body) else f"{head} :- {body}."
    if rule.kind == RuleKinds.partition:
        return f"{' (+) '.join(print_atom(atom) for atom in rule.head)} :- {body}."
    if rule.kind == RuleKinds.generalized_partition:
        assert rule.label is not None
        return f"(+)[{rule.label.name}] {print_atom(rule.head[0])} :- {body}."
    if rule.kind == RuleKinds.subset:
        return f"{print_atom(rule.head[0])} <~ {body}."
    if rule.head:  # normalized constraint with a consequent
        return f"{' | '.join(print_atom(atom) for atom in rule.head)} <- {body}."
    return f":- {body}."


def print_goal(goal: Goal) -> str:
    if goal.mode == GoalModes.plain:
        return f"? {print_atom(goal.atom)}."
    return f"? {goal.mode.value.lower()} |{print_atom(goal.atom)}|."


def print_program(program: Program) -> str:
    lines = [print_rule(rule) for rule in program.rules]
    if program.goal is not None:
        lines.append(print_goal(program.goal))
    return "\n".join(lines) + ("\n" if lines else "")

