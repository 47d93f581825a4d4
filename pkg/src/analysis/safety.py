from src.constants import RuleKinds
from src.exc import Diagnostic
from src.frontend.syntax import Comparison, Literal, Program, Rule, Variable, positive_atoms


def unsafe_variables(rule: Rule) -> list[Variable]:
    """
    A variable is bound only by a positive predicate literal of the same conjunct; comparisons never bind.
    """

    unsafe: dict[Variable, None] = {}
    head_variables = [variable for atom in rule.head for variable in atom.variables()]
    for conjunction in rule.body:
        bound = {variable for atom in positive_atoms(conjunction) for variable in atom.variables()}
        needed = list(head_variables)
        for item in conjunction:
            if isinstance(item, Comparison) or (isinstance(item, Literal) and item.negated):
                needed.extend(item.variables())
        for variable in needed:
            if variable not in bound:
                unsafe.setdefault(variable, None)
    return list(unsafe)


def has_variable_heads(rule: Rule) -> bool:
    """
    Exclusive disjunctions over one predicate carry their label constants in the last position.
    """

    for atom in rule.head:
        args = atom.args
        if rule.kind == RuleKinds.partition and len(rule.head_predicates()) == 1:
            args = args[:-1]
        if not all(isinstance(arg, Variable) for arg in args) or len(set(args)) != len(args):
            return False
    return True


def check_safety(program: Program) -> list[Diagnostic]:
    diagnostics = []
    for rule_index, rule in enumerate(program.rules):
        for variable in unsafe_variables(rule):
            diagnostics.append(
                Diagnostic(
                    f"The variable {variable.name} is not bound by a positive body literal",
                    rule_index=rule_index,
                    variable=variable.name,
                )
            )
        if rule.is_guess and not has_variable_heads(rule):
            diagnostics.append(
                Diagnostic("The heads of partition and subset rules must have pairwise-distinct variables", rule_index)
            )
        if rule.kind == RuleKinds.generalized_partition and rule.label is not None:
            if rule.label in rule.head[0].args[:-1]:
                diagnostics.append(
                    Diagnostic(
                        f"The partition variable {rule.label.name} also occurs among the partitioned arguments",
                        rule_index=rule_index,
                        variable=rule.label.name,
                    )
                )
    if program.goal is not None and program.goal.atom.predicate not in program.defined_predicates():
        diagnostics.append(Diagnostic(f"The goal predicate {program.goal.atom.predicate} is not defined"))
    return diagnostics
