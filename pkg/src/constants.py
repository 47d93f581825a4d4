from enum import Enum

import attr

# region rules and queries


class RuleKinds(str, Enum):
    standard = "Standard"
    partition = "Partition"
    generalized_partition = "GeneralizedPartition"
    subset = "Subset"
    constraint = "Constraint"


GUESS_RULE_KINDS = frozenset({RuleKinds.partition, RuleKinds.generalized_partition, RuleKinds.subset})


class GoalModes(str, Enum):
    plain = "Plain"
    min = "Min"
    max = "Max"


class Comparators(str, Enum):
    eq = "="
    ne = "!="
    lt = "<"
    le = "<="
    gt = ">"
    ge = ">="


ARITHMETIC_OPERATORS = ("+", "-", "*")

# identifiers containing this marker are reserved for generated predicates and domains
RESERVED_MARKER = "__"
ST_SUFFIX = "__st"
INTEGER_DOMAIN = "integer"

# endregion

# region schemas


class DomainKinds(str, Enum):
    union = "union"
    intersection = "inter"
    labels = "labels"


# endregion

# region pipeline


class SolveModes(str, Enum):
    first = "first"
    all = "all"
    opt = "opt"


class Passes(str, Enum):
    range_restriction = "range_restriction"
    constraint_simplify = "constraint_simplify"
    array_reduction = "array_reduction"
    variable_deletion = "variable_deletion"


PASS_PIPELINE = (
    Passes.range_restriction,
    Passes.constraint_simplify,
    Passes.array_reduction,
    Passes.variable_deletion,
    Passes.constraint_simplify,
)


class States(str, Enum):
    initialising = "Initialising"
    analysing = "Analysing"
    evaluating_p1 = "Evaluating P1"
    solving_p2 = "Solving P2"
    checking_p3 = "Checking P3"
    evaluating_p4 = "Evaluating P4"
    finished = "Finished"


class AnswerStatus(str, Enum):
    answer = "answer"
    no_solution = "no-solution"


class ExitCodes(int, Enum):
    answer = 0
    no_solution = 1
    diagnostics = 2
    resource_limit = 3


class InstanceFamilies(str, Enum):
    chain = "chain"
    cycle = "cycle"
    complete = "complete"
    grid_ladder = "grid-ladder"
    random_gnp = "random-gnp"
    numbers = "numbers"


DEFAULT_NODE_LIMIT = 2_000_000
DEFAULT_TIME_LIMIT = 60.0  # seconds
DEFAULT_ORACLE_BOUND = 24  # choice atoms
DEFAULT_GUESS_BOUND = 2_000_000  # combinations of guess choices
TIME_CHECK_INTERVAL = 1024  # search nodes between wall-clock checks


@attr.s(frozen=True)
class SolverConfig:
    node_limit: int = attr.ib(default=DEFAULT_NODE_LIMIT)
    time_limit: float = attr.ib(default=DEFAULT_TIME_LIMIT)


# endregion

# region constraint models


class ConstraintKinds(str, Enum):
    implication = "=>"
    biconditional = "<=>"


OPL_COMPARATORS = {
    Comparators.eq: "==",
    Comparators.ne: "!=",
    Comparators.lt: "<",
    Comparators.le: "<=",
    Comparators.gt: ">",
    Comparators.ge: ">=",
}

# endregion
