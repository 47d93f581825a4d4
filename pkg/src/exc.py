from typing import Optional, Sequence

import attr

from src.utils import bold


@attr.s(frozen=True)
class Diagnostic:
    message: str = attr.ib()
    rule_index: Optional[int] = attr.ib(default=None)
    variable: Optional[str] = attr.ib(default=None)
    source: Optional[str] = attr.ib(default=None)

    def __str__(self) -> str:
        if self.source is not None:
            location = self.source if self.rule_index is None else f"{self.source}:{self.rule_index}"
            return f"{location}: {self.message}"
        if self.rule_index is not None:
            return f"rule {self.rule_index}: {self.message}"
        return self.message


class NPDatalogException(Exception):
    def __init__(self, message: str):
        self.message = message
        super().__init__(self.message)


class ParseException(NPDatalogException):
    def __init__(self, source: str, line: int, column: int, detail: str):
        self.source = source
        self.line = line
        self.column = column
        super().__init__(f"Syntax error in {bold(source)} at line {bold(line)}, column {bold(column)}: {detail}")


class ValidationException(NPDatalogException):
    def __init__(self, diagnostics: Sequence[Diagnostic]):
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(str(diagnostic) for diagnostic in self.diagnostics))

    def located(self, source: str) -> "ValidationException":
        """
        The same diagnostics, attributed to `source` unless they already name a file.
        """

        return ValidationException(
            [
                diagnostic if diagnostic.source is not None else attr.evolve(diagnostic, source=source)
                for diagnostic in self.diagnostics
            ]
        )


class UnstratifiedException(NPDatalogException):
    def __init__(self, cycle: Sequence[str]):
        self.cycle = sorted(cycle)
        cycle_text = "{" + ", ".join(self.cycle) + "}"
        super().__init__(f"Negation is not stratified: negative cycle through {bold(cycle_text)}")


class TranspileException(NPDatalogException):
    pass


class ResourceLimitException(NPDatalogException):
    def __init__(self, kind: str, limit: float):
        self.kind = kind
        self.limit = limit
        super().__init__(f"The {bold(kind)} limit of {bold(limit)} was exceeded")


class OracleBoundException(NPDatalogException):
    def __init__(self, atoms: int, bound: int):
        self.atoms = atoms
        self.bound = bound
        super().__init__(
            f"The oracle would have to enumerate {bold(atoms)} choices, more than the bound of {bold(bound)}. "
            f"Shrink the instance."
        )
