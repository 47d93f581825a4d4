import re
import time
from math import floor
from typing import Any, Iterable, Union

Value = Union[str, int]

TEXT_BOLD = "\033[1m"
TEXT_END = "\033[0m"


def bold(text: Any) -> str:
    return f"{TEXT_BOLD}{text}{TEXT_END}"


def value_sort_key(value: Value) -> tuple[int, Any]:
    """
    Integers sort before strings; each kind sorts naturally within itself.
    """

    return (0, value) if isinstance(value, int) else (1, value)


def tuple_sort_key(values: Iterable[Value]) -> tuple[tuple[int, Any], ...]:
    return tuple(value_sort_key(value) for value in values)


def format_value(value: Value) -> str:
    return str(value)


def format_fact(predicate: str, values: tuple[Value, ...]) -> str:
    if not values:
        return f"{predicate}."
    return f"{predicate}({','.join(format_value(value) for value in values)})."


OPL_TOKEN = re.compile(r"<=>|=>|==|!=|<=|>=|\.\.|&&|[A-Za-z_][A-Za-z0-9_]*|\d+|\S")


def opl_tokens(text: str) -> list[str]:
    """
    Splits OPL text into tokens, ignoring whitespace and `//` comments. Used to compare emitted text.
    """

    lines = [line.split("//", 1)[0] for line in text.splitlines()]
    return OPL_TOKEN.findall("\n".join(lines))


def time_to_hours_minutes_seconds(t: float) -> tuple[int, int, int]:
    hours = int(floor(t / 3600))
    mins = int(floor(t / 60) - hours * 60)
    secs = int(t - (mins * 60) - (hours * 3600))
    return hours, mins, secs


def log_seconds_elapsed(t0: float) -> None:
    elapsed = time.time() - t0
    hours, mins, secs = time_to_hours_minutes_seconds(elapsed)
    print("Elapsed time: ", end="")
    if hours > 0:
        print(f"{hours} hour{'s' if hours != 1 else ''}, ", end="")
    if mins > 0:
        print(f"{mins} minute{'s' if mins != 1 else ''} and ", end="")
    print(f"{secs} second{'s' if secs != 1 else ''} ({elapsed:.3f}s).")
