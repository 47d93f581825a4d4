from src.transpile.model import ConstraintModel, print_model
from src.transpile.opl import emit_fixp_script, emit_opl
from src.transpile.translate import (
    Translator,
    assemble_model,
    build_declarations,
    translate_goal,
)

__all__ = [
    "ConstraintModel",
    "Translator",
    "assemble_model",
    "build_declarations",
    "emit_fixp_script",
    "emit_opl",
    "print_model",
    "translate_goal",
]
