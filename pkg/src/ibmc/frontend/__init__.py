"""Front end: parsing, type checking, loop indexing and bounded-loop expansion."""

from .ast import Program
from .loops import expand_bounded_loops, index_loops
from .parser import ParseError, parse
from .printer import dump, program_str
from .typecheck import LoopInfo, TypeCheckError, TypedProgram, typecheck

FrontendError = (ParseError, TypeCheckError)


def load_program(text: str, origin: str = "<stdin>", unwinding_assertions: bool = True) -> TypedProgram:
    """Parse, type check and expand ``text``; the result has only unbounded loops."""
    tp = expand_bounded_loops(typecheck(parse(text, origin)), unwinding_assertions)
    tp.source = text
    return tp


__all__ = [
    "FrontendError", "LoopInfo", "ParseError", "Program", "TypeCheckError",
    "TypedProgram", "dump", "expand_bounded_loops", "index_loops", "load_program",
    "parse", "program_str", "typecheck",
]
