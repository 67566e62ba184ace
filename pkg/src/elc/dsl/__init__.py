"""The theory/structure/cone file language."""
from .elaborate import ElaborationError, InvalidInstance, Module, load, load_text
from .lexer import DSLError, LexError
from .parser import ParseError, parse, parse_formula, parse_sequent
from .printer import print_document

__all__ = ["DSLError", "ElaborationError", "InvalidInstance", "LexError", "Module", "ParseError", "load",
           "load_text", "parse", "parse_formula", "parse_sequent", "print_document"]
