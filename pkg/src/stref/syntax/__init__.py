"""Lexing, parsing and pretty-printing of Structured Text."""

from . import ast
from .lexer import KEYWORDS, Token, tokenize
from .parser import parse_expression, parse_source, parse_statements
from .printer import pretty_print

__all__ = [
    "KEYWORDS",
    "Token",
    "ast",
    "parse_expression",
    "parse_source",
    "parse_statements",
    "pretty_print",
    "tokenize",
]
