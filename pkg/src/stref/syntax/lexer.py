"""Tokenizer for Structured Text."""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..errors import LexError

KEYWORDS = frozenset(
    """
    TYPE END_TYPE STRUCT END_STRUCT FUNCTION END_FUNCTION FUNCTION_BLOCK
    END_FUNCTION_BLOCK PROGRAM END_PROGRAM VAR VAR_INPUT VAR_OUTPUT VAR_IN_OUT
    VAR_TEMP VAR_GLOBAL VAR_EXTERNAL END_VAR CONSTANT RETAIN PERSISTENT AT
    IF THEN ELSIF ELSE_IF ELSE END_IF CASE OF END_CASE WHILE DO END_WHILE FOR TO BY
    END_FOR REPEAT UNTIL END_REPEAT RETURN EXIT ARRAY
    AND AND_THEN OR OR_ELSE XOR NOT MOD TRUE FALSE
    SINT INT DINT LINT USINT UINT UDINT ULINT REAL LREAL BOOL BYTE WORD DWORD
    STRING WSTRING TIME DATE TIME_OF_DAY TOD DATE_AND_TIME DT
    """.split()
)

# Longest first so that e.g. ':=' wins over ':'.
OPERATORS = (
    "**", ":=", "=>", "<=", ">=", "<>", "..",
    "+", "-", "*", "/", "<", ">", "=", "&", "(", ")", "[", "]", ",", ";", ":", ".",
)

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_ADDRESS = re.compile(r"%[IQM][XBWDL*]?[0-9]+(?:\.[0-9]+)*")
_NUMBER = re.compile(r"\d[\d_]*(?:\.\d[\d_]*(?:[eE][+-]?\d+)?|[eE][+-]?\d+)?")
_RADIX = re.compile(r"(?:2|8|16)#[0-9A-Fa-f_]+")

# Payload shapes after '<prefix>#'.
_TIME_PAYLOAD = re.compile(r"[+-]?[0-9_.]+[A-Za-z][0-9A-Za-z_.]*")
_TOD_PAYLOAD = re.compile(r"\d+:\d+(?::\d+(?:\.\d+)?)?")
_DATE_PAYLOAD = re.compile(r"\d+-\d+-\d+")
_DT_PAYLOAD = re.compile(r"\d+-\d+-\d+-\d+:\d+(?::\d+(?:\.\d+)?)?")
_NUM_PAYLOAD = re.compile(r"[+-]?(?:(?:2|8|16)#[0-9A-Fa-f_]+|\d[\d_]*(?:\.\d[\d_]*)?(?:[eE][+-]?\d+)?)")
_BOOL_PAYLOAD = re.compile(r"TRUE|FALSE|0|1")

_PAYLOADS = {
    "T": _TIME_PAYLOAD,
    "TIME": _TIME_PAYLOAD,
    "TOD": _TOD_PAYLOAD,
    "TIME_OF_DAY": _TOD_PAYLOAD,
    "D": _DATE_PAYLOAD,
    "DATE": _DATE_PAYLOAD,
    "DT": _DT_PAYLOAD,
    "DATE_AND_TIME": _DT_PAYLOAD,
    "BOOL": _BOOL_PAYLOAD,
}
for _n in ("SINT", "INT", "DINT", "LINT", "USINT", "UINT", "UDINT", "ULINT",
           "REAL", "LREAL", "BYTE", "WORD", "DWORD"):
    _PAYLOADS[_n] = _NUM_PAYLOAD


@dataclass(frozen=True)
class Token:
    kind: str  # keyword identifier int float string wstring typed address operator punctuation eof
    text: str
    line: int
    column: int

    def __repr__(self) -> str:
        return f"{self.kind}:{self.text!r}@{self.line}:{self.column}"


_PUNCT = {"(", ")", "[", "]", ",", ";", ":", "."}


def tokenize(source: str) -> list[Token]:
    """Split ``source`` into tokens, dropping whitespace and comments."""
    src = source.replace("\r\n", "\n").replace("\r", "\n")
    tokens: list[Token] = []
    i, line, col = 0, 1, 1
    n = len(src)

    def advance(text: str) -> None:
        nonlocal i, line, col
        nl = text.count("\n")
        if nl:
            line += nl
            col = len(text) - text.rfind("\n")
        else:
            col += len(text)
        i += len(text)

    while i < n:
        c = src[i]
        if c in " \t\n\f\v":
            advance(c)
            continue
        if src.startswith("(*", i):
            end = src.find("*)", i + 2)
            if end < 0:
                raise LexError(line, col, "unterminated comment")
            advance(src[i : end + 2])
            continue
        if src.startswith("//", i):
            end = src.find("\n", i)
            advance(src[i : end if end >= 0 else n])
            continue
        start_line, start_col = line, col
        if c in "'\"":
            j = i + 1
            while j < n and src[j] != c:
                if src[j] == "$":
                    j += 1
                if j < n and src[j] == "\n":
                    raise LexError(start_line, start_col, "unterminated string")
                j += 1
            if j >= n:
                raise LexError(start_line, start_col, "unterminated string")
            text = src[i : j + 1]
            tokens.append(Token("string" if c == "'" else "wstring", text, start_line, start_col))
            advance(text)
            continue
        m = _RADIX.match(src, i)
        if m:
            tokens.append(Token("typed", m.group(), start_line, start_col))
            advance(m.group())
            continue
        if c.isdigit():
            m = _NUMBER.match(src, i)
            text = m.group()
            kind = "int" if re.fullmatch(r"[\d_]+", text) else "float"
            tokens.append(Token(kind, text, start_line, start_col))
            advance(text)
            continue
        m = _ADDRESS.match(src, i)
        if m:
            # direct addresses only appear after AT, which the parser rejects
            tokens.append(Token("address", m.group(), start_line, start_col))
            advance(m.group())
            continue
        m = _IDENT.match(src, i)
        if m:
            word = m.group()
            if src.startswith("#", m.end()):
                pat = _PAYLOADS.get(word, _IDENT)
                pm = pat.match(src, m.end() + 1)
                if not pm:
                    raise LexError(start_line, start_col, f"malformed typed literal after {word}#")
                text = src[i : pm.end()]
                tokens.append(Token("typed", text, start_line, start_col))
                advance(text)
                continue
            tokens.append(Token("keyword" if word in KEYWORDS else "identifier", word, start_line, start_col))
            advance(word)
            continue
        for op in OPERATORS:
            if src.startswith(op, i):
                tokens.append(Token("punctuation" if op in _PUNCT else "operator", op, start_line, start_col))
                advance(op)
                break
        else:
            raise LexError(start_line, start_col, f"illegal character {c!r}")
    tokens.append(Token("eof", "", line, col))
    return tokens
