"""AST node classes.

Node equality is structural: the ``line`` attribute is excluded from
comparison so that a re-parsed pretty-print compares equal to the original.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union


def _line() -> int:
    return field(default=0, compare=False, repr=False)


# ---------------------------------------------------------------- expressions


@dataclass
class Literal:
    kind: str  # int | real | string | wstring | bool | typed
    text: str
    line: int = _line()


@dataclass
class Name:
    id: str
    line: int = _line()


@dataclass
class BinOp:
    op: str
    lhs: "Expr"
    rhs: "Expr"
    line: int = _line()


@dataclass
class UnaryOp:
    op: str  # '-' | 'NOT'
    operand: "Expr"
    line: int = _line()


@dataclass
class Arg:
    name: Optional[str]
    value: "Expr"


@dataclass
class Call:
    callee: "Expr"
    args: list[Arg]
    line: int = _line()


@dataclass
class Member:
    base: "Expr"
    field: str
    line: int = _line()


@dataclass
class Index:
    base: "Expr"
    indices: list["Expr"]
    line: int = _line()


@dataclass
class Paren:
    inner: "Expr"
    line: int = _line()


@dataclass
class ArrayInit:
    """``[e1, e2, n(e3)]`` initializer; ``repeats[i]`` is the count for item i."""

    items: list["Expr"]
    repeats: list[Optional["Expr"]]
    line: int = _line()


@dataclass
class StructInit:
    fields: list[tuple[str, "Expr"]]
    line: int = _line()


Expr = Union[Literal, Name, BinOp, UnaryOp, Call, Member, Index, Paren, ArrayInit, StructInit]


# ---------------------------------------------------------------- statements


@dataclass
class ExprStmt:
    expr: Expr
    line: int = _line()


@dataclass
class Assign:
    target: Expr
    value: Expr
    line: int = _line()


@dataclass
class If:
    cond: Expr
    then: list["Statement"]
    elifs: list[tuple[Expr, list["Statement"]]]
    else_: Optional[list["Statement"]]
    line: int = _line()


@dataclass
class CaseLabel:
    lo: Expr
    hi: Optional[Expr] = None  # set for ``lo .. hi`` ranges


@dataclass
class CaseBlock:
    labels: list[CaseLabel]
    body: list["Statement"]
    line: int = _line()


@dataclass
class Case:
    selector: Expr
    blocks: list[CaseBlock]
    else_: Optional[list["Statement"]]
    line: int = _line()


@dataclass
class While:
    cond: Expr
    body: list["Statement"]
    line: int = _line()


@dataclass
class For:
    var: Name
    start: Expr
    stop: Expr
    step: Optional[Expr]
    body: list["Statement"]
    line: int = _line()


@dataclass
class Repeat:
    body: list["Statement"]
    cond: Expr
    line: int = _line()


@dataclass
class Return:
    line: int = _line()


@dataclass
class Exit:
    line: int = _line()


Statement = Union[ExprStmt, Assign, If, Case, While, For, Repeat, Return, Exit]


# ---------------------------------------------------------------- declarations


@dataclass
class NamedType:
    name: str  # elementary keyword (TOD/DT normalized) or user type name


@dataclass
class StringTypeExpr:
    wide: bool
    length: Optional[Expr]


@dataclass
class ArrayTypeExpr:
    ranges: list[tuple[Expr, Expr]]
    element: "TypeExpr"


TypeExpr = Union[NamedType, StringTypeExpr, ArrayTypeExpr]


@dataclass
class VarEntry:
    names: list[str]
    type: TypeExpr
    init: Optional[Expr]
    line: int = _line()


@dataclass
class VarSection:
    kind: str  # VAR VAR_INPUT VAR_OUTPUT VAR_IN_OUT VAR_TEMP VAR_GLOBAL VAR_EXTERNAL
    constant: bool
    entries: list[VarEntry]
    line: int = _line()


@dataclass
class EnumDecl:
    name: str
    members: list[tuple[str, Optional[Expr]]]
    default: Optional[str]
    line: int = _line()


@dataclass
class StructDecl:
    name: str
    entries: list[VarEntry]
    line: int = _line()


@dataclass
class FunctionDecl:
    name: str
    return_type: TypeExpr
    sections: list[VarSection]
    body: list[Statement]
    line: int = _line()

    kind = "FUNCTION"


@dataclass
class FunctionBlockDecl:
    name: str
    sections: list[VarSection]
    body: list[Statement]
    line: int = _line()

    kind = "FUNCTION_BLOCK"


@dataclass
class ProgramDecl:
    name: str
    sections: list[VarSection]
    body: list[Statement]
    line: int = _line()

    kind = "PROGRAM"


POU = Union[FunctionDecl, FunctionBlockDecl, ProgramDecl]


@dataclass
class SourceUnit:
    type_decls: list[Union[EnumDecl, StructDecl]]
    pous: list[POU]
    globals: list[VarSection] = field(default_factory=list)
