"""Canonical pretty-printer; output re-parses to a structurally equal AST."""

from __future__ import annotations

from . import ast as A
from .parser import LEVELS

_PREC = {op: i for i, ops in enumerate(LEVELS) for op in ops}
_UNARY = len(LEVELS)
_POSTFIX = _UNARY + 1
INDENT = "    "


def expr(e: A.Expr, ctx: int = 0) -> str:
    if isinstance(e, A.Literal):
        return e.text
    if isinstance(e, A.Name):
        return e.id
    if isinstance(e, A.Paren):
        return f"({expr(e.inner)})"
    if isinstance(e, A.BinOp):
        p = _PREC[e.op]
        s = f"{expr(e.lhs, p)} {e.op} {expr(e.rhs, p + 1)}"
        return f"({s})" if p < ctx else s
    if isinstance(e, A.UnaryOp):
        inner = expr(e.operand, _UNARY)
        s = f"NOT {inner}" if e.op == "NOT" else ("- " if inner.startswith("-") else "-") + inner
        return f"({s})" if _UNARY < ctx else s
    if isinstance(e, A.Call):
        args = ", ".join(f"{a.name} := {expr(a.value)}" if a.name else expr(a.value) for a in e.args)
        return f"{expr(e.callee, _POSTFIX)}({args})"
    if isinstance(e, A.Member):
        return f"{expr(e.base, _POSTFIX)}.{e.field}"
    if isinstance(e, A.Index):
        return f"{expr(e.base, _POSTFIX)}[{', '.join(expr(i) for i in e.indices)}]"
    if isinstance(e, A.ArrayInit):
        parts = []
        for item, rep in zip(e.items, e.repeats):
            parts.append(f"{expr(rep)}({expr(item)})" if rep is not None else expr(item))
        return "[" + ", ".join(parts) + "]"
    if isinstance(e, A.StructInit):
        return "(" + ", ".join(f"{f} := {expr(v)}" for f, v in e.fields) + ")"
    raise TypeError(f"not an expression node: {e!r}")


def type_expr(t: A.TypeExpr) -> str:
    if isinstance(t, A.NamedType):
        return t.name
    if isinstance(t, A.StringTypeExpr):
        base = "WSTRING" if t.wide else "STRING"
        return base if t.length is None else f"{base}[{expr(t.length)}]"
    if isinstance(t, A.ArrayTypeExpr):
        dims = ", ".join(f"{expr(lo)}..{expr(hi)}" for lo, hi in t.ranges)
        return f"ARRAY[{dims}] OF {type_expr(t.element)}"
    raise TypeError(f"not a type node: {t!r}")


def _block(stmts: list[A.Statement], depth: int, out: list[str]) -> None:
    for s in stmts:
        statement(s, depth, out)


def statement(s: A.Statement, depth: int, out: list[str]) -> None:
    pad = INDENT * depth
    if isinstance(s, A.Assign):
        out.append(f"{pad}{expr(s.target)} := {expr(s.value)};")
    elif isinstance(s, A.ExprStmt):
        out.append(f"{pad}{expr(s.expr)};")
    elif isinstance(s, A.If):
        out.append(f"{pad}IF {expr(s.cond)} THEN")
        _block(s.then, depth + 1, out)
        for cond, body in s.elifs:
            out.append(f"{pad}ELSIF {expr(cond)} THEN")
            _block(body, depth + 1, out)
        if s.else_ is not None:
            out.append(f"{pad}ELSE")
            _block(s.else_, depth + 1, out)
        out.append(f"{pad}END_IF;")
    elif isinstance(s, A.Case):
        out.append(f"{pad}CASE {expr(s.selector)} OF")
        for b in s.blocks:
            labels = ", ".join(
                expr(lab.lo) if lab.hi is None else f"{expr(lab.lo)} .. {expr(lab.hi)}" for lab in b.labels
            )
            out.append(f"{pad}{INDENT}{labels} :")
            _block(b.body, depth + 2, out)
        if s.else_ is not None:
            out.append(f"{pad}ELSE")
            _block(s.else_, depth + 1, out)
        out.append(f"{pad}END_CASE;")
    elif isinstance(s, A.While):
        out.append(f"{pad}WHILE {expr(s.cond)} DO")
        _block(s.body, depth + 1, out)
        out.append(f"{pad}END_WHILE;")
    elif isinstance(s, A.For):
        by = f" BY {expr(s.step)}" if s.step is not None else ""
        out.append(f"{pad}FOR {s.var.id} := {expr(s.start)} TO {expr(s.stop)}{by} DO")
        _block(s.body, depth + 1, out)
        out.append(f"{pad}END_FOR;")
    elif isinstance(s, A.Repeat):
        out.append(f"{pad}REPEAT")
        _block(s.body, depth + 1, out)
        out.append(f"{pad}UNTIL {expr(s.cond)}")
        out.append(f"{pad}END_REPEAT;")
    elif isinstance(s, A.Return):
        out.append(f"{pad}RETURN;")
    elif isinstance(s, A.Exit):
        out.append(f"{pad}EXIT;")
    else:
        raise TypeError(f"not a statement node: {s!r}")


def _entry(e: A.VarEntry, depth: int, out: list[str]) -> None:
    init = f" := {expr(e.init)}" if e.init is not None else ""
    out.append(f"{INDENT * depth}{', '.join(e.names)} : {type_expr(e.type)}{init};")


def section(sec: A.VarSection, depth: int, out: list[str]) -> None:
    pad = INDENT * depth
    out.append(f"{pad}{sec.kind}{' CONSTANT' if sec.constant else ''}")
    for e in sec.entries:
        _entry(e, depth + 1, out)
    out.append(f"{pad}END_VAR")


def pretty_print(unit: A.SourceUnit) -> str:
    out: list[str] = []
    if unit.type_decls:
        out.append("TYPE")
        for d in unit.type_decls:
            if isinstance(d, A.EnumDecl):
                members = ", ".join(m if v is None else f"{m} := {expr(v)}" for m, v in d.members)
                default = f" := {d.default}" if d.default else ""
                out.append(f"{INDENT}{d.name} : ({members}){default};")
            else:
                out.append(f"{INDENT}{d.name} : STRUCT")
                for e in d.entries:
                    _entry(e, 2, out)
                out.append(f"{INDENT}END_STRUCT;")
        out.append("END_TYPE")
        out.append("")
    for g in unit.globals:
        section(g, 0, out)
        out.append("")
    for pou in unit.pous:
        if isinstance(pou, A.FunctionDecl):
            out.append(f"FUNCTION {pou.name} : {type_expr(pou.return_type)}")
        else:
            out.append(f"{pou.kind} {pou.name}")
        for sec in pou.sections:
            section(sec, 1, out)
        _block(pou.body, 1, out)
        out.append(f"END_{pou.kind}")
        out.append("")
    return "\n".join(out)
