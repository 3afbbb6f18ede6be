"""Recursive-descent parser producing :mod:`stref.syntax.ast` nodes."""

from __future__ import annotations

from ..errors import ParseError, UnsupportedFeature
from . import ast as A
from .lexer import Token, tokenize

ELEMENTARY_KEYWORDS = {
    "SINT", "INT", "DINT", "LINT", "USINT", "UINT", "UDINT", "ULINT", "REAL", "LREAL",
    "BOOL", "BYTE", "WORD", "DWORD", "TIME", "DATE", "TIME_OF_DAY", "DATE_AND_TIME",
}
TYPE_ALIASES = {"TOD": "TIME_OF_DAY", "DT": "DATE_AND_TIME"}
VAR_KINDS = ("VAR", "VAR_INPUT", "VAR_OUTPUT", "VAR_IN_OUT", "VAR_TEMP", "VAR_GLOBAL", "VAR_EXTERNAL")
STMT_STOP = {
    "END_IF", "ELSIF", "ELSE_IF", "ELSE", "END_CASE", "END_WHILE", "END_FOR", "UNTIL",
    "END_REPEAT", "END_FUNCTION", "END_FUNCTION_BLOCK", "END_PROGRAM",
}

# Binary precedence levels, loosest first.
LEVELS = (
    ("OR", "OR_ELSE"),
    ("XOR",),
    ("AND", "&", "AND_THEN"),
    ("<", ">", "<=", ">=", "=", "<>"),
    ("+", "-"),
    ("*", "/", "MOD"),
    ("**",),
)
# Keyword spellings that double as standard function names, e.g. AND(a, b).
CALLABLE_KEYWORDS = {"AND", "OR", "XOR", "MOD"}


class Parser:
    def __init__(self, tokens: list[Token]):
        self.toks = tokens
        self.pos = 0

    # ---------------------------------------------------------------- helpers

    @property
    def tok(self) -> Token:
        return self.toks[self.pos]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.pos + k, len(self.toks) - 1)]

    def at(self, *texts: str) -> bool:
        t = self.tok
        return t.kind != "string" and t.kind != "wstring" and t.text in texts

    def next(self) -> Token:
        t = self.tok
        if t.kind != "eof":
            self.pos += 1
        return t

    def error(self, expected: str) -> ParseError:
        t = self.tok
        return ParseError(t.line, t.column, expected, t.text or "<eof>")

    def expect(self, text: str) -> Token:
        if not self.at(text):
            if self.at("=>"):
                raise UnsupportedFeature(self.tok.line, self.tok.column, "'=>' output assignment")
            raise self.error(repr(text))
        return self.next()

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.next()
            return True
        return False

    def ident(self) -> str:
        if self.tok.kind != "identifier":
            raise self.error("identifier")
        return self.next().text

    # ---------------------------------------------------------------- units

    def source_unit(self) -> A.SourceUnit:
        unit = A.SourceUnit([], [], [])
        while self.tok.kind != "eof":
            if self.at("TYPE"):
                unit.type_decls.extend(self.type_block())
            elif self.at("FUNCTION"):
                unit.pous.append(self.function())
            elif self.at("FUNCTION_BLOCK"):
                unit.pous.append(self.function_block())
            elif self.at("PROGRAM"):
                unit.pous.append(self.program())
            elif self.at("VAR_GLOBAL"):
                unit.globals.append(self.var_section())
            else:
                raise self.error("TYPE, FUNCTION, FUNCTION_BLOCK, PROGRAM or VAR_GLOBAL")
        return unit

    def type_block(self) -> list:
        self.expect("TYPE")
        decls = []
        while not self.at("END_TYPE"):
            line = self.tok.line
            name = self.ident()
            self.expect(":")
            if self.accept("STRUCT"):
                entries = []
                while not self.at("END_STRUCT"):
                    entries.append(self.var_entry())
                self.expect("END_STRUCT")
                self.accept(";")
                decls.append(A.StructDecl(name, entries, line=line))
            elif self.accept("("):
                members = []
                while True:
                    m = self.ident()
                    val = self.expression() if self.accept(":=") else None
                    members.append((m, val))
                    if not self.accept(","):
                        break
                self.expect(")")
                default = self.ident() if self.accept(":=") else None
                self.expect(";")
                decls.append(A.EnumDecl(name, members, default, line=line))
            else:
                raise self.error("STRUCT or '(' enumeration")
        self.expect("END_TYPE")
        return decls

    def function(self) -> A.FunctionDecl:
        line = self.expect("FUNCTION").line
        name = self.ident()
        self.expect(":")
        rtype = self.type_expr()
        sections = self.sections()
        body = self.statements()
        self.expect("END_FUNCTION")
        return A.FunctionDecl(name, rtype, sections, body, line=line)

    def function_block(self) -> A.FunctionBlockDecl:
        line = self.expect("FUNCTION_BLOCK").line
        name = self.ident()
        sections = self.sections()
        body = self.statements()
        if not self.accept("END_FUNCTION_BLOCK"):
            self.expect("END_FUNCTION")
        return A.FunctionBlockDecl(name, sections, body, line=line)

    def program(self) -> A.ProgramDecl:
        line = self.expect("PROGRAM").line
        name = self.ident()
        sections = self.sections()
        body = self.statements()
        self.expect("END_PROGRAM")
        return A.ProgramDecl(name, sections, body, line=line)

    # ---------------------------------------------------------------- declarations

    def sections(self) -> list[A.VarSection]:
        out = []
        while self.at(*VAR_KINDS):
            out.append(self.var_section())
        return out

    def var_section(self) -> A.VarSection:
        tok = self.next()
        constant = False
        while self.at("CONSTANT", "RETAIN", "PERSISTENT"):
            q = self.next()
            if q.text != "CONSTANT":
                raise UnsupportedFeature(q.line, q.column, q.text)
            constant = True
        entries = []
        while not self.at("END_VAR"):
            entries.append(self.var_entry())
        self.expect("END_VAR")
        return A.VarSection(tok.text, constant, entries, line=tok.line)

    def var_entry(self) -> A.VarEntry:
        line = self.tok.line
        names = [self.ident()]
        while self.accept(","):
            names.append(self.ident())
        if self.at("AT"):
            raise UnsupportedFeature(self.tok.line, self.tok.column, "AT")
        self.expect(":")
        t = self.type_expr()
        init = self.initializer() if self.accept(":=") else None
        self.expect(";")
        return A.VarEntry(names, t, init, line=line)

    def initializer(self) -> A.Expr:
        line = self.tok.line
        if self.at("["):
            self.next()
            items, repeats = [], []
            while True:
                if self.tok.kind == "int" and self.peek().text == "(":
                    count = A.Literal("int", self.next().text, line=self.tok.line)
                    self.expect("(")
                    items.append(self.initializer())
                    self.expect(")")
                    repeats.append(count)
                else:
                    items.append(self.initializer())
                    repeats.append(None)
                if not self.accept(","):
                    break
            self.expect("]")
            return A.ArrayInit(items, repeats, line=line)
        if self.at("(") and self.peek().kind == "identifier" and self.peek(2).text == ":=":
            self.next()
            fields = []
            while True:
                f = self.ident()
                self.expect(":=")
                fields.append((f, self.initializer()))
                if not self.accept(","):
                    break
            self.expect(")")
            return A.StructInit(fields, line=line)
        return self.expression()

    def type_expr(self) -> A.TypeExpr:
        t = self.tok
        if t.kind == "keyword" and (t.text in ELEMENTARY_KEYWORDS or t.text in TYPE_ALIASES):
            self.next()
            return A.NamedType(TYPE_ALIASES.get(t.text, t.text))
        if self.at("STRING", "WSTRING"):
            self.next()
            length = None
            if self.accept("["):
                length = self.expression()
                self.expect("]")
            elif self.at("("):
                self.next()
                length = self.expression()
                self.expect(")")
            return A.StringTypeExpr(t.text == "WSTRING", length)
        if self.accept("ARRAY"):
            self.expect("[")
            ranges = []
            while True:
                lo = self.expression()
                self.expect("..")
                hi = self.expression()
                ranges.append((lo, hi))
                if not self.accept(","):
                    break
            self.expect("]")
            self.expect("OF")
            return A.ArrayTypeExpr(ranges, self.type_expr())
        if t.kind == "identifier":
            self.next()
            return A.NamedType(t.text)
        raise self.error("type")

    # ---------------------------------------------------------------- statements

    def statements(self, case_body: bool = False) -> list[A.Statement]:
        out: list[A.Statement] = []
        while self.tok.kind != "eof" and not (self.tok.kind == "keyword" and self.tok.text in STMT_STOP):
            if case_body and self._looks_like_label():
                break
            if self.accept(";"):
                continue
            out.append(self.statement())
        return out

    def _looks_like_label(self) -> bool:
        save = self.pos
        try:
            self.case_labels()
            return self.at(":")
        except ParseError:
            return False
        finally:
            self.pos = save

    def statement(self) -> A.Statement:
        t = self.tok
        line = t.line
        if t.kind == "keyword":
            kw = t.text
            if kw == "IF":
                return self.if_stmt()
            if kw == "CASE":
                return self.case_stmt()
            if kw == "WHILE":
                self.next()
                cond = self.expression()
                self.expect("DO")
                body = self.statements()
                self.expect("END_WHILE")
                self.accept(";")
                return A.While(cond, body, line=line)
            if kw == "FOR":
                self.next()
                var = A.Name(self.ident(), line=line)
                self.expect(":=")
                start = self.expression()
                self.expect("TO")
                stop = self.expression()
                step = self.expression() if self.accept("BY") else None
                self.expect("DO")
                body = self.statements()
                self.expect("END_FOR")
                self.accept(";")
                return A.For(var, start, stop, step, body, line=line)
            if kw == "REPEAT":
                self.next()
                body = self.statements()
                self.expect("UNTIL")
                cond = self.expression()
                self.expect("END_REPEAT")
                self.accept(";")
                return A.Repeat(body, cond, line=line)
            if kw == "RETURN":
                self.next()
                self.expect(";")
                return A.Return(line=line)
            if kw == "EXIT":
                self.next()
                self.expect(";")
                return A.Exit(line=line)
        expr = self.expression()
        if self.accept(":="):
            value = self.expression()
            self.expect(";")
            return A.Assign(expr, value, line=line)
        if self.at("=>"):
            raise UnsupportedFeature(self.tok.line, self.tok.column, "'=>' output assignment")
        self.expect(";")
        return A.ExprStmt(expr, line=line)

    def if_stmt(self) -> A.If:
        line = self.expect("IF").line
        cond = self.expression()
        self.expect("THEN")
        then = self.statements()
        elifs = []
        else_ = None
        while self.at("ELSIF", "ELSE_IF"):
            self.next()
            c = self.expression()
            self.expect("THEN")
            elifs.append((c, self.statements()))
        if self.accept("ELSE"):
            else_ = self.statements()
        self.expect("END_IF")
        self.accept(";")
        return A.If(cond, then, elifs, else_, line=line)

    def case_labels(self) -> list[A.CaseLabel]:
        labels = []
        while True:
            lo = self.expression()
            hi = self.expression() if self.accept("..") else None
            labels.append(A.CaseLabel(lo, hi))
            if not self.accept(","):
                return labels

    def case_stmt(self) -> A.Case:
        line = self.expect("CASE").line
        selector = self.expression()
        self.expect("OF")
        blocks = []
        while not self.at("ELSE", "END_CASE"):
            bline = self.tok.line
            labels = self.case_labels()
            self.expect(":")
            blocks.append(A.CaseBlock(labels, self.statements(case_body=True), line=bline))
        else_ = self.statements() if self.accept("ELSE") else None
        self.expect("END_CASE")
        self.accept(";")
        return A.Case(selector, blocks, else_, line=line)

    # ---------------------------------------------------------------- expressions

    def expression(self, level: int = 0) -> A.Expr:
        if level == len(LEVELS):
            return self.unary()
        ops = LEVELS[level]
        lhs = self.expression(level + 1)
        while self.tok.kind in ("keyword", "operator") and self.tok.text in ops:
            op = self.next().text
            rhs = self.expression(level + 1)
            lhs = A.BinOp(op, lhs, rhs, line=lhs.line)
        return lhs

    def unary(self) -> A.Expr:
        t = self.tok
        if t.kind == "operator" and t.text == "-":
            self.next()
            return A.UnaryOp("-", self.unary(), line=t.line)
        if t.kind == "operator" and t.text == "+":
            self.next()
            return self.unary()
        if t.kind == "keyword" and t.text == "NOT":
            self.next()
            return A.UnaryOp("NOT", self.unary(), line=t.line)
        return self.postfix()

    def postfix(self) -> A.Expr:
        e = self.primary()
        while True:
            if self.at("("):
                line = e.line
                self.next()
                args: list[A.Arg] = []
                if not self.at(")"):
                    while True:
                        args.append(self.argument())
                        if not self.accept(","):
                            break
                self.expect(")")
                e = A.Call(e, args, line=line)
            elif self.at("["):
                self.next()
                idx = [self.expression()]
                while self.accept(","):
                    idx.append(self.expression())
                self.expect("]")
                e = A.Index(e, idx, line=e.line)
            elif self.at(".") and self.peek().kind == "identifier":
                self.next()
                e = A.Member(e, self.ident(), line=e.line)
            else:
                return e

    def argument(self) -> A.Arg:
        if self.tok.kind == "identifier" and self.peek().text == ":=":
            name = self.next().text
            self.next()
            return A.Arg(name, self.expression())
        if self.tok.kind == "identifier" and self.peek().text == "=>":
            t = self.peek()
            raise UnsupportedFeature(t.line, t.column, "'=>' output assignment")
        return A.Arg(None, self.expression())

    def primary(self) -> A.Expr:
        t = self.tok
        line = t.line
        if t.kind == "int":
            self.next()
            return A.Literal("int", t.text, line=line)
        if t.kind == "float":
            self.next()
            return A.Literal("real", t.text, line=line)
        if t.kind in ("string", "wstring"):
            self.next()
            return A.Literal(t.kind, t.text, line=line)
        if t.kind == "typed":
            self.next()
            return A.Literal("typed", t.text, line=line)
        if t.kind == "keyword" and t.text in ("TRUE", "FALSE"):
            self.next()
            return A.Literal("bool", t.text, line=line)
        if t.kind == "identifier":
            self.next()
            return A.Name(t.text, line=line)
        if t.kind == "keyword" and t.text in CALLABLE_KEYWORDS and self.peek().text == "(":
            self.next()
            return A.Name(t.text, line=line)
        if self.at("("):
            self.next()
            inner = self.expression()
            self.expect(")")
            return A.Paren(inner, line=line)
        raise self.error("expression")


def parse_source(source: str) -> A.SourceUnit:
    p = Parser(tokenize(source))
    return p.source_unit()


def parse_expression(source: str) -> A.Expr:
    p = Parser(tokenize(source))
    e = p.expression()
    if p.tok.kind != "eof":
        raise p.error("end of expression")
    return e


def parse_statements(source: str) -> list[A.Statement]:
    p = Parser(tokenize(source))
    body = p.statements()
    if p.tok.kind != "eof":
        raise p.error("statement")
    return body
