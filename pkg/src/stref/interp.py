"""Tree-walking evaluator for parsed source units.

``run`` preprocesses declarations into a fresh :class:`Machine`, executes the
entry PROGRAM once and returns an :class:`Outcome`.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Optional, Union

from . import values as V
from .builtins import dispatch_builtin, is_builtin
from .errors import (
    ArityError,
    DomainError,
    EntryNotFound,
    LiteralError,
    NotInstantiated,
    RecursionDetected,
    RedeclarationError,
    SemanticError,
    STError,
    StepLimitExceeded,
    STTypeError,
    UnboundVariable,
    UnknownField,
    UnknownPOU,
)
from .machine import (
    UNDEF,
    Frame,
    FunBLambda,
    FunLambda,
    Location,
    Machine,
    PLambda,
    RunFunBLambda,
    TypeDescriptor,
)
from .syntax import ast as A
from .values import ANY_INT, ANY_REAL, ArrayType, EnumType, FBType, POUType, StringType, StructType, Value

# ---------------------------------------------------------------- outcomes


@dataclass(frozen=True)
class Success:
    snapshot: tuple[tuple[str, str, str], ...]
    kind = "success"


@dataclass(frozen=True)
class Abnormal:
    error_kind: str
    line: int
    message: str = ""
    kind = "abnormal"


@dataclass(frozen=True)
class Timeout:
    kind = "timeout"


Outcome = Union[Success, Abnormal, Timeout]

# statement completion signals
EXIT = "exit"
RETURN = "return"

ARITH = set(V.ARITH_OPS)
COMPARE = set(V.COMPARE_OPS)
# the step budget standing in for one nominal second of engine time
STEPS_PER_SECOND = 20_000
DEFAULT_TIMEOUT_S = 10.0
DEFAULT_FUEL = int(DEFAULT_TIMEOUT_S * STEPS_PER_SECOND)


def fuel_for(timeout_s: float) -> int:
    return max(1, int(timeout_s * STEPS_PER_SECOND))


def _const_int(v: Value, what: str) -> int:
    if not V.is_intlike(v.type):
        raise SemanticError(f"{what} must be an integer constant")
    return v.v


def _assigns_name(stmts: list, name: str) -> bool:
    for s in stmts:
        if isinstance(s, A.Assign) and isinstance(s.target, A.Name) and s.target.id == name:
            return True
        for attr in ("then", "else_", "body"):
            sub = getattr(s, attr, None)
            if sub and _assigns_name(sub, name):
                return True
        for _, body in getattr(s, "elifs", ()):
            if _assigns_name(body, name):
                return True
        for b in getattr(s, "blocks", ()):
            if _assigns_name(b.body, name):
                return True
    return False


class Interpreter:
    """Executes one source unit.  Subclasses may override the ``binary`` and
    ``locate`` hooks to model other engines."""

    def __init__(self, unit: A.SourceUnit, fuel: Optional[int] = DEFAULT_FUEL, timeout_s: Optional[float] = None):
        self.unit = unit
        self.m = Machine()
        self.fuel = fuel
        self.deadline = time.monotonic() + timeout_s if timeout_s else None
        self.steps = 0
        self.active: list[str] = []
        self._types: dict[int, V.STType] = {}
        self._literals: dict[tuple[str, str], Value] = {}
        self._assigns_result: dict[str, bool] = {}

    # ---------------------------------------------------------------- fuel

    def tick(self) -> None:
        self.steps += 1
        if self.fuel is not None and self.steps > self.fuel:
            raise StepLimitExceeded(f"step budget {self.fuel} exhausted")
        if self.deadline is not None and self.steps & 1023 == 0 and time.monotonic() > self.deadline:
            raise StepLimitExceeded("wall-clock budget exhausted")

    # ---------------------------------------------------------------- preprocessing

    def preprocess(self) -> None:
        m = self.m
        for d in self.unit.type_decls:
            if d.name in m.types or d.name in V.T or d.name in V.TYPE_ALIASES:
                raise RedeclarationError(f"type {d.name} is already declared", d.line)
            t = self._enum_type(d) if isinstance(d, A.EnumDecl) else self._struct_type(d)
            m.types[d.name] = t
            loc = m._fresh(POUType("TYPE"), Value(POUType("TYPE"), TypeDescriptor(d.name, t)))
            m.genv[d.name] = loc
            m.set_constant(loc)
        for pou in self.unit.pous:
            if pou.name in m.genv or is_builtin(pou.name):
                raise RedeclarationError(f"{pou.name} is already declared", pou.line)
            if isinstance(pou, A.FunctionDecl):
                desc = FunLambda(pou.name, None, pou)
            elif isinstance(pou, A.FunctionBlockDecl):
                desc = FunBLambda(pou.name, pou)
            else:
                desc = PLambda(pou.name, pou)
            t = POUType(pou.kind)
            loc = m._fresh(t, Value(t, desc))
            m.genv[pou.name] = loc
            m.set_constant(loc)
        # resolve every declared type now so unknown names fail before execution
        for pou in self.unit.pous:
            if isinstance(pou, A.FunctionDecl):
                rt = self.resolve_type(pou.return_type, pou.line)
                loc = m.genv[pou.name]
                m.store[loc] = Value(m.store[loc].type, FunLambda(pou.name, rt, pou))
            seen: set[str] = set()
            for sec in pou.sections:
                for e in sec.entries:
                    self._check_names(e.type, e.line)
                    if sec.kind == "VAR_GLOBAL":
                        continue
                    for name in e.names:
                        if name in seen:
                            raise RedeclarationError(f"{name} is already declared in {pou.name}", e.line)
                        seen.add(name)
        globals_ = [(sec, None) for sec in self.unit.globals]
        globals_ += [(sec, p) for p in self.unit.pous for sec in p.sections if sec.kind == "VAR_GLOBAL"]
        for sec, _ in globals_:
            for e in sec.entries:
                t = self.type_of(e)
                for name in e.names:
                    try:
                        init = self.initial_value(t, e.init)
                        m.register_global(name, t, init, sec.constant)
                    except STError as exc:
                        if exc.line is None:
                            exc.line = e.line
                        raise

    def _enum_type(self, d: A.EnumDecl) -> EnumType:
        members: list[tuple[str, int]] = []
        nxt = 0
        for name, expr in d.members:
            if any(name == m for m, _ in members):
                raise RedeclarationError(f"enumeration member {name} repeated in {d.name}", d.line)
            if expr is not None:
                nxt = _const_int(self.eval(expr), f"value of {d.name}.{name}")
            members.append((name, nxt))
            nxt += 1
        if d.default is not None and all(d.default != m for m, _ in members):
            raise SemanticError(f"default {d.default} is not a member of {d.name}", d.line)
        t = EnumType(d.name, tuple(members), d.default)
        for name, _ in members:
            self.m.enum_members.setdefault(name, []).append(t)
        return t

    def _struct_type(self, d: A.StructDecl) -> StructType:
        fields = []
        for e in d.entries:
            ft = self.resolve_type(e.type, e.line)
            for name in e.names:
                if any(name == f for f, _, _ in fields):
                    raise RedeclarationError(f"field {name} repeated in {d.name}", e.line)
                fields.append((name, ft, e.init))
        return StructType(d.name, tuple(fields))

    def _check_names(self, te: A.TypeExpr, line: int) -> None:
        # array bounds may name constants that only exist once the POU runs
        if isinstance(te, A.ArrayTypeExpr):
            self._check_names(te.element, line)
        elif isinstance(te, A.NamedType):
            self.resolve_type(te, line)

    def type_of(self, entry: A.VarEntry) -> V.STType:
        key = id(entry)
        if key not in self._types:
            self._types[key] = self.resolve_type(entry.type, entry.line)
        return self._types[key]

    def resolve_type(self, te: A.TypeExpr, line: int = 0) -> V.STType:
        try:
            return self._resolve_type(te)
        except STError as exc:
            if exc.line is None:
                exc.line = line
            raise

    def _resolve_type(self, te: A.TypeExpr) -> V.STType:
        if isinstance(te, A.NamedType):
            if te.name in V.T:
                return V.T[te.name]
            if te.name in self.m.types:
                return self.m.types[te.name]
            loc = self.m.genv.get(te.name)
            if loc is not None and isinstance(self.m.store[loc].v, FunBLambda):
                return FBType(te.name)
            raise SemanticError(f"unknown type {te.name}")
        if isinstance(te, A.StringTypeExpr):
            n = 80 if te.length is None else _const_int(self.eval(te.length), "string length")
            if n < 1:
                raise SemanticError(f"string length {n} must be positive")
            return StringType(te.wide, n)
        ranges = []
        for lo_e, hi_e in te.ranges:
            lo = _const_int(self.eval(lo_e), "array bound")
            hi = _const_int(self.eval(hi_e), "array bound")
            if lo > hi:
                raise SemanticError(f"empty array range {lo}..{hi}")
            ranges.append((lo, hi))
        elem = self._resolve_type(te.element)
        if isinstance(elem, (EnumType, StructType, FBType, ArrayType)):
            raise SemanticError(f"arrays of {V.render_type(elem)} are not supported")
        return ArrayType(tuple(ranges), elem)

    # ---------------------------------------------------------------- initial values

    def initial_value(self, t: V.STType, init: Optional[A.Expr]) -> Optional[Value]:
        """Detached initial value for a declaration, or None for the plain default."""
        if isinstance(t, StructType):
            fields = init.fields if isinstance(init, A.StructInit) else None
            if init is not None and fields is None:
                return V.limit_assign(self.eval(init), t)
            return self.instantiate_struct(t, fields or [])
        if init is None:
            return None
        if isinstance(t, ArrayType):
            if not isinstance(init, A.ArrayInit):
                return self.eval(init)
            items: list[Value] = []
            for item, rep in zip(init.items, init.repeats):
                n = 1 if rep is None else _const_int(self.eval(rep), "repeat count")
                v = V.limit_assign(self.eval(item), t.element)
                items.extend([v] * n)
            if len(items) > t.size:
                raise SemanticError(f"{len(items)} initializers for {t.size} elements")
            items += [V.default_value(t.element)] * (t.size - len(items))
            return Value(t, items)
        if isinstance(init, (A.ArrayInit, A.StructInit)):
            raise SemanticError(f"aggregate initializer for {V.render_type(t)}")
        if isinstance(t, FBType):
            raise SemanticError("function block instances take no initializer")
        return self.eval(init)

    def instantiate_struct(self, t: StructType, inits: list[tuple[str, A.Expr]]) -> Value:
        fields = {}
        for f, ft, fi in t.fields:
            v = self.initial_value(ft, fi)
            fields[f] = V.default_value(ft) if v is None else V.limit_assign(v, ft)
        for f, e in inits:
            ft = t.field_type(f)
            if ft is None:
                raise UnknownField(f"{t.name} has no field {f}")
            fields[f] = V.limit_assign(self.initial_value(ft, e), ft)
        return Value(t, fields)

    # ---------------------------------------------------------------- expressions

    def literal(self, e: A.Literal) -> Value:
        key = (e.kind, e.text)
        v = self._literals.get(key)
        if v is None:
            v = self._literal(e)
            self._literals[key] = v
        return v

    def _literal(self, e: A.Literal) -> Value:
        text = e.text
        if e.kind == "int":
            return Value(ANY_INT, int(text.replace("_", "")))
        if e.kind == "real":
            return Value(ANY_REAL, float(text.replace("_", "")))
        if e.kind == "bool":
            return V.make_bool(text == "TRUE")
        if e.kind in ("string", "wstring"):
            s = V.unescape_string(text[1:-1])
            return Value(StringType(e.kind == "wstring", max(80, len(s))), s)
        prefix, _, member = text.partition("#")
        t = self.m.types.get(prefix)
        if isinstance(t, EnumType):
            try:
                return Value(t, (member, t.ordinal(member)))
            except KeyError:
                raise LiteralError(f"{member} is not a member of {prefix}") from None
        return V.parse_typed_literal(text)

    def eval(self, e: A.Expr) -> Value:
        return self._eval_dispatch[type(e)](self, e)

    def _eval_unary(self, e: A.UnaryOp) -> Value:
        v = self.eval(e.operand)
        return V.negate(v) if e.op == "-" else V.logic_not(v)

    def _eval_call(self, e: A.Call) -> Value:
        v = self.call(e)
        if v is None:
            raise STTypeError("function block call used as a value")
        return v

    def _eval_aggregate(self, e) -> Value:
        raise SemanticError("aggregate initializer used as an expression")

    def name_value(self, ident: str) -> Value:
        loc = self.m.env.get(ident, UNDEF)
        if loc is not UNDEF:
            return self.m.read(loc)
        enums = self.m.enum_members.get(ident)
        if enums:
            if len(enums) > 1:
                raise SemanticError(f"{ident} is ambiguous between {', '.join(t.name for t in enums)}")
            return Value(enums[0], (ident, enums[0].ordinal(ident)))
        if ident in self.m.genv:
            raise STTypeError(f"{ident} is not a variable")
        raise UnboundVariable(f"{ident} is not declared")

    def binop(self, e: A.BinOp) -> Value:
        op = e.op
        a = self.eval(e.lhs)
        if op in ("AND_THEN", "OR_ELSE") and a.type is V.BOOL:
            if a.v == (op == "OR_ELSE"):
                return a
        b = self.eval(e.rhs)
        if op in ARITH:
            return self.binary(op, a, b, e)
        if op in COMPARE:
            return V.compare(op, a, b)
        return V.logic(op, a, b)

    def binary(self, op: str, a: Value, b: Value, node: A.BinOp) -> Value:
        return V.arith(op, a, b)

    def path(self, e: A.Expr) -> tuple:
        if isinstance(e, A.Name):
            return (e.id,)
        if isinstance(e, A.Member):
            return self.path(e.base) + (("field", e.field),)
        if isinstance(e, A.Index):
            base = self.path(e.base)
            subs = []
            for i in e.indices:
                v = self.eval(i)
                if not V.is_intlike(v.type):
                    raise STTypeError(f"array subscript of type {V.render_type(v.type)}")
                subs.append(v.v)
            return base + (("index", subs),)
        if isinstance(e, A.Paren):
            return self.path(e.inner)
        raise SemanticError("expression is not assignable")

    def locate(self, e: A.Expr) -> Location:
        p = self.path(e)
        if p[0] not in self.m.env or self.m.env[p[0]] is UNDEF:
            if self.m.enum_members.get(p[0]) and len(p) == 1:
                raise SemanticError(f"enumeration member {p[0]} is not assignable")
        return self.m.find_index(p)

    # ---------------------------------------------------------------- calls

    def call(self, e: A.Call) -> Optional[Value]:
        callee = e.callee
        if isinstance(callee, A.Name):
            name = callee.id
            loc = self.m.env.get(name, UNDEF)
            # inside F the name F is its result variable, but F(...) is still a call
            if loc is not UNDEF and not (name in self.m.genv and self._is_result_var(name)):
                if isinstance(self.m.store[loc].type, FBType):
                    self.call_block(loc, e.args)
                    return None
                raise STTypeError(f"{name} is not callable")
            gloc = self.m.genv.get(name)
            if gloc is not None:
                desc = self.m.store[gloc].v
                if isinstance(desc, FunLambda):
                    return self.call_function(desc, e.args)
                if isinstance(desc, FunBLambda):
                    raise NotInstantiated(f"{name} is a function block type; call an instance")
                if isinstance(desc, PLambda):
                    self.call_block(gloc, e.args)
                    return None
                raise STTypeError(f"{name} is not callable")
            if is_builtin(name):
                return dispatch_builtin(name, [self.eval(a.value) for a in e.args])
            raise UnknownPOU(f"no function, block or program named {name}")
        loc = self.locate(callee)
        if not isinstance(self.m.store[loc].type, FBType):
            raise STTypeError("call of a non-block value")
        self.call_block(loc, e.args)
        return None

    def _is_result_var(self, name: str) -> bool:
        return bool(self.m.fstack) and self.m.fstack[-1].pou == name

    def _params(self, decl) -> list[tuple[str, str, A.VarEntry]]:
        return [
            (name, sec.kind, entry)
            for sec in decl.sections
            if sec.kind in ("VAR_INPUT", "VAR_IN_OUT")
            for entry in sec.entries
            for name in entry.names
        ]

    def bind_args(self, decl, args: list[A.Arg]) -> dict[str, Union[Value, Location]]:
        """Evaluate call arguments in the caller's scope."""
        params = self._params(decl)
        by_name = {p[0]: p for p in params}
        bound: dict[str, Union[Value, Location]] = {}
        positional = True
        for i, a in enumerate(args):
            if a.name is None:
                if not positional:
                    raise ArityError("positional argument after named argument")
                if i >= len(params):
                    raise ArityError(f"{decl.name} takes {len(params)} argument(s), got {len(args)}")
                name, kind, entry = params[i]
            else:
                positional = False
                if a.name not in by_name:
                    raise ArityError(f"{decl.name} has no input {a.name}")
                name, kind, entry = by_name[a.name]
            if name in bound:
                raise ArityError(f"argument {name} given twice")
            t = self.type_of(entry)
            if kind == "VAR_IN_OUT":
                loc = self.locate(a.value)
                if self.m.type_map[loc] != t:
                    raise STTypeError(f"VAR_IN_OUT {name} needs a {V.render_type(t)} variable")
                bound[name] = loc
            else:
                bound[name] = V.limit_assign(self.eval(a.value), t)
        return bound

    def _enter(self, name: str) -> None:
        if name in self.active:
            raise RecursionDetected(f"recursive call of {name}")
        self.active.append(name)
        m = self.m
        m.push_frame(Frame(name, m.env, m.allenv, m.loop_depth))
        m.allenv = dict(m.env)
        m.env = {}
        m.loop_depth = 0

    def _leave(self) -> None:
        self.m.pop_frame()
        self.active.pop()

    def declare(self, decl, bound: dict, missing_in_out_ok: bool = False) -> set[str]:
        """Allocate every section of ``decl`` into the current env; return alias names."""
        m = self.m
        aliases: set[str] = set()
        for sec in decl.sections:
            for entry in sec.entries:
                t = self.type_of(entry)
                for name in entry.names:
                    try:
                        if sec.kind in ("VAR_GLOBAL", "VAR_EXTERNAL"):
                            gloc = m.gvenv.get(name)
                            if gloc is None:
                                raise UnboundVariable(f"no global variable {name}")
                            if m.type_map[gloc] != t:
                                raise STTypeError(f"external {name} declared with a different type")
                            if name in m.env and m.env[name] is not UNDEF:
                                raise RedeclarationError(f"{name} is already declared")
                            m.env[name] = gloc
                            aliases.add(name)
                        elif sec.kind == "VAR_IN_OUT" and name in bound:
                            if name in m.env and m.env[name] is not UNDEF:
                                raise RedeclarationError(f"{name} is already declared")
                            m.env[name] = bound[name]
                            aliases.add(name)
                        elif sec.kind == "VAR_IN_OUT" and not missing_in_out_ok:
                            raise ArityError(f"VAR_IN_OUT {name} of {decl.name} is not bound")
                        else:
                            if sec.kind == "VAR_INPUT" and name in bound:
                                init = bound[name]
                            elif sec.kind == "VAR_INPUT" and decl is self._entry_decl and m.input_queue:
                                init = V.limit_assign(m.input_queue.pop(0), t)
                            else:
                                init = self.initial_value(t, entry.init)
                            loc = m.allocate(name, t, init)
                            if sec.constant:
                                m.set_constant(loc)
                    except STError as exc:
                        if exc.line is None:
                            exc.line = entry.line
                        raise
        return aliases

    _entry_decl = None

    def call_function(self, desc: FunLambda, args: list[A.Arg]) -> Value:
        decl = desc.decl
        bound = self.bind_args(decl, args)
        self._enter(decl.name)
        try:
            self.m.allocate(decl.name, desc.return_type, self.initial_value(desc.return_type, None))
            self.declare(decl, bound)
            self.exec_block(decl.body)
            if not self._assigns_result.setdefault(decl.name, _assigns_name(decl.body, decl.name)):
                self.m.diagnostics.append(f"function {decl.name} never assigns its result")
            result = self.m.read(self.m.env[decl.name])
            self.m.clearenv(decl.name)
        finally:
            self._leave()
        return result

    def call_block(self, loc: Location, args: list[A.Arg]) -> None:
        """Invoke an FB instance or a PROGRAM stored at ``loc``."""
        inst = self.m.store[loc].v
        decl = inst.decl
        bound = self.bind_args(decl, args)
        self._enter(decl.name)
        try:
            self.activate(loc, inst, bound)
        finally:
            self._leave()

    def activate(self, loc: Location, inst: Union[RunFunBLambda, PLambda], bound: dict) -> None:
        m = self.m
        decl = inst.decl
        if not inst.saved_env:
            aliases = self.declare(decl, bound, missing_in_out_ok=decl is self._entry_decl)
            m.update(loc, {n: l for n, l in m.env.items() if n not in aliases})
        else:
            m.env = dict(inst.saved_env)
            for sec in decl.sections:
                for entry in sec.entries:
                    for name in entry.names:
                        if sec.kind in ("VAR_GLOBAL", "VAR_EXTERNAL"):
                            m.env[name] = m.gvenv[name]
                        elif sec.kind == "VAR_IN_OUT":
                            if name not in bound:
                                raise ArityError(f"VAR_IN_OUT {name} of {decl.name} is not bound")
                            m.env[name] = bound[name]
                        elif sec.kind == "VAR_INPUT" and name in bound:
                            m.assign(m.env[name], bound[name])
                        elif sec.kind == "VAR_TEMP":
                            t = self.type_of(entry)
                            init = self.initial_value(t, entry.init)
                            m.assign(m.env[name], init if init is not None else V.default_value(t))
        self.exec_block(decl.body)

    # ---------------------------------------------------------------- statements

    def exec_block(self, stmts: list) -> Optional[str]:
        for s in stmts:
            sig = self.exec(s)
            if sig is not None:
                return sig
        return None

    def exec(self, s) -> Optional[str]:
        self.tick()
        try:
            return self._exec_dispatch[type(s)](self, s)
        except STError as exc:
            if exc.line is None:
                exc.line = s.line
            raise

    def _cond(self, e: A.Expr) -> bool:
        v = self.eval(e)
        if v.type is not V.BOOL:
            raise STTypeError(f"condition of type {V.render_type(v.type)}")
        return v.v

    def _exec_assign(self, s: A.Assign) -> None:
        loc = self.locate(s.target)
        self.m.assign(loc, self.eval(s.value))

    def _exec_expr(self, s: A.ExprStmt) -> None:
        if not isinstance(s.expr, A.Call):
            raise SemanticError("expression statement must be a call")
        self.call(s.expr)

    def _exec_if(self, s: A.If) -> Optional[str]:
        if self._cond(s.cond):
            return self.exec_block(s.then)
        for cond, body in s.elifs:
            if self._cond(cond):
                return self.exec_block(body)
        return self.exec_block(s.else_) if s.else_ is not None else None

    def _exec_while(self, s: A.While) -> Optional[str]:
        return self._loop(lambda: self._cond(s.cond), s.body, None)

    def _exec_exit(self, s: A.Exit) -> str:
        if self.m.loop_depth == 0:
            raise SemanticError("EXIT outside of a loop")
        return EXIT

    def _case_value(self, v: Value) -> int:
        if isinstance(v.type, EnumType):
            return v.v[1]
        if V.is_intlike(v.type):
            return v.v
        raise STTypeError(f"CASE selector of type {V.render_type(v.type)}")

    def exec_case(self, s: A.Case) -> Optional[str]:
        sel = self.eval(s.selector)
        key = self._case_value(sel)
        for block in s.blocks:
            for lab in block.labels:
                lo = self.eval(lab.lo)
                if isinstance(sel.type, EnumType) and isinstance(lo.type, EnumType) and lo.type != sel.type:
                    raise STTypeError(f"CASE label of type {lo.type.name} for {sel.type.name} selector")
                lo_k = self._case_value(lo)
                hi_k = lo_k if lab.hi is None else self._case_value(self.eval(lab.hi))
                if lo_k <= key <= hi_k:
                    return self.exec_block(block.body)
        return self.exec_block(s.else_) if s.else_ is not None else None

    def _loop(self, test, body: list, after) -> Optional[str]:
        m = self.m
        m.loop_depth += 1
        try:
            while test():
                sig = self.exec_block(body)
                if sig == EXIT:
                    break
                if sig == RETURN:
                    return RETURN
                if after is not None:
                    after()
                self.tick()
        finally:
            m.loop_depth -= 1
        return None

    def exec_repeat(self, s: A.Repeat) -> Optional[str]:
        first = [True]

        def test() -> bool:
            if first[0]:
                first[0] = False
                return True
            return not self._cond(s.cond)

        return self._loop(test, s.body, None)

    def exec_for(self, s: A.For) -> Optional[str]:
        m = self.m
        loc = self.locate(s.var)
        if not V.is_int(m.type_map[loc]):
            raise STTypeError(f"FOR variable {s.var.id} must be an integer")
        m.assign(loc, self.eval(s.start))
        stop = self.eval(s.stop)
        step = self.eval(s.step) if s.step is not None else Value(ANY_INT, 1)
        for v, what in ((stop, "FOR bound"), (step, "FOR step")):
            if not V.is_intlike(v.type):
                raise STTypeError(f"{what} must be an integer")
        if step.v == 0:
            raise DomainError("FOR step is zero")
        op = "<=" if step.v > 0 else ">="

        def test() -> bool:
            return V.compare(op, m.read(loc), stop).v

        def advance() -> None:
            m.assign(loc, V.arith("+", m.read(loc), step))

        return self._loop(test, s.body, advance)

    _eval_dispatch = {
        A.Literal: literal,
        A.Name: lambda self, e: self.name_value(e.id),
        A.BinOp: binop,
        A.UnaryOp: _eval_unary,
        A.Paren: lambda self, e: self.eval(e.inner),
        A.Call: _eval_call,
        A.Member: lambda self, e: self.m.read(self.locate(e)),
        A.Index: lambda self, e: self.m.read(self.locate(e)),
        A.ArrayInit: _eval_aggregate,
        A.StructInit: _eval_aggregate,
    }
    _exec_dispatch = {
        A.Assign: _exec_assign,
        A.ExprStmt: _exec_expr,
        A.If: _exec_if,
        A.Case: exec_case,
        A.While: _exec_while,
        A.Repeat: exec_repeat,
        A.For: exec_for,
        A.Return: lambda self, s: RETURN,
        A.Exit: _exec_exit,
    }

    # ---------------------------------------------------------------- entry point

    def run(self, entry: str = "MAIN") -> Outcome:
        """Execute ``entry`` once.  Raises EntryNotFound for a missing PROGRAM."""
        m = self.m
        try:
            self.preprocess()
        except STError as exc:
            return Abnormal(exc.kind, exc.line or 0, exc.message)
        except StepLimitExceeded:
            return Timeout()
        loc = m.genv.get(entry)
        if loc is None or not isinstance(m.store[loc].v, PLambda):
            raise EntryNotFound(f"no PROGRAM named {entry}")
        inst = m.store[loc].v
        self._entry_decl = inst.decl
        self.active.append(entry)
        try:
            self.activate(loc, inst, {})
        except STError as exc:
            return Abnormal(exc.kind, exc.line or 0, exc.message)
        except StepLimitExceeded:
            return Timeout()
        except RecursionError:
            return Abnormal("RecursionError", 0, "nesting too deep")
        return Success(tuple(m.snapshot(entry)))


def run(
    unit: A.SourceUnit,
    entry: str = "MAIN",
    fuel: Optional[int] = DEFAULT_FUEL,
    timeout_s: Optional[float] = None,
    engine: type = Interpreter,
) -> Outcome:
    return engine(unit, fuel=fuel, timeout_s=timeout_s).run(entry)


def run_source(source: str, entry: str = "MAIN", **kw) -> Outcome:
    """Parse and run; lexical and syntax errors come back as Abnormal outcomes."""
    from .syntax import parse_source

    try:
        unit = parse_source(source)
    except STError as exc:
        return Abnormal(exc.kind, exc.line or 0, exc.message)
    return run(unit, entry, **kw)


def outcome_text(o: Outcome) -> str:
    """Wire form of an outcome: snapshot lines, an ERROR marker or TIMEOUT."""
    if isinstance(o, Success):
        return "".join(f"{q} : {t} = {v}\n" for q, t, v in o.snapshot)
    if isinstance(o, Abnormal):
        return f"ERROR line={o.line} kind={o.error_kind}\n"
    return "TIMEOUT\n"
