"""Standard function library: numerical, logical, string and type-conversion functions."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

from . import values as V
from .errors import ArityError, DomainError, IndexOutOfRange, STTypeError
from .values import ANY_INT, StringType, Value


@dataclass(frozen=True)
class Builtin:
    name: str
    min_args: int
    max_args: Optional[int]  # None means variadic
    fn: Callable[..., Value]
    family: str


REGISTRY: dict[str, Builtin] = {}


def _register(name: str, min_args: int, max_args: Optional[int], family: str):
    def deco(fn):
        REGISTRY[name] = Builtin(name, min_args, max_args, fn, family)
        return fn

    return deco


def _one(n: int) -> Value:
    return Value(ANY_INT, n)


def _int_arg(v: Value, what: str) -> int:
    if not V.is_intlike(v.type):
        raise STTypeError(f"{what} must be an integer, got {V.render_type(v.type)}")
    return v.v


def _float_arg(v: Value) -> float:
    if not V.is_numeric(v.type):
        raise STTypeError(f"numeric argument expected, got {V.render_type(v.type)}")
    return float(v.v)


def _real_result(x: float, *args: Value) -> Value:
    # narrow to REAL only when every input was REAL
    if all(a.type.name == "REAL" for a in args):
        return V.make_real(x, V.T["REAL"])
    return V.make_real(x, V.T["LREAL"])


def _fold(op: Callable[[Value, Value], Value], args: tuple[Value, ...]) -> Value:
    acc = args[0]
    for a in args[1:]:
        acc = op(acc, a)
    return acc


# ---------------------------------------------------------------- numerical

for _name, _op in (("ADD", "+"), ("MUL", "*")):
    _register(_name, 2, None, "numerical")(lambda *a, _op=_op: _fold(lambda x, y: V.arith(_op, x, y), a))
for _name, _op in (("SUB", "-"), ("DIV", "/"), ("MOD", "MOD"), ("EXPT", "**")):
    _register(_name, 2, 2, "numerical")(lambda a, b, _op=_op: V.arith(_op, a, b))


@_register("SQR", 1, 1, "numerical")
def _sqr(x: Value) -> Value:
    return V.arith("*", x, x)


@_register("INC", 1, 1, "numerical")
def _inc(x: Value) -> Value:
    return V.arith("+", x, _one(1))


@_register("DEC", 1, 1, "numerical")
def _dec(x: Value) -> Value:
    return V.arith("-", x, _one(1))


@_register("MAX", 2, None, "numerical")
def _max(*args: Value) -> Value:
    return _fold(lambda a, b: b if V.compare(">", b, a).v else a, args)


@_register("MIN", 2, None, "numerical")
def _min(*args: Value) -> Value:
    return _fold(lambda a, b: b if V.compare("<", b, a).v else a, args)


@_register("MUX", 2, None, "numerical")
def _mux(k: Value, *choices: Value) -> Value:
    i = _int_arg(k, "MUX selector")
    if not 0 <= i < len(choices):
        raise DomainError(f"MUX selector {i} outside 0..{len(choices) - 1}")
    return choices[i]


@_register("LIMIT", 3, 3, "numerical")
def _limit(mn: Value, x: Value, mx: Value) -> Value:
    return _min(_max(x, mn), mx)


@_register("ABS", 1, 1, "numerical")
def _abs(x: Value) -> Value:
    if V.is_intlike(x.type):
        return Value(x.type, V.wrap_to(abs(x.v), x.type))
    if V.is_real(x.type):
        return Value(x.type, abs(x.v))
    raise STTypeError(f"ABS of {V.render_type(x.type)}")


@_register("NEG", 1, 1, "numerical")
def _neg(x: Value) -> Value:
    return V.negate(x)


def _transcendental(name: str, fn: Callable[[float], float], domain: Callable[[float], bool]):
    def impl(x: Value) -> Value:
        f = _float_arg(x)
        if not domain(f):
            raise DomainError(f"{name}({f}) is undefined")
        try:
            r = fn(f)
        except OverflowError:
            r = math.inf
        return _real_result(r, x)

    _register(name, 1, 1, "numerical")(impl)


_ANY = lambda f: True  # noqa: E731
_transcendental("SQRT", math.sqrt, lambda f: f >= 0)
_transcendental("LN", math.log, lambda f: f > 0)
_transcendental("LOG", math.log10, lambda f: f > 0)
_transcendental("EXP", math.exp, _ANY)
_transcendental("SIN", math.sin, math.isfinite)
_transcendental("COS", math.cos, math.isfinite)
_transcendental("TAN", math.tan, math.isfinite)
_transcendental("ASIN", math.asin, lambda f: -1 <= f <= 1)
_transcendental("ACOS", math.acos, lambda f: -1 <= f <= 1)
_transcendental("ATAN", math.atan, _ANY)


def _rounding(name: str, fn: Callable[[float], float]):
    def impl(x: Value) -> Value:
        if V.is_intlike(x.type):
            return x
        if V.is_real(x.type):
            f = x.v
            return Value(x.type, float(fn(f)) if math.isfinite(f) else f)
        raise STTypeError(f"{name} of {V.render_type(x.type)}")

    _register(name, 1, 1, "numerical")(impl)


_rounding("TRUNC", math.trunc)
_rounding("FLOOR", math.floor)


@_register("FRAC", 1, 1, "numerical")
def _frac(x: Value) -> Value:
    if V.is_intlike(x.type):
        return Value(x.type, 0)
    if V.is_real(x.type):
        return Value(x.type, x.v - math.trunc(x.v))
    raise STTypeError(f"FRAC of {V.render_type(x.type)}")


# ---------------------------------------------------------------- logical


def _chain(op: str):
    def impl(*args: Value) -> Value:
        for a, b in zip(args, args[1:]):
            if not V.compare(op, a, b).v:
                return V.FALSE
        return V.TRUE

    return impl


for _name, _op in (("GT", ">"), ("GE", ">="), ("LT", "<"), ("LE", "<="), ("EQ", "=")):
    _register(_name, 2, None, "logical")(_chain(_op))
_register("NE", 2, 2, "logical")(_chain("<>"))
_register("AND", 2, None, "logical")(lambda *a: _fold(lambda x, y: V.logic("AND", x, y), a))
_register("OR", 2, None, "logical")(lambda *a: _fold(lambda x, y: V.logic("OR", x, y), a))


@_register("SEL", 3, 3, "logical")
def _sel(g: Value, a: Value, b: Value) -> Value:
    if g.type is not V.BOOL:
        raise STTypeError("SEL selector must be BOOL")
    return b if g.v else a


# ---------------------------------------------------------------- strings


def _str_arg(v: Value) -> str:
    if not isinstance(v.type, StringType):
        raise STTypeError(f"string argument expected, got {V.render_type(v.type)}")
    return v.v


def _str_result(text: str, *args: Value) -> Value:
    strs = [a.type for a in args if isinstance(a.type, StringType)]
    t = StringType(strs[0].wide, max(s.max_len for s in strs))
    return Value(t, text[: t.max_len])


def _pos(v: Value, lo: int, hi: int, what: str) -> int:
    n = _int_arg(v, what)
    if not lo <= n <= hi:
        raise IndexOutOfRange(f"{what} {n} outside [{lo}, {hi}]")
    return n


@_register("CONCAT", 2, None, "string")
def _concat(*args: Value) -> Value:
    return _str_result("".join(_str_arg(a) for a in args), *args)


@_register("LEN", 1, 1, "string")
def _len(s: Value) -> Value:
    return Value(V.T["INT"], len(_str_arg(s)))


@_register("LEFT", 2, 2, "string")
def _left(s: Value, n: Value) -> Value:
    text = _str_arg(s)
    k = _pos(n, 0, 1 << 62, "LEFT length")
    return _str_result(text[:k], s)


@_register("RIGHT", 2, 2, "string")
def _right(s: Value, n: Value) -> Value:
    text = _str_arg(s)
    k = _pos(n, 0, 1 << 62, "RIGHT length")
    return _str_result(text[len(text) - min(k, len(text)) :], s)


@_register("MID", 3, 3, "string")
def _mid(s: Value, n: Value, p: Value) -> Value:
    text = _str_arg(s)
    k = _pos(n, 0, 1 << 62, "MID length")
    start = _pos(p, 1, len(text) + 1, "MID position")
    return _str_result(text[start - 1 : start - 1 + k], s)


@_register("INSERT", 3, 3, "string")
def _insert(s: Value, t: Value, p: Value) -> Value:
    text, ins = _str_arg(s), _str_arg(t)
    at = _pos(p, 0, len(text), "INSERT position")
    return _str_result(text[:at] + ins + text[at:], s, t)


@_register("DELETE", 3, 3, "string")
def _delete(s: Value, n: Value, p: Value) -> Value:
    text = _str_arg(s)
    k = _pos(n, 0, 1 << 62, "DELETE length")
    start = _pos(p, 1, len(text) + 1, "DELETE position")
    return _str_result(text[: start - 1] + text[start - 1 + k :], s)


@_register("REPLACE", 4, 4, "string")
def _replace(s: Value, t: Value, n: Value, p: Value) -> Value:
    text, rep = _str_arg(s), _str_arg(t)
    k = _pos(n, 0, 1 << 62, "REPLACE length")
    start = _pos(p, 1, len(text) + 1, "REPLACE position")
    return _str_result(text[: start - 1] + rep + text[start - 1 + k :], s, t)


@_register("FIND", 2, 2, "string")
def _find(s: Value, t: Value) -> Value:
    text, needle = _str_arg(s), _str_arg(t)
    return Value(V.T["INT"], text.find(needle) + 1 if needle else 0)


# ---------------------------------------------------------------- type conversion


def _translate(src: V.STType, dst: V.STType):
    def impl(x: Value) -> Value:
        if x.type != src:
            x = V.limit_assign(x, src)
        return V.convert(x, dst)

    return impl


for _name, (_src, _dst) in V.CONVERSIONS.items():
    _register(_name, 1, 1, "translate")(_translate(_src, _dst))


def is_builtin(name: str) -> bool:
    return name in REGISTRY


def dispatch_builtin(name: str, args: list[Value]) -> Value:
    b = REGISTRY.get(name)
    if b is None:
        raise STTypeError(f"{name} is not a standard function")
    if len(args) < b.min_args or (b.max_args is not None and len(args) > b.max_args):
        want = f"{b.min_args}" if b.max_args == b.min_args else f"at least {b.min_args}"
        raise ArityError(f"{name} takes {want} argument(s), got {len(args)}")
    return b.fn(*args)


NUMERICAL = tuple(n for n, b in REGISTRY.items() if b.family == "numerical")
LOGICAL = tuple(n for n, b in REGISTRY.items() if b.family == "logical")
STRINGS = tuple(n for n, b in REGISTRY.items() if b.family == "string")
TRANSLATE = tuple(n for n, b in REGISTRY.items() if b.family == "translate")
