"""Runtime value universe: elementary types, typed literals and operator semantics.

Everything in this module is pure.  Compound values (structs, arrays) appear
here only in *detached* form, i.e. with plain ``Value`` children; the machine
is responsible for materializing them into store locations.
"""

from __future__ import annotations

import datetime as _dt
import math
import re
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from typing import Any

import numpy as np

from .errors import (
    ConvertError,
    DefaultError,
    DivisionByZero,
    DomainError,
    LiteralError,
    STTypeError,
)

# --------------------------------------------------------------------------
# Types
# --------------------------------------------------------------------------


class STType:
    """Marker base for every type descriptor."""

    name: str


@dataclass(frozen=True)
class Elementary(STType):
    name: str

    def __repr__(self) -> str:
        return self.name


@dataclass(frozen=True)
class StringType(STType):
    wide: bool = False
    max_len: int = 80

    @property
    def name(self) -> str:
        return "WSTRING" if self.wide else "STRING"

    def __repr__(self) -> str:
        return f"{self.name}[{self.max_len}]"


@dataclass(frozen=True)
class ArrayType(STType):
    ranges: tuple[tuple[int, int], ...]
    element: STType

    name = "ARRAY"

    @property
    def size(self) -> int:
        n = 1
        for lo, hi in self.ranges:
            n *= hi - lo + 1
        return n


@dataclass(frozen=True, eq=False)
class EnumType(STType):
    name: str
    members: tuple[tuple[str, int], ...]
    default: str | None = None

    def __eq__(self, other: object) -> bool:
        return isinstance(other, EnumType) and other.name == self.name

    def __hash__(self) -> int:
        return hash(("ENUM", self.name))

    def ordinal(self, member: str) -> int:
        for m, o in self.members:
            if m == member:
                return o
        raise KeyError(member)


@dataclass(frozen=True, eq=False)
class StructType(STType):
    name: str
    # (field name, field type, initializer expression or None)
    fields: tuple[tuple[str, STType, Any], ...] = field(default=())

    def __eq__(self, other: object) -> bool:
        return isinstance(other, StructType) and other.name == self.name

    def __hash__(self) -> int:
        return hash(("STRUCT", self.name))

    def field_type(self, name: str) -> STType | None:
        for f, t, _ in self.fields:
            if f == name:
                return t
        return None


@dataclass(frozen=True)
class FBType(STType):
    """Type of a FUNCTION_BLOCK instance variable."""

    name: str


@dataclass(frozen=True)
class POUType(STType):
    """Type recorded for POU descriptors and user-type descriptors in genv."""

    name: str  # FUNCTION | FUNCTION_BLOCK | PROGRAM | TYPE


INT_INFO: dict[str, tuple[int, bool]] = {
    "SINT": (8, True),
    "INT": (16, True),
    "DINT": (32, True),
    "LINT": (64, True),
    "USINT": (8, False),
    "UINT": (16, False),
    "UDINT": (32, False),
    "ULINT": (64, False),
}
BIT_INFO: dict[str, int] = {"BYTE": 8, "WORD": 16, "DWORD": 32}
REAL_NAMES = ("REAL", "LREAL")
TIME_NAMES = ("TIME", "DATE", "TIME_OF_DAY", "DATE_AND_TIME")
TYPE_ALIASES = {"TOD": "TIME_OF_DAY", "DT": "DATE_AND_TIME"}

ELEMENTARY_NAMES = tuple(INT_INFO) + REAL_NAMES + ("BOOL",) + tuple(BIT_INFO) + TIME_NAMES

T = {n: Elementary(n) for n in ELEMENTARY_NAMES}
ANY_INT = Elementary("ANY_INT")  # untyped integer literal, unbounded
ANY_REAL = Elementary("ANY_REAL")  # untyped float literal
BOOL = T["BOOL"]
TIME = T["TIME"]
DATE = T["DATE"]
TOD = T["TIME_OF_DAY"]
DT = T["DATE_AND_TIME"]
STRING = StringType(False, 80)
WSTRING = StringType(True, 80)

DAY_MS = 86_400_000
EPOCH = _dt.date(1970, 1, 1)
_MIN_DAYS = (_dt.date(1, 1, 1) - EPOCH).days
_MAX_DAYS = (_dt.date(9999, 12, 31) - EPOCH).days


def elementary(name: str) -> STType:
    name = TYPE_ALIASES.get(name, name)
    if name == "STRING":
        return STRING
    if name == "WSTRING":
        return WSTRING
    return T[name]


def is_int(t: STType) -> bool:
    return t is ANY_INT or (isinstance(t, Elementary) and t.name in INT_INFO)


def is_bits(t: STType) -> bool:
    return isinstance(t, Elementary) and t.name in BIT_INFO


def is_intlike(t: STType) -> bool:
    return is_int(t) or is_bits(t)


def is_real(t: STType) -> bool:
    return t is ANY_REAL or (isinstance(t, Elementary) and t.name in REAL_NAMES)


def is_numeric(t: STType) -> bool:
    return is_intlike(t) or is_real(t)


def is_string(t: STType) -> bool:
    return isinstance(t, StringType)


def is_time(t: STType) -> bool:
    return isinstance(t, Elementary) and t.name in TIME_NAMES


def is_elementary(t: STType) -> bool:
    return (isinstance(t, Elementary) and t not in (ANY_INT, ANY_REAL)) or is_string(t)


def int_bounds(t: STType) -> tuple[int, int]:
    bits, signed = width_sign(t)
    if signed:
        return -(1 << (bits - 1)), (1 << (bits - 1)) - 1
    return 0, (1 << bits) - 1


def width_sign(t: STType) -> tuple[int, bool]:
    if t.name in INT_INFO:
        return INT_INFO[t.name]
    return BIT_INFO[t.name], False


def wrap(n: int, bits: int, signed: bool) -> int:
    """Two's-complement (or unsigned) truncation of ``n`` to ``bits`` bits."""
    n &= (1 << bits) - 1
    if signed and n >> (bits - 1):
        n -= 1 << bits
    return n


def wrap_to(n: int, t: STType) -> int:
    if t is ANY_INT:
        return n
    bits, signed = width_sign(t)
    return wrap(n, bits, signed)


def to_f32(x: float) -> float:
    with np.errstate(over="ignore"):
        return float(np.float32(x))


# --------------------------------------------------------------------------
# Values
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Value:
    """A typed runtime value.

    Payload by type: integers/bitstrings ``int``; floats ``float``; BOOL
    ``bool``; strings ``str``; TIME signed ms; DATE days since 1970-01-01;
    TOD ms since midnight; DT ``(days, ms)``; ENUM ``(member, ordinal)``;
    STRUCT ``dict`` field -> Location|Value; ARRAY ``list`` of Location|Value
    in row-major order; FB instances and POUs carry a descriptor object.
    """

    type: STType
    v: Any

    def __repr__(self) -> str:
        return f"Value({self.type!r}, {self.v!r})"


def make_int(n: int, t: STType) -> Value:
    return Value(t, wrap_to(n, t))


def make_real(x: float, t: STType) -> Value:
    return Value(t, to_f32(x) if t.name == "REAL" else float(x))


def make_bool(b: bool) -> Value:
    return Value(BOOL, bool(b))


TRUE = make_bool(True)
FALSE = make_bool(False)


# --------------------------------------------------------------------------
# Time helpers
# --------------------------------------------------------------------------


def normalize_tod(hours: int, minutes: int, seconds: Decimal | int | float) -> Value:
    """Standardize a time of day: carry seconds into minutes into hours, wrap at 24 h."""
    if hours < 0 or minutes < 0 or seconds < 0:
        raise ValueError("time-of-day components must be non-negative")
    ms = int(Decimal(str(seconds)) * 1000)
    sec, ms = divmod(ms, 1000)
    carry, sec = divmod(sec, 60)
    minutes += carry
    carry, minutes = divmod(minutes, 60)
    hours = (hours + carry) % 24
    return Value(TOD, ((hours * 60 + minutes) * 60 + sec) * 1000 + ms)


def _days_to_date(days: int) -> _dt.date:
    if not _MIN_DAYS <= days <= _MAX_DAYS:
        raise DomainError(f"date out of range ({days} days from epoch)")
    return EPOCH + _dt.timedelta(days=days)


def _make_dt(days: int, ms: int) -> Value:
    carry, ms = divmod(ms, DAY_MS)
    return Value(DT, (days + carry, ms))


def _fmt_tod(ms: int) -> str:
    s, milli = divmod(ms, 1000)
    m, s = divmod(s, 60)
    h, m = divmod(m, 60)
    return f"{h:02d}:{m:02d}:{s:02d}.{milli:03d}"


# --------------------------------------------------------------------------
# Typed literals
# --------------------------------------------------------------------------

_DUR_PART = re.compile(r"(\d+(?:\.\d+)?)(ms|d|h|m|s)", re.IGNORECASE)
_DUR_UNIT_MS = {"d": 86_400_000, "h": 3_600_000, "m": 60_000, "s": 1000, "ms": 1}
_TOD_RE = re.compile(r"(\d+):(\d+)(?::(\d+(?:\.\d+)?))?$")
_DATE_RE = re.compile(r"(\d+)-(\d+)-(\d+)$")
_DT_RE = re.compile(r"(\d+)-(\d+)-(\d+)-(\d+:\d+(?::\d+(?:\.\d+)?)?)$")

PREFIXES = {
    "T": "TIME",
    "TIME": "TIME",
    "TOD": "TIME_OF_DAY",
    "TIME_OF_DAY": "TIME_OF_DAY",
    "D": "DATE",
    "DATE": "DATE",
    "DT": "DATE_AND_TIME",
    "DATE_AND_TIME": "DATE_AND_TIME",
}


def parse_duration(payload: str) -> int:
    text = payload.replace("_", "")
    neg = text.startswith("-")
    if neg or text.startswith("+"):
        text = text[1:]
    if not text:
        raise LiteralError(f"empty duration {payload!r}")
    pos = 0
    total = Decimal(0)
    for m in _DUR_PART.finditer(text):
        if m.start() != pos:
            break
        total += Decimal(m.group(1)) * _DUR_UNIT_MS[m.group(2).lower()]
        pos = m.end()
    if pos != len(text):
        raise LiteralError(f"malformed duration {payload!r}")
    ms = int(total)  # sub-millisecond fractions truncate toward zero
    return -ms if neg else ms


def _parse_date(y: str, mo: str, d: str) -> int:
    try:
        return (_dt.date(int(y), int(mo), int(d)) - EPOCH).days
    except ValueError as exc:
        raise LiteralError(f"invalid date {y}-{mo}-{d}: {exc}") from None


def _parse_tod_ms(text: str) -> tuple[int, int]:
    """Return (day carry, ms) for an ``HH:MM[:SS[.fff]]`` payload."""
    m = _TOD_RE.match(text)
    if not m:
        raise LiteralError(f"malformed time of day {text!r}")
    h, mi = int(m.group(1)), int(m.group(2))
    s = Decimal(m.group(3) or "0")
    raw = int(((h * 60 + mi) * 60 + s) * 1000)
    return divmod(raw, DAY_MS)


def _parse_int_text(text: str) -> int:
    t = text.replace("_", "")
    m = re.fullmatch(r"([+-]?)(?:(2|8|16)#([0-9A-Fa-f]+)|(\d+))", t)
    if not m:
        raise LiteralError(f"malformed integer {text!r}")
    if m.group(4) is not None:
        n = int(m.group(4))
    else:
        try:
            n = int(m.group(3), int(m.group(2)))
        except ValueError:
            raise LiteralError(f"malformed radix literal {text!r}") from None
    return -n if m.group(1) == "-" else n


def parse_typed_literal(text: str) -> Value:
    """Turn a ``PREFIX#payload`` token into a normalized value."""
    prefix, sep, payload = text.partition("#")
    if not sep or not payload:
        raise LiteralError(f"not a typed literal: {text!r}")
    kind = PREFIXES.get(prefix)
    if kind == "TIME":
        return Value(TIME, parse_duration(payload))
    if kind == "TIME_OF_DAY":
        _, ms = _parse_tod_ms(payload)
        return Value(TOD, ms)
    if kind == "DATE":
        m = _DATE_RE.match(payload)
        if not m:
            raise LiteralError(f"malformed date {payload!r}")
        return Value(DATE, _parse_date(*m.groups()))
    if kind == "DATE_AND_TIME":
        m = _DT_RE.match(payload)
        if not m:
            raise LiteralError(f"malformed date and time {payload!r}")
        days = _parse_date(*m.groups()[:3])
        carry, ms = _parse_tod_ms(m.group(4))
        return Value(DT, (days + carry, ms))
    if prefix in ("2", "8", "16"):
        return Value(ANY_INT, _parse_int_text(text))
    if prefix in INT_INFO or prefix in BIT_INFO:
        t = T[prefix]
        n = _parse_int_text(payload)
        lo, hi = int_bounds(t)
        if not lo <= n <= hi:
            raise LiteralError(f"{n} out of range for {prefix} [{lo}, {hi}]")
        return Value(t, n)
    if prefix in REAL_NAMES:
        try:
            x = float(payload.replace("_", ""))
        except ValueError:
            raise LiteralError(f"malformed real {payload!r}") from None
        return make_real(x, T[prefix])
    if prefix == "BOOL":
        if payload in ("TRUE", "1"):
            return TRUE
        if payload in ("FALSE", "0"):
            return FALSE
        raise LiteralError(f"malformed BOOL literal {payload!r}")
    raise LiteralError(f"unknown literal prefix {prefix!r}")


_ESC_IN = {"$": "$", "'": "'", '"': '"', "L": "\n", "N": "\n", "P": "\f", "R": "\r", "T": "\t"}


def unescape_string(body: str) -> str:
    """Decode the ``$`` escapes of a string literal body (quotes stripped)."""
    out = []
    i = 0
    while i < len(body):
        c = body[i]
        if c != "$":
            out.append(c)
            i += 1
            continue
        nxt = body[i + 1 : i + 2]
        if nxt.upper() in _ESC_IN and nxt:
            out.append(_ESC_IN[nxt.upper()] if nxt not in "$'\"" else nxt)
            i += 2
        elif re.fullmatch(r"[0-9A-Fa-f]{2}", body[i + 1 : i + 3]):
            out.append(chr(int(body[i + 1 : i + 3], 16)))
            i += 3
        else:
            raise LiteralError(f"bad escape in string literal {body!r}")
    return "".join(out)


def escape_string(s: str, quote: str = "'") -> str:
    out = []
    for c in s:
        if c == "$":
            out.append("$$")
        elif c == quote:
            out.append("$" + quote)
        elif c == "\n":
            out.append("$N")
        elif c == "\r":
            out.append("$R")
        elif c == "\t":
            out.append("$T")
        elif c == "\f":
            out.append("$P")
        elif ord(c) < 0x20:
            out.append(f"${ord(c):02X}")
        else:
            out.append(c)
    return quote + "".join(out) + quote


# --------------------------------------------------------------------------
# Rendering (snapshot wire grammar)
# --------------------------------------------------------------------------


def render_real(x: float, t: STType) -> str:
    if t.name == "REAL":
        return str(np.float32(x))
    return repr(float(x))


def render(v: Value) -> str:
    """Render an elementary or detached value in the snapshot grammar."""
    t = v.type
    if is_bits(t):
        return "16#" + format(v.v, "X").zfill(BIT_INFO[t.name] // 4)
    if is_int(t):
        return str(v.v)
    if is_real(t):
        return render_real(v.v, t)
    if t is BOOL:
        return "TRUE" if v.v else "FALSE"
    if isinstance(t, StringType):
        return escape_string(v.v, '"' if t.wide else "'")
    if t is TIME:
        return f"T#{v.v}ms"
    if t is TOD:
        return "TOD#" + _fmt_tod(v.v)
    if t is DATE:
        return "D#" + _days_to_date(v.v).isoformat()
    if t is DT:
        days, ms = v.v
        return f"DT#{_days_to_date(days).isoformat()}-{_fmt_tod(ms)}"
    if isinstance(t, EnumType):
        return f"{t.name}#{v.v[0]}"
    if isinstance(t, StructType):
        return "(" + ", ".join(f"{k}:={render(x)}" for k, x in v.v.items()) + ")"
    if isinstance(t, ArrayType):
        return "[" + ", ".join(render(x) for x in v.v) + "]"
    raise STTypeError(f"cannot render value of type {render_type(t)}")


def render_type(t: STType) -> str:
    if isinstance(t, StringType):
        return f"{t.name}[{t.max_len}]"
    if isinstance(t, ArrayType):
        dims = ", ".join(f"{lo}..{hi}" for lo, hi in t.ranges)
        return f"ARRAY[{dims}] OF {render_type(t.element)}"
    return t.name


def render_literal(v: Value) -> str:
    """Render an elementary value as ST source that re-parses to the same value."""
    t = v.type
    if is_real(t):
        text = render_real(v.v, t)
        if not math.isfinite(v.v):
            raise LiteralError("non-finite reals have no literal form")
        if "e" in text and "." not in text.split("e")[0]:
            head, exp = text.split("e")
            text = f"{head}.0e{exp}"
        return f"{t.name}#{text}" if t is not ANY_REAL else text
    if is_int(t) and t is not ANY_INT:
        return f"{t.name}#{v.v}"
    if is_bits(t):
        return f"{t.name}#{render(v)}"
    if t is TIME:
        return f"T#{v.v}ms" if v.v >= 0 else f"T#-{-v.v}ms"
    return render(v)


# --------------------------------------------------------------------------
# Defaults and implicit adaptation
# --------------------------------------------------------------------------


def default_value(t: STType) -> Value:
    """The initial value of a freshly declared variable of type ``t``."""
    if is_intlike(t):
        return Value(t, 0)
    if is_real(t):
        return Value(t, 0.0)
    if t is BOOL:
        return FALSE
    if isinstance(t, StringType):
        return Value(t, "")
    if t in (TIME, DATE, TOD):
        return Value(t, 0)
    if t is DT:
        return Value(DT, (0, 0))
    if isinstance(t, EnumType):
        member = t.default or t.members[0][0]
        return Value(t, (member, t.ordinal(member)))
    if isinstance(t, StructType):
        return Value(t, {f: default_value(ft) for f, ft, _ in t.fields})
    if isinstance(t, ArrayType):
        return Value(t, [default_value(t.element) for _ in range(t.size)])
    raise DefaultError(f"type {render_type(t)} has no default value")


def limit_assign(v: Value, target: STType) -> Value:
    """Adapt ``v`` to be stored in a variable of type ``target``.

    Integers adapt to any integer or bitstring width with truncation; integers
    widen to floats; strings are cut to the target capacity.  Anything else
    must match exactly.
    """
    src = v.type
    if src == target and not isinstance(target, StringType):
        return v
    if is_intlike(target):
        if is_intlike(src):
            return Value(target, wrap_to(v.v, target))
    elif is_real(target):
        if is_intlike(src):
            return make_real(float(v.v), target)
        if is_real(src):
            return make_real(v.v, target)
    elif isinstance(target, StringType):
        if isinstance(src, StringType):
            return Value(target, v.v[: target.max_len])
    raise STTypeError(f"cannot assign {render_type(src)} to {render_type(target)}")


# --------------------------------------------------------------------------
# Operators
# --------------------------------------------------------------------------

ARITH_OPS = ("+", "-", "*", "/", "**", "MOD")
COMPARE_OPS = ("<", ">", "<=", ">=", "=", "<>")
LOGIC_OPS = ("AND", "&", "AND_THEN", "XOR", "OR", "OR_ELSE")

_SIGNED_OF_WIDTH = {8: "SINT", 16: "INT", 32: "DINT", 64: "LINT"}


def int_result_type(a: STType, b: STType) -> STType:
    if a is ANY_INT:
        return b
    if b is ANY_INT:
        return a
    if a == b:
        return a
    (wa, sa), (wb, sb) = width_sign(a), width_sign(b)
    if is_bits(a) and is_bits(b):
        return a if wa >= wb else b
    if wa != wb:
        return a if wa > wb else b
    if sa == sb:
        return b if is_bits(a) else a
    if wa < 64:
        return T[_SIGNED_OF_WIDTH[wa * 2]]
    raise STTypeError(f"no common type for {a.name} and {b.name}")


def real_result_type(a: STType, b: STType) -> STType:
    names = {a.name, b.name}
    if "LREAL" in names:
        return T["LREAL"]
    if "REAL" in names:
        return T["REAL"]
    return ANY_REAL


def trunc_div(a: int, b: int) -> int:
    q = abs(a) // abs(b)
    return q if (a >= 0) == (b >= 0) else -q


def int_mod(a: int, b: int) -> int:
    """Remainder carrying the sign of the dividend."""
    return a - b * trunc_div(a, b)


def _int_pow(a: int, b: int, t: STType) -> int:
    if b < 0:
        raise DomainError("negative exponent in integer **")
    if t is ANY_INT:
        if a in (-1, 0, 1) or b * max(1, abs(a).bit_length()) <= 256:
            return a**b
        raise DomainError("integer literal power too large; give one operand a type")
    bits, _ = width_sign(t)
    return pow(a, b, 1 << bits)


def _time_arith(op: str, a: Value, b: Value) -> Value:
    ta, tb = a.type, b.type
    if op == "+":
        if ta is TIME and tb is TIME:
            return make_int_time(a.v + b.v)
        if ta is TOD and tb is TIME:
            return Value(TOD, (a.v + b.v) % DAY_MS)
        if ta is TIME and tb is TOD:
            return Value(TOD, (a.v + b.v) % DAY_MS)
        if ta is DT and tb is TIME:
            return _make_dt(a.v[0], a.v[1] + b.v)
        if ta is TIME and tb is DT:
            return _make_dt(b.v[0], b.v[1] + a.v)
    elif op == "-":
        if ta is TIME and tb is TIME:
            return make_int_time(a.v - b.v)
        if ta is TOD and tb is TIME:
            return Value(TOD, (a.v - b.v) % DAY_MS)
        if ta is TOD and tb is TOD:
            return make_int_time(a.v - b.v)
        if ta is DATE and tb is DATE:
            return make_int_time((a.v - b.v) * DAY_MS)
        if ta is DT and tb is TIME:
            return _make_dt(a.v[0], a.v[1] - b.v)
        if ta is DT and tb is DT:
            return make_int_time((a.v[0] - b.v[0]) * DAY_MS + a.v[1] - b.v[1])
    elif op in ("*", "/"):
        if ta is TIME and is_numeric(tb) or (op == "*" and tb is TIME and is_numeric(ta)):
            dur, k = (a.v, b.v) if ta is TIME else (b.v, a.v)
            if op == "*":
                return make_int_time(int(dur * k) if isinstance(k, float) else dur * k)
            if k == 0:
                raise DivisionByZero("TIME divided by zero")
            if isinstance(k, float):
                return make_int_time(int(dur / k))
            return make_int_time(trunc_div(dur, k))
    raise STTypeError(f"unsupported operands for {op}: {render_type(ta)}, {render_type(tb)}")


def make_int_time(ms: int) -> Value:
    return Value(TIME, wrap(ms, 64, True))


def arith(op: str, a: Value, b: Value) -> Value:
    """Binary arithmetic ``+ - * / ** MOD`` with truncating overflow."""
    ta, tb = a.type, b.type
    if is_intlike(ta) and is_intlike(tb):
        rt = int_result_type(ta, tb)
        x, y = a.v, b.v
        if op == "+":
            r = x + y
        elif op == "-":
            r = x - y
        elif op == "*":
            r = x * y
        elif op == "/":
            if y == 0:
                raise DivisionByZero("integer division by zero")
            r = trunc_div(x, y)
        elif op == "MOD":
            if y == 0:
                raise DivisionByZero("MOD by zero")
            r = int_mod(x, y)
        elif op == "**":
            r = _int_pow(x, y, rt)
        else:
            raise STTypeError(f"not an arithmetic operator: {op}")
        return Value(rt, wrap_to(r, rt))
    if is_numeric(ta) and is_numeric(tb):
        rt = real_result_type(ta, tb)
        x, y = float(a.v), float(b.v)
        if op == "+":
            r = x + y
        elif op == "-":
            r = x - y
        elif op == "*":
            r = x * y
        elif op == "/":
            if y == 0.0:
                raise DivisionByZero("real division by zero")
            r = x / y
        elif op == "**":
            try:
                r = math.pow(x, y)
            except ValueError:
                raise DomainError(f"{x} ** {y} is undefined") from None
            except OverflowError:
                r = math.copysign(math.inf, x) if y % 2 == 1 else math.inf
        elif op == "MOD":
            raise STTypeError("MOD requires integer operands")
        else:
            raise STTypeError(f"not an arithmetic operator: {op}")
        return make_real(r, rt) if rt is not ANY_REAL else Value(ANY_REAL, r)
    if is_time(ta) or is_time(tb):
        return _time_arith(op, a, b)
    raise STTypeError(f"unsupported operands for {op}: {render_type(ta)}, {render_type(tb)}")


def negate(a: Value) -> Value:
    t = a.type
    if is_intlike(t):
        return Value(t, wrap_to(-a.v, t))
    if is_real(t):
        return Value(t, -a.v)
    if t is TIME:
        return make_int_time(-a.v)
    raise STTypeError(f"cannot negate {render_type(t)}")


def _cmp(op: str, x: Any, y: Any) -> bool:
    if op == "=":
        return x == y
    if op == "<>":
        return x != y
    if op == "<":
        return x < y
    if op == ">":
        return x > y
    if op == "<=":
        return x <= y
    if op == ">=":
        return x >= y
    raise STTypeError(f"not a comparison operator: {op}")


def compare(op: str, a: Value, b: Value) -> Value:
    ta, tb = a.type, b.type
    if is_numeric(ta) and is_numeric(tb):
        if is_intlike(ta) and is_intlike(tb):
            return make_bool(_cmp(op, a.v, b.v))
        return make_bool(_cmp(op, float(a.v), float(b.v)))
    if isinstance(ta, StringType) and isinstance(tb, StringType):
        return make_bool(_cmp(op, a.v, b.v))
    if ta is BOOL and tb is BOOL:
        if op not in ("=", "<>"):
            raise STTypeError(f"BOOL does not support {op}")
        return make_bool(_cmp(op, a.v, b.v))
    if is_time(ta) and ta == tb:
        return make_bool(_cmp(op, a.v, b.v))
    if isinstance(ta, EnumType) and ta == tb:
        return make_bool(_cmp(op, a.v[1], b.v[1]))
    raise STTypeError(f"cannot compare {render_type(ta)} with {render_type(tb)}")


def logic(op: str, a: Value, b: Value) -> Value:
    """Value combination for AND/&/AND_THEN/XOR/OR/OR_ELSE."""
    ta, tb = a.type, b.type
    if ta is BOOL and tb is BOOL:
        x, y = a.v, b.v
        if op in ("AND", "&", "AND_THEN"):
            return make_bool(x and y)
        if op in ("OR", "OR_ELSE"):
            return make_bool(x or y)
        if op == "XOR":
            return make_bool(x != y)
    elif (is_bits(ta) or ta is ANY_INT) and (is_bits(tb) or tb is ANY_INT):
        if is_bits(ta) and is_bits(tb) and ta != tb:
            raise STTypeError(f"bitstring width mismatch: {ta.name} {op} {tb.name}")
        rt = ta if is_bits(ta) else tb
        x, y = wrap_to(a.v, rt), wrap_to(b.v, rt)
        if op in ("AND", "&", "AND_THEN"):
            return Value(rt, x & y)
        if op in ("OR", "OR_ELSE"):
            return Value(rt, x | y)
        if op == "XOR":
            return Value(rt, x ^ y)
    else:
        raise STTypeError(f"{op} needs BOOL or bitstring operands, got {render_type(ta)}, {render_type(tb)}")
    raise STTypeError(f"not a logical operator: {op}")


def logic_not(a: Value) -> Value:
    if a.type is BOOL:
        return make_bool(not a.v)
    if is_bits(a.type):
        return Value(a.type, a.v ^ ((1 << BIT_INFO[a.type.name]) - 1))
    raise STTypeError(f"NOT needs BOOL or bitstring, got {render_type(a.type)}")


# --------------------------------------------------------------------------
# Explicit conversion (the X_TO_Y family)
# --------------------------------------------------------------------------

NUMERIC_NAMES = tuple(INT_INFO) + tuple(BIT_INFO) + REAL_NAMES + ("BOOL",)
STRING_NAMES = ("STRING", "WSTRING")
_TIME_INT_TARGETS = tuple(INT_INFO) + tuple(BIT_INFO)


def float_to_int(x: float) -> int:
    """Float to integer, rounding half to even."""
    if not math.isfinite(x):
        raise ConvertError(f"cannot convert {x} to an integer")
    return round(x)


def _parse_number_text(s: str, target: STType) -> Value:
    text = s.strip()
    if is_intlike(target):
        try:
            n = _parse_int_text(text)
        except LiteralError:
            raise ConvertError(f"not an integer: {s!r}") from None
        return Value(target, wrap_to(n, target))
    if is_real(target):
        try:
            x = float(text.replace("_", ""))
        except ValueError:
            raise ConvertError(f"not a number: {s!r}") from None
        return make_real(x, target)
    if target is BOOL:
        if text in ("TRUE", "1"):
            return TRUE
        if text in ("FALSE", "0"):
            return FALSE
        raise ConvertError(f"not a BOOL: {s!r}")
    raise ConvertError(f"cannot parse {s!r} as {render_type(target)}")


def _parse_time_text(s: str, target: STType) -> Value:
    text = s.strip()
    if "#" not in text:
        text = {TIME: "T#", TOD: "TOD#", DATE: "D#", DT: "DT#"}[target] + text
    try:
        v = parse_typed_literal(text)
    except LiteralError as exc:
        raise ConvertError(str(exc)) from None
    if v.type != target:
        raise ConvertError(f"{s!r} is not a {render_type(target)}")
    return v


def _plain_text(v: Value) -> str:
    """Decimal text used for number -> string conversion."""
    if is_intlike(v.type):
        return str(v.v)
    return render(v)


def convert(v: Value, target: STType) -> Value:
    src = v.type
    if src == target and not isinstance(target, StringType):
        return v
    if isinstance(target, StringType):
        if isinstance(src, StringType):
            return Value(target, v.v[: target.max_len])
        if is_numeric(src) or src is BOOL or is_time(src):
            return Value(target, _plain_text(v)[: target.max_len])
    elif isinstance(src, StringType):
        if is_numeric(target) or target is BOOL:
            return _parse_number_text(v.v, target)
        if is_time(target):
            return _parse_time_text(v.v, target)
    elif is_intlike(target):
        if is_intlike(src):
            return Value(target, wrap_to(v.v, target))
        if src is BOOL:
            return Value(target, int(v.v))
        if is_real(src):
            return Value(target, wrap_to(float_to_int(v.v), target))
        if src in (TIME, TOD, DATE):
            return Value(target, wrap_to(v.v, target))
        if src is DT:
            return Value(target, wrap_to(v.v[0] * DAY_MS + v.v[1], target))
    elif is_real(target):
        if is_intlike(src) or is_real(src):
            return make_real(float(v.v), target)
        if src is BOOL:
            return make_real(float(int(v.v)), target)
        if src is TIME:
            return make_real(float(v.v), target)
    elif target is BOOL:
        if is_numeric(src):
            return make_bool(v.v != 0)
    elif target is TIME:
        if is_intlike(src):
            return make_int_time(v.v)
        if is_real(src):
            return make_int_time(float_to_int(v.v))
        if src is TOD:
            return Value(TIME, v.v)
    elif target is TOD:
        if is_intlike(src) or src is TIME:
            return Value(TOD, v.v % DAY_MS)
        if src is DT:
            return Value(TOD, v.v[1])
    elif target is DATE:
        if is_intlike(src):
            _days_to_date(v.v)
            return Value(DATE, v.v)
        if src is DT:
            return Value(DATE, v.v[0])
    elif target is DT:
        if is_intlike(src):
            days, ms = divmod(v.v, DAY_MS)
            _days_to_date(days)
            return Value(DT, (days, ms))
        if src is DATE:
            return Value(DT, (v.v, 0))
    raise STTypeError(f"no conversion from {render_type(src)} to {render_type(target)}")


def _supported(src: STType, dst: STType) -> bool:
    probe = default_value(src)
    try:
        convert(probe, dst)
    except STTypeError:
        return False
    except (ConvertError, DomainError):
        return True
    return True


def _conversion_names() -> dict[str, tuple[STType, STType]]:
    names = NUMERIC_NAMES + STRING_NAMES + TIME_NAMES
    spellings = {n: [n] for n in names}
    spellings["TIME_OF_DAY"].append("TOD")
    spellings["DATE_AND_TIME"].append("DT")
    table: dict[str, tuple[STType, STType]] = {}
    for a in names:
        for b in names:
            if a == b:
                continue
            ta, tb = elementary(a), elementary(b)
            if not _supported(ta, tb):
                continue
            for sa in spellings[a]:
                for sb in spellings[b]:
                    table[f"{sa}_TO_{sb}"] = (ta, tb)
    return table


CONVERSIONS: dict[str, tuple[STType, STType]] = _conversion_names()


def literal_from_number_text(text: str) -> Value:
    """Value of an untyped numeric literal token."""
    t = text.replace("_", "")
    if "#" in t:
        return parse_typed_literal(text)
    if re.fullmatch(r"\d+", t):
        return Value(ANY_INT, int(t))
    try:
        return Value(ANY_REAL, float(Decimal(t)))
    except InvalidOperation:
        raise LiteralError(f"malformed number {text!r}") from None
