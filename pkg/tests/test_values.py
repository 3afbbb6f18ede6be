import datetime
import math
import struct

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stref import values as V
from stref.errors import DefaultError, DivisionByZero, DomainError, LiteralError, STTypeError
from stref.values import Value

INT_TYPES = list(V.INT_INFO)
INT_RANGES = {
    "SINT": (-(2**7), 2**7 - 1), "INT": (-(2**15), 2**15 - 1), "DINT": (-(2**31), 2**31 - 1),
    "LINT": (-(2**63), 2**63 - 1), "USINT": (0, 2**8 - 1), "UINT": (0, 2**16 - 1),
    "UDINT": (0, 2**32 - 1), "ULINT": (0, 2**64 - 1),
}


def iv(ty, n):
    return Value(V.T[ty], n)


def lit(n):
    return Value(V.ANY_INT, n)


def oracle_wrap(n, ty):
    lo, hi = INT_RANGES[ty]
    span = hi - lo + 1
    return (n - lo) % span + lo


# ---------------------------------------------------------------- literals


@pytest.mark.parametrize(
    "text,type_name,payload",
    [
        ("TOD#23:45:56.30", "TIME_OF_DAY", 23 * 3_600_000 + 45 * 60_000 + 56_300),
        ("TIME_OF_DAY#23:45:56.30", "TIME_OF_DAY", 23 * 3_600_000 + 45 * 60_000 + 56_300),
        ("T#0s", "TIME", 0),
        ("T#1d2h3m4s5ms", "TIME", 86_400_000 + 2 * 3_600_000 + 3 * 60_000 + 4000 + 5),
        ("TIME#-1.5s", "TIME", -1500),
        ("T#90m", "TIME", 5_400_000),
        ("16#FF", "ANY_INT", 255),
        ("2#1010_1010", "ANY_INT", 170),
        ("8#17", "ANY_INT", 15),
        ("INT#-5", "INT", -5),
        ("UINT#16#FFFF", "UINT", 65535),
        ("D#1970-01-02", "DATE", 1),
        ("DATE#2024-02-29", "DATE", (datetime.date(2024, 2, 29) - datetime.date(1970, 1, 1)).days),
    ],
)
def test_typed_literals(text, type_name, payload):
    v = V.parse_typed_literal(text)
    assert v.type.name == type_name and v.v == payload


def test_short_and_long_forms_agree():
    assert V.parse_typed_literal("DT#2024-01-01-10:00:00") == V.parse_typed_literal("DATE_AND_TIME#2024-01-01-10:00:00")
    assert V.parse_typed_literal("D#2024-01-01") == V.parse_typed_literal("DATE#2024-01-01")


@pytest.mark.parametrize("text", ["INT#70000", "D#2024-13-01", "USINT#-1", "SINT#128", "D#2023-02-29"])
def test_bad_literals(text):
    with pytest.raises(LiteralError):
        V.parse_typed_literal(text)


@pytest.mark.parametrize(
    "h,m,s,expected",
    [(22, 75, 0, "TOD#23:15:00"), (0, 0, 0, "TOD#00:00:00"), (23, 59, 60, "TOD#00:00:00"), (0, 0, 3661.5, "TOD#01:01:01.5")],
)
def test_normalize_tod(h, m, s, expected):
    assert V.normalize_tod(h, m, s) == V.parse_typed_literal(expected)


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 200), st.integers(0, 500), st.integers(0, 10_000), st.lists(st.integers(-(10**9), 10**9), max_size=6))
def test_tod_stays_in_one_day(h, m, s, deltas):
    v = V.normalize_tod(h, m, s)
    assert 0 <= v.v < V.DAY_MS
    for d in deltas:
        v = V.arith("+", v, Value(V.TIME, d))
        assert 0 <= v.v < V.DAY_MS
        v = V.arith("-", v, Value(V.TIME, d // 3))
        assert 0 <= v.v < V.DAY_MS


LITERALS = ["TOD#23:45:56.30", "T#1h2m3s4ms", "T#-250ms", "D#2024-02-28", "DT#2023-12-31-23:59:59", "INT#-5",
            "BYTE#16#7F", "LREAL#2.5", "REAL#1.25", "UINT#65535", "TIME#0ms"]


@pytest.mark.parametrize("text", LITERALS)
def test_literal_render_round_trip(text):
    v = V.parse_typed_literal(text)
    assert V.parse_typed_literal(V.render_literal(v)) == v


def test_bool_literal_renders_as_keyword():
    assert V.render_literal(V.parse_typed_literal("BOOL#1")) == "TRUE"


# ---------------------------------------------------------------- defaults and assignment


def test_defaults():
    assert V.default_value(V.T["INT"]).v == 0
    assert V.default_value(V.BOOL) == V.FALSE
    assert V.default_value(V.STRING).v == ""
    assert V.render(V.default_value(V.DATE)) == "D#1970-01-01"
    assert V.render(V.default_value(V.DT)) == "DT#1970-01-01-00:00:00.000"
    color = V.EnumType("Color", (("Red", 0), ("Green", 1), ("Blue", 2)))
    assert V.render(V.default_value(color)) == "Color#Red"
    with pytest.raises(DefaultError):
        V.default_value(V.POUType("FUNCTION"))


def test_limit_assign():
    assert V.limit_assign(iv("INT", 5), V.T["DINT"]) == iv("DINT", 5)
    assert V.limit_assign(lit(300), V.T["SINT"]) == iv("SINT", 44)
    assert V.limit_assign(iv("INT", 3), V.T["REAL"]).v == 3.0
    assert V.limit_assign(Value(V.STRING, "abcdef"), V.StringType(False, 3)).v == "abc"
    with pytest.raises(STTypeError):
        V.limit_assign(Value(V.STRING, "x"), V.T["INT"])
    with pytest.raises(STTypeError):
        V.limit_assign(V.TRUE, V.T["REAL"])


# ---------------------------------------------------------------- arithmetic


def test_mod_sign_example():
    assert V.arith("MOD", lit(-7), lit(3)).v == -1


def test_wrap_example():
    assert V.arith("+", iv("INT", 32767), iv("INT", 1)) == iv("INT", -32768)


@pytest.mark.parametrize("op", ["/", "MOD"])
def test_zero_divisor(op):
    with pytest.raises(DivisionByZero):
        V.arith(op, lit(7), V.arith("-", lit(3), lit(3)))


def test_tod_plus_time():
    assert V.arith("+", V.parse_typed_literal("TOD#23:00:00"), V.parse_typed_literal("T#2h")) == V.parse_typed_literal("TOD#01:00:00")


def test_time_combinations():
    dt = V.parse_typed_literal("DT#2023-12-31-23:00:00")
    assert V.render(V.arith("+", dt, V.parse_typed_literal("T#2h"))) == "DT#2024-01-01-01:00:00.000"
    gap = V.arith("-", V.parse_typed_literal("D#2024-03-01"), V.parse_typed_literal("D#2024-02-28"))
    assert gap == Value(V.TIME, 2 * 86_400_000)
    assert V.arith("*", V.parse_typed_literal("T#1s"), lit(3)) == Value(V.TIME, 3000)


def test_negative_integer_power():
    with pytest.raises(DomainError):
        V.arith("**", iv("INT", 2), iv("INT", -1))


def test_mixed_types():
    assert V.arith("+", iv("INT", 1), iv("DINT", 2)).type.name == "DINT"
    assert V.arith("+", iv("INT", 1), iv("UINT", 2)).type.name == "DINT"
    assert V.arith("*", iv("INT", 2), Value(V.T["REAL"], 1.5)) == Value(V.T["REAL"], 3.0)
    assert V.arith("+", iv("BYTE", 250), iv("BYTE", 10)) == iv("BYTE", 4)
    with pytest.raises(STTypeError):
        V.arith("MOD", Value(V.T["REAL"], 1.0), lit(2))
    with pytest.raises(STTypeError):
        V.arith("+", Value(V.STRING, "a"), lit(1))


def f32(x):
    return struct.unpack("<f", struct.pack("<f", x))[0]


def test_real_is_single_precision():
    third = V.arith("/", Value(V.T["REAL"], 1.0), Value(V.T["REAL"], 3.0))
    assert third.v == f32(1 / 3) and third.v != 1 / 3
    assert V.render(third) == "0.33333334"
    assert V.render(V.arith("/", Value(V.T["LREAL"], 1.0), Value(V.T["LREAL"], 3.0))) == repr(1 / 3)


@settings(max_examples=400, deadline=None)
@given(st.sampled_from(INT_TYPES), st.integers(-(2**70), 2**70))
def test_wrap_soundness(ty, n):
    t = V.T[ty]
    once = V.wrap_to(n, t)
    bits = V.INT_INFO[ty][0]
    assert once == oracle_wrap(n, ty)
    assert V.wrap_to(once, t) == once
    assert V.wrap_to(n + 2**bits, t) == once


@settings(max_examples=500, deadline=None)
@given(st.integers(-1000, 1000), st.integers(-1000, 1000).filter(bool))
def test_euclidean_identity(a, b):
    q = V.arith("/", lit(a), lit(b)).v
    r = V.arith("MOD", lit(a), lit(b)).v
    assert q * b + r == a
    assert abs(r) < abs(b)
    assert r == 0 or (r > 0) == (a > 0)


# ---------------------------------------------------------------- comparison and logic


def test_comparisons():
    assert V.compare("<", V.parse_typed_literal("TOD#01:00:00"), V.parse_typed_literal("TOD#02:00:00")) == V.TRUE
    assert V.compare("=", Value(V.STRING, "AB"), Value(V.STRING, "AB")) == V.TRUE
    assert V.compare("<>", lit(3), Value(V.ANY_REAL, 3.0)) == V.FALSE
    assert V.compare("<", Value(V.STRING, "B"), Value(V.STRING, "a")) == V.TRUE
    with pytest.raises(STTypeError):
        V.compare("<", V.TRUE, V.FALSE)
    with pytest.raises(STTypeError):
        V.compare("=", Value(V.STRING, "1"), lit(1))


def test_logic():
    assert V.logic("AND", V.TRUE, V.FALSE) == V.FALSE
    assert V.logic("XOR", iv("BYTE", 0x0F), iv("BYTE", 0xFF)) == iv("BYTE", 0xF0)
    with pytest.raises(STTypeError):
        V.logic("AND", iv("WORD", 1), iv("BYTE", 1))


# ---------------------------------------------------------------- conversion


def test_convert_examples():
    assert V.convert(iv("INT", 3), V.T["REAL"]) == Value(V.T["REAL"], 3.0)
    assert V.convert(Value(V.T["REAL"], 2.5), V.T["INT"]) == iv("INT", 2)
    assert V.convert(Value(V.T["REAL"], 3.5), V.T["INT"]) == iv("INT", 4)
    assert V.convert(Value(V.T["LREAL"], -2.5), V.T["DINT"]) == iv("DINT", -2)
    assert V.convert(Value(V.STRING, "42"), V.T["INT"]) == iv("INT", 42)
    assert V.convert(iv("INT", -7), V.STRING).v == "-7"
    assert V.convert(V.TRUE, V.T["INT"]) == iv("INT", 1)
    assert V.convert(iv("INT", -1), V.T["WORD"]) == iv("WORD", 0xFFFF)
    assert V.convert(iv("INT", 300), V.T["SINT"]) == iv("SINT", 44)


SAMPLES = {
    **{n: [0, 1, 7, 100] for n in INT_TYPES},
    **{n: [0, 1, 0x7F] for n in V.BIT_INFO},
    "REAL": [0.0, 1.0, 42.0], "LREAL": [0.0, 1.0, 42.0], "BOOL": [False, True],
    "TIME": [0, 1, 100], "DATE": [0, 1, 100], "TIME_OF_DAY": [0, 1, 100], "DATE_AND_TIME": [(0, 0)],
}


# string sources are exercised by the X_TO_STRING direction
NON_STRING = sorted(n for n, (src, _) in V.CONVERSIONS.items() if not isinstance(src, V.StringType))


@pytest.mark.parametrize("name", NON_STRING)
def test_translate_round_trip(name):
    """Small values that every numeric type can hold survive a trip through the target and back."""
    src, dst = V.CONVERSIONS[name]
    back = f"{dst.name}_TO_{src.name}".replace("TIME_OF_DAY", "TOD").replace("DATE_AND_TIME", "DT")
    samples = SAMPLES.get(src.name, ["0", "1", "100"])
    for raw in samples:
        v = Value(src, raw)
        out = V.convert(v, dst)
        if dst is V.BOOL and raw not in (0, 1, False, True, "0", "1", 0.0, 1.0):
            continue
        if back in V.CONVERSIONS and src.name != "DATE_AND_TIME" and dst.name != "DATE_AND_TIME":
            assert V.convert(out, V.CONVERSIONS[back][1]).v == v.v, (name, raw)


def test_translate_table_size():
    assert len(V.CONVERSIONS) >= 160


# ---------------------------------------------------------------- rendering


@pytest.mark.parametrize(
    "value,text",
    [
        (iv("DINT", -3), "-3"),
        (iv("WORD", 0xF0), "16#00F0"),
        (iv("DWORD", 0), "16#00000000"),
        (Value(V.T["REAL"], f32(0.1)), "0.1"),
        (Value(V.T["LREAL"], 0.1 + 0.2), "0.30000000000000004"),
        (V.TRUE, "TRUE"),
        (Value(V.STRING, "it's"), "'it$'s'"),
        (Value(V.WSTRING, 'say "hi"'), '"say $"hi$""'),
        (Value(V.TIME, 1250), "T#1250ms"),
        (Value(V.TOD, 85_556_300), "TOD#23:45:56.300"),
        (Value(V.DATE, 0), "D#1970-01-01"),
        (Value(V.DT, (1, 61_000)), "DT#1970-01-02-00:01:01.000"),
    ],
)
def test_render(value, text):
    assert V.render(value) == text
