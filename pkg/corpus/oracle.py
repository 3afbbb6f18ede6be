"""Hand-execution oracle for the bundled corpus.

Every program in ``programs/`` is re-executed here as plain Python, written
directly from the program text and sharing no code with ``stref``.  Integer
wrap, single-precision rounding and the snapshot renderers are implemented
from scratch below.  Running the script rewrites ``golden/*.snap``::

    python3 corpus/oracle.py            # regenerate
    python3 corpus/oracle.py --check    # exit 1 if any golden is stale
"""

from __future__ import annotations

import datetime
import math
import struct
import sys
from pathlib import Path

HERE = Path(__file__).resolve().parent

WIDTH = {"SINT": 8, "INT": 16, "DINT": 32, "LINT": 64, "USINT": 8, "UINT": 16, "UDINT": 32, "ULINT": 64}
BITS = {"BYTE": 8, "WORD": 16, "DWORD": 32}


def wrap(n: int, ty: str) -> int:
    w = WIDTH.get(ty) or BITS[ty]
    n &= (1 << w) - 1
    if ty in ("SINT", "INT", "DINT", "LINT") and n >= 1 << (w - 1):
        n -= 1 << w
    return n


def f32(x: float) -> float:
    return struct.unpack("<f", struct.pack("<f", x))[0]


def tdiv(a: int, b: int) -> int:
    q = abs(a) // abs(b)
    return q if (a >= 0) == (b >= 0) else -q


def tmod(a: int, b: int) -> int:
    return a - b * tdiv(a, b)


# ---------------------------------------------------------------- renderers


class Cell:
    def __init__(self, ty: str, text: str):
        self.ty, self.text = ty, text


def I(ty, n):
    return Cell(ty, str(n))


def B(ty, n):
    return Cell(ty, "16#" + ("%X" % n).rjust(BITS[ty] // 4, "0"))


def real_text(x: float) -> str:
    for digits in range(1, 10):
        s = "%.*g" % (digits, x)
        if f32(float(s)) == x:
            return repr(float(s))
    raise AssertionError(x)


def R(x):
    return Cell("REAL", real_text(f32(x)))


def LR(x):
    return Cell("LREAL", repr(float(x)))


def BO(b):
    return Cell("BOOL", "TRUE" if b else "FALSE")


def quote(s: str, q: str) -> str:
    return q + s.replace("$", "$$").replace(q, "$" + q) + q


def S(s, cap=80):
    return Cell(f"STRING[{cap}]", quote(s[:cap], "'"))


def WS(s, cap=80):
    return Cell(f"WSTRING[{cap}]", quote(s[:cap], '"'))


def T(ms):
    return Cell("TIME", f"T#{ms}ms")


def clock(ms: int) -> str:
    ms %= 86_400_000
    h, rest = divmod(ms, 3_600_000)
    m, rest = divmod(rest, 60_000)
    s, frac = divmod(rest, 1000)
    return f"{h:02d}:{m:02d}:{s:02d}.{frac:03d}"


def TOD(ms):
    return Cell("TIME_OF_DAY", "TOD#" + clock(ms))


def D(day: datetime.date):
    return Cell("DATE", f"D#{day.isoformat()}")


def DT(stamp: datetime.datetime):
    ms = stamp.microsecond // 1000
    text = f"{stamp.date().isoformat()}-{stamp:%H:%M:%S}.{ms:03d}"
    return Cell("DATE_AND_TIME", "DT#" + text)


def EN(ty, member):
    return Cell(ty, f"{ty}#{member}")


def ARR(dims, elem, texts):
    return Cell(f"ARRAY[{dims}] OF {elem}", "[" + ", ".join(texts) + "]")


def snap(cells: dict) -> str:
    lines = [f"{k} : {c.ty} = {c.text}" for k, c in cells.items()]
    return "".join(line + "\n" for line in sorted(lines, key=lambda l: l.split(" : ")[0]))


def error(line: int, kind: str) -> str:
    return f"ERROR line={line} kind={kind}\n"


def main_vars(**cells) -> dict:
    return {f"MAIN.{k}": v for k, v in cells.items()}


# ---------------------------------------------------------------- programs


def p01():
    a, b = 17, 5
    q = tdiv(a, b)
    r = tmod(a, b)
    n1 = tmod(-7, 3)
    n2 = tdiv(-a, b)
    p = 2 + 3 * 4 - tdiv(10 - 4, 2)
    e = a * b - tmod(-a, 4)
    return main_vars(a=I("INT", a), b=I("INT", b), q=I("INT", q), r=I("INT", r), n1=I("INT", n1),
                     n2=I("INT", n2), p=I("INT", p), e=I("DINT", e))


def p02():
    return main_vars(
        si=I("SINT", wrap(127 + 1, "SINT")),
        i=I("INT", wrap(32767 * 2, "INT")),
        di=I("DINT", wrap(2**31 - 1 + 10, "DINT")),
        li=I("LINT", wrap(2**63 - 1 + 1, "LINT")),
        usi=I("USINT", wrap(255 + 3, "USINT")),
        ui=I("UINT", wrap(0 - 1, "UINT")),
        udi=I("UDINT", wrap((2**32 - 1) * 3, "UDINT")),
        uli=I("ULINT", wrap(2**64 - 1 + 2, "ULINT")),
        m=I("SINT", wrap(tdiv(-128, -1), "SINT")),
        big=I("INT", wrap(40000, "INT")),
    )


def p03():
    b1, b2, w, dw = 0x0F, 0b10100101, 0xFF00, 0o777
    return main_vars(
        b1=B("BYTE", b1), b2=B("BYTE", b2), w=B("WORD", w), dw=B("DWORD", dw),
        x=B("BYTE", b1 & b2), y=B("WORD", w | 0xF0), z=B("DWORD", dw ^ 0xFFFFFFFF),
        nb=B("BYTE", ~b1 & 0xFF), sum=B("BYTE", wrap(250 + b1, "BYTE")),
    )


def p04():
    a, b = f32(0.1), f32(0.2)
    big = f32(f32(1.5e3) - 0.25)
    return main_vars(
        a=R(a), b=R(b), c=R(a + b), x=LR(0.1), y=LR(0.2), z=LR(0.1 + 0.2),
        h=R(f32(1.0) / f32(3.0)), k=LR(7 / 2.0), m=R(a * 10), big=R(big),
    )


def p05():
    t, f = True, False
    return main_vars(
        t=BO(t), f=BO(f), zero=I("INT", 0),
        r1=BO(t and not f), r2=BO(t != t), r3=BO((f and t) or t),
        r4=BO(False), r5=BO(True), r6=BO((not (t and f)) == ((not t) or (not f))),
    )


def p06():
    c = "Hello" + ", " + "world"
    return main_vars(
        s=S("Hello"), w=WS("wide"), short=S(c, 4), ws=WS("wide", 3), c=S(c), n=I("INT", len(c)),
        pos=I("INT", c.find("world") + 1), missing=I("INT", 0), l=S(c[:3]), r=S(c[-5:]),
        m=S("ABCDEF"[2:4]),                      # 2 characters from position 3
        ins=S("AB" + "CD" + "EF"),               # inserted after position 2
        rep=S("A" + "xy" + "EF"),                # 3 characters from position 2 replaced
        q=S("it's $5"),
        **{"del": S("AB" + "EF")},               # 2 characters removed from position 3
    )


def p07():
    t1 = 1000
    t2 = 3_600_000 + 2 * 60_000 + 3000 + 4
    return main_vars(t1=T(t1), t2=T(t2), t3=T(t1 + t2), t4=T(t2 - 3000), t5=T(3 * t1),
                     t6=T(-250 + 1500), longer=BO(t2 > t1))


def p08():
    tod1 = ((23 * 60 + 45) * 60 + 56) * 1000 + 300
    d1, d2 = datetime.date(2024, 2, 28), datetime.date(2024, 3, 1)
    dt1 = datetime.datetime(2023, 12, 31, 23, 59, 59)
    dt2 = dt1 + datetime.timedelta(seconds=1)
    return main_vars(
        tod1=TOD(tod1), tod2=TOD(tod1 + 20 * 60_000), tod3=TOD(3_600_000 - 7_200_000),
        d1=D(d1), d2=D(d2), gap=T((d2 - d1).days * 86_400_000),
        dt1=DT(dt1), dt2=DT(dt2), span=T(int((dt2 - dt1).total_seconds() * 1000)),
    )


def p09():
    return main_vars(
        a=I("INT", -5 * 3), b=I("DINT", 300000), c=B("BYTE", 0x7F), d=LR(2.5 * 4.0), e=R(1.25),
        f=I("UINT", 0xFFFF), g=I("SINT", 0o17), h=BO(True), k=I("USINT", 0b1111),
    )


def p10():
    colors = ["Red", "Green", "Blue"]
    c = "Blue"
    nxt = colors[(colors.index(c) + 1) % 3]
    lv = 11  # Mid follows Low := 10
    code = 1 if lv > 10 else 0
    return main_vars(c=EN("Color", c), next=EN("Color", nxt), lv=EN("Level", "High"),
                     code=I("INT", code), same=BO(nxt == "Red"))


def point(x, y, tag):
    return Cell("Point", f"(x:={x}, y:={real_text(f32(y))}, tag:={quote(tag, chr(39))})")


def p11():
    return main_vars(p=point(3 + 10, 0.0, "pt"), q=point(3, 2.5 * 2.0, "q"), r=point(99, 2.5, "q"))


def p12():
    a = [10, 20, 30, 0, 0]
    total = sum(a)
    a[3] = total
    c = [1.5] * 5
    c[0] = c[4] + 1.0
    d = list(a)
    d[4] = -1
    return main_vars(
        a=ARR("1..5", "INT", map(str, a)), b=ARR("0..3", "BOOL", ["TRUE", "TRUE", "FALSE", "FALSE"]),
        c=ARR("-2..2", "REAL", [real_text(f32(v)) for v in c]), i=I("INT", 6), sum=I("INT", total),
        d=ARR("1..5", "INT", map(str, d)),
    )


def p13():
    m = [[1, 2, 3], [4, 5, 6]]
    cube = [[[0] * 7 for _ in range(5)] for _ in range(3)]
    cube[2][4][6] = 42
    cube[0][0][0] = 84
    for i in range(2):
        for j in range(3):
            m[i][j] = m[i][j] * 10 + (i + 1)
    flat_cube = [str(v) for plane in cube for row in plane for v in row]
    return main_vars(
        m=ARR("1..2, 1..3", "INT", [str(v) for row in m for v in row]),
        cube=ARR("1..3, 1..5, 1..7", "DINT", flat_cube),
        i=I("INT", 3), j=I("INT", 4), trace=I("INT", m[0][0] + m[1][2]),
    )


def p14():
    x = 15
    grade = 1 if x < 10 else 2 if x < 20 else 3
    sign = -1 if x < 0 else 0 if x == 0 else 1
    nested = (11 if x % 2 == 1 else 10) if x > 10 else 0
    return main_vars(x=I("INT", x), grade=I("INT", grade), sign=I("INT", sign), nested=I("INT", nested))


def p15():
    hits = 0
    for k in range(10):
        if k in (0, 1, 2, 8):
            hits += 1
        elif k == 5:
            hits += 10
    return main_vars(k=I("INT", 10), a=I("INT", 1), b=I("INT", 34), c=I("INT", -1), d=I("INT", 1),
                     hits=I("INT", hits))


def p16():
    s = sum(range(1, 6, 2))
    down = 0
    for j in range(10, 0, -3):
        down = down * 10 + j
    grid = sum(i for i in range(1, 4))
    return main_vars(i=I("INT", 4), j=I("INT", 4), s=I("INT", s), down=I("INT", down),
                     never=I("INT", 0), grid=I("INT", grid))


def p17():
    n, steps = 27, 0
    while n != 1:
        n = n // 2 if n % 2 == 0 else 3 * n + 1
        steps += 1
    return main_vars(n=I("DINT", n), steps=I("INT", steps), outer=I("INT", 3), inner=I("INT", 4),
                     total=I("INT", 12))


def p18():
    y = 100
    while True:
        y -= 7
        if y < 50:
            break
    return main_vars(x=I("INT", 1), y=I("INT", y), fact=I("DINT", math.factorial(10)), k=I("INT", 11),
                     found=I("INT", 3))


def p19():
    def clamp(v):
        return 100 if v > 100 else v + 1

    return main_vars(a=I("INT", clamp(500)), b=I("INT", clamp(5)), after=I("INT", 1), skipped=I("INT", 0))


def p20():
    def affine(x, gain=2.0, offset=0.0):
        return f32(f32(f32(x * gain) + offset) + 1)

    return main_vars(
        a=R(affine(1.5, 4.0, 0.5)), b=R(affine(3.0)), c=R(affine(0.5, offset=-1.0)),
        f1=I("INT", 1), f2=I("INT", 1), f3=I("INT", 2),
    )


def p21():
    arr = [100, 200 + 5, 300 - 1]
    return main_vars(x=I("INT", 2), y=I("INT", 1), ok=BO(True), arr=ARR("1..3", "DINT", map(str, arr)),
                     used=I("INT", 5 + -1))


def p22():
    def counter(state, step=1, reset=False):
        state["step"], state["reset"] = step, reset
        state["n"] = 0 if reset else state["n"] + step
        state["wrapped"] = state["n"] > 5

    c1 = {"step": 1, "reset": False, "n": 0, "wrapped": False}
    c2 = dict(c1)
    for _ in range(3):
        counter(c1, c1["step"], c1["reset"])
    counter(c2, 4)
    counter(c2, c2["step"], c2["reset"])
    seen = c2["n"]
    counter(c1, c1["step"], True)
    counter(c1, 2, False)
    out = main_vars(i=I("INT", 4), seen=I("INT", seen))
    for name, st in (("c1", c1), ("c2", c2)):
        out[f"MAIN.{name}.n"] = I("INT", st["n"])
        out[f"MAIN.{name}.step"] = I("INT", st["step"])
        out[f"MAIN.{name}.reset"] = BO(st["reset"])
        out[f"MAIN.{name}.wrapped"] = BO(st["wrapped"])
    return out


def p23():
    total = 0
    for x in (1, 2, 3):
        scratch = 7 + x
        total += x
    return {"MAIN.a.x": I("INT", 3), "MAIN.a.total": I("INT", total), "MAIN.a.scratch": I("INT", scratch),
            "MAIN.a.scratch_seen": I("INT", scratch), "MAIN.r": I("INT", 42), "MAIN.tmp": I("INT", 42)}


def p24():
    return {"MAIN.k": I("INT", 5), "Helper.inc": I("INT", 16), "Helper.runs": I("INT", 4),
            "Helper.sum": I("INT", sum(k * k for k in range(1, 5)))}


def p25():
    limit = 3
    hits = sum(1 for i in range(1, 7) if i > limit)
    return {"GLOBAL.limit": I("INT", limit), "GLOBAL.hits": I("DINT", hits), "GLOBAL.label": S("done"),
            "MAIN.i": I("INT", 7), "MAIN.last": BO(6 > limit)}


def p26():
    size, first = 4, 2
    buf = [i * size for i in range(first, size + 2)]
    return {"GLOBAL.SIZE": I("INT", size), "MAIN.SCALE": R(2.5), "MAIN.FIRST": I("INT", first),
            "MAIN.buf": ARR("2..5", "INT", map(str, buf)), "MAIN.i": I("INT", size + 2),
            "MAIN.scaled": R(2.5 * size)}


def p27():
    x = f32(-2.75)
    a = abs(-12)
    a = (a - 1) + (-3) + (10 - 4)
    return main_vars(
        a=I("INT", a), b=I("INT", 9), c=I("INT", -9), d=I("INT", 5), e=I("INT", 30),
        f=I("INT", 10 - 6), g=I("INT", tmod(-7, 3) + tdiv(17, 5) * 100), h=I("INT", 2**10 + 16),
        r1=LR(4.0), r2=LR(0.0 + 3.0), r3=R(math.trunc(x)), r4=LR(math.atan(1.0) * 4.0),
        r5=LR(1.0 + 0.0 + 1.0 + 0.0), r6=LR(math.asin(1.0) - math.acos(0.0)), r7=R(math.floor(x)),
        r8=R(x - math.trunc(x)), x=R(x), k=I("SINT", wrap(128, "SINT")),
    )


def p28():
    return main_vars(
        i=I("INT", -7), r=R(-7 / 2.0), rounded1=I("INT", round(2.5)), rounded2=I("INT", round(3.5)),
        rounded3=I("DINT", round(-2.5)), narrowed=I("SINT", wrap(300, "SINT")), text=S("-7"),
        parsed=I("INT", 43), flag=I("INT", 1), truth=BO(True), wide=LR(0.5), bits=B("WORD", 0xFFFF),
        back=I("UINT", 65535), rt=S("1.5"), tms=I("DINT", 2000),
    )


def p29():
    a = 3
    return main_vars(a=I("INT", a), p1=I("INT", a**2), p2=I("DINT", (2**3) ** 2), p3=LR(2.0**0.5),
                     p4=I("INT", (-a) ** 2), p5=I("INT", wrap(a**20, "INT")), p6=R(1.5**2))


def p30():
    raw, lo, hi = 13824, 0, 27648
    emin, emax = f32(-50.0), f32(150.0)
    a = f32(f32(emax - emin) / (hi - lo))
    b = f32(emin - f32(a * lo))
    value = f32(f32(a * raw) + b)
    return main_vars(raw=I("INT", raw), raw_min=I("INT", lo), raw_max=I("INT", hi), eng_min=R(emin),
                     eng_max=R(emax), a=R(a), b=R(b), value=R(value), Error=BO(raw < lo or raw > hi))


def p31():
    wave = [False, True, True, False, True, False, False, True]
    prev, pulses, rising = False, 0, False
    for sig in wave:
        rising = sig and not prev
        prev = sig
        pulses += rising
    return {"MAIN.count": I("INT", pulses), "MAIN.i": I("INT", 9), "MAIN.pc.pulses": I("INT", pulses),
            "MAIN.pc.sig": BO(wave[-1]), "MAIN.pc.det.sig": BO(wave[-1]), "MAIN.pc.det.prev": BO(prev),
            "MAIN.pc.det.rising": BO(rising),
            "MAIN.wave": ARR("1..8", "BOOL", ["TRUE" if w else "FALSE" for w in wave])}


def p32():
    samples = [1, 1, 1, 1]
    samples[2] = 40
    samples[7 - 4] = -5
    total = sum(samples)
    mode = "Fault" if total > 30 else "Run"
    faulted = mode == "Fault"
    ch = f"(id:=7, samples:=[{', '.join(map(str, samples))}], mode:=Mode#{mode}, active:={BO(not faulted).text})"
    return main_vars(ch=Cell("Channel", ch), sum=I("INT", total), faulted=BO(faulted))


def p35():
    return main_vars(
        s1=I("INT", 10), s2=I("INT", 20), g1=BO(5 > 3 > 1), g2=BO(5 >= 5 >= 6), eq=BO(4 == 4 == 4),
        ne=BO(1 != 2), lt=BO(1 < 2 and 2 <= 2), both=BO(all([True, True, False])),
        either=BO(any([False, False, True])), name=S("beta", 10), order=BO("beta" > "alpha"),
    )


GOLDENS = {
    "01_int_arith": p01, "02_int_wrap": p02, "03_bits": p03, "04_real": p04, "05_bool_logic": p05,
    "06_strings": p06, "07_time": p07, "08_tod_date_dt": p08, "09_typed_literals": p09, "10_enum": p10,
    "11_struct": p11, "12_array_1d": p12, "13_array_multi": p13, "14_if_elsif": p14, "15_case": p15,
    "16_for": p16, "17_while_exit": p17, "18_repeat": p18, "19_return": p19, "20_function": p20,
    "21_function_inout": p21, "22_fb_counter": p22, "23_var_temp": p23, "24_program_call": p24,
    "25_globals": p25, "26_constants": p26, "27_builtins_numeric": p27, "28_conversions": p28,
    "29_power": p29, "30_scaling": p30, "31_nested_fb": p31, "32_struct_array": p32,
    "35_select_strings": p35,
    # abnormal endings: the statement line that fails
    "33_div_zero": lambda: error(11, "DivisionByZero"),
    "34_index_overflow": lambda: error(9, "IndexOutOfRange"),
    "36_mod_zero": lambda: error(8, "DivisionByZero"),
    "37_div_zero_literal": lambda: error(8, "DivisionByZero"),
    "38_index_literal": lambda: error(9, "IndexOutOfRange"),
}


def golden_text(name: str) -> str:
    out = GOLDENS[name]()
    return out if isinstance(out, str) else snap(out)


def main(argv: list[str]) -> int:
    target = HERE / "golden"
    target.mkdir(exist_ok=True)
    programs = {p.stem for p in (HERE / "programs").glob("*.st")}
    missing = programs - set(GOLDENS)
    if missing:
        print("no oracle for: " + ", ".join(sorted(missing)), file=sys.stderr)
        return 1
    stale = 0
    for name in sorted(GOLDENS):
        text = golden_text(name)
        path = target / f"{name}.snap"
        if "--check" in argv:
            if not path.exists() or path.read_text() != text:
                print(f"stale: {path.name}")
                stale += 1
        else:
            path.write_text(text)
    return 1 if stale else 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
