import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stref import values as V
from stref.errors import ConstError, EmptyStack, IndexOutOfRange, RedeclarationError, STTypeError, UnboundVariable
from stref.interp import Abnormal, Interpreter, run_source
from stref.machine import UNDEF, Frame, Machine, PLambda, format_snapshot
from stref.syntax import parse_source
from stref.values import Value

from conftest import CORPUS

INT = V.T["INT"]


def machine_with_program(**cells):
    """A machine whose entry program MAIN owns ``cells``."""
    m = Machine()
    for name, v in cells.items():
        m.allocate(name, v.type, v)
    m.genv["MAIN"] = m.new_cell(V.POUType("PROGRAM"), Value(V.POUType("PROGRAM"), PLambda("MAIN", None, dict(m.env))))
    return m


def test_allocate_defaults_and_redeclaration():
    m = Machine()
    loc = m.allocate("a", V.T["REAL"])
    assert m.store[loc].v == 0.0
    with pytest.raises(RedeclarationError):
        m.allocate("a", INT)


def test_allocate_enum_default():
    m = Machine()
    color = V.EnumType("Color", (("Red", 0), ("Green", 1), ("Blue", 2)))
    assert V.render(m.store[m.allocate("e", color)]) == "Color#Red"


def test_lookup_and_unbound():
    m = Machine()
    m.allocate("a", INT, Value(INT, 3))
    assert m.lookup(("a",)).v == 3
    with pytest.raises(UnboundVariable):
        m.lookup(("z",))


def test_index_paths():
    m = Machine()
    arr = V.ArrayType(((1, 5),), INT)
    m.allocate("A", arr)
    with pytest.raises(IndexOutOfRange):
        m.lookup(("A", ("index", [7])))
    cube = V.ArrayType(((1, 3), (1, 5), (1, 7)), V.T["DINT"])
    m.allocate("C", cube)
    loc = m.find_index(("C", ("index", [3, 5, 7])))
    m.assign(loc, Value(V.ANY_INT, 42))
    assert m.read(m.store[m.env["C"]].v[-1]).v == 42
    with pytest.raises(STTypeError):
        m.find_index(("C", ("field", "x")))


def test_struct_field_location():
    m = Machine()
    point = V.StructType("Point", (("x", INT, None), ("y", INT, None)))
    m.allocate("s", point)
    loc = m.find_index(("s", ("field", "x")))
    assert loc == m.store[m.env["s"]].v["x"]


def test_assign_wraps_and_respects_constants():
    m = Machine()
    loc = m.allocate("s", V.T["SINT"])
    m.assign(loc, Value(V.ANY_INT, 300))
    assert m.store[loc].v == 44
    m.set_constant(loc)
    with pytest.raises(ConstError):
        m.assign(loc, Value(V.ANY_INT, 5))


def test_clearenv():
    m = Machine()
    first = m.allocate("a", INT)
    m.clearenv("a")
    assert m.env["a"] is UNDEF
    with pytest.raises(UnboundVariable):
        m.lookup(("a",))
    with pytest.raises(UnboundVariable):
        m.clearenv("a")
    assert m.allocate("a", INT) != first


def test_register_global():
    m = Machine()
    m.register_global("g", INT)
    assert "g" in m.gvenv and "g" not in m.env and m.gvid == ["g"]
    with pytest.raises(RedeclarationError):
        m.register_global("g", INT)
    c = m.register_global("c", INT, Value(INT, 2), constant=True)
    with pytest.raises(ConstError):
        m.assign(c, Value(INT, 3))


def test_frames_are_lifo():
    m = Machine()
    m.env = {"outer": 1}
    m.push_frame(Frame("f1", dict(m.env), {}, 0))
    m.env = {"middle": 2}
    m.push_frame(Frame("f2", dict(m.env), {}, 0))
    m.env = {"inner": 3}
    assert m.pop_frame().pou == "f2" and m.env == {"middle": 2}
    assert m.pop_frame().pou == "f1" and m.env == {"outer": 1}
    with pytest.raises(EmptyStack):
        m.pop_frame()


def test_snapshot_rows():
    m = machine_with_program(b=V.TRUE, a=Value(INT, 1))
    assert m.snapshot("MAIN") == [("MAIN.a", "INT", "1"), ("MAIN.b", "BOOL", "TRUE")]
    assert format_snapshot(m.snapshot("MAIN")) == "MAIN.a : INT = 1\nMAIN.b : BOOL = TRUE\n"


def test_empty_program_snapshot():
    assert machine_with_program().snapshot("MAIN") == []


def test_fb_internals_in_snapshot():
    src = """
    FUNCTION_BLOCK Counter VAR n : INT; END_VAR n := n + 1; END_FUNCTION_BLOCK
    PROGRAM MAIN VAR fb1 : Counter; END_VAR fb1(); fb1(); END_PROGRAM
    """
    interp = Interpreter(parse_source(src))
    interp.run()
    assert ("MAIN.fb1.n", "INT", "2") in interp.m.snapshot("MAIN")


@settings(max_examples=50, deadline=None)
@given(st.lists(st.sampled_from(["alloc", "global", "clear", "cell"]), max_size=40))
def test_locations_never_reused(ops):
    m = Machine()
    seen = []
    for n, op in enumerate(ops):
        if op == "alloc":
            seen.append(m.allocate(f"v{n}", INT))
        elif op == "global":
            seen.append(m.register_global(f"g{n}", INT))
        elif op == "cell":
            seen.append(m.new_cell(V.ArrayType(((0, 2),), INT)))
        elif m.env:
            name = next((k for k, v in m.env.items() if v is not UNDEF), None)
            if name:
                m.clearenv(name)
    assert len(set(seen)) == len(seen)
    assert set(m.store) == set(m.type_map)
    assert set(m.const_map) <= set(m.store)


def test_type_map_is_stable_across_a_run():
    interp = Interpreter(parse_source((CORPUS / "programs/22_fb_counter.st").read_text()))
    before = {}
    original_assign = interp.m.assign

    def watching_assign(loc, v):
        before.setdefault(loc, interp.m.type_map[loc])
        original_assign(loc, v)
        assert interp.m.type_map[loc] == before[loc]

    interp.m.assign = watching_assign
    interp.run()
    assert before


def test_constants_never_change():
    src = (CORPUS / "programs/26_constants.st").read_text()
    interp = Interpreter(parse_source(src))
    interp.run()
    frozen = {loc: interp.m.store[loc] for loc, flag in interp.m.const_map.items() if flag}
    assert frozen
    bad = src.replace("scaled := SCALE * SIZE;", "scaled := SCALE * SIZE;\n    SCALE := 1.0;")
    out = run_source(bad)
    assert isinstance(out, Abnormal) and out.error_kind == "ConstError"
