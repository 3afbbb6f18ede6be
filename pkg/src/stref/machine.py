"""The runtime configuration: store, environments, stacks and memory rules."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Any, Iterator, Union

from . import values as V
from .errors import (
    ConstError,
    EmptyStack,
    IndexOutOfRange,
    RedeclarationError,
    SemanticError,
    STTypeError,
    UnboundVariable,
)
from .values import ArrayType, FBType, STType, StructType, Value


class Location(int):
    """A store address.  Subclassing int keeps hashing and ordering cheap."""

    __slots__ = ()

    @property
    def index(self) -> int:
        return int(self)

    def __repr__(self) -> str:
        return f"L{int(self)}"


class _Undef:
    """Marker left in an environment by ``clearenv``."""

    def __repr__(self) -> str:
        return "undef"


UNDEF = _Undef()


# ---------------------------------------------------------------- callable descriptors


@dataclass(frozen=True)
class FunLambda:
    name: str
    return_type: STType
    decl: Any


@dataclass(frozen=True)
class FunBLambda:
    name: str
    decl: Any


@dataclass(frozen=True)
class RunFunBLambda:
    """A FUNCTION_BLOCK instance; ``saved_env`` is empty until the first call."""

    name: str
    decl: Any
    saved_env: dict = field(default_factory=dict)


@dataclass(frozen=True)
class PLambda:
    name: str
    decl: Any
    saved_env: dict = field(default_factory=dict)


@dataclass(frozen=True)
class TypeDescriptor:
    name: str
    type: STType


@dataclass
class Frame:
    pou: str
    saved_env: dict
    saved_allenv: dict
    saved_loop_depth: int


# A resolved lvalue path: the root identifier followed by ('field', name)
# and ('index', [subscripts]) steps.
PathStep = Union[tuple[str, str], tuple[str, list[int]]]

GLOBAL_PREFIX = "GLOBAL"


class Machine:
    """Mutable configuration of one program run.  Not thread-safe."""

    def __init__(self) -> None:
        self.store: dict[Location, Value] = {}
        self.type_map: dict[Location, STType] = {}
        self.const_map: dict[Location, bool] = {}
        self.env: dict[str, Any] = {}
        self.genv: dict[str, Location] = {}
        self.gvenv: dict[str, Location] = {}
        self.allenv: dict[str, Any] = {}
        self.fstack: list[Frame] = []
        self.temp: dict[str, int] = {}
        self.count = 0
        self.gvid: list[str] = []
        self.print_log: list[str] = []
        self.loop_depth = 0
        self.next_loc = 0
        self.input_queue: list[Value] = []
        self.output_log: list[Value] = []
        self.diagnostics: list[str] = []
        self.types: dict[str, STType] = {}
        self.enum_members: dict[str, list[V.EnumType]] = {}

    # ---------------------------------------------------------------- cells

    def _fresh(self, t: STType, v: Value) -> Location:
        loc = Location(self.next_loc)
        self.next_loc += 1
        self.store[loc] = v
        self.type_map[loc] = t
        return loc

    def default_of(self, t: STType) -> Value:
        if isinstance(t, FBType):
            desc = self.store[self.genv[t.name]].v
            return Value(t, RunFunBLambda(t.name, desc.decl))
        return V.default_value(t)

    def new_cell(self, t: STType, v: Value | None = None) -> Location:
        """Allocate storage for a value of type ``t``; compound types recurse."""
        if v is None:
            v = self.default_of(t)
        if isinstance(t, StructType):
            if not (isinstance(v.type, StructType) and v.type == t):
                raise STTypeError(f"cannot initialize {t.name} from {V.render_type(v.type)}")
            return self._fresh(t, Value(t, {f: self.new_cell(ft, v.v[f]) for f, ft, _ in t.fields}))
        if isinstance(t, ArrayType):
            items = self._array_items(t, v)
            return self._fresh(t, Value(t, [self.new_cell(t.element, x) for x in items]))
        if isinstance(t, FBType):
            if v.type != t:
                raise STTypeError(f"cannot initialize instance of {t.name}")
            return self._fresh(t, v)
        return self._fresh(t, V.limit_assign(v, t))

    def _array_items(self, t: ArrayType, v: Value) -> list[Value]:
        if not isinstance(v.type, ArrayType) or len(v.v) != t.size:
            raise STTypeError(f"array shape mismatch assigning to {V.render_type(t)}")
        return v.v

    # ---------------------------------------------------------------- memory rules

    def allocate(self, ident: str, t: STType, init: Value | None = None) -> Location:
        if ident in self.env and self.env[ident] is not UNDEF:
            raise RedeclarationError(f"{ident} is already declared")
        loc = self.new_cell(t, init)
        self.env[ident] = loc
        return loc

    def register_global(self, ident: str, t: STType, init: Value | None = None, constant: bool = False) -> Location:
        if ident in self.gvenv:
            raise RedeclarationError(f"global {ident} is already declared")
        loc = self.new_cell(t, init)
        self.gvenv[ident] = loc
        self.gvid.append(ident)
        if constant:
            self.set_constant(loc)
        return loc

    def set_constant(self, loc: Location) -> None:
        self.const_map[loc] = True
        v = self.store[loc]
        if isinstance(v.type, StructType):
            for child in v.v.values():
                self.set_constant(child)
        elif isinstance(v.type, ArrayType):
            for child in v.v:
                self.set_constant(child)

    def resolve(self, ident: str) -> Location:
        loc = self.env.get(ident, UNDEF)
        if loc is UNDEF:
            loc = self.genv.get(ident, UNDEF)
        if loc is UNDEF:
            raise UnboundVariable(f"{ident} is not declared")
        return loc

    def find_index(self, path: tuple) -> Location:
        """Terminal location for an lvalue path, resolved one step at a time."""
        loc = self.resolve(path[0])
        for kind, arg in path[1:]:
            cur = self.store[loc]
            t = cur.type
            if kind == "field":
                if isinstance(t, StructType):
                    if arg not in cur.v:
                        raise UnboundVariable(f"{t.name} has no field {arg}")
                    loc = cur.v[arg]
                elif isinstance(t, FBType):
                    saved = cur.v.saved_env
                    if arg not in saved:
                        raise UnboundVariable(f"{arg} is not accessible on instance of {t.name}")
                    loc = saved[arg]
                else:
                    raise STTypeError(f"member access .{arg} on {V.render_type(t)}")
            else:
                if not isinstance(t, ArrayType):
                    raise STTypeError(f"subscript on non-array {V.render_type(t)}")
                if len(arg) != len(t.ranges):
                    raise STTypeError(f"{len(t.ranges)}-dimensional array indexed with {len(arg)} subscripts")
                offset = 0
                for i, ((lo, hi), k) in enumerate(zip(t.ranges, arg)):
                    if not lo <= k <= hi:
                        raise IndexOutOfRange(f"subscript {k} outside [{lo}..{hi}] in dimension {i + 1}")
                    offset = offset * (hi - lo + 1) + (k - lo)
                loc = cur.v[offset]
        return loc

    def read(self, loc: Location) -> Value:
        """Value at ``loc``; compound values come back detached (deep copy)."""
        v = self.store[loc]
        if isinstance(v.type, StructType):
            return Value(v.type, {f: self.read(child) for f, child in v.v.items()})
        if isinstance(v.type, ArrayType):
            return Value(v.type, [self.read(child) for child in v.v])
        return v

    def lookup(self, path: tuple) -> Value:
        return self.read(self.find_index(path))

    def assign(self, loc: Location, v: Value) -> None:
        if self.const_map.get(loc):
            raise ConstError("assignment to a CONSTANT variable")
        t = self.type_map[loc]
        cur = self.store[loc]
        if isinstance(t, StructType):
            if v.type != t:
                raise STTypeError(f"cannot assign {V.render_type(v.type)} to {t.name}")
            for f, child in cur.v.items():
                self.assign(child, v.v[f])
        elif isinstance(t, ArrayType):
            if len(t.ranges) > 1:
                raise SemanticError("whole-value assignment of multi-dimensional arrays is not supported")
            items = self._array_items(t, v)
            for child, x in zip(cur.v, items):
                self.assign(child, x)
        elif isinstance(t, FBType):
            raise STTypeError("function block instances cannot be assigned")
        else:
            self.store[loc] = V.limit_assign(v, t)

    def clearenv(self, ident: str) -> None:
        if self.env.get(ident, UNDEF) is UNDEF:
            raise UnboundVariable(f"{ident} is not declared")
        self.env[ident] = UNDEF

    def update(self, loc: Location, saved_env: dict) -> None:
        """Record an activation environment into an FB instance or program descriptor."""
        self.store[loc] = Value(self.store[loc].type, replace(self.store[loc].v, saved_env=dict(saved_env)))

    # ---------------------------------------------------------------- frames

    def push_frame(self, f: Frame) -> None:
        self.fstack.append(f)

    def pop_frame(self) -> Frame:
        if not self.fstack:
            raise EmptyStack("pop on empty function stack")
        f = self.fstack.pop()
        self.env = f.saved_env
        self.allenv = f.saved_allenv
        self.loop_depth = f.saved_loop_depth
        return f

    # ---------------------------------------------------------------- snapshot

    def _entries(self, prefix: str, env: dict, skip: set[Location]) -> Iterator[tuple[str, Location]]:
        for name, loc in env.items():
            if loc is UNDEF or loc in skip:
                continue
            v = self.store[loc]
            if isinstance(v.type, FBType):
                yield from self._entries(f"{prefix}.{name}", v.v.saved_env, skip)
            else:
                yield f"{prefix}.{name}", loc

    def snapshot(self, entry: str | None = None) -> list[tuple[str, str, str]]:
        """Sorted ``(qualified name, type, rendered value)`` for every live variable."""
        global_locs = set(self.gvenv.values())
        pairs: list[tuple[str, Location]] = [(f"{GLOBAL_PREFIX}.{n}", loc) for n, loc in self.gvenv.items()]
        for name, loc in self.genv.items():
            desc = self.store[loc].v
            if isinstance(desc, PLambda) and (desc.saved_env or name == entry):
                pairs.extend(self._entries(name, desc.saved_env, global_locs))
        rows = [(q, V.render_type(self.type_map[loc]), V.render(self.read(loc))) for q, loc in pairs]
        return sorted(rows)


def format_snapshot(rows: list[tuple[str, str, str]]) -> str:
    return "".join(f"{q} : {t} = {v}\n" for q, t, v in rows)
