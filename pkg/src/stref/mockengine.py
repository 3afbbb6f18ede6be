"""A deliberately defective engine used to exercise the differential tester.

Each defect class can be switched on separately with ``--bugs``:

``var_prefix``     crash on programs declaring an identifier that starts with VAR
``implicit_div``   division by a zero held in a variable yields 0
``implicit_index`` out-of-bounds access through a computed subscript is ignored
``mod_zero``       x MOD 0 yields 0
``mod_sign``       MOD takes the sign of the divisor
``no_power``       the ``**`` operator is rejected
"""

from __future__ import annotations

import argparse
import sys

from . import values as V
from .errors import IndexOutOfRange, UnsupportedFeature
from .interp import Abnormal, Interpreter, Outcome
from .machine import Location
from .syntax import ast as A

BUG_CLASSES = ("var_prefix", "implicit_div", "implicit_index", "mod_zero", "mod_sign", "no_power")


def _is_literal(e: A.Expr) -> bool:
    while isinstance(e, (A.Paren, A.UnaryOp)):
        e = e.inner if isinstance(e, A.Paren) else e.operand
    return isinstance(e, A.Literal)


def _walk(node):
    if isinstance(node, list):
        for x in node:
            yield from _walk(x)
    elif hasattr(node, "__dataclass_fields__"):
        yield node
        for f in node.__dataclass_fields__:
            yield from _walk(getattr(node, f))
    elif isinstance(node, tuple):
        for x in node:
            yield from _walk(x)


class EngineCrashed(Exception):
    """The emulated engine dies without producing a diagnostic."""


class BuggyInterpreter(Interpreter):
    bugs: frozenset = frozenset(BUG_CLASSES)

    def run(self, entry: str = "MAIN") -> Outcome:
        if "var_prefix" in self.bugs:
            for node in _walk(self.unit.pous):
                if isinstance(node, A.VarEntry) and any(n.upper().startswith("VAR") for n in node.names):
                    raise EngineCrashed(f"identifier {node.names[0]} aborted the engine")
        if "no_power" in self.bugs:
            for node in _walk(self.unit.pous):
                if isinstance(node, A.BinOp) and node.op == "**":
                    return Abnormal(UnsupportedFeature.kind, node.line, "'**' is not supported")
        return super().run(entry)

    def binary(self, op: str, a: V.Value, b: V.Value, node: A.BinOp) -> V.Value:
        zero = V.is_intlike(b.type) and b.v == 0 and V.is_intlike(a.type)
        if op == "/" and zero and "implicit_div" in self.bugs and not _is_literal(node.rhs):
            return V.Value(V.int_result_type(a.type, b.type), 0)
        if op == "MOD" and V.is_intlike(a.type) and V.is_intlike(b.type):
            t = V.int_result_type(a.type, b.type)
            if zero and "mod_zero" in self.bugs:
                return V.Value(t, 0)
            if b.v != 0 and "mod_sign" in self.bugs:
                return V.Value(t, V.wrap_to(a.v % b.v, t) if t is not V.ANY_INT else a.v % b.v)
        return super().binary(op, a, b, node)

    def locate(self, e: A.Expr) -> Location:
        try:
            return super().locate(e)
        except IndexOutOfRange:
            if "implicit_index" not in self.bugs or not isinstance(e, A.Index):
                raise
            if all(_is_literal(i) for i in e.indices):
                raise
            base = self.m.type_map[super().locate(e.base)]
            # reads see the default, writes land in a scratch cell
            return self.m.new_cell(base.element)


def make_engine(bugs) -> type:
    return type("BuggyInterpreter", (BuggyInterpreter,), {"bugs": frozenset(bugs)})


def parse_bugs(text: str) -> frozenset:
    if text == "all":
        return frozenset(BUG_CLASSES)
    if text == "none":
        return frozenset()
    chosen = frozenset(b.strip() for b in text.split(",") if b.strip())
    unknown = chosen - set(BUG_CLASSES)
    if unknown:
        raise ValueError(f"unknown bug classes: {', '.join(sorted(unknown))}")
    return chosen


def main(argv: list[str] | None = None) -> int:
    """``run`` with a ``--bugs`` selector in front; crashes exit 139 with no marker."""
    from .cli import EXIT_USAGE
    from .cli import main as cli_main

    parser = argparse.ArgumentParser(prog="stref-mock", add_help=False)
    parser.add_argument("--bugs", default="all")
    ns, rest = parser.parse_known_args(argv)
    try:
        engine = make_engine(parse_bugs(ns.bugs))
    except ValueError as exc:
        print(f"stref-mock: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return cli_main(["run", *rest], engine=engine)
    except EngineCrashed:
        print("Segmentation fault", file=sys.stderr)
        return 139


if __name__ == "__main__":
    sys.exit(main())
