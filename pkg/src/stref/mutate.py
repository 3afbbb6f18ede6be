"""Seeded mutation of ST programs for differential testing.

Operators rewrite the AST, so every mutant pretty-prints to parseable source.
A campaign applies ``rounds`` rounds; round ``r`` mutates every output of round
``r - 1``, giving ``seeds * (m + m**2 + ... + m**rounds)`` mutants.
"""

from __future__ import annotations

import copy
import json
import random
import string
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterator, Optional

from . import values as V
from .syntax import ast as A
from .syntax import parse_source, pretty_print


class NoApplicableSite(Exception):
    pass


OPERATORS = (
    "VariableRandomAssignment",
    "ScalarVariableReplacement",
    "ArithmeticOperatorReplacement",
    "ArithmeticOperatorInsertion",
    "ArithmeticOperatorDeletion",
    "RelationalOperatorReplacement",
    "LogicalConnectorReplacement",
    "LogicalConnectorInsertion",
    "LogicalConnectorDeletion",
    "NotMutation",
    "StatementInsertion",
    "StatementDeletion",
)

ARITH_FAMILY = ("+", "-", "*", "/", "MOD", "**")
REL_FAMILY = ("<", ">", "<=", ">=", "=", "<>")
LOGIC_FAMILY = ("AND", "OR", "XOR", "&", "AND_THEN", "OR_ELSE")
INSERT_LOGIC = ("AND", "OR", "XOR")
INSERT_ARITH = ("+", "-", "*", "/", "MOD")


@dataclass(frozen=True)
class MutationPlan:
    rng_seed: int = 0
    rounds: int = 3
    mutants_per_seed: int = 10
    weights: dict = field(default_factory=lambda: {op: 1.0 for op in OPERATORS})
    max_ops_per_mutant: int = 3
    max_retries: int = 20

    def __post_init__(self) -> None:
        if self.rounds < 1 or self.mutants_per_seed < 1 or self.max_ops_per_mutant < 1:
            raise ValueError("rounds, mutants_per_seed and max_ops_per_mutant must be positive")
        if not any(w > 0 for w in self.weights.values()):
            raise ValueError("at least one operator needs a positive weight")
        unknown = set(self.weights) - set(OPERATORS)
        if unknown:
            raise ValueError(f"unknown operators: {sorted(unknown)}")


def expected_count(seeds: int, rounds: int, per_seed: int) -> int:
    return seeds * sum(per_seed**r for r in range(1, rounds + 1))


# ---------------------------------------------------------------- scope and typing

_INT_NAMES = set(V.INT_INFO)
_FAMILY_OF = {**{n: "int" for n in V.INT_INFO}, **{n: "bits" for n in V.BIT_INFO}}
_FAMILY_OF.update({"REAL": "real", "LREAL": "real", "BOOL": "bool"})
_FAMILY_OF.update({n: n for n in V.TIME_NAMES})

NUMERIC = ("int", "real")


def _family(t: A.TypeExpr) -> Optional[str]:
    if isinstance(t, A.NamedType):
        return _FAMILY_OF.get(t.name)
    if isinstance(t, A.StringTypeExpr):
        return "wstring" if t.wide else "string"
    return None


@dataclass
class Scope:
    """Elementary variables visible inside one POU, by type family."""

    families: dict[str, str]
    types: dict[str, A.TypeExpr]
    writable: set[str]

    def of(self, family: str, writable: bool = False) -> list[str]:
        return sorted(n for n, f in self.families.items() if f == family and (not writable or n in self.writable))


def scope_of(pou, unit: A.SourceUnit) -> Scope:
    fams: dict[str, str] = {}
    types: dict[str, A.TypeExpr] = {}
    writable: set[str] = set()
    for sec in pou.sections:
        for e in sec.entries:
            f = _family(e.type)
            if f is None:
                continue
            for n in e.names:
                fams[n] = f
                types[n] = e.type
                if not sec.constant and sec.kind != "VAR_INPUT":
                    writable.add(n)
    if isinstance(pou, A.FunctionDecl):
        f = _family(pou.return_type)
        if f is not None:
            fams[pou.name] = f
            types[pou.name] = pou.return_type
            writable.add(pou.name)
    return Scope(fams, types, writable)


def infer_family(e: A.Expr, scope: Scope) -> Optional[str]:
    if isinstance(e, A.Literal):
        if e.kind == "int":
            return "int"
        if e.kind == "real":
            return "real"
        if e.kind == "bool":
            return "bool"
        return None
    if isinstance(e, A.Name):
        return scope.families.get(e.id)
    if isinstance(e, A.Paren):
        return infer_family(e.inner, scope)
    if isinstance(e, A.UnaryOp):
        return infer_family(e.operand, scope)
    if isinstance(e, A.BinOp):
        if e.op in REL_FAMILY:
            return "bool"
        return infer_family(e.lhs, scope)
    return None


# ---------------------------------------------------------------- random literals


def _int_node(n: int) -> A.Expr:
    lit = A.Literal("int", str(abs(n)))
    return A.UnaryOp("-", lit) if n < 0 else lit


def random_literal(t: A.TypeExpr, rng: random.Random) -> Optional[A.Expr]:
    """An initializer literal drawn from the full range of an elementary type."""
    if isinstance(t, A.StringTypeExpr):
        text = "".join(rng.choice(string.ascii_letters + string.digits) for _ in range(rng.randint(0, 8)))
        q = '"' if t.wide else "'"
        return A.Literal("wstring" if t.wide else "string", q + text + q)
    if not isinstance(t, A.NamedType):
        return None
    name = t.name
    if name in V.INT_INFO:
        lo, hi = V.int_bounds(V.T[name])
        return _int_node(rng.randint(lo, hi))
    if name in V.BIT_INFO:
        bits = V.BIT_INFO[name]
        return A.Literal("typed", "16#" + format(rng.getrandbits(bits), "X").zfill(bits // 4))
    if name in ("REAL", "LREAL"):
        x = round(rng.uniform(-1e4, 1e4), 3)
        lit = A.Literal("real", f"{abs(x):.3f}")
        return A.UnaryOp("-", lit) if x < 0 else lit
    if name == "BOOL":
        return A.Literal("bool", "TRUE" if rng.random() < 0.5 else "FALSE")
    ms = rng.randrange(V.DAY_MS)
    clock = f"{ms // 3_600_000:02d}:{ms // 60_000 % 60:02d}:{ms // 1000 % 60:02d}.{ms % 1000:03d}"
    day = V.EPOCH.replace(year=2024) + __import__("datetime").timedelta(days=rng.randrange(366))
    if name == "TIME":
        return A.Literal("typed", f"T#{ms}ms")
    if name == "TIME_OF_DAY":
        return A.Literal("typed", f"TOD#{clock}")
    if name == "DATE":
        return A.Literal("typed", f"D#{day.isoformat()}")
    if name == "DATE_AND_TIME":
        return A.Literal("typed", f"DT#{day.isoformat()}-{clock}")
    return None


def _small_literal(family: str, rng: random.Random) -> Optional[A.Expr]:
    if family == "int":
        return _int_node(rng.randint(-100, 100))
    if family == "real":
        return A.Literal("real", f"{rng.uniform(0, 100):.2f}")
    if family == "bool":
        return A.Literal("bool", rng.choice(("TRUE", "FALSE")))
    return None


def _operand(family: str, scope: Scope, rng: random.Random) -> A.Expr:
    names = scope.of(family)
    if names and rng.random() < 0.6:
        return A.Name(rng.choice(names))
    lit = _small_literal(family, rng)
    if lit is None:
        raise NoApplicableSite(f"no operand for family {family}")
    return lit


# ---------------------------------------------------------------- site enumeration


@dataclass
class Slot:
    """A replaceable expression position."""

    owner: object
    attr: str
    index: Optional[int]
    pou: object

    def get(self) -> A.Expr:
        v = getattr(self.owner, self.attr)
        return v if self.index is None else v[self.index]

    def set(self, new: A.Expr) -> None:
        if self.index is None:
            setattr(self.owner, self.attr, new)
        else:
            getattr(self.owner, self.attr)[self.index] = new


def _expr_slots(owner, attr: str, index: Optional[int], pou) -> Iterator[Slot]:
    slot = Slot(owner, attr, index, pou)
    e = slot.get()
    yield slot
    if isinstance(e, A.BinOp):
        yield from _expr_slots(e, "lhs", None, pou)
        yield from _expr_slots(e, "rhs", None, pou)
    elif isinstance(e, A.UnaryOp):
        yield from _expr_slots(e, "operand", None, pou)
    elif isinstance(e, A.Paren):
        yield from _expr_slots(e, "inner", None, pou)
    elif isinstance(e, A.Call):
        for a in e.args:
            yield from _expr_slots(a, "value", None, pou)
    elif isinstance(e, A.Index):
        for i in range(len(e.indices)):
            yield from _expr_slots(e, "indices", i, pou)


def _target_slots(target: A.Expr, pou) -> Iterator[Slot]:
    # only subscripts inside an assignment target are rewritten, never the target itself
    if isinstance(target, A.Index):
        for i in range(len(target.indices)):
            yield from _expr_slots(target, "indices", i, pou)
        yield from _target_slots(target.base, pou)
    elif isinstance(target, A.Member):
        yield from _target_slots(target.base, pou)


def statement_lists(unit: A.SourceUnit) -> Iterator[tuple[list, object]]:
    def walk(stmts: list, pou):
        yield stmts, pou
        for s in stmts:
            if isinstance(s, A.If):
                yield from walk(s.then, pou)
                for _, body in s.elifs:
                    yield from walk(body, pou)
                if s.else_ is not None:
                    yield from walk(s.else_, pou)
            elif isinstance(s, A.Case):
                for b in s.blocks:
                    yield from walk(b.body, pou)
                if s.else_ is not None:
                    yield from walk(s.else_, pou)
            elif isinstance(s, (A.While, A.For, A.Repeat)):
                yield from walk(s.body, pou)

    for pou in unit.pous:
        yield from walk(pou.body, pou)


def expression_slots(unit: A.SourceUnit) -> list[Slot]:
    out: list[Slot] = []
    for stmts, pou in statement_lists(unit):
        for s in stmts:
            if isinstance(s, A.Assign):
                out.extend(_target_slots(s.target, pou))
                out.extend(_expr_slots(s, "value", None, pou))
            elif isinstance(s, A.ExprStmt) and isinstance(s.expr, A.Call):
                for a in s.expr.args:
                    out.extend(_expr_slots(a, "value", None, pou))
            elif isinstance(s, A.If):
                out.extend(_expr_slots(s, "cond", None, pou))
                for i in range(len(s.elifs)):
                    out.extend(_elif_slots(s, i, pou))
            elif isinstance(s, A.Case):
                out.extend(_expr_slots(s, "selector", None, pou))
            elif isinstance(s, (A.While, A.Repeat)):
                out.extend(_expr_slots(s, "cond", None, pou))
            elif isinstance(s, A.For):
                for attr in ("start", "stop", "step"):
                    if getattr(s, attr) is not None:
                        out.extend(_expr_slots(s, attr, None, pou))
    return out


class _ElifCond:
    """Adapter giving an ELSIF condition a settable ``cond`` attribute."""

    def __init__(self, stmt: A.If, i: int):
        self.stmt, self.i = stmt, i

    @property
    def cond(self) -> A.Expr:
        return self.stmt.elifs[self.i][0]

    @cond.setter
    def cond(self, new: A.Expr) -> None:
        self.stmt.elifs[self.i] = (new, self.stmt.elifs[self.i][1])


def _elif_slots(s: A.If, i: int, pou) -> Iterator[Slot]:
    yield from _expr_slots(_ElifCond(s, i), "cond", None, pou)


# ---------------------------------------------------------------- operators


class Mutator:
    def __init__(self, unit: A.SourceUnit, rng: random.Random):
        self.unit = unit
        self.rng = rng
        self._scopes = {id(p): scope_of(p, unit) for p in unit.pous}

    def scope(self, pou) -> Scope:
        return self._scopes[id(pou)]

    def _pick(self, sites: list):
        if not sites:
            raise NoApplicableSite("no applicable site")
        return sites[self.rng.randrange(len(sites))]

    def _slots(self, pred: Callable[[Slot, A.Expr], bool]) -> list[Slot]:
        return [s for s in expression_slots(self.unit) if pred(s, s.get())]

    def _swap(self, family: tuple[str, ...]) -> None:
        slot = self._pick(self._slots(lambda s, e: isinstance(e, A.BinOp) and e.op in family))
        e = slot.get()
        e.op = self.rng.choice([o for o in family if o != e.op])

    def _delete(self, family: tuple[str, ...]) -> None:
        slot = self._pick(self._slots(lambda s, e: isinstance(e, A.BinOp) and e.op in family))
        slot.set(slot.get().lhs)

    def _typed(self, families: tuple[str, ...]) -> list[Slot]:
        return self._slots(lambda s, e: infer_family(e, self.scope(s.pou)) in families)

    def VariableRandomAssignment(self) -> None:
        entries = [
            e
            for p in self.unit.pous
            for sec in p.sections
            if sec.kind in ("VAR", "VAR_OUTPUT", "VAR_TEMP", "VAR_INPUT") and not sec.constant
            for e in sec.entries
            if random_literal(e.type, random.Random(0)) is not None
        ]
        e = self._pick(entries)
        e.init = random_literal(e.type, self.rng)

    def ScalarVariableReplacement(self) -> None:
        slot = self._pick(
            self._slots(
                lambda s, e: isinstance(e, A.Name) and self.scope(s.pou).families.get(e.id) in NUMERIC + ("bool",)
            )
        )
        scope = self.scope(slot.pou)
        fam = scope.families[slot.get().id]
        others = [n for n in scope.of(fam) if n != slot.get().id]
        if others and self.rng.random() < 0.7:
            slot.set(A.Name(self.rng.choice(others)))
        else:
            slot.set(_small_literal(fam, self.rng))

    def ArithmeticOperatorReplacement(self) -> None:
        self._swap(ARITH_FAMILY)

    def ArithmeticOperatorInsertion(self) -> None:
        slot = self._pick(self._typed(NUMERIC))
        fam = infer_family(slot.get(), self.scope(slot.pou))
        op = self.rng.choice(INSERT_ARITH if fam == "int" else INSERT_ARITH[:4])
        slot.set(A.BinOp(op, slot.get(), _operand(fam, self.scope(slot.pou), self.rng)))

    def ArithmeticOperatorDeletion(self) -> None:
        self._delete(ARITH_FAMILY)

    def RelationalOperatorReplacement(self) -> None:
        self._swap(REL_FAMILY)

    def LogicalConnectorReplacement(self) -> None:
        self._swap(LOGIC_FAMILY)

    def LogicalConnectorInsertion(self) -> None:
        slot = self._pick(self._typed(("bool",)))
        op = self.rng.choice(INSERT_LOGIC)
        slot.set(A.BinOp(op, slot.get(), _operand("bool", self.scope(slot.pou), self.rng)))

    def LogicalConnectorDeletion(self) -> None:
        self._delete(LOGIC_FAMILY)

    def NotMutation(self) -> None:
        slot = self._pick(
            self._slots(
                lambda s, e: (isinstance(e, A.UnaryOp) and e.op == "NOT")
                or infer_family(e, self.scope(s.pou)) == "bool"
            )
        )
        e = slot.get()
        if isinstance(e, A.UnaryOp) and e.op == "NOT":
            slot.set(e.operand)
        else:
            slot.set(A.UnaryOp("NOT", e))

    def _random_assignment(self, scope: Scope) -> A.Assign:
        targets = [n for f in NUMERIC + ("bool",) for n in scope.of(f, writable=True)]
        if not targets:
            raise NoApplicableSite("no writable scalar in scope")
        target = self.rng.choice(targets)
        fam = scope.families[target]
        value = _operand(fam, scope, self.rng)
        if fam in NUMERIC and self.rng.random() < 0.5:
            value = A.BinOp(self.rng.choice(INSERT_ARITH[:3]), value, _operand(fam, scope, self.rng))
        return A.Assign(A.Name(target), value)

    def StatementInsertion(self) -> None:
        stmts, pou = self._pick(list(statement_lists(self.unit)))
        scope = self.scope(pou)
        stmt: A.Statement = self._random_assignment(scope)
        numerics = scope.of("int") + scope.of("real")
        if numerics and self.rng.random() < 0.5:
            lhs = A.Name(self.rng.choice(numerics))
            fam = scope.families[lhs.id]
            cond = A.BinOp(self.rng.choice(REL_FAMILY), lhs, _operand(fam, scope, self.rng))
            stmt = A.If(cond, [stmt], [], None)
        stmts.insert(self.rng.randint(0, len(stmts)), stmt)

    def StatementDeletion(self) -> None:
        sites = [(stmts, i) for stmts, _ in statement_lists(self.unit) for i in range(len(stmts))]
        stmts, i = self._pick(sites)
        del stmts[i]

    def apply(self, op: str) -> None:
        if op not in OPERATORS:
            raise ValueError(f"unknown mutation operator {op}")
        getattr(self, op)()


def random_init(unit: A.SourceUnit, rng: random.Random) -> A.SourceUnit:
    """Copy of ``unit`` where every elementary variable gets a random initializer."""
    unit = copy.deepcopy(unit)
    for sections in [unit.globals] + [p.sections for p in unit.pous]:
        for sec in sections:
            if sec.constant or sec.kind in ("VAR_IN_OUT", "VAR_EXTERNAL"):
                continue
            for e in sec.entries:
                lit = random_literal(e.type, rng)
                if lit is not None:
                    e.init = lit
    return unit


def apply_operator(op: str, unit: A.SourceUnit, rng: random.Random) -> A.SourceUnit:
    unit = copy.deepcopy(unit)
    Mutator(unit, rng).apply(op)
    return unit


# ---------------------------------------------------------------- campaigns


@dataclass
class Mutant:
    seed_index: int
    round: int
    parent: Optional[int]  # index of the parent mutant in the same list, None for the seed
    source: str
    trace: list[str]

    def unit(self) -> A.SourceUnit:
        return parse_source(self.source)


def _mutate_once(unit: A.SourceUnit, plan: MutationPlan, rng: random.Random) -> tuple[str, list[str]]:
    mutant = random_init(unit, rng)
    ops = [op for op in OPERATORS if plan.weights.get(op, 0) > 0]
    weights = [plan.weights[op] for op in ops]
    trace = ["random_init"]
    for _ in range(rng.randint(1, plan.max_ops_per_mutant)):
        for _attempt in range(plan.max_retries):
            op = rng.choices(ops, weights)[0]
            candidate = copy.deepcopy(mutant)
            try:
                Mutator(candidate, rng).apply(op)
            except NoApplicableSite:
                continue
            mutant = candidate
            trace.append(op)
            break
        else:
            trace.append("skipped")
    return pretty_print(mutant), trace


def mutate_program(seed_unit: A.SourceUnit, plan: MutationPlan, seed_index: int = 0) -> list[Mutant]:
    """All mutants of one seed over ``plan.rounds`` rounds, breadth first."""
    out: list[Mutant] = []
    frontier: list[tuple[Optional[int], A.SourceUnit]] = [(None, seed_unit)]
    for r in range(1, plan.rounds + 1):
        nxt = []
        for parent, unit in frontier:
            for k in range(plan.mutants_per_seed):
                rng = random.Random(f"{plan.rng_seed}:{seed_index}:{r}:{parent}:{k}")
                text, trace = _mutate_once(unit, plan, rng)
                out.append(Mutant(seed_index, r, parent, text, trace))
                nxt.append((len(out) - 1, parse_source(text)))
        frontier = nxt
    return out


def mutate_corpus(seeds: list[A.SourceUnit], plan: MutationPlan) -> list[Mutant]:
    out: list[Mutant] = []
    for i, unit in enumerate(seeds):
        out.extend(mutate_program(unit, plan, i))
    return out


def write_corpus(mutants: list[Mutant], out_dir: Path, seed_paths: Optional[list[str]] = None) -> list[Path]:
    """Write numbered ``.st`` files and ``manifest.jsonl``; returns the program paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    with open(out_dir / "manifest.jsonl", "w", encoding="utf-8") as manifest:
        for n, m in enumerate(mutants):
            p = out_dir / f"mutant_{n:06d}.st"
            p.write_text(m.source, encoding="utf-8")
            paths.append(p)
            row = {
                "file": p.name,
                "seed": seed_paths[m.seed_index] if seed_paths else m.seed_index,
                "round": m.round,
                "parent": m.parent,
                "operators": m.trace,
            }
            manifest.write(json.dumps(row, sort_keys=True) + "\n")
    return paths
