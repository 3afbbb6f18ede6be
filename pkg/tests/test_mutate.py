import collections
import math
import random
import time

import pytest

from stref.mutate import (
    OPERATORS,
    MutationPlan,
    NoApplicableSite,
    apply_operator,
    expected_count,
    mutate_corpus,
    mutate_program,
    random_init,
    write_corpus,
)
from stref.syntax import parse_source, pretty_print
from stref.syntax import ast as A

from conftest import PROGRAMS

TABLE = {
    "VariableRandomAssignment", "ScalarVariableReplacement", "ArithmeticOperatorReplacement",
    "ArithmeticOperatorInsertion", "ArithmeticOperatorDeletion", "RelationalOperatorReplacement",
    "LogicalConnectorReplacement", "LogicalConnectorInsertion", "LogicalConnectorDeletion", "NotMutation",
    "StatementInsertion", "StatementDeletion",
}

POINT = "TYPE Point : STRUCT x : INT; END_STRUCT; END_TYPE\n"


def unit_of(decls, body, extra=""):
    return parse_source(f"{extra}PROGRAM MAIN\nVAR\n{decls}\nEND_VAR\n{body}\nEND_PROGRAM\n")


def body_text(unit):
    return pretty_print(unit).split("END_VAR\n", 1)[1]


def test_operator_set():
    assert set(OPERATORS) == TABLE and len(OPERATORS) == 12


def test_plan_validation():
    with pytest.raises(ValueError):
        MutationPlan(rounds=0)
    with pytest.raises(ValueError):
        MutationPlan(weights={op: 0 for op in OPERATORS})


def test_random_init():
    unit = unit_of("a : INT;\nb : BOOL;\np : Point;\ns : STRING[5];", "", POINT)
    out = random_init(unit, random.Random(1))
    entries = {e.names[0]: e for e in out.pous[0].sections[0].entries}
    init = entries["a"].init
    a = -int(init.operand.text) if isinstance(init, A.UnaryOp) else int(init.text)
    assert -32768 <= a <= 32767
    assert entries["b"].init.text in ("TRUE", "FALSE")
    assert entries["p"].init is None
    assert len(entries["s"].init.text) - 2 <= 8
    assert unit.pous[0].sections[0].entries[0].init is None  # the input is left alone


def test_random_init_covers_both_booleans():
    unit = unit_of("b : BOOL;", "")
    seen = {random_init(unit, random.Random(k)).pous[0].sections[0].entries[0].init.text for k in range(40)}
    assert seen == {"TRUE", "FALSE"}


def test_relational_replacement():
    unit = unit_of("a : INT;\nb : INT;\nr : BOOL;", "r := a > b;")
    for k in range(20):
        out = body_text(apply_operator("RelationalOperatorReplacement", unit, random.Random(k)))
        op = out.split("a ", 1)[1].split(" b")[0]
        assert op in ("<", "<=", ">=", "=", "<>")


def test_logical_deletion_keeps_left_operand():
    unit = unit_of("a : BOOL;\nb : BOOL;\nc : BOOL;\nr : BOOL;", "r := a AND b OR c;")
    results = {body_text(apply_operator("LogicalConnectorDeletion", unit, random.Random(k))) for k in range(30)}
    first = {r.split("\n")[0].strip() for r in results}
    assert first == {"r := a AND b;", "r := a OR c;"}


def test_statement_deletion_of_exit():
    unit = unit_of("i : INT;", "WHILE TRUE DO\n    EXIT;\nEND_WHILE;")
    for k in range(10):
        out = apply_operator("StatementDeletion", unit, random.Random(k))
        text = body_text(out)
        assert "EXIT;" not in text or "WHILE" not in text


def test_no_applicable_site():
    unit = unit_of("a : INT;", "a := 1;")
    with pytest.raises(NoApplicableSite):
        apply_operator("LogicalConnectorDeletion", unit, random.Random(0))


def test_scalar_replacement_stays_in_family():
    unit = unit_of("a : INT;\nb : INT;\nc : INT;\nf : BOOL;", "a := b;")
    for k in range(30):
        rhs = body_text(apply_operator("ScalarVariableReplacement", unit, random.Random(k))).split(":= ")[1]
        assert "f" not in rhs and "TRUE" not in rhs and "FALSE" not in rhs


@pytest.mark.parametrize("op", sorted(TABLE - {"StatementInsertion", "StatementDeletion"}))
def test_mutants_reparse(op):
    applied = 0
    for path in PROGRAMS:
        unit = parse_source(path.read_text())
        for k in range(3):
            try:
                out = apply_operator(op, unit, random.Random(k))
            except NoApplicableSite:
                continue
            applied += 1
            text = pretty_print(out)
            assert pretty_print(parse_source(text)) == text
    assert applied


def test_site_fairness():
    unit = unit_of("a : INT;\nb : INT;\nc : BOOL;\nd : BOOL;", "c := a > b;\nd := a < b;\nc := a = b;\nd := b >= a;")
    draws = 1200
    counts = collections.Counter()
    for k in range(draws):
        out = body_text(apply_operator("RelationalOperatorReplacement", unit, random.Random(k))).splitlines()
        original = body_text(unit).splitlines()
        (changed,) = [i for i, (x, y) in enumerate(zip(out, original)) if x != y]
        counts[changed] += 1
    p = 1 / 4
    sigma = math.sqrt(draws * p * (1 - p))
    assert all(abs(counts[i] - draws * p) <= 3 * sigma for i in range(4)), counts


def test_count_law():
    assert expected_count(30, 3, 10) == 33_300
    assert expected_count(1, 1, 1) == 1
    assert expected_count(3, 2, 4) == 60


def test_single_mutant():
    unit = parse_source(PROGRAMS[0].read_text())
    assert len(mutate_program(unit, MutationPlan(rounds=1, mutants_per_seed=1))) == 1


def test_rounds_build_on_previous_round():
    unit = parse_source(PROGRAMS[0].read_text())
    mutants = mutate_program(unit, MutationPlan(rounds=2, mutants_per_seed=2))
    assert [m.round for m in mutants] == [1, 1, 2, 2, 2, 2]
    assert [m.parent for m in mutants] == [None, None, 0, 0, 1, 1]


def test_corpus_is_deterministic(tmp_path):
    seeds = [parse_source(p.read_text()) for p in PROGRAMS[:3]]
    plan = MutationPlan(rng_seed=7, rounds=2, mutants_per_seed=3)
    first = write_corpus(mutate_corpus(seeds, plan), tmp_path / "a")
    second = write_corpus(mutate_corpus(seeds, plan), tmp_path / "b")
    assert [p.read_bytes() for p in first] == [p.read_bytes() for p in second]
    assert (tmp_path / "a/manifest.jsonl").read_bytes() == (tmp_path / "b/manifest.jsonl").read_bytes()
    other = mutate_corpus(seeds, MutationPlan(rng_seed=8, rounds=2, mutants_per_seed=3))
    assert [m.source for m in other] != [p.read_text() for p in first]


def test_desk_scale_generation_speed():
    seeds = [parse_source(p.read_text()) for p in PROGRAMS[:3]]
    start = time.perf_counter()
    mutants = mutate_corpus(seeds, MutationPlan(rounds=2, mutants_per_seed=4))
    assert len(mutants) == 60
    assert time.perf_counter() - start < 5.0


def test_traces_record_operators():
    unit = parse_source(PROGRAMS[0].read_text())
    for m in mutate_program(unit, MutationPlan(rounds=1, mutants_per_seed=5, max_ops_per_mutant=3)):
        assert m.trace[0] == "random_init"
        assert 2 <= len(m.trace) <= 4
        assert set(m.trace[1:]) <= TABLE | {"skipped"}
