from pathlib import Path

import pytest

from stref.interp import Abnormal, Success, run_source

ROOT = Path(__file__).resolve().parents[1]
CORPUS = ROOT / "corpus"
PROGRAMS = sorted((CORPUS / "programs").glob("*.st"))
TRIGGERS = sorted((CORPUS / "triggers").glob("*.st"))


def program(decls: str, body: str, extra: str = "") -> str:
    return f"{extra}\nPROGRAM MAIN\nVAR\n{decls}\nEND_VAR\n{body}\nEND_PROGRAM\n"


def snapshot_of(outcome) -> dict:
    assert isinstance(outcome, Success), outcome
    return {q: v for q, _t, v in outcome.snapshot}


def run_vars(decls: str, body: str, extra: str = "", **kw) -> dict:
    """Run a one-program unit and return ``{short name: rendered value}``."""
    snap = snapshot_of(run_source(program(decls, body, extra), **kw))
    return {q.split(".", 1)[1] if q.startswith("MAIN.") else q: v for q, v in snap.items()}


def run_error(decls: str, body: str, extra: str = "") -> Abnormal:
    out = run_source(program(decls, body, extra))
    assert isinstance(out, Abnormal), out
    return out


@pytest.fixture
def corpus_dir() -> Path:
    return CORPUS
