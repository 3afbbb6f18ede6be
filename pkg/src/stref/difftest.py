"""Differential testing: run a program on the reference and on an external
engine, compare the outcomes and aggregate campaign reports."""

from __future__ import annotations

import json
import math
import os
import re
import shlex
import subprocess
import sys
import tempfile
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional, Union

from .interp import Abnormal, Outcome, Success, Timeout, fuel_for, run_source
from .mutate import MutationPlan, mutate_program, write_corpus
from .syntax import parse_source

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

ENV_ALLOW = ("PATH", "HOME", "LANG", "LC_ALL", "PYTHONPATH", "SYSTEMROOT", "TMPDIR", "VIRTUAL_ENV")
ERROR_RE = re.compile(r"^ERROR line=(\d+) kind=(\w+)", re.MULTILINE)
TIMEOUT_EXIT = 124


class AdapterError(Exception):
    """The external engine could not be started or configured."""


@dataclass(frozen=True)
class EngineAdapter:
    name: str
    command: tuple[str, ...]
    timeout_s: float = 10.0
    tolerance: Optional[float] = None
    program_level_only: bool = False

    @classmethod
    def from_command(cls, name: str, command: Union[str, list[str]], **kw) -> "EngineAdapter":
        argv = shlex.split(command) if isinstance(command, str) else list(command)
        if not argv:
            raise AdapterError(f"adapter {name} has an empty command")
        return cls(name, tuple(argv), **kw)

    @classmethod
    def load(cls, path: Union[str, Path]) -> "EngineAdapter":
        """Read a JSON or TOML adapter description."""
        path = Path(path)
        try:
            raw = path.read_bytes()
        except OSError as exc:
            raise AdapterError(f"cannot read adapter config {path}: {exc}") from None
        try:
            cfg = json.loads(raw) if path.suffix == ".json" else tomllib.loads(raw.decode("utf-8"))
        except (ValueError, tomllib.TOMLDecodeError) as exc:
            raise AdapterError(f"malformed adapter config {path}: {exc}") from None
        if "command" not in cfg:
            raise AdapterError(f"adapter config {path} has no command")
        return cls.from_command(
            cfg.get("name", path.stem),
            cfg["command"],
            timeout_s=float(cfg.get("timeout_s", 10.0)),
            tolerance=cfg.get("tolerance"),
            program_level_only=bool(cfg.get("program_level_only", False)),
        )

    def argv(self, program: Union[str, Path], timeout_s: float) -> list[str]:
        subs = {"program": str(program), "timeout_s": f"{timeout_s:g}", "python": sys.executable}
        return [part.format(**subs) for part in self.command]


@dataclass
class ExecResult:
    engine: str
    outcome: Outcome
    wall_ms: float
    raw: str = ""


# ---------------------------------------------------------------- running


def run_reference(program_path: Union[str, Path], timeout_s: float = 10.0) -> ExecResult:
    """Run the bundled interpreter; raises OSError when the file is unreadable."""
    source = Path(program_path).read_text(encoding="utf-8")
    start = time.perf_counter()
    outcome = run_source(source, fuel=fuel_for(timeout_s), timeout_s=timeout_s)
    return ExecResult("reference", outcome, (time.perf_counter() - start) * 1000)


def parse_snapshot(text: str) -> tuple[tuple[str, str, str], ...]:
    rows = []
    for line in text.splitlines():
        name, sep, rest = line.partition(" : ")
        typ, sep2, value = rest.partition(" = ")
        if sep and sep2 and name and " " not in name:
            rows.append((name, typ, value))
    return tuple(sorted(rows))


def parse_output(returncode: int, stdout: str, stderr: str) -> Outcome:
    if returncode == TIMEOUT_EXIT:
        return Timeout()
    m = ERROR_RE.search(stdout) or ERROR_RE.search(stderr)
    if m:
        return Abnormal(m.group(2), int(m.group(1)))
    if returncode != 0:
        return Abnormal("EngineCrash", 0, f"exit status {returncode}")
    return Success(parse_snapshot(stdout))


def _child_env() -> dict[str, str]:
    return {k: v for k, v in os.environ.items() if k in ENV_ALLOW}


def run_external(adapter: EngineAdapter, program_path: Union[str, Path], timeout_s: Optional[float] = None) -> ExecResult:
    timeout_s = adapter.timeout_s if timeout_s is None else timeout_s
    argv = adapter.argv(program_path, timeout_s)
    start = time.perf_counter()
    try:
        # a little slack so an engine enforcing the same budget can report it itself
        proc = subprocess.run(argv, capture_output=True, text=True, timeout=timeout_s + 5, env=_child_env())
    except subprocess.TimeoutExpired as exc:
        raw = exc.stdout.decode() if isinstance(exc.stdout, bytes) else (exc.stdout or "")
        return ExecResult(adapter.name, Timeout(), (time.perf_counter() - start) * 1000, raw)
    except OSError as exc:
        raise AdapterError(f"cannot start {argv[0]}: {exc}") from None
    wall = (time.perf_counter() - start) * 1000
    outcome = parse_output(proc.returncode, proc.stdout, proc.stderr)
    return ExecResult(adapter.name, outcome, wall, proc.stdout + proc.stderr)


# ---------------------------------------------------------------- verdicts


@dataclass(frozen=True)
class Verdict:
    kind: str  # Consistent | Inconsistent | BothTimeout
    reason: Optional[str] = None  # value-mismatch | one-failed | different-error-statement | one-timeout
    details: tuple = ()

    @property
    def consistent(self) -> bool:
        return self.kind == "Consistent"


CONSISTENT = Verdict("Consistent")
BOTH_TIMEOUT = Verdict("BothTimeout")


def _values_equal(t: str, a: str, b: str, tolerance: Optional[float]) -> bool:
    if a == b:
        return True
    if tolerance is None or t not in ("REAL", "LREAL"):
        return False
    try:
        x, y = float(a), float(b)
    except ValueError:
        return False
    return math.isclose(x, y, rel_tol=tolerance) or (math.isnan(x) and math.isnan(y))


def _outcome_of(r: Union[ExecResult, Outcome]) -> Outcome:
    return r.outcome if isinstance(r, ExecResult) else r


def compare(
    a: Union[ExecResult, Outcome],
    b: Union[ExecResult, Outcome],
    tolerance: Optional[float] = None,
    program_level_only: bool = False,
) -> Verdict:
    """Consistency verdict for two outcomes; ``a`` is conventionally the reference."""
    oa, ob = _outcome_of(a), _outcome_of(b)
    ta, tb = isinstance(oa, Timeout), isinstance(ob, Timeout)
    if ta and tb:
        return BOTH_TIMEOUT
    if ta or tb:
        return Verdict("Inconsistent", "one-timeout", ("first" if ta else "second",))
    if isinstance(oa, Abnormal) and isinstance(ob, Abnormal):
        if oa.line == ob.line:
            return CONSISTENT
        return Verdict("Inconsistent", "different-error-statement", (oa.line, ob.line))
    if isinstance(oa, Abnormal) or isinstance(ob, Abnormal):
        return Verdict("Inconsistent", "one-failed", ("first" if isinstance(oa, Abnormal) else "second",))

    def rows(o: Success) -> dict[str, tuple[str, str]]:
        return {
            q: (t, v)
            for q, t, v in o.snapshot
            if not program_level_only or q.count(".") == 1
        }

    ra, rb = rows(oa), rows(ob)
    bad = sorted(
        q
        for q in set(ra) | set(rb)
        if q not in ra or q not in rb or ra[q][0] != rb[q][0] or not _values_equal(ra[q][0], ra[q][1], rb[q][1], tolerance)
    )
    if bad:
        return Verdict("Inconsistent", "value-mismatch", tuple(bad))
    return CONSISTENT


# result taxonomy for campaign summaries
CATEGORIES = (
    "both_complete_equal",
    "both_complete_different",
    "reference_only_completes",
    "external_only_completes",
    "both_abnormal_same",
    "both_abnormal_different",
    "one_timeout",
    "both_timeout",
)


def categorize(ref: Outcome, ext: Outcome) -> str:
    if isinstance(ref, Timeout) and isinstance(ext, Timeout):
        return "both_timeout"
    if isinstance(ref, Timeout) or isinstance(ext, Timeout):
        return "one_timeout"
    if isinstance(ref, Success) and isinstance(ext, Success):
        return "both_complete_equal" if compare(ref, ext).consistent else "both_complete_different"
    if isinstance(ref, Success):
        return "reference_only_completes"
    if isinstance(ext, Success):
        return "external_only_completes"
    return "both_abnormal_same" if ref.line == ext.line else "both_abnormal_different"


# ---------------------------------------------------------------- campaigns


@dataclass
class ProgramRow:
    program: str
    verdict: str
    reason: Optional[str]
    details: list
    category: str
    reference: str
    external: str
    wall_ms: list[float]


@dataclass
class CampaignReport:
    rows: list[ProgramRow] = field(default_factory=list)
    counts: dict[str, int] = field(default_factory=lambda: {c: 0 for c in CATEGORIES})

    @property
    def inconsistent(self) -> list[ProgramRow]:
        return [r for r in self.rows if r.verdict == "Inconsistent"]

    def verdict_counts(self) -> dict[str, int]:
        out = {"Consistent": 0, "Inconsistent": 0, "BothTimeout": 0}
        for r in self.rows:
            out[r.verdict] += 1
        return out

    def summary(self) -> str:
        lines = [f"programs: {len(self.rows)}"]
        lines += [f"{k}: {v}" for k, v in self.verdict_counts().items()]
        lines += [f"  {c}: {self.counts[c]}" for c in CATEGORIES]
        return "\n".join(lines)

    def write(self, out_dir: Union[str, Path]) -> None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        with open(out_dir / "report.jsonl", "w", encoding="utf-8") as f:
            for r in self.rows:
                f.write(json.dumps(asdict(r), sort_keys=True) + "\n")
        summary = {"programs": len(self.rows), "verdicts": self.verdict_counts(), "categories": self.counts}
        (out_dir / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")


def _describe(o: Outcome) -> str:
    if isinstance(o, Success):
        return "success"
    if isinstance(o, Abnormal):
        return f"abnormal:{o.error_kind}@{o.line}"
    return "timeout"


def check_program(
    path: Union[str, Path], adapter: EngineAdapter, timeout_s: Optional[float] = None, label: Optional[str] = None
) -> ProgramRow:
    timeout_s = adapter.timeout_s if timeout_s is None else timeout_s
    ref = run_reference(path, timeout_s)
    ext = run_external(adapter, path, timeout_s)
    v = compare(ref, ext, adapter.tolerance, adapter.program_level_only)
    return ProgramRow(
        label or str(path),
        v.kind,
        v.reason,
        list(v.details),
        categorize(ref.outcome, ext.outcome),
        _describe(ref.outcome),
        _describe(ext.outcome),
        [round(ref.wall_ms, 1), round(ext.wall_ms, 1)],
    )


def campaign(
    seeds: list[Union[str, Path]],
    plan: Optional[MutationPlan],
    adapter: EngineAdapter,
    parallelism: int = 1,
    work_dir: Optional[Union[str, Path]] = None,
    timeout_s: Optional[float] = None,
) -> CampaignReport:
    """Test every seed and, when ``plan`` is given, every mutant derived from them."""
    programs = [Path(p) for p in seeds]
    labels = [str(p) for p in programs]
    tmp = None
    if plan is not None:
        if work_dir is None:
            tmp = tempfile.TemporaryDirectory(prefix="stref-mutants-")
            work_dir = tmp.name
        mutants = []
        for i, p in enumerate(programs):
            mutants.extend(mutate_program(parse_source(p.read_text(encoding="utf-8")), plan, i))
        written = write_corpus(mutants, Path(work_dir), labels)
        programs += written
        labels += [f"mutants/{p.name}" for p in written]
    try:
        with ThreadPoolExecutor(max_workers=max(1, parallelism)) as pool:
            rows = list(pool.map(lambda pl: check_program(pl[0], adapter, timeout_s, pl[1]), zip(programs, labels)))
    finally:
        if tmp is not None:
            tmp.cleanup()
    report = CampaignReport()
    for row in rows:
        report.rows.append(row)
        report.counts[row.category] += 1
    return report
