"""Build fine-tuning corpora of (task description + instance, trace) records."""
from __future__ import annotations

import hashlib
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Any, Iterable

from .graph import (
    SAMPLER_VERSION,
    SizeClass,
    TaskInstance,
    TaskKind,
    parse_instance_text,
    render_instance_text,
    sample_instance,
)
from .solvers.base import DEFAULT_TIME_BUDGET, SolverTimeout
from .solvers.exact import solve
from .thoughts import generate_trace

log = logging.getLogger(__name__)

GENERATOR_VERSION = "trace-1"
MAX_ATTEMPTS = 50

SOLVER_NAMES = {
    TaskKind.NEIGHBOR: "adjacency-intersection",
    TaskKind.DISTANCE: "bfs",
    TaskKind.CONNECTED: "bfs",
    TaskKind.DIAMETER: "all-pairs-bfs",
    TaskKind.MCP: "clique-branch-and-bound",
    TaskKind.MIS: "complement-clique-branch-and-bound",
    TaskKind.MVC: "complement-of-independent-set",
    TaskKind.MCS: "partition-backtracking",
    TaskKind.GED: "assignment-branch-and-bound",
    TaskKind.TSP: "held-karp",
}


class CorpusMode(str, Enum):
    THOUGHT = "thought"
    ANSWER_ONLY = "answer-only"


@lru_cache(maxsize=None)
def task_descriptions() -> dict[str, str]:
    text = resources.files("gcotrace").joinpath("assets/task_descriptions.json").read_text(encoding="utf-8")
    return json.loads(text)


def task_description(kind: TaskKind) -> str:
    return task_descriptions()[kind.value]


def record_input(inst: TaskInstance) -> str:
    return task_description(inst.kind) + "\n" + render_instance_text(inst)


def instance_from_input(text: str, kind: TaskKind, instance_id: str = "") -> TaskInstance:
    """Recover the instance from a record's input text."""
    _, _, body = text.partition("\n")
    return parse_instance_text(body, kind, instance_id)


@dataclass(frozen=True)
class DatasetRecord:
    input: str
    output: str
    meta: dict[str, Any]

    def to_json(self) -> str:
        return json.dumps({"input": self.input, "output": self.output, "meta": self.meta}, ensure_ascii=False)

    @classmethod
    def from_json(cls, line: str) -> "DatasetRecord":
        data = json.loads(line)
        return cls(data["input"], data["output"], data["meta"])

    @property
    def kind(self) -> TaskKind:
        return TaskKind.parse(self.meta["kind"])

    def instance(self) -> TaskInstance:
        return instance_from_input(self.input, self.kind, self.meta.get("instance_id", ""))


@dataclass
class CorpusSpec:
    """How many instances of each (task, size class) to draw, and from which seed."""

    counts: dict[tuple[TaskKind, SizeClass], int]
    seed: int = 0
    mode: CorpusMode = CorpusMode.THOUGHT
    output: Path | None = None
    time_budget: float = DEFAULT_TIME_BUDGET
    max_output_chars: int | None = None
    workers: int = 1
    extra: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for key, count in self.counts.items():
            if count < 0:
                raise ValueError(f"negative count for {key[0]}/{key[1]}")
        if self.workers < 1:
            raise ValueError("workers must be positive")
        self.mode = CorpusMode(self.mode)

    @classmethod
    def even(cls, total: int, seed: int = 0, kinds: Iterable[TaskKind] | None = None,
             sizes: Iterable[SizeClass] | None = None, **kw: Any) -> "CorpusSpec":
        """Split ``total`` as evenly as possible over the chosen tasks and size classes."""
        cells = [(k, s) for k in (kinds or list(TaskKind)) for s in (sizes or list(SizeClass))]
        base, extra = divmod(total, len(cells))
        return cls({cell: base + (i < extra) for i, cell in enumerate(cells)}, seed, **kw)

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def jobs(self) -> list[tuple[TaskKind, SizeClass, int]]:
        out = []
        for kind in TaskKind:
            for size in SizeClass:
                out.extend((kind, size, i) for i in range(self.counts.get((kind, size), 0)))
        return out


def derive_seed(master: int, index: int, attempt: int) -> int:
    return (master << 32) | (index << 8) | attempt


def _make_record(kind: TaskKind, size: SizeClass, index: int, spec_seed: int, mode: CorpusMode,
                 time_budget: float, max_chars: int | None) -> tuple[DatasetRecord, list[str]]:
    events = []
    for attempt in range(MAX_ATTEMPTS):
        seed = derive_seed(spec_seed, index, attempt)
        inst_id = f"{kind.value.lower()}-{size.value.lower()}-{spec_seed}-{index}"
        inst = sample_instance(kind, size, seed, instance_id=inst_id)
        try:
            solution = solve(inst, time_budget)
        except SolverTimeout:
            events.append(f"{inst_id}: solver timed out on attempt {attempt}, resampling")
            continue
        if solution is None:
            solution_name = SOLVER_NAMES[kind]
            trace = generate_trace(inst)
        else:
            solution_name = SOLVER_NAMES[kind] + ("" if solution.exact else "+budgeted")
            trace = generate_trace(inst, solution if kind in _SOLUTION_FED else None)
        lines = trace.text_lines
        output = "\n".join(lines) if mode is CorpusMode.THOUGHT else lines[-1]
        if max_chars is not None and len(output) > max_chars:
            events.append(f"{inst_id}: output longer than {max_chars} characters on attempt {attempt}, resampling")
            continue
        meta = {
            "instance_id": inst_id,
            "kind": kind.value,
            "size_class": size.value,
            "seed": seed,
            "solver_name": solution_name,
            "generator_version": GENERATOR_VERSION,
        }
        return DatasetRecord(record_input(inst), output, meta), events
    raise RuntimeError(f"no usable {kind}/{size} instance after {MAX_ATTEMPTS} attempts")


_SOLUTION_FED = frozenset(k for k in TaskKind if k not in (TaskKind.NEIGHBOR, TaskKind.DISTANCE, TaskKind.CONNECTED))


def _job(args: tuple) -> tuple[DatasetRecord, list[str]]:
    return _make_record(*args)


def _run(spec: CorpusSpec, mode: CorpusMode) -> list[DatasetRecord]:
    args = [(k, s, i, spec.seed, mode, spec.time_budget, spec.max_output_chars) for k, s, i in spec.jobs()]
    if spec.workers == 1 or len(args) < 2:
        results = map(_job, args)
        return _collect(results)
    with ProcessPoolExecutor(spec.workers) as pool:
        return _collect(pool.map(_job, args, chunksize=max(1, len(args) // (spec.workers * 8))))


def _collect(results: Iterable[tuple[DatasetRecord, list[str]]]) -> list[DatasetRecord]:
    out = []
    for record, events in results:
        for event in events:
            log.warning(event)
        out.append(record)
    return out


def build_corpus(spec: CorpusSpec) -> list[DatasetRecord]:
    """Records ordered by task, size class, then instance index; worker count never changes the bytes."""
    return _run(spec, spec.mode)


def build_answer_only(spec: CorpusSpec) -> list[DatasetRecord]:
    """Same instances as :func:`build_corpus`, with only the answer sentence as output."""
    return _run(spec, CorpusMode.ANSWER_ONLY)


def manifest_path(path: Path) -> Path:
    return path.with_name(path.name + ".manifest.json")


def emit_records(records: list[DatasetRecord], path: Path | str, spec: CorpusSpec | None = None,
                 extra: dict[str, Any] | None = None) -> dict[str, Any]:
    """Write one JSON record per line plus a manifest next to it; returns the manifest."""
    from . import __version__

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = "".join(r.to_json() + "\n" for r in records).encode("utf-8")
    path.write_bytes(payload)
    counts: dict[str, int] = {}
    for r in records:
        key = f"{r.meta['kind']}/{r.meta['size_class']}"
        counts[key] = counts.get(key, 0) + 1
    manifest: dict[str, Any] = {
        "file": path.name,
        "records": len(records),
        "counts": counts,
        "sha256": hashlib.sha256(payload).hexdigest(),
        "generator_version": GENERATOR_VERSION,
        "sampler_version": SAMPLER_VERSION,
        "package_version": __version__,
    }
    if spec is not None:
        manifest["master_seed"] = spec.seed
        manifest["mode"] = spec.mode.value
        manifest["time_budget"] = spec.time_budget
        manifest["max_output_chars"] = spec.max_output_chars
        manifest["requested"] = {f"{k.value}/{s.value}": c for (k, s), c in spec.counts.items()}
        manifest.update(spec.extra)
    if extra:
        manifest.update(extra)
    manifest_path(path).write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return manifest


def load_records(path: Path | str) -> list[DatasetRecord]:
    with open(path, encoding="utf-8") as fh:
        return [DatasetRecord.from_json(line) for line in fh if line.strip()]


def file_digest(path: Path | str) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()
