import json
import logging

import pytest

from gcotrace.dataset import (
    CorpusMode,
    CorpusSpec,
    DatasetRecord,
    build_answer_only,
    build_corpus,
    derive_seed,
    emit_records,
    file_digest,
    instance_from_input,
    load_records,
    manifest_path,
    record_input,
    task_description,
)
from gcotrace.eval import parse_answer
from gcotrace.graph import SizeClass, TaskKind, sample_instance
from gcotrace.thoughts import verify_trace

MIS_SMALL = {(TaskKind.MIS, SizeClass.SMALL): 10}


def test_small_corpus_replays():
    records = build_corpus(CorpusSpec(MIS_SMALL, seed=1))
    assert len(records) == 10
    for r in records:
        assert r.meta["kind"] == "MIS" and r.meta["size_class"] == "Small"
        assert r.input.startswith(task_description(TaskKind.MIS) + "\n")
        assert verify_trace(r.instance(), r.output).ok
        assert not r.output.endswith("\n")


def test_empty_spec(tmp_path):
    records = build_corpus(CorpusSpec({}, seed=3))
    manifest = emit_records(records, tmp_path / "empty.jsonl", CorpusSpec({}, seed=3))
    assert records == [] and manifest["records"] == 0
    assert (tmp_path / "empty.jsonl").read_bytes() == b""


def test_even_split_totals():
    spec = CorpusSpec.even(30_000)
    assert spec.total == 30_000
    assert set(spec.counts.values()) == {1500}
    odd = CorpusSpec.even(23)
    assert odd.total == 23 and max(odd.counts.values()) - min(odd.counts.values()) == 1


def test_spec_validation():
    with pytest.raises(ValueError):
        CorpusSpec({(TaskKind.MIS, SizeClass.SMALL): -1})
    with pytest.raises(ValueError):
        CorpusSpec({}, workers=0)


def test_answer_only_matches_thought_variant():
    spec = CorpusSpec.even(40, seed=5)
    full = build_corpus(spec)
    short = build_answer_only(spec)
    assert [r.input for r in full] == [r.input for r in short]
    for a, b in zip(full, short):
        assert b.output == a.output.splitlines()[-1]
        assert parse_answer(a.kind, b.output) == parse_answer(a.kind, a.output)
    mis = [r for r in short if r.kind is TaskKind.MIS]
    assert all(r.output.startswith("The maximum independent set is [") for r in mis)


def test_mode_field_selects_variant():
    spec = CorpusSpec(MIS_SMALL, seed=2, mode="answer-only")
    assert spec.mode is CorpusMode.ANSWER_ONLY
    assert all(len(r.output.splitlines()) == 1 for r in build_corpus(spec))


def test_deterministic_and_worker_independent(tmp_path):
    a = build_corpus(CorpusSpec.even(60, seed=9))
    b = build_corpus(CorpusSpec.even(60, seed=9, workers=2))
    emit_records(a, tmp_path / "a.jsonl")
    emit_records(b, tmp_path / "b.jsonl")
    assert (tmp_path / "a.jsonl").read_bytes() == (tmp_path / "b.jsonl").read_bytes()
    c = build_corpus(CorpusSpec.even(60, seed=10))
    assert [r.input for r in c] != [r.input for r in a]


def test_emit_and_reload(tmp_path):
    spec = CorpusSpec(MIS_SMALL, seed=4)
    records = build_corpus(spec)
    path = tmp_path / "out" / "mis.jsonl"
    manifest = emit_records(records, path, spec, {"note": "unit"})
    raw = path.read_bytes()
    assert raw.count(b"\n") == 10
    assert load_records(path) == records
    on_disk = json.loads(manifest_path(path).read_text())
    assert on_disk == manifest
    assert manifest["sha256"] == file_digest(path)
    assert manifest["counts"] == {"MIS/Small": 10}
    assert manifest["master_seed"] == 4 and manifest["note"] == "unit"
    assert {"generator_version", "sampler_version", "package_version"} <= set(manifest)


def test_digest_tracks_content(tmp_path):
    records = build_corpus(CorpusSpec(MIS_SMALL, seed=4))
    first = emit_records(records, tmp_path / "x.jsonl")["sha256"]
    tweaked = records[:-1] + [DatasetRecord(records[-1].input, records[-1].output + " ", records[-1].meta)]
    second = emit_records(tweaked, tmp_path / "x.jsonl")["sha256"]
    assert first != second
    assert emit_records(records, tmp_path / "x.jsonl")["sha256"] == first


def test_newlines_are_escaped(tmp_path):
    rec = DatasetRecord("a\nb", "line one\nline two", {"kind": "MIS", "size_class": "Small"})
    emit_records([rec], tmp_path / "n.jsonl")
    assert (tmp_path / "n.jsonl").read_text().count("\n") == 1
    assert load_records(tmp_path / "n.jsonl") == [rec]


def test_input_round_trip():
    inst = sample_instance(TaskKind.GED, SizeClass.SMALL, 3)
    back = instance_from_input(record_input(inst), TaskKind.GED)
    assert back.g == inst.g and back.h == inst.h


def test_seed_derivation_is_injective():
    seen = {derive_seed(m, i, a) for m in range(3) for i in range(300) for a in range(50)}
    assert len(seen) == 3 * 300 * 50


def test_overlong_outputs_resample(caplog):
    spec = CorpusSpec({(TaskKind.MVC, SizeClass.LARGE): 3}, seed=1, max_output_chars=1500)
    with caplog.at_level(logging.WARNING):
        records = build_corpus(spec)
    assert all(len(r.output) <= 1500 for r in records)
    assert any("resampling" in m for m in caplog.messages)
