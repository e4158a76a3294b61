"""Command-line pipelines: sample, solve, build corpora, query models, score and report."""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path
from typing import Any, Sequence

from .graph import (
    SAMPLER_VERSION,
    InstanceParseError,
    SizeClass,
    TaskInstance,
    TaskKind,
    parse_instance_text,
    render_instance_text,
    sample_instance,
)

log = logging.getLogger("gcotrace")

EXIT_OK = 0
EXIT_USAGE = 2  # argparse's own code for bad flags
EXIT_PARSE = 3
EXIT_CONFIG = 4
EXIT_IO = 5
EXIT_REMOTE = 6

ENV_PREFIX = "GCOTRACE_"


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


# ---------------------------------------------------------------------------
# Configuration: flags > environment > config file > defaults

GATEWAY_DEFAULTS: dict[str, Any] = {
    "base_url": None,
    "model": "default",
    "temperature": 0.1,
    "max_tokens": 4096,
    "n": 1,
    "timeout": 120.0,
    "max_retries": 3,
    "concurrency": 8,
}


def load_config_file(path: str | None) -> dict[str, Any]:
    if not path:
        return {}
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise CliError(f"cannot read config file {path}: {exc}", EXIT_IO) from None
    except ValueError as exc:
        raise CliError(f"config file {path} is not valid JSON: {exc}", EXIT_CONFIG) from None
    if not isinstance(data, dict):
        raise CliError(f"config file {path} must hold a JSON object", EXIT_CONFIG)
    return data


def resolve_settings(flags: dict[str, Any], file_cfg: dict[str, Any], defaults: dict[str, Any],
                     environ: dict[str, str] | None = None) -> dict[str, Any]:
    """Merge settings, with explicit flags beating the environment beating the file."""
    environ = os.environ if environ is None else environ
    out = {}
    for key, default in defaults.items():
        value = flags.get(key)
        if value is None:
            env = environ.get(ENV_PREFIX + key.upper())
            if env is not None:
                value = _coerce(key, env, default)
        if value is None:
            value = file_cfg.get(key)
        if value is None:
            value = default
        out[key] = value
    return out


def _coerce(key: str, raw: str, default: Any) -> Any:
    try:
        if isinstance(default, bool):
            return raw.lower() in ("1", "true", "yes")
        if isinstance(default, int):
            return int(raw)
        if isinstance(default, float):
            return float(raw)
    except ValueError:
        raise CliError(f"environment value for {key} is not a number: {raw!r}", EXIT_CONFIG) from None
    return raw


# ---------------------------------------------------------------------------
# Shared helpers


def parse_tasks(text: str) -> list[TaskKind]:
    if text.strip().lower() == "all":
        return list(TaskKind)
    try:
        return [TaskKind.parse(t.strip()) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise CliError(str(exc), EXIT_CONFIG) from None


def parse_sizes(text: str) -> list[SizeClass]:
    if text.strip().lower() in ("all", "both"):
        return list(SizeClass)
    try:
        return [SizeClass.parse(s.strip()) for s in text.split(",") if s.strip()]
    except ValueError as exc:
        raise CliError(str(exc), EXIT_CONFIG) from None


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}", EXIT_IO) from None


def _read_jsonl(path: str) -> list[dict[str, Any]]:
    rows = []
    for number, line in enumerate(_read_text(path).splitlines(), 1):
        if not line.strip():
            continue
        try:
            rows.append(json.loads(line))
        except ValueError as exc:
            raise CliError(f"{path}:{number}: not valid JSON ({exc})", EXIT_PARSE) from None
    return rows


def _write_text(path: str | Path, text: str) -> None:
    try:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc}", EXIT_IO) from None


def _write_manifest(path: str | Path, manifest: dict[str, Any]) -> None:
    from .dataset import manifest_path

    _write_text(manifest_path(Path(path)), json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def _base_manifest(command: str, args: argparse.Namespace) -> dict[str, Any]:
    from . import __version__

    flags = {k: v for k, v in vars(args).items() if k not in ("func", "api_key") and v is not None}
    return {"command": command, "flags": flags, "package_version": __version__, "sampler_version": SAMPLER_VERSION}


def read_instance_file(path: str, kind: TaskKind) -> TaskInstance:
    """Instance text, optionally preceded by the task description line."""
    from .dataset import task_description

    text = _read_text(path).strip()
    desc = task_description(kind)
    if text.startswith(desc):
        text = text[len(desc):].strip()
    try:
        return parse_instance_text(text, kind, Path(path).stem)
    except (InstanceParseError, ValueError) as exc:
        raise CliError(f"{path}: {exc}", EXIT_PARSE) from None


def _load_dataset(path: str):
    from .dataset import DatasetRecord

    records = []
    for row in _read_jsonl(path):
        try:
            rec = DatasetRecord(row["input"], row["output"], row["meta"])
            rec.instance()
        except (KeyError, TypeError, ValueError) as exc:
            raise CliError(f"{path}: bad dataset record ({exc})", EXIT_PARSE) from None
        records.append(rec)
    return records


def _score(records, candidates: dict[str, list[str | None]], manifest_ref: str | None):
    """Score candidate texts against dataset records; returns (report, outcome rows)."""
    from .eval import aggregate_report, best_of_n, optimum_value

    tagged = []
    rows = []
    for rec in records:
        inst = rec.instance()
        iid = rec.meta["instance_id"]
        pool = candidates.get(iid) or [None]
        outcome = best_of_n(inst, pool, optimum_value(inst))
        size = SizeClass.parse(rec.meta["size_class"])
        tagged.append((inst.kind, size, outcome))
        rows.append({
            "instance_id": iid,
            "kind": inst.kind.value,
            "size_class": size.value,
            "candidates": len([c for c in pool if c is not None]),
            "valid": outcome.valid,
            "reason": outcome.reason,
            "objective": outcome.objective,
            "optimal": outcome.optimal,
            "ratio": outcome.ratio,
        })
    return aggregate_report(tagged, manifest_ref), rows


def _emit_report(report, args: argparse.Namespace, rows: list[dict[str, Any]], extra: dict[str, Any]) -> None:
    if args.out:
        _write_text(args.out, report.to_json() + "\n")
        manifest = _base_manifest(args.command, args)
        manifest.update(extra)
        _write_manifest(args.out, manifest)
    if args.outcomes:
        _write_text(args.outcomes, "".join(json.dumps(r) + "\n" for r in rows))
    print(report.to_json() if args.format == "structured" else report.render_text())


# ---------------------------------------------------------------------------
# Commands


def cmd_gen_instances(args: argparse.Namespace) -> int:
    kinds, sizes = parse_tasks(args.tasks), parse_sizes(args.size)
    lines = []
    for kind in kinds:
        for size in sizes:
            for i in range(args.count):
                seed = args.seed * 1_000_003 + i
                inst = sample_instance(kind, size, seed)
                lines.append(json.dumps({
                    "instance_id": inst.instance_id,
                    "kind": kind.value,
                    "size_class": size.value,
                    "seed": seed,
                    "text": render_instance_text(inst),
                }))
    _write_text(args.out, "".join(line + "\n" for line in lines))
    manifest = _base_manifest("gen-instances", args)
    manifest["records"] = len(lines)
    _write_manifest(args.out, manifest)
    log.info("wrote %d instances to %s", len(lines), args.out)
    return EXIT_OK


def cmd_gen_dataset(args: argparse.Namespace) -> int:
    from .dataset import CorpusMode, CorpusSpec, build_corpus, emit_records

    kinds, sizes = parse_tasks(args.tasks), parse_sizes(args.size)
    file_cfg = load_config_file(args.config)
    settings = resolve_settings(
        {"seed": args.seed, "workers": args.workers, "time_budget": args.time_budget,
         "max_output_chars": args.max_output_chars},
        file_cfg,
        {"seed": 0, "workers": 1, "time_budget": 10.0, "max_output_chars": 0},
    )
    if settings["workers"] < 1:
        raise CliError("workers must be positive", EXIT_CONFIG)
    if args.count < 0:
        raise CliError("count must be non-negative", EXIT_CONFIG)
    spec = CorpusSpec(
        {(k, s): args.count for k in kinds for s in sizes},
        seed=settings["seed"],
        mode=CorpusMode(args.mode),
        time_budget=settings["time_budget"],
        max_output_chars=settings["max_output_chars"] or None,
        workers=settings["workers"],
    )
    records = build_corpus(spec)
    # Worker count does not change the bytes, so it stays out of the manifest.
    effective = {k: v for k, v in settings.items() if k != "workers"}
    try:
        emit_records(records, args.out, spec, {"command": "gen-dataset", "effective_config": effective,
                                               "tasks": [k.value for k in kinds], "sizes": [s.value for s in sizes]})
    except OSError as exc:
        raise CliError(f"cannot write {args.out}: {exc}", EXIT_IO) from None
    log.info("wrote %d records to %s", len(records), args.out)
    return EXIT_OK


def cmd_solve(args: argparse.Namespace) -> int:
    from .eval import objective_value
    from .solvers import OracleLimitError, oracle_solve, solve

    kind = parse_tasks(args.task)[0]
    inst = read_instance_file(args.instance, kind)
    try:
        sol = oracle_solve(inst) if args.oracle else solve(inst, args.time_budget)
    except OracleLimitError as exc:
        raise CliError(str(exc), EXIT_CONFIG) from None
    if sol is None:
        print(json.dumps({"task": kind.value, "solution": None, "objective": 0, "note": "target unreachable"}))
        return EXIT_OK
    out = {"task": kind.value, "solution": list(sol.nodes), "objective": objective_value(inst, sol), "exact": sol.exact}
    if sol.h_nodes is not None:
        out["h_solution"] = list(sol.h_nodes)
    print(json.dumps(out))
    return EXIT_OK


def _candidate_map(rows: list[dict[str, Any]], path: str) -> dict[str, list[str | None]]:
    out: dict[str, list[str | None]] = {}
    for row in rows:
        try:
            iid = row["instance_id"]
            texts = row["candidates"] if "candidates" in row else [row["candidate_text"]]
        except (KeyError, TypeError):
            raise CliError(f"{path}: each line needs instance_id and candidate_text or candidates", EXIT_PARSE) from None
        out.setdefault(iid, []).extend(texts)
    return out


def cmd_score_file(args: argparse.Namespace) -> int:
    from .dataset import file_digest

    records = _load_dataset(args.dataset)
    if args.candidates:
        candidates = _candidate_map(_read_jsonl(args.candidates), args.candidates)
    else:
        candidates = {r.meta["instance_id"]: [r.output] for r in records}
    report, rows = _score(records, candidates, args.dataset)
    extra = {"dataset_sha256": file_digest(args.dataset)}
    if args.candidates:
        extra["candidates_sha256"] = file_digest(args.candidates)
    _emit_report(report, args, rows, extra)
    return EXIT_OK


def _gateway_config(args: argparse.Namespace, base_url: str | None):
    from .gateway import API_KEY_ENV, ModelConfig

    file_cfg = load_config_file(args.config)
    flags = {k: getattr(args, k) for k in GATEWAY_DEFAULTS}
    if base_url:
        flags["base_url"] = base_url
    settings = resolve_settings(flags, file_cfg, GATEWAY_DEFAULTS)
    if not settings["base_url"]:
        raise CliError("no endpoint: pass --base-url, set GCOTRACE_BASE_URL, or use --stub", EXIT_CONFIG)
    try:
        cfg = ModelConfig(api_key=os.environ.get(API_KEY_ENV), **settings)
    except (TypeError, ValueError) as exc:
        raise CliError(f"bad model configuration: {exc}", EXIT_CONFIG) from None
    return cfg


def cmd_query_and_score(args: argparse.Namespace) -> int:
    from .dataset import file_digest, record_input
    from .gateway import StubServer, batch_query

    records = _load_dataset(args.dataset)
    stub = StubServer().start() if args.stub else None
    try:
        cfg = _gateway_config(args, stub.url if stub else None)
        items = [(r.meta["instance_id"], record_input(r.instance())) for r in records]
        results = batch_query(items, cfg)
    finally:
        if stub:
            stub.stop()
    failed = [r for r in results if not r.ok]
    if failed:
        log.warning("%d of %d queries returned no candidates", len(failed), len(results))
    if records and len(failed) == len(records):
        raise CliError(f"all {len(records)} queries failed; first error: {failed[0].error}", EXIT_REMOTE)
    if args.responses:
        _write_text(args.responses, "".join(
            json.dumps({"instance_id": r.instance_id, "candidates": list(r.candidates),
                        "latencies": list(r.latencies), "error": r.error}) + "\n"
            for r in results))
    candidates = {r.instance_id: list(r.candidates) for r in results if r.ok}
    report, rows = _score(records, candidates, args.dataset)
    _emit_report(report, args, rows, {"dataset_sha256": file_digest(args.dataset), "model_config": cfg.public(),
                                      "stub": bool(args.stub), "failed_queries": len(failed)})
    return EXIT_OK


def cmd_report(args: argparse.Namespace) -> int:
    from .eval import Report

    try:
        report = Report.from_dict(json.loads(_read_text(args.input)))
    except (ValueError, KeyError, TypeError) as exc:
        raise CliError(f"{args.input}: not a stored report ({exc})", EXIT_PARSE) from None
    print(report.to_json() if args.format == "structured" else report.render_text())
    return EXIT_OK


def cmd_serve_stub(args: argparse.Namespace) -> int:
    from .gateway import StubServer

    server = StubServer(host=args.host, port=args.port)
    print(f"stub endpoint listening on {server.url}", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser


def _add_report_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", help="write the structured report here (plus a manifest)")
    p.add_argument("--outcomes", help="write per-instance outcomes as JSON lines")
    p.add_argument("--format", choices=["text", "structured"], default="text")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gcotrace", description=__doc__)
    parser.add_argument("--config", help="JSON file of default settings (flags and environment win)")
    parser.add_argument("--log-level", default="WARNING")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-instances", help="sample instances and write them as JSON lines")
    p.add_argument("--tasks", default="all", help="comma-separated task names or 'all'")
    p.add_argument("--size", default="both", help="small, large or both")
    p.add_argument("--count", type=int, default=10, help="instances per task and size class")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen_instances)

    p = sub.add_parser("gen-dataset", help="build a fine-tuning corpus")
    p.add_argument("--tasks", default="all")
    p.add_argument("--size", default="both")
    p.add_argument("--count", type=int, default=100, help="records per task and size class")
    p.add_argument("--seed", type=int)
    p.add_argument("--mode", choices=["thought", "answer-only"], default="thought")
    p.add_argument("--workers", type=int)
    p.add_argument("--time-budget", type=float, help="seconds per exact solve before resampling")
    p.add_argument("--max-output-chars", type=int, help="resample when an output is longer")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen_dataset)

    p = sub.add_parser("solve", help="solve one instance file")
    p.add_argument("--task", required=True)
    p.add_argument("--instance", required=True, help="file holding the instance text")
    p.add_argument("--oracle", action="store_true", help="use brute force (small instances only)")
    p.add_argument("--time-budget", type=float, default=None)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("score-file", help="grade candidate answers offline")
    p.add_argument("--dataset", required=True)
    p.add_argument("--candidates", help="JSON lines of {instance_id, candidate_text | candidates}; "
                                        "defaults to the dataset's own outputs")
    _add_report_flags(p)
    p.set_defaults(func=cmd_score_file)

    p = sub.add_parser("query-and-score", help="ask a chat-completions endpoint, then grade")
    p.add_argument("--dataset", required=True)
    p.add_argument("--stub", action="store_true", help="answer from a built-in local stub endpoint")
    p.add_argument("--base-url")
    p.add_argument("--model")
    p.add_argument("--temperature", type=float)
    p.add_argument("--max-tokens", type=int)
    p.add_argument("--n", type=int, help="candidates per instance (best-of-n when above 1)")
    p.add_argument("--timeout", type=float)
    p.add_argument("--max-retries", type=int)
    p.add_argument("--concurrency", type=int)
    p.add_argument("--responses", help="save raw candidates as JSON lines")
    _add_report_flags(p)
    p.set_defaults(func=cmd_query_and_score)

    p = sub.add_parser("report", help="render a stored report")
    p.add_argument("--input", required=True)
    p.add_argument("--format", choices=["text", "structured"], default="text")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("serve-stub", help="run the stub endpoint in the foreground")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8089)
    p.set_defaults(func=cmd_serve_stub)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=args.log_level.upper(), format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
