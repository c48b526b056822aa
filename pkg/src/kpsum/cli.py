"""Command-line entry point.

Commands:

* ``summarize``       - run the clustering + selection pipeline per topic.
* ``evaluate``        - score summary files (predicted/actual/rouge/all).
* ``sample-coverage`` - build pseudo-summary suites at fixed coverage levels.
* ``cluster-eval``    - Rand / adjusted-Rand of cluster assignments vs gold.

Configuration comes from an optional TOML file (``--config``); every CLI
flag overrides its config key. Each command writes a run manifest echoing
the effective configuration plus content hashes of all inputs and outputs,
so a run can be audited and reproduced. Output files are written
atomically (temp file + rename) and reruns with identical inputs are
byte-identical for the deterministic backends.

Exit codes: 0 success, 2 input/config error, 3 backend transport error,
4 internal invariant violation.
"""
from __future__ import annotations

import argparse
import concurrent.futures
import copy
import hashlib
import json
import os
import platform
import sys
import tempfile
from pathlib import Path

import numpy as np

try:
    import tomllib  # py >= 3.11
except ModuleNotFoundError:  # pragma: no cover - depends on interpreter
    import tomli as tomllib

from . import __version__
from .clustering import ClusterAssignment, ClusterConfig, rand_index
from .corpus import (
    Corpus,
    attach_catch_all,
    load_argkp,
    load_corpus_json,
    load_debate,
    split_sentences,
)
from .coverage_datasets import generate_suite, write_suite_jsonl
from .embedding import EmbeddingBackendConfig
from .errors import (
    CapacityError,
    ConfigError,
    FormatError,
    IntegrityError,
    InternalError,
    KPSumError,
    MissingEmbeddingsError,
    PairLookupError,
    ParseError,
    TransportError,
)
from .evaluation import evaluate_summary
from .matching import MatcherConfig, build_matcher
from .pipeline import summarize_topic
from .selection import GeneratedSummary, SelectionConfig

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_TRANSPORT = 3
EXIT_INTERNAL = 4

_INPUT_ERRORS = (
    ParseError, IntegrityError, ConfigError, FormatError, CapacityError,
    MissingEmbeddingsError, PairLookupError, FileNotFoundError,
)

DEFAULT_CONFIG = {
    "seed": 0,
    "output_dir": "out",
    "format": "argkp",
    "split_sentences": False,
    "data": {"arguments": None, "key_points": None, "labels": None, "file": None},
    "embedding": {
        "kind": "lexical", "file": None, "endpoint": None, "normalize": True,
        "timeout": 30.0, "batch_size": 64, "retries": 2, "cache": None,
    },
    "matcher": {
        "kind": "lexical", "decision_threshold": 0.5, "file": None,
        "endpoint": None, "swap_slots": False,
        "timeout": 30.0, "batch_size": 64, "retries": 2,
    },
    "clustering": {
        "distance_threshold": 1.5, "linkage": "average",
        "metric": "euclidean", "n_clusters": None,
    },
    "selection": {"method": "smm", "exponent": 5.0, "max_key_points": None},
    "evaluation": {"mode": "all", "stemming": False},
    "sampling": {"levels": [1.0, 0.75, 0.5], "size": 25, "n_samples": 10},
}


# ---------------------------------------------------------------------------
# Configuration plumbing
# ---------------------------------------------------------------------------

def _deep_merge(base: dict, override: dict) -> dict:
    merged = dict(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _deep_merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def _load_config_file(path) -> dict:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    with path.open("rb") as handle:
        try:
            return tomllib.load(handle)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"invalid config file {path}: {exc}") from exc


def _apply_flag(config: dict, dotted: str, value) -> None:
    if value is None:
        return
    keys = dotted.split(".")
    node = config
    for key in keys[:-1]:
        node = node[key]
    node[keys[-1]] = value


def effective_config(args: argparse.Namespace) -> dict:
    config = copy.deepcopy(DEFAULT_CONFIG)
    if args.config:
        config = _deep_merge(config, _load_config_file(args.config))
    overrides = {
        "seed": "seed", "output_dir": "output_dir", "format": "format",
        "arguments": "data.arguments", "key_points": "data.key_points",
        "labels": "data.labels", "data": "data.file",
        "embed_backend": "embedding.kind", "embed_file": "embedding.file",
        "embed_endpoint": "embedding.endpoint", "embed_cache": "embedding.cache",
        "matcher": "matcher.kind", "match_file": "matcher.file",
        "match_endpoint": "matcher.endpoint",
        "decision_threshold": "matcher.decision_threshold",
        "distance_threshold": "clustering.distance_threshold",
        "linkage": "clustering.linkage", "metric": "clustering.metric",
        "n_clusters": "clustering.n_clusters",
        "method": "selection.method", "exponent": "selection.exponent",
        "max_key_points": "selection.max_key_points",
        "mode": "evaluation.mode",
        "levels": "sampling.levels", "size": "sampling.size",
        "samples": "sampling.n_samples",
    }
    for attr, dotted in overrides.items():
        if hasattr(args, attr):
            _apply_flag(config, dotted, getattr(args, attr))
    if getattr(args, "split_sentences", False):
        config["split_sentences"] = True
    if getattr(args, "no_normalize", False):
        config["embedding"]["normalize"] = False
    if getattr(args, "swap_slots", False):
        config["matcher"]["swap_slots"] = True
    if getattr(args, "stemming", False):
        config["evaluation"]["stemming"] = True
    return config


def _embedding_config(config: dict) -> EmbeddingBackendConfig:
    section = config["embedding"]
    return EmbeddingBackendConfig(
        kind=section["kind"], path=section["file"], endpoint=section["endpoint"],
        timeout=section["timeout"], batch_size=section["batch_size"],
        retries=section["retries"], cache_path=section["cache"],
    ).validate()


def _matcher_config(config: dict) -> MatcherConfig:
    section = config["matcher"]
    return MatcherConfig(
        kind=section["kind"], decision_threshold=section["decision_threshold"],
        path=section["file"], endpoint=section["endpoint"],
        timeout=section["timeout"], batch_size=section["batch_size"],
        retries=section["retries"], swap_slots=section["swap_slots"],
    ).validate()


def _cluster_config(config: dict) -> ClusterConfig:
    section = config["clustering"]
    return ClusterConfig(
        distance_threshold=section["distance_threshold"], linkage=section["linkage"],
        metric=section["metric"], n_clusters=section["n_clusters"],
    ).validate()


def _selection_config(config: dict, max_key_points: int | None) -> SelectionConfig:
    section = config["selection"]
    return SelectionConfig(
        method=section["method"], exponent_i=section["exponent"],
        max_key_points=max_key_points,
    ).validate()


def load_corpus(config: dict) -> Corpus:
    fmt = config["format"]
    data = config["data"]
    if fmt == "argkp":
        missing = [k for k in ("arguments", "key_points", "labels") if not data[k]]
        if missing:
            raise ConfigError(f"argkp format needs data paths: {', '.join(missing)}")
        corpus = load_argkp(data["arguments"], data["key_points"], data["labels"])
    elif fmt == "debate":
        if not data["file"]:
            raise ConfigError("debate format needs a data file (--data)")
        corpus = load_debate(data["file"])
    elif fmt == "json":
        if not data["file"]:
            raise ConfigError("json format needs a data file (--data)")
        corpus = load_corpus_json(data["file"])
    else:
        raise ConfigError(f"unknown corpus format: {fmt!r}")
    if config["split_sentences"]:
        corpus = split_sentences(corpus)
    return attach_catch_all(corpus)


def _input_paths(config: dict) -> list[str]:
    data = config["data"]
    paths = [data["arguments"], data["key_points"], data["labels"], data["file"],
             config["embedding"]["file"], config["matcher"]["file"]]
    return [p for p in paths if p]


# ---------------------------------------------------------------------------
# Output plumbing
# ---------------------------------------------------------------------------

def _sha256(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(65536), b""):
            digest.update(chunk)
    return "sha256:" + digest.hexdigest()


def atomic_write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _dump(doc) -> str:
    return json.dumps(doc, ensure_ascii=False, indent=2) + "\n"


def write_manifest(command: str, config: dict, inputs: list[str],
                   outputs: list[Path], output_dir: Path) -> Path:
    manifest = {
        "command": command,
        "kpsum_version": __version__,
        "python_version": platform.python_version(),
        "numpy_version": np.__version__,
        "config": config,
        "inputs": {str(p): _sha256(p) for p in inputs},
        "outputs": {p.name: _sha256(p) for p in outputs},
    }
    path = output_dir / f"manifest_{command.replace('-', '_')}.json"
    atomic_write_text(path, _dump(manifest))
    return path


def _pct(value) -> str:
    return "-" if value is None else f"{value * 100:.2f}%"


def _num(value, fmt="{:.3f}") -> str:
    return "-" if value is None else fmt.format(value)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_summarize(args: argparse.Namespace) -> int:
    config = effective_config(args)
    output_dir = Path(config["output_dir"])
    corpus = load_corpus(config)
    embed_config = _embedding_config(config)
    cluster_config = _cluster_config(config)
    matcher = build_matcher(_matcher_config(config), corpus)

    def run_topic(topic_id: str):
        max_kp = config["selection"]["max_key_points"]
        if max_kp == "auto":
            max_kp = len(corpus.key_points_for_topic(topic_id))
        selection_config = _selection_config(config, max_kp)
        return summarize_topic(
            corpus, topic_id, embed_config, cluster_config, matcher,
            selection_config, l2_normalize=config["embedding"]["normalize"],
        )

    topic_ids = [t.id for t in corpus.topics]
    with concurrent.futures.ThreadPoolExecutor(max_workers=min(8, len(topic_ids))) as pool:
        results = dict(zip(topic_ids, pool.map(run_topic, topic_ids)))

    outputs = []
    for topic_id in sorted(topic_ids):
        assignment, summary = results[topic_id]
        summary_path = output_dir / f"summary_{topic_id}.json"
        atomic_write_text(summary_path, _dump(summary.to_json()))
        clusters_path = output_dir / f"clusters_{topic_id}.json"
        atomic_write_text(clusters_path, _dump(assignment.to_json()))
        outputs.extend([summary_path, clusters_path])
        print(f"{topic_id}: {len(summary.entries)} key points "
              f"from {len(assignment.clusters)} clusters -> {summary_path}")
    write_manifest("summarize", config, _input_paths(config), outputs, output_dir)
    return EXIT_OK


def cmd_evaluate(args: argparse.Namespace) -> int:
    config = effective_config(args)
    output_dir = Path(config["output_dir"])
    mode = config["evaluation"]["mode"]
    corpus = load_corpus(config)

    matcher = None
    if mode in ("predicted", "all"):
        matcher = build_matcher(_matcher_config(config), corpus)

    summaries = []
    unresolved = []
    for path in args.summaries:
        summary = GeneratedSummary.load(path)
        if summary.topic_id not in corpus.topic_by_id:
            unresolved.append(f"{path}: {summary.topic_id}")
        summaries.append(summary)
    if unresolved:
        raise IntegrityError("summaries reference unknown topics: " + "; ".join(unresolved))

    reports = []
    outputs = []
    for summary in summaries:
        report = evaluate_summary(
            summary, corpus, mode=mode, matcher=matcher,
            stemming=config["evaluation"]["stemming"],
        )
        reports.append(report)
        path = output_dir / f"report_{summary.topic_id}.json"
        atomic_write_text(path, _dump(report.to_json()))
        outputs.append(path)

    header = f"{'topic':<12}{'predicted':>11}{'actual':>9}{'redund':>9}{'words':>8}" \
             f"{'R1':>8}{'R2':>8}{'RL':>8}"
    print(header)
    for report in reports:
        predicted = None if report.predicted_coverage is None else report.predicted_coverage.coverage
        r1 = r2 = rl = None
        if report.rouge is not None:
            r1, r2, rl = report.rouge.rouge1, report.rouge.rouge2, report.rouge.rougeL
        print(f"{report.topic_id:<12}{_pct(predicted):>11}{_pct(report.actual_coverage):>9}"
              f"{_pct(report.redundancy):>9}{_num(report.avg_words, '{:.1f}'):>8}"
              f"{_num(r1):>8}{_num(r2):>8}{_num(rl):>8}")

    def _mean(values):
        values = [v for v in values if v is not None]
        return sum(values) / len(values) if values else None

    aggregate = {
        "topics": [r.topic_id for r in reports],
        "mean_predicted_coverage": _mean([
            None if r.predicted_coverage is None else r.predicted_coverage.coverage
            for r in reports
        ]),
        "mean_actual_coverage": _mean([r.actual_coverage for r in reports]),
        "mean_redundancy": _mean([r.redundancy for r in reports]),
        "mean_avg_words": _mean([r.avg_words for r in reports]),
        "mean_rouge1": _mean([r.rouge.rouge1 if r.rouge else None for r in reports]),
        "mean_rouge2": _mean([r.rouge.rouge2 if r.rouge else None for r in reports]),
        "mean_rougeL": _mean([r.rouge.rougeL if r.rouge else None for r in reports]),
        "per_topic": [r.to_json() for r in reports],
    }
    aggregate_path = output_dir / "report_aggregate.json"
    atomic_write_text(aggregate_path, _dump(aggregate))
    outputs.append(aggregate_path)
    print(f"{'mean':<12}{_pct(aggregate['mean_predicted_coverage']):>11}"
          f"{_pct(aggregate['mean_actual_coverage']):>9}"
          f"{_pct(aggregate['mean_redundancy']):>9}"
          f"{_num(aggregate['mean_avg_words'], '{:.1f}'):>8}"
          f"{_num(aggregate['mean_rouge1']):>8}{_num(aggregate['mean_rouge2']):>8}"
          f"{_num(aggregate['mean_rougeL']):>8}")

    inputs = _input_paths(config) + [str(p) for p in args.summaries]
    write_manifest("evaluate", config, inputs, outputs, output_dir)
    return EXIT_OK


def cmd_sample_coverage(args: argparse.Namespace) -> int:
    config = effective_config(args)
    output_dir = Path(config["output_dir"])
    corpus = load_corpus(config)
    sampling = config["sampling"]
    suite = generate_suite(
        corpus, levels=sampling["levels"], size=sampling["size"],
        n_samples=sampling["n_samples"], seed=config["seed"],
    )
    path = output_dir / "coverage_suite.jsonl"
    output_dir.mkdir(parents=True, exist_ok=True)
    tmp_path = output_dir / (path.name + ".tmp")
    write_suite_jsonl(suite, tmp_path)
    os.replace(tmp_path, path)
    print(f"wrote {len(suite)} pseudo-summaries -> {path}")
    write_manifest("sample-coverage", config, _input_paths(config), [path], output_dir)
    return EXIT_OK


def cmd_cluster_eval(args: argparse.Namespace) -> int:
    config = effective_config(args)
    output_dir = Path(config["output_dir"])
    corpus = load_corpus(config)

    # Gold groups: one key point per argument (smallest id among positive
    # non-catch-all labels); arguments with only the catch-all are dropped.
    catch_all = {k.id for k in corpus.key_points if k.is_catch_all}
    gold = {}
    for arg in corpus.arguments:
        real = sorted(corpus.gold_key_points(arg.id) - catch_all)
        if real:
            gold[arg.id] = real[0]

    rows = []
    outputs = []
    print(f"{'assignment':<32}{'rand':>8}{'adj_rand':>10}")
    for path in args.assignments:
        assignment = ClusterAssignment.load(path)
        scores = rand_index(assignment, gold)
        rows.append({"assignment": str(path), **scores.to_json()})
        print(f"{Path(path).name:<32}{scores.rand:>8.3f}{scores.adjusted_rand:>10.3f}")
    report_path = output_dir / "cluster_eval.json"
    atomic_write_text(report_path, _dump({"results": rows}))
    outputs.append(report_path)

    inputs = _input_paths(config) + [str(p) for p in args.assignments]
    write_manifest("cluster-eval", config, inputs, outputs, output_dir)
    return EXIT_OK


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------

def _add_shared(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="TOML config file; flags override its keys")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--output-dir", default=None)
    parser.add_argument("--format", choices=["argkp", "debate", "json"], default=None)
    parser.add_argument("--arguments", default=None, help="ArgKP arguments.csv")
    parser.add_argument("--key-points", dest="key_points", default=None,
                        help="ArgKP key_points.csv")
    parser.add_argument("--labels", default=None, help="ArgKP labels.csv")
    parser.add_argument("--data", default=None, help="Debate CSV or corpus JSON")
    parser.add_argument("--split-sentences", action="store_true",
                        help="split multi-sentence arguments before processing")


def _add_matcher_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--matcher", choices=["oracle", "lexical", "file", "remote"],
                        default=None)
    parser.add_argument("--match-file", dest="match_file", default=None)
    parser.add_argument("--match-endpoint", dest="match_endpoint", default=None)
    parser.add_argument("--decision-threshold", dest="decision_threshold",
                        type=float, default=None)
    parser.add_argument("--swap-slots", dest="swap_slots", action="store_true")


def _parse_max_key_points(raw: str):
    if raw == "auto":
        return "auto"
    return int(raw)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kpsum",
        description="Extractive key-point summarization and evaluation toolkit",
    )
    parser.add_argument("--version", action="version", version=f"kpsum {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("summarize", help="cluster arguments and select representatives")
    _add_shared(p)
    _add_matcher_flags(p)
    p.add_argument("--embed-backend", choices=["oracle", "lexical", "file", "remote"],
                   default=None)
    p.add_argument("--embed-file", dest="embed_file", default=None)
    p.add_argument("--embed-endpoint", dest="embed_endpoint", default=None)
    p.add_argument("--embed-cache", dest="embed_cache", default=None)
    p.add_argument("--no-normalize", dest="no_normalize", action="store_true",
                   help="skip L2 normalization before clustering")
    p.add_argument("--method", choices=["smm", "ssf"], default=None)
    p.add_argument("--exponent", type=float, default=None,
                   help="ssf exponent on the match count (default 5)")
    p.add_argument("--distance-threshold", dest="distance_threshold",
                   type=float, default=None, help="merge cutoff (default 1.5)")
    p.add_argument("--linkage", choices=["average", "complete", "ward"], default=None)
    p.add_argument("--metric", choices=["euclidean", "cosine"], default=None)
    p.add_argument("--n-clusters", dest="n_clusters", type=int, default=None)
    p.add_argument("--max-key-points", dest="max_key_points",
                   type=_parse_max_key_points, default=None,
                   help="cap entries per summary; 'auto' caps at the topic's "
                        "reference key point count")
    p.set_defaults(func=cmd_summarize)

    p = sub.add_parser("evaluate", help="score summary files")
    _add_shared(p)
    _add_matcher_flags(p)
    p.add_argument("--mode", choices=["predicted", "actual", "rouge", "all"], default=None)
    p.add_argument("--stemming", action="store_true",
                   help="Porter-stem ROUGE tokens (library parity experiments)")
    p.add_argument("summaries", nargs="+", help="summary JSON files")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("sample-coverage", help="build coverage-level pseudo-summaries")
    _add_shared(p)
    p.add_argument("--levels", type=float, nargs="+", default=None)
    p.add_argument("--size", type=int, default=None)
    p.add_argument("--samples", type=int, default=None)
    p.set_defaults(func=cmd_sample_coverage)

    p = sub.add_parser("cluster-eval", help="Rand index of assignments against gold")
    _add_shared(p)
    p.add_argument("assignments", nargs="+", help="cluster assignment JSON files")
    p.set_defaults(func=cmd_cluster_eval)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except TransportError as exc:
        _report_error("transport", exc)
        return EXIT_TRANSPORT
    except _INPUT_ERRORS as exc:
        _report_error("input", exc)
        return EXIT_INPUT
    except (InternalError, KPSumError) as exc:
        _report_error("internal", exc)
        return EXIT_INTERNAL
    except Exception as exc:  # noqa: BLE001 - last-resort structured report
        _report_error("internal", exc)
        return EXIT_INTERNAL


def _report_error(category: str, exc: BaseException) -> None:
    doc = {"error": category, "type": type(exc).__name__, "message": str(exc)}
    print(json.dumps(doc, ensure_ascii=False), file=sys.stderr)


if __name__ == "__main__":
    sys.exit(main())
