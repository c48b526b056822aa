"""Vector representations of argument texts behind a uniform backend interface.

Backends:

* ``oracle``  - indicator vectors over the topic's key points, read from
  gold labels. Two arguments get equal vectors iff they share the same
  gold key-point set, which makes desk-scale clustering checks exact.
* ``lexical`` - term frequencies over a hashed vocabulary of 4096 buckets
  (lowercased, punctuation-stripped whitespace tokens), L2-normalized.
  A deterministic, dependency-free stand-in for a neural encoder.
* ``file``    - JSON Lines, one ``{"id": ..., "vector": [...]}`` per line.
* ``remote``  - POST ``/v1/embed`` with ``{"texts": [...]}``, expecting
  ``{"vectors": [[...], ...]}``; non-200 responses are transport errors.

Embeddings are always requested per topic, never across topics.
"""
from __future__ import annotations

import hashlib
import json
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import requests

from .corpus import Corpus
from .errors import (
    ConfigError,
    FormatError,
    MissingEmbeddingsError,
    TransportError,
)
from .textutil import lexical_tokens

LEXICAL_DIM = 4096

_BACKEND_KINDS = ("oracle", "lexical", "file", "remote")


@dataclass(frozen=True)
class EmbeddingBackendConfig:
    kind: str
    path: str | Path | None = None       # file kind
    endpoint: str | None = None          # remote kind: base URL
    timeout: float = 30.0
    batch_size: int = 64
    retries: int = 2
    cache_path: str | Path | None = None  # optional on-disk cache (remote only)

    def validate(self) -> "EmbeddingBackendConfig":
        if self.kind not in _BACKEND_KINDS:
            raise ConfigError(f"unknown embedding backend kind: {self.kind!r}")
        if self.kind == "file" and self.path is None:
            raise ConfigError("file embedding backend requires a path")
        if self.kind == "remote" and not self.endpoint:
            raise ConfigError("remote embedding backend requires an endpoint")
        if self.batch_size < 1:
            raise ConfigError("batch_size must be >= 1")
        return self


@dataclass
class EmbeddingSet:
    """Fixed-dimension vectors keyed by argument id. Immutable by convention."""
    dim: int
    vectors: dict[str, np.ndarray]

    def ids(self) -> list[str]:
        return list(self.vectors.keys())

    def matrix(self, order: list[str] | None = None) -> np.ndarray:
        order = order if order is not None else self.ids()
        return np.stack([self.vectors[i] for i in order])


def _check_finite(set_: EmbeddingSet) -> EmbeddingSet:
    for arg_id, vec in set_.vectors.items():
        if not np.all(np.isfinite(vec)):
            raise FormatError(f"non-finite embedding component for argument {arg_id!r}")
    return set_


def embed(config: EmbeddingBackendConfig, corpus: Corpus, topic_id: str) -> EmbeddingSet:
    """Produce one vector per argument of the topic.

    Deterministic for oracle/lexical/file kinds: repeated calls yield
    byte-identical vector sets.
    """
    config.validate()
    if topic_id not in corpus.topic_by_id:
        raise ConfigError(f"unknown topic id: {topic_id!r}")
    args = corpus.arguments_for_topic(topic_id)
    if not args:
        raise ConfigError(f"topic {topic_id!r} has no arguments")

    if config.kind == "oracle":
        return _embed_oracle(corpus, topic_id, args)
    if config.kind == "lexical":
        return _embed_lexical(args)
    if config.kind == "file":
        return _embed_file(config.path, [a.id for a in args])
    return _embed_remote(config, args)


def _embed_oracle(corpus: Corpus, topic_id: str, args) -> EmbeddingSet:
    """Indicator vectors of each argument's gold key points.

    Dimensions are the topic's key points in id order (catch-all included
    when present, so unlabeled arguments group together after catch-all
    attachment). Multi-label arguments get multi-hot vectors.
    """
    kps = sorted(k.id for k in corpus.key_points_for_topic(topic_id))
    if not kps:
        raise ConfigError(f"oracle embeddings need key points on topic {topic_id!r}")
    index = {kp_id: i for i, kp_id in enumerate(kps)}
    vectors = {}
    for arg in args:
        vec = np.zeros(len(kps), dtype=np.float64)
        for kp_id in corpus.gold_key_points(arg.id):
            vec[index[kp_id]] = 1.0
        vectors[arg.id] = vec
    return EmbeddingSet(dim=len(kps), vectors=vectors)


def _bucket(token: str) -> int:
    digest = hashlib.blake2b(token.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "big") % LEXICAL_DIM


def _embed_lexical(args) -> EmbeddingSet:
    vectors = {}
    for arg in args:
        vec = np.zeros(LEXICAL_DIM, dtype=np.float64)
        for token in lexical_tokens(arg.text):
            vec[_bucket(token)] += 1.0
        norm = np.linalg.norm(vec)
        if norm > 0:
            vec /= norm
        vectors[arg.id] = vec
    return EmbeddingSet(dim=LEXICAL_DIM, vectors=vectors)


def _embed_file(path, arg_ids: list[str]) -> EmbeddingSet:
    path = Path(path)
    if not path.exists():
        raise FormatError(f"embedding file not found: {path}")
    loaded: dict[str, np.ndarray] = {}
    dim = None
    with path.open(encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
                arg_id = record["id"]
                vector = np.asarray(record["vector"], dtype=np.float64)
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise FormatError(f"bad embedding record at {path}:{lineno}: {exc}") from exc
            if vector.ndim != 1:
                raise FormatError(f"vector at {path}:{lineno} is not one-dimensional")
            if dim is None:
                dim = int(vector.shape[0])
            elif vector.shape[0] != dim:
                raise FormatError(
                    f"dimension mismatch at {path}:{lineno}: got {vector.shape[0]}, expected {dim}"
                )
            loaded[arg_id] = vector
    if dim is None:
        raise FormatError(f"embedding file {path} is empty")
    missing = [i for i in arg_ids if i not in loaded]
    if missing:
        raise MissingEmbeddingsError(missing)
    # Keep only the requested ids, in request order.
    return _check_finite(EmbeddingSet(dim=dim, vectors={i: loaded[i] for i in arg_ids}))


class _RemoteCache:
    """Single optional on-disk cache keyed by (backend kind, text hash)."""

    def __init__(self, path):
        self.path = Path(path)
        self.entries: dict[str, list[float]] = {}
        if self.path.exists():
            with self.path.open(encoding="utf-8") as handle:
                for line in handle:
                    line = line.strip()
                    if not line:
                        continue
                    record = json.loads(line)
                    self.entries[record["key"]] = record["vector"]

    @staticmethod
    def key(kind: str, text: str) -> str:
        return f"{kind}:{hashlib.sha256(text.encode('utf-8')).hexdigest()}"

    def put(self, key: str, vector: list[float]) -> None:
        self.entries[key] = vector
        with self.path.open("a", encoding="utf-8") as handle:
            handle.write(json.dumps({"key": key, "vector": vector}) + "\n")


def post_json(url: str, payload: dict, timeout: float, retries: int) -> dict:
    """POST JSON with bounded retries and exponential backoff.

    Connection failures and 5xx responses are retried; any other non-200
    status is an immediate transport error.
    """
    last_error = None
    for attempt in range(retries + 1):
        try:
            response = requests.post(url, json=payload, timeout=timeout)
        except requests.RequestException as exc:
            last_error = TransportError(f"request to {url} failed: {exc}")
        else:
            if response.status_code == 200:
                try:
                    return response.json()
                except ValueError as exc:
                    raise TransportError(f"non-JSON response from {url}: {exc}") from exc
            last_error = TransportError(f"{url} answered with status {response.status_code}")
            if response.status_code < 500:
                raise last_error
        if attempt < retries:
            time.sleep(0.5 * 2 ** attempt)
    raise last_error


def _embed_remote(config: EmbeddingBackendConfig, args) -> EmbeddingSet:
    cache = _RemoteCache(config.cache_path) if config.cache_path else None
    url = config.endpoint.rstrip("/") + "/v1/embed"

    vectors: dict[str, list[float]] = {}
    pending = []
    for arg in args:
        if cache is not None:
            key = _RemoteCache.key("remote", arg.text)
            if key in cache.entries:
                vectors[arg.id] = cache.entries[key]
                continue
        pending.append(arg)

    for start in range(0, len(pending), config.batch_size):
        batch = pending[start:start + config.batch_size]
        payload = {"texts": [a.text for a in batch]}
        body = post_json(url, payload, config.timeout, config.retries)
        got = body.get("vectors")
        if not isinstance(got, list) or len(got) != len(batch):
            raise FormatError(
                f"remote embed answered {0 if not isinstance(got, list) else len(got)} "
                f"vectors for {len(batch)} texts"
            )
        for arg, vector in zip(batch, got):
            vectors[arg.id] = vector
            if cache is not None:
                cache.put(_RemoteCache.key("remote", arg.text), vector)

    arrays = {}
    dim = None
    for arg in args:
        vec = np.asarray(vectors[arg.id], dtype=np.float64)
        if vec.ndim != 1:
            raise FormatError(f"remote vector for {arg.id!r} is not one-dimensional")
        if dim is None:
            dim = int(vec.shape[0])
        elif vec.shape[0] != dim:
            raise FormatError("remote vectors have inconsistent dimensions")
        arrays[arg.id] = vec
    return _check_finite(EmbeddingSet(dim=dim, vectors=arrays))


def normalize(set_: EmbeddingSet) -> EmbeddingSet:
    """Scale every vector to unit Euclidean norm. Errors on zero vectors."""
    vectors = {}
    for arg_id, vec in set_.vectors.items():
        norm = np.linalg.norm(vec)
        if norm == 0.0:
            raise FormatError(f"cannot normalize zero vector for argument {arg_id!r}")
        vectors[arg_id] = vec / norm
    return EmbeddingSet(dim=set_.dim, vectors=vectors)


def write_embeddings_jsonl(set_: EmbeddingSet, path) -> None:
    """Write the JSON Lines embedding file format."""
    with Path(path).open("w", encoding="utf-8") as handle:
        for arg_id, vec in set_.vectors.items():
            handle.write(json.dumps({"id": arg_id, "vector": [float(x) for x in vec]}) + "\n")
