"""Shared test fixtures: synthetic corpora, independent reference
implementations (naive agglomeration, brute-force pair counting), and a
tiny HTTP stub for the remote backends.

The reference implementations deliberately avoid numpy and recompute
everything from scratch so they share no code path with the package.
"""
from __future__ import annotations

import contextlib
import json
import math
import random
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from kpsum.corpus import Argument, Corpus, GoldLabel, KeyPoint, Topic, validate

WORD_POOL = [
    "society", "benefit", "health", "policy", "freedom", "risk", "children",
    "choice", "public", "safety", "cost", "school", "duty", "protect", "harm",
    "evidence", "science", "rights", "future", "community", "law", "parents",
    "disease", "care", "support", "money", "state", "vote", "debate", "issue",
    "people", "reason", "value", "trust", "fair", "burden", "impact", "need",
    "growth", "balance",
]


def make_topic_corpus(kp_sizes, topic_id="t0", seed=7, kp_word=True):
    """One-topic corpus with one-hot gold labels.

    kp_sizes[i] arguments are labeled to key point i. Texts are word soup
    from a shared pool; when kp_word is set, each argument also carries its
    key point's marker word (useful for lexical backends), otherwise texts
    are drawn purely from the shared pool (useful for ROUGE flatness).
    """
    rng = random.Random(f"{seed}:{topic_id}")
    topic = Topic(id=topic_id, text=f"Synthetic topic {topic_id}")
    key_points = []
    arguments = []
    labels = []
    counter = 0
    for i, size in enumerate(kp_sizes):
        kp_id = f"{topic_id}_kp{i:02d}"
        kp_text = " ".join(rng.choice(WORD_POOL) for _ in range(rng.randint(5, 8)))
        key_points.append(KeyPoint(id=kp_id, topic_id=topic_id, text=kp_text))
        for _ in range(size):
            arg_id = f"{topic_id}_a{counter:03d}"
            counter += 1
            length = rng.randint(6, 20)
            words = [rng.choice(WORD_POOL) for _ in range(length)]
            if kp_word:
                words.insert(rng.randrange(len(words)), f"marker{i:02d}")
            arguments.append(Argument(id=arg_id, topic_id=topic_id, text=" ".join(words)))
            labels.append(GoldLabel(argument_id=arg_id, key_point_id=kp_id, label=1))
    return validate(Corpus([topic], arguments, key_points, labels))


def merge_corpora(*corpora) -> Corpus:
    topics, arguments, key_points, labels = [], [], [], []
    for corpus in corpora:
        topics.extend(corpus.topics)
        arguments.extend(corpus.arguments)
        key_points.extend(corpus.key_points)
        labels.extend(corpus.labels)
    return validate(Corpus(topics, arguments, key_points, labels))


def shuffle_corpus(corpus: Corpus, seed: int) -> Corpus:
    """Same corpus with argument and label row order permuted."""
    rng = random.Random(seed)
    arguments = list(corpus.arguments)
    labels = list(corpus.labels)
    rng.shuffle(arguments)
    rng.shuffle(labels)
    return validate(Corpus(list(corpus.topics), arguments, list(corpus.key_points), labels))


# ---------------------------------------------------------------------------
# Naive agglomeration (pure python, recomputed from scratch every step)
# ---------------------------------------------------------------------------

def _point_distance(a, b, metric):
    if metric == "euclidean":
        return math.dist(a, b)
    dot = math.fsum(x * y for x, y in zip(a, b))
    na = math.sqrt(math.fsum(x * x for x in a))
    nb = math.sqrt(math.fsum(x * x for x in b))
    return 1.0 - dot / (na * nb)


def _cluster_distance(members_a, members_b, points, point_dist, linkage):
    if linkage == "average":
        values = [point_dist[(x, y)] for x in members_a for y in members_b]
        return math.fsum(values) / len(values)
    if linkage == "complete":
        return max(point_dist[(x, y)] for x in members_a for y in members_b)
    # ward-style merge cost from centroids
    dim = len(next(iter(points.values())))
    ca = [math.fsum(points[x][k] for x in members_a) / len(members_a) for k in range(dim)]
    cb = [math.fsum(points[y][k] for y in members_b) / len(members_b) for k in range(dim)]
    na, nb = len(members_a), len(members_b)
    return math.sqrt(2.0 * na * nb / (na + nb)) * math.dist(ca, cb)


def naive_agglomerate(points: dict, linkage: str, metric: str,
                      threshold: float | None = None,
                      n_clusters: int | None = None) -> set:
    """O(n^3) reference agglomeration; returns the partition as a set of
    frozensets of ids. Mirrors the documented merge and tie rules."""
    ids = list(points)
    point_dist = {
        (a, b): _point_distance(points[a], points[b], metric)
        for a in ids for b in ids
    }
    clusters: list[list[str]] = [[i] for i in ids]
    while len(clusters) > 1:
        if n_clusters is not None and len(clusters) <= n_clusters:
            break
        best = None
        for i in range(len(clusters)):
            for j in range(i + 1, len(clusters)):
                d = _cluster_distance(clusters[i], clusters[j], points, point_dist, linkage)
                key = tuple(sorted((min(clusters[i]), min(clusters[j]))))
                cand = (d, key)
                if best is None or cand < best[0]:
                    best = (cand, i, j)
        (d, _), i, j = best
        if n_clusters is None and d > threshold:
            break
        merged = clusters[i] + clusters[j]
        clusters = [c for k, c in enumerate(clusters) if k not in (i, j)]
        clusters.append(merged)
    return {frozenset(c) for c in clusters}


# ---------------------------------------------------------------------------
# Brute-force Rand / adjusted Rand by explicit pair enumeration
# ---------------------------------------------------------------------------

def brute_force_rand(pred: dict, gold: dict):
    """(rand, adjusted_rand) over the ids common to both maps, via the
    textbook (index - expected) / (max - expected) formula on pair counts."""
    ids = sorted(set(pred) & set(gold))
    n = len(ids)
    if n < 2:
        return 1.0, 1.0
    same_both = same_pred = same_gold = 0
    total = 0
    for i in range(n):
        for j in range(i + 1, n):
            total += 1
            p = pred[ids[i]] == pred[ids[j]]
            g = gold[ids[i]] == gold[ids[j]]
            same_pred += p
            same_gold += g
            same_both += p and g
    agreements = total - same_pred - same_gold + 2 * same_both
    rand = agreements / total
    expected = same_pred * same_gold / total
    max_index = (same_pred + same_gold) / 2
    if max_index == expected:
        adjusted = 1.0 if same_both == expected else 0.0
    else:
        adjusted = (same_both - expected) / (max_index - expected)
    return rand, adjusted


def random_partition(ids, rng: random.Random) -> dict:
    """Random assignment of ids to 1..n cluster labels."""
    k = rng.randint(1, len(ids))
    return {i: rng.randrange(k) for i in ids}


# ---------------------------------------------------------------------------
# In-process HTTP stub for the remote wire protocol
# ---------------------------------------------------------------------------

@contextlib.contextmanager
def serve_http(routes: dict):
    """Serve ``routes`` (path -> fn(body_dict) -> (status, doc)) on a free
    port; yields (base_url, request_log). The log records (path, body)."""
    request_log = []

    class Handler(BaseHTTPRequestHandler):
        def do_POST(self):
            length = int(self.headers.get("Content-Length", "0"))
            body = json.loads(self.rfile.read(length) or b"{}")
            request_log.append((self.path, body))
            handler = routes.get(self.path)
            if handler is None:
                status, doc = 404, {"error": "no such route"}
            else:
                status, doc = handler(body)
            payload = json.dumps(doc).encode("utf-8")
            self.send_response(status)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(payload)))
            self.end_headers()
            self.wfile.write(payload)

        def log_message(self, *args):
            pass

    server = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    try:
        yield f"http://127.0.0.1:{server.server_port}", request_log
    finally:
        server.shutdown()
        thread.join(timeout=5)
