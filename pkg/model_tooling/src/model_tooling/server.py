"""Inference endpoint speaking the summarization toolkit's wire protocol.

POST /v1/embed  {"texts": [...]}                          -> {"vectors": [[...], ...]}
POST /v1/match  {"pairs": [{"argument", "key_point"}]}    -> {"scores": [...]}

Responses preserve request order. Malformed bodies get a 422; an endpoint
whose model was not configured answers 503. Requests are scored in bounded
batches under a lock (the models are not thread-safe for concurrent
forward passes).
"""
from __future__ import annotations

import threading

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel

from .embedder import encode_texts, load_encoder
from .matcher import load_classifier, score_pairs


class EmbedRequest(BaseModel):
    texts: list[str]


class MatchPair(BaseModel):
    argument: str
    key_point: str


class MatchRequest(BaseModel):
    pairs: list[MatchPair]


def build_app(encoder_path: str | None = None, classifier_path: str | None = None,
              batch_size: int = 32, max_length: int = 128) -> FastAPI:
    app = FastAPI(title="model-tooling inference")
    encoder = load_encoder(encoder_path) if encoder_path else None
    tokenizer = classifier = None
    if classifier_path:
        tokenizer, classifier = load_classifier(classifier_path)
    lock = threading.Lock()

    @app.post("/v1/embed")
    def embed(request: EmbedRequest):
        if encoder is None:
            raise HTTPException(status_code=503, detail="no encoder configured")
        if not request.texts:
            return {"vectors": []}
        with lock:
            vectors = encode_texts(encoder, request.texts, batch_size)
        return {"vectors": [[float(x) for x in v] for v in vectors]}

    @app.post("/v1/match")
    def match(request: MatchRequest):
        if classifier is None:
            raise HTTPException(status_code=503, detail="no classifier configured")
        if not request.pairs:
            return {"scores": []}
        with lock:
            scores = score_pairs(
                tokenizer, classifier,
                [(p.argument, p.key_point) for p in request.pairs],
                batch_size, max_length,
            )
        return {"scores": scores}

    return app
