"""HTTP service exposing interactive-mode chunking to the annotation UI.

The model is loaded once at startup and shared, immutable, across
concurrent requests; responses are pure functions of (model, request).

POST /v1/propose   {"schema_version": 1, "tokens": [{"form","pos"}...],
                    "spans": [[start, end]...]}
GET  /v1/model     model header summary
GET  /v1/health    liveness + model state
"""

from __future__ import annotations

from typing import List, Optional, Tuple

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from .corpus import Token
from .chunker import BoundarySpec, tag_interactive
from .encoding import render_tag
from .model import (
    ChunkModel,
    InfeasibleConstraintError,
    UnknownPosError,
    load_model,
    position_scores,
)

SCHEMA_VERSION = 1

NEG_INF = float("-inf")


def _json_score(value: float):
    """JSON has no -inf; impossible analyses are reported as null."""
    return None if value == NEG_INF else value


class TokenIn(BaseModel):
    form: str = Field(min_length=1)
    pos: str = Field(min_length=1)


class ProposeRequest(BaseModel):
    schema_version: int = SCHEMA_VERSION
    tokens: List[TokenIn]
    spans: List[Tuple[int, int]] = []


def _forest_json(sentence, tags, scheme, scores):
    """Nested node/token dicts with spans, rendered tags and log scores."""

    def walk(item, pos):
        if isinstance(item, Token):
            node = {
                "type": "token",
                "form": item.form,
                "pos": item.pos,
                "index": pos,
                "tag": render_tag(tags[pos], scheme),
                "score": _json_score(scores[pos]),
            }
            return node, pos + 1
        children = []
        start = pos
        for child in item.children:
            child_json, pos = walk(child, pos)
            children.append(child_json)
        return (
            {
                "type": "node",
                "label": item.label,
                "start": start,
                "end": pos,
                "children": children,
            },
            pos,
        )

    out = []
    pos = 0
    for item in sentence.forest:
        node, pos = walk(item, pos)
        out.append(node)
    return out


def create_app(model: Optional[object] = None, unknown_pos_policy: str = "unk") -> FastAPI:
    """Build the service; ``model`` is a ChunkModel, a model-file path, or
    None (health-only operation, data endpoints answer 503)."""
    if isinstance(model, str):
        model = load_model(model)

    app = FastAPI(title="chunktagger annotation service")
    app.state.model = model
    app.state.policy = unknown_pos_policy

    def require_model() -> ChunkModel:
        if app.state.model is None:
            raise HTTPException(status_code=503, detail="no model loaded")
        return app.state.model

    @app.get("/v1/health")
    def health():
        return {
            "status": "ok",
            "schema_version": SCHEMA_VERSION,
            "model_loaded": app.state.model is not None,
        }

    @app.get("/v1/model")
    def model_info():
        m = require_model()
        return {
            "schema_version": SCHEMA_VERSION,
            "dims": m.scheme.dims,
            "depth": m.scheme.depth,
            "order": m.order,
            "tagset_size": len(m.alphabet),
            "pos_alphabet_size": len(m.pos_alphabet),
            "lambda": [m.weights.l1, m.weights.l2, m.weights.l3],
            "training_sentences": m.counts.n_sequences,
            "training_tokens": m.counts.total - m.counts.n_sequences,
        }

    @app.post("/v1/propose")
    def propose(request: ProposeRequest):
        m = require_model()
        if request.schema_version != SCHEMA_VERSION:
            raise HTTPException(
                status_code=400,
                detail="unsupported schema_version %r" % request.schema_version,
            )
        tokens = [Token(t.form, t.pos) for t in request.tokens]
        if not tokens:
            raise HTTPException(status_code=400, detail="empty token sequence")
        try:
            boundaries = BoundarySpec(tuple(request.spans))
            boundaries.check_range(len(tokens))
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        try:
            result = tag_interactive(m, tokens, boundaries, app.state.policy)
        except UnknownPosError as exc:
            raise HTTPException(
                status_code=422,
                detail="unknown POS %r at position %d" % (exc.pos, exc.position),
            )
        except InfeasibleConstraintError as exc:
            raise HTTPException(status_code=422, detail=str(exc))

        pos_seq = [t.pos for t in tokens]
        per_position, eos_term = position_scores(m, pos_seq, result.tags)
        chunk_scores = []
        offset = 0
        for item in result.sentence.forest:
            if isinstance(item, Token):
                offset += 1
                continue
            width = sum(1 for _ in _tokens_of(item))
            chunk_scores.append(
                {
                    "start": offset,
                    "end": offset + width,
                    "log_prob": _json_score(sum(per_position[offset : offset + width])),
                }
            )
            offset += width
        return {
            "schema_version": SCHEMA_VERSION,
            "forest": _forest_json(result.sentence, result.tags, m.scheme, per_position),
            "spans": [list(s) for s in boundaries.spans],
            "repair_count": result.repairs,
            "unknown_pos_positions": list(result.unknown_pos),
            "infeasible_spans": [list(s) for s in result.infeasible_spans],
            "chunk_scores": chunk_scores,
            "sentence_log_prob": _json_score(sum(per_position) + eos_term),
        }

    return app


def _tokens_of(item):
    if isinstance(item, Token):
        yield item
    else:
        for child in item.children:
            yield from _tokens_of(child)
