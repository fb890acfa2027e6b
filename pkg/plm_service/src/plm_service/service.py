"""HTTP service implementing the scorer wire protocol plus /verbalize.

POST /score     {"sequences": [str, ...]} -> {"logits": [[related, unrelated], ...]}
POST /verbalize {"seq": str}              -> {"idea": str}

Malformed requests get 400; model failures get 500.
"""

from __future__ import annotations

from pathlib import Path

import uvicorn
from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .mlm import MLMScorer, load_mlm_scorer
from .seq2seq import Verbalizer, load_verbalizer


class ScoreRequest(BaseModel):
    sequences: list[str]


class VerbalizeRequest(BaseModel):
    seq: str


def create_app(scorer: MLMScorer | None = None,
               verbalizer: Verbalizer | None = None) -> FastAPI:
    app = FastAPI(title="plm-service")

    @app.exception_handler(RequestValidationError)
    async def bad_request(_request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"error": str(exc)})

    @app.exception_handler(Exception)
    async def model_failure(_request: Request, exc: Exception):
        return JSONResponse(status_code=500, content={"error": str(exc)})

    @app.get("/health")
    def health():
        return {"scorer": scorer is not None, "verbalizer": verbalizer is not None}

    @app.post("/score")
    def score(request: ScoreRequest):
        if scorer is None:
            return JSONResponse(status_code=500, content={"error": "no scorer checkpoint loaded"})
        return {"logits": scorer.score_sequences(request.sequences)}

    @app.post("/verbalize")
    def verbalize(request: VerbalizeRequest):
        if verbalizer is None:
            return JSONResponse(status_code=500,
                                content={"error": "no verbalizer checkpoint loaded"})
        return {"idea": verbalizer.generate(request.seq)}

    return app


def serve(port: int, host: str = "127.0.0.1", scorer_dir: str | Path | None = None,
          verbalizer_dir: str | Path | None = None) -> None:
    scorer = load_mlm_scorer(scorer_dir) if scorer_dir else None
    verbalizer = load_verbalizer(verbalizer_dir) if verbalizer_dir else None
    uvicorn.run(create_app(scorer, verbalizer), host=host, port=port, log_level="info")
