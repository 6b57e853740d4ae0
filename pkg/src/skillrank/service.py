"""Minimal HTTP ranking service around a loaded checkpoint and IDF table.

POST /rank   {"title": str, "top_k": int = 20, "use_idf": bool = true}
             -> {"title": "<normalized>", "skills": [{"skill", "score"}, ...]}
GET /healthz -> 200 "ok" once the model is loaded, 503 before.
"""

from __future__ import annotations

from fastapi import FastAPI
from fastapi.responses import JSONResponse, PlainTextResponse
from pydantic import BaseModel

from .corpus import EmptyTitleError, normalize_title
from .ranker import SkillRanker


class RankRequest(BaseModel):
    title: str
    top_k: int = 20
    use_idf: bool = True


def create_app(ranker: SkillRanker | None = None) -> FastAPI:
    """Build the app. `ranker` is immutable shared state; passing None keeps
    the service in its pre-load state (healthz 503)."""
    app = FastAPI(title="skillrank")
    app.state.ranker = ranker

    @app.get("/healthz")
    def healthz():
        if app.state.ranker is None:
            return PlainTextResponse("loading", status_code=503)
        return PlainTextResponse("ok")

    @app.post("/rank")
    def rank(req: RankRequest):
        r: SkillRanker | None = app.state.ranker
        if r is None:
            return _error(503, "not_loaded")
        try:
            title = normalize_title(req.title)
        except EmptyTitleError:
            return _error(400, "empty_title")
        if not (1 <= req.top_k <= len(r.head.skill_order)):
            return _error(400, "top_k_out_of_range")
        if req.use_idf and r.idf_table is None:
            return _error(409, "idf_not_loaded")
        title, ranked = r.rank(title, req.top_k, use_idf=req.use_idf)
        return JSONResponse({
            "title": title,
            "skills": [{"skill": s, "score": score} for s, score in ranked.entries],
        })

    return app


def _error(status: int, code: str) -> JSONResponse:
    return JSONResponse({"error": code}, status_code=status)
