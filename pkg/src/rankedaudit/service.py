"""JSON-over-HTTP facade for interactive audit sessions.

Sessions live in memory and snapshot to one JSON file each after every
mutation (written atomically via rename), so a restart restores them exactly,
histories included. Estimates run synchronously in-request. Candidate names
and indices always travel together in responses.
"""

from __future__ import annotations

import json
import os
import secrets
import threading
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from .audit import (CENSUS_COMPLETE, STOP_CONFIRM, CONTINUE, AuditConfig, AuditSession,
                    ElectionMeta, PosteriorEstimate, start_session)
from .ballots import BallotMultiset, Roster, canonicalize
from .dirtree import DIRICHLET, DIRICHLET_TREE, PriorConfig, match_dirichlet_a0
from .social_choice import TiePolicy


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str):
        self.status = status
        self.code = code
        self.message = message
        super().__init__(message)


# ------------------------------------------------------------- wire schemas

class PriorBody(BaseModel):
    kind: str = DIRICHLET_TREE
    a0: float | None = None
    allowPartial: bool = True
    matchTreeA0: float | None = None


class TieBody(BaseModel):
    mode: str = "roster-order"
    seed: int = 0


class CreateSessionBody(BaseModel):
    candidates: list[str]
    totalBallots: int
    reportedWinner: str
    prior: PriorBody = Field(default_factory=PriorBody)
    threshold: float = 0.95
    drawsPerEstimate: int = 100
    tie: TieBody = Field(default_factory=TieBody)
    seed: int | None = None
    minSample: int | None = None


class BallotBody(BaseModel):
    ranking: list[str]
    count: int = 1


class PostBallotsBody(BaseModel):
    ballots: list[BallotBody]


class EstimateBody(BaseModel):
    draws: int | None = None


# ------------------------------------------------------------------- record

def _now() -> str:
    return datetime.now(timezone.utc).replace(microsecond=0).strftime("%Y-%m-%dT%H:%M:%SZ")


@dataclass
class SessionRecord:
    id: str
    session: AuditSession
    created_at: str
    updated_at: str
    matched_from_tree_a0: float | None = None


def record_snapshot(record: SessionRecord) -> dict:
    """Full JSON state of one session; the persistence format."""
    session = record.session
    prior = session.config.prior
    prior_doc = {"kind": prior.kind, "a0": prior.a0, "allowPartial": prior.allow_partial}
    if record.matched_from_tree_a0 is not None:
        prior_doc["matchedFromTreeA0"] = record.matched_from_tree_a0
    return {
        "id": record.id,
        "createdAt": record.created_at,
        "updatedAt": record.updated_at,
        "meta": {
            "candidates": list(session.meta.roster.candidates),
            "totalBallots": session.meta.total_ballots,
            "reportedWinner": session.meta.reported_winner,
        },
        "config": {
            "prior": prior_doc,
            "threshold": session.config.threshold,
            "drawsPerEstimate": session.config.draws_per_estimate,
            "tie": {"mode": session.config.tie.mode, "seed": session.config.tie.seed},
            "seed": session.config.seed,
            "minSample": session.config.min_sample,
        },
        "observed": [[count, list(ranking)] for ranking, count in sorted(session.observed.items())],
        "history": [
            {
                "n": est.sample_size,
                "draws": est.draws,
                "seedUsed": est.seed_used,
                "probByCandidate": list(est.prob_by_candidate),
            }
            for est in session.history
        ],
        "status": session.status,
    }


def record_from_snapshot(doc: dict) -> SessionRecord:
    roster = Roster(tuple(doc["meta"]["candidates"]))
    meta = ElectionMeta(roster, doc["meta"]["totalBallots"], doc["meta"]["reportedWinner"])
    prior_doc = doc["config"]["prior"]
    prior = PriorConfig(prior_doc["kind"], prior_doc["a0"], prior_doc["allowPartial"])
    config = AuditConfig(
        prior=prior,
        threshold=doc["config"]["threshold"],
        draws_per_estimate=doc["config"]["drawsPerEstimate"],
        tie=TiePolicy(doc["config"]["tie"]["mode"], doc["config"]["tie"]["seed"]),
        seed=doc["config"]["seed"],
        min_sample=doc["config"]["minSample"],
    )
    session = start_session(meta, config)
    observed = BallotMultiset()
    for count, ranking in doc["observed"]:
        observed.add(tuple(ranking), count)
    if observed.total:
        session.observe(observed)
    for entry in doc["history"]:
        probs = tuple(entry["probByCandidate"])
        session.history.append(PosteriorEstimate(
            probs[meta.reported_winner], probs, entry["n"], entry["draws"], entry["seedUsed"]))
    session.status = doc["status"]
    return SessionRecord(doc["id"], session, doc["createdAt"], doc["updatedAt"],
                         prior_doc.get("matchedFromTreeA0"))


class SessionStore:
    """In-memory registry with per-session write locks and JSON snapshots."""

    def __init__(self, data_dir: str | Path | None = None, default_seed: int = 0):
        self.data_dir = Path(data_dir) if data_dir is not None else None
        self.default_seed = default_seed
        self._records: dict[str, SessionRecord] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._registry_lock = threading.Lock()
        if self.data_dir is not None:
            self.data_dir.mkdir(parents=True, exist_ok=True)
            for path in sorted(self.data_dir.glob("*.json")):
                record = record_from_snapshot(json.loads(path.read_text(encoding="utf-8")))
                self._records[record.id] = record
                self._locks[record.id] = threading.Lock()

    def persist(self, record: SessionRecord) -> None:
        if self.data_dir is None:
            return
        path = self.data_dir / f"{record.id}.json"
        tmp = path.with_suffix(".json.tmp")
        tmp.write_text(json.dumps(record_snapshot(record), indent=1), encoding="utf-8")
        os.replace(tmp, path)

    def add(self, record: SessionRecord) -> None:
        with self._registry_lock:
            self._records[record.id] = record
            self._locks[record.id] = threading.Lock()
        self.persist(record)

    def get(self, session_id: str) -> SessionRecord:
        record = self._records.get(session_id)
        if record is None:
            raise ApiError(404, "not-found", f"no session {session_id}")
        return record

    def lock(self, session_id: str) -> threading.Lock:
        lock = self._locks.get(session_id)
        if lock is None:
            raise ApiError(404, "not-found", f"no session {session_id}")
        return lock

    def remove(self, session_id: str) -> None:
        with self._registry_lock:
            self._records.pop(session_id, None)
            self._locks.pop(session_id, None)
        if self.data_dir is not None:
            path = self.data_dir / f"{session_id}.json"
            if path.exists():
                path.unlink()

    def all_records(self) -> list[SessionRecord]:
        return sorted(self._records.values(), key=lambda r: (r.created_at, r.id))


# ---------------------------------------------------------------- rendering

def _candidate(roster: Roster, index: int) -> dict:
    return {"index": index, "name": roster.name_of(index)}


def _decision_for(session: AuditSession, estimate: PosteriorEstimate) -> str:
    if estimate.sample_size == session.meta.total_ballots:
        return CENSUS_COMPLETE
    min_sample = session.config.min_sample
    if min_sample is not None and estimate.sample_size < min_sample:
        return CONTINUE
    if estimate.prob_reported_winner >= session.config.threshold:
        return STOP_CONFIRM
    return CONTINUE


def _estimate_view(session: AuditSession, estimate: PosteriorEstimate) -> dict:
    roster = session.meta.roster
    return {
        "n": estimate.sample_size,
        "draws": estimate.draws,
        "probWinner": estimate.prob_reported_winner,
        "probByCandidate": [
            {"index": c, "name": roster.name_of(c), "prob": p}
            for c, p in enumerate(estimate.prob_by_candidate)
        ],
        "decision": _decision_for(session, estimate),
    }


def _session_view(record: SessionRecord) -> dict:
    session = record.session
    roster = session.meta.roster
    prior = session.config.prior
    prior_doc = {"kind": prior.kind, "a0": prior.a0, "allowPartial": prior.allow_partial}
    if record.matched_from_tree_a0 is not None:
        prior_doc["matchedFromTreeA0"] = record.matched_from_tree_a0
    return {
        "id": record.id,
        "createdAt": record.created_at,
        "updatedAt": record.updated_at,
        "status": session.status,
        "sampleSize": session.observed.total,
        "meta": {
            "candidates": list(roster.candidates),
            "totalBallots": session.meta.total_ballots,
            "reportedWinner": _candidate(roster, session.meta.reported_winner),
        },
        "config": {
            "prior": prior_doc,
            "threshold": session.config.threshold,
            "drawsPerEstimate": session.config.draws_per_estimate,
            "tie": {"mode": session.config.tie.mode, "seed": session.config.tie.seed},
            "seed": session.config.seed,
            "minSample": session.config.min_sample,
        },
        "history": [_estimate_view(session, est) for est in session.history],
    }


def _session_summary(record: SessionRecord) -> dict:
    session = record.session
    return {
        "id": record.id,
        "createdAt": record.created_at,
        "updatedAt": record.updated_at,
        "status": session.status,
        "sampleSize": session.observed.total,
        "totalBallots": session.meta.total_ballots,
        "reportedWinner": _candidate(session.meta.roster, session.meta.reported_winner),
    }


# ---------------------------------------------------------------------- app

def create_app(data_dir: str | Path | None = None, default_seed: int = 0,
               ui_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="rankedaudit service", version="0.1.0")
    store = SessionStore(data_dir, default_seed)
    app.state.store = store

    @app.exception_handler(ApiError)
    async def api_error_handler(_request: Request, exc: ApiError):
        return JSONResponse(status_code=exc.status,
                            content={"error": {"code": exc.code, "message": exc.message}})

    @app.exception_handler(RequestValidationError)
    async def validation_handler(_request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400,
                            content={"error": {"code": "schema", "message": str(exc.errors())}})

    @app.post("/sessions", status_code=201)
    def create_session(body: CreateSessionBody):
        try:
            roster = Roster(tuple(body.candidates))
            winner = roster.index_of(body.reportedWinner)
            matched_from = None
            if body.prior.matchTreeA0 is not None:
                if body.prior.kind != DIRICHLET:
                    raise ApiError(422, "invalid", "matchTreeA0 only applies to the dirichlet prior")
                a0 = match_dirichlet_a0(body.prior.matchTreeA0, roster.k, body.prior.allowPartial)
                matched_from = body.prior.matchTreeA0
            elif body.prior.a0 is None:
                raise ApiError(422, "invalid", "prior needs a0 (or matchTreeA0 for dirichlet)")
            else:
                a0 = body.prior.a0
            prior = PriorConfig(body.prior.kind, a0, body.prior.allowPartial)
            config = AuditConfig(
                prior=prior,
                threshold=body.threshold,
                draws_per_estimate=body.drawsPerEstimate,
                tie=TiePolicy(body.tie.mode, body.tie.seed),
                seed=store.default_seed if body.seed is None else body.seed,
                min_sample=body.minSample,
            )
            meta = ElectionMeta(roster, body.totalBallots, winner)
        except ApiError:
            raise
        except (ValueError, KeyError) as exc:
            raise ApiError(422, "invalid", str(exc)) from None
        now = _now()
        record = SessionRecord(secrets.token_urlsafe(16), start_session(meta, config),
                               now, now, matched_from)
        store.add(record)
        return _session_view(record)

    @app.get("/sessions")
    def list_sessions():
        return {"sessions": [_session_summary(r) for r in store.all_records()]}

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        record = store.get(session_id)
        with store.lock(session_id):
            return _session_view(record)

    @app.post("/sessions/{session_id}/ballots")
    def post_ballots(session_id: str, body: PostBallotsBody):
        record = store.get(session_id)
        with store.lock(session_id):
            session = record.session
            if session.status != "in-progress":
                raise ApiError(409, "conflict", f"session is {session.status}")
            roster = session.meta.roster
            batch = BallotMultiset()
            try:
                for ballot in body.ballots:
                    if ballot.count < 1:
                        raise ValueError("ballot count must be a positive integer")
                    indices = [roster.index_of(name) for name in ballot.ranking]
                    batch.add(canonicalize(indices, roster.k), ballot.count)
                if session.observed.total + batch.total > session.meta.total_ballots:
                    raise ValueError("batch would exceed the declared total ballot count")
                session.observe(batch)
            except (ValueError, KeyError) as exc:
                raise ApiError(422, "invalid", str(exc)) from None
            record.updated_at = _now()
            store.persist(record)
            return {"id": record.id, "sampleSize": session.observed.total,
                    "status": session.status}

    @app.post("/sessions/{session_id}/estimate")
    def run_estimate(session_id: str, body: EstimateBody | None = None):
        record = store.get(session_id)
        with store.lock(session_id):
            session = record.session
            draws = body.draws if body is not None else None
            if draws is not None and draws < 1:
                raise ApiError(422, "invalid", "draws must be a positive integer")
            try:
                estimate = session.estimate_posterior(draws)
            except ValueError as exc:
                raise ApiError(409, "conflict", str(exc)) from None
            decision = session.decide()
            record.updated_at = _now()
            store.persist(record)
            view = _estimate_view(session, estimate)
            view["decision"] = decision
            view["status"] = session.status
            return view

    @app.delete("/sessions/{session_id}", status_code=204)
    def delete_session(session_id: str):
        store.get(session_id)
        with store.lock(session_id):
            store.remove(session_id)

    if ui_dir is not None:
        app.mount("/ui", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
