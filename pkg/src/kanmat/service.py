"""HTTP/JSON API for the stagewise exploration workflow.

Datasets are uploaded once and immutable; sessions hold an ordered transform
stack over a base dataset and a cache of computed matrices keyed by
(transform-stack hash, matrix kind, config hash). Replaying a session's
stack always reproduces its dataset, and repeated identical computes return
byte-identical documents straight from the cache.
"""

from __future__ import annotations

import hashlib
import json
import threading
import uuid
from dataclasses import asdict
from pathlib import Path

from fastapi import FastAPI, Request, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from . import dataset as dataset_io
from .additive import FitConfig
from .errors import CsvParseError, KanmatError, TransformError
from .matrix import compute_baseline, compute_mkan, compute_pkan
from .render import export_json

DEFAULT_BODY_LIMIT = 256 * 1024 * 1024


def _error(status: int, code: str, message: str, detail=None) -> JSONResponse:
    return JSONResponse(
        status_code=status,
        content={"code": code, "message": message, "detail": detail},
    )


def _hash_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]


def config_hash(cfg: FitConfig) -> str:
    return _hash_text(json.dumps(asdict(cfg), sort_keys=True))


class Session:
    """Single-writer transform stack over one base dataset."""

    def __init__(self, session_id: str, dataset_id: str, base):
        self.id = session_id
        self.dataset_id = dataset_id
        self.base = base
        self.stack: list[dataset_io.TransformSpec] = []
        self.current = base
        self.cache: dict[tuple, bytes] = {}
        self.jobs: dict[str, dict] = {}
        self.running: set[tuple] = set()
        self.lock = threading.Lock()

    def stack_hash(self) -> str:
        return _hash_text(json.dumps([t.to_dict() for t in self.stack], sort_keys=True))

    def describe(self) -> dict:
        return {
            "session_id": self.id,
            "dataset_id": self.dataset_id,
            "columns": list(self.current.names),
            "n_rows": self.current.n_rows,
            "history": [t.to_dict() for t in self.stack],
            "stack_hash": self.stack_hash(),
        }


def create_app(data_dir: str | Path | None = None, body_limit: int = DEFAULT_BODY_LIMIT) -> FastAPI:
    app = FastAPI(title="kanmat service")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
        expose_headers=["X-Config-Hash", "X-Stack-Hash"],
    )
    datasets: dict[str, object] = {}
    sessions: dict[str, Session] = {}
    store_lock = threading.Lock()
    data_path = Path(data_dir) if data_dir is not None else None

    if data_path is not None and data_path.is_dir():
        for csv_file in sorted(data_path.glob("*.csv")):
            try:
                datasets[csv_file.stem] = dataset_io.read_csv(csv_file)
            except (KanmatError, OSError):
                continue  # unreadable files are simply not listed

    def new_id(prefix: str) -> str:
        return f"{prefix}_{uuid.uuid4().hex[:12]}"

    @app.get("/health")
    def health():
        return {"status": "ok"}

    @app.get("/datasets")
    def list_datasets():
        with store_lock:
            return {
                "datasets": [
                    {"dataset_id": did, "columns": list(d.names), "n_rows": d.n_rows}
                    for did, d in sorted(datasets.items())
                ]
            }

    @app.post("/datasets")
    async def upload_dataset(request: Request, na_policy: str = "reject"):
        body = await request.body()
        if len(body) > body_limit:
            return _error(413, "BODY_TOO_LARGE", f"body exceeds {body_limit} bytes")
        try:
            d = dataset_io.read_csv_text(body.decode("utf-8"), na_policy=na_policy)
        except UnicodeDecodeError:
            return _error(400, "BAD_ENCODING", "body is not valid UTF-8")
        except CsvParseError as exc:
            return _error(400, "PARSE_ERROR", str(exc),
                          detail={"row": exc.row, "column": exc.column})
        except KanmatError as exc:
            return _error(400, "BAD_REQUEST", str(exc))
        did = new_id("ds")
        with store_lock:
            datasets[did] = d
        if data_path is not None:
            data_path.mkdir(parents=True, exist_ok=True)
            d.to_csv(data_path / f"{did}.csv")
        return {
            "dataset_id": did,
            "columns": list(d.names),
            "n_rows": d.n_rows,
            "rows_dropped": d.n_dropped,
        }

    def get_session(session_id: str) -> Session | None:
        with store_lock:
            return sessions.get(session_id)

    @app.post("/sessions")
    async def create_session(payload: dict):
        dataset_id = payload.get("dataset_id")
        with store_lock:
            base = datasets.get(dataset_id)
        if base is None:
            return _error(404, "UNKNOWN_DATASET", f"no dataset {dataset_id!r}")
        sid = new_id("s")
        session = Session(sid, dataset_id, base)
        with store_lock:
            sessions[sid] = session
        return {"session_id": sid, **session.describe()}

    @app.get("/sessions/{session_id}")
    def describe_session(session_id: str):
        session = get_session(session_id)
        if session is None:
            return _error(404, "UNKNOWN_SESSION", f"no session {session_id!r}")
        return session.describe()

    @app.post("/sessions/{session_id}/transforms")
    async def add_transform(session_id: str, payload: dict):
        session = get_session(session_id)
        if session is None:
            return _error(404, "UNKNOWN_SESSION", f"no session {session_id!r}")
        with session.lock:
            try:
                spec = dataset_io.TransformSpec.from_dict(payload)
                session.current = dataset_io.apply_transform(session.current, spec)
            except (TransformError, KanmatError, KeyError, TypeError) as exc:
                return _error(422, "INVALID_TRANSFORM", str(exc))
            session.stack.append(spec)
            return session.describe()

    @app.delete("/sessions/{session_id}/transforms/last")
    def undo_transform(session_id: str):
        session = get_session(session_id)
        if session is None:
            return _error(404, "UNKNOWN_SESSION", f"no session {session_id!r}")
        with session.lock:
            if not session.stack:
                return _error(422, "EMPTY_STACK", "no transform to undo")
            session.stack.pop()
            session.current = dataset_io.apply_transforms(session.base, session.stack)
            return session.describe()

    def run_compute(session: Session, kind: str, targets, cfg: FitConfig) -> bytes:
        if kind == "pkan":
            m = compute_pkan(session.current, cfg)
        elif kind == "mkan":
            m = compute_mkan(session.current, targets=targets, cfg=cfg)
        else:
            m = compute_baseline(session.current, kind, cfg)
        return export_json(m).encode("utf-8")

    @app.post("/sessions/{session_id}/compute")
    async def compute(session_id: str, payload: dict):
        session = get_session(session_id)
        if session is None:
            return _error(404, "UNKNOWN_SESSION", f"no session {session_id!r}")
        kind = str(payload.get("kind", "")).lower()
        if kind not in ("pkan", "mkan", "pearson", "nmi"):
            return _error(422, "INVALID_KIND", f"unknown matrix kind {kind!r}")
        try:
            cfg = FitConfig(**{**asdict(FitConfig()), **payload.get("config", {})})
        except (KanmatError, TypeError) as exc:
            return _error(422, "INVALID_CONFIG", str(exc))
        targets = payload.get("targets")
        excluded = payload.get("excluded_targets")
        if targets is not None and excluded is not None:
            return _error(422, "INVALID_TARGETS",
                          "targets and excluded_targets are mutually exclusive")
        if excluded is not None:
            targets = [c for c in session.current.names if c not in set(excluded)]
        mode = payload.get("mode", "sync")

        cfg_hash = config_hash(cfg)
        key = (session.stack_hash(), kind, cfg_hash, tuple(targets) if targets else None)
        headers = {"X-Config-Hash": cfg_hash, "X-Stack-Hash": key[0]}

        with session.lock:
            cached = session.cache.get(key)
            if cached is not None and mode == "sync":
                return Response(content=cached, media_type="application/json", headers=headers)
            if key in session.running:
                return _error(409, "ALREADY_RUNNING", "identical compute already in progress")
            session.running.add(key)

        def work() -> bytes:
            try:
                blob = run_compute(session, kind, targets, cfg)
            finally:
                with session.lock:
                    session.running.discard(key)
            with session.lock:
                session.cache[key] = blob
            return blob

        if mode == "async":
            job_id = new_id("job")
            job = {"status": "running", "key": key, "result": None, "error": None,
                   "config_hash": cfg_hash}
            with session.lock:
                session.jobs[job_id] = job

            def runner():
                try:
                    job["result"] = work()
                    job["status"] = "done"
                except KanmatError as exc:
                    job["error"] = str(exc)
                    job["status"] = "error"

            threading.Thread(target=runner, daemon=True).start()
            return JSONResponse(status_code=202, content={"job_id": job_id, "status": "running"},
                                headers=headers)

        try:
            blob = work()
        except KanmatError as exc:
            return _error(422, "COMPUTE_FAILED", str(exc))
        return Response(content=blob, media_type="application/json", headers=headers)

    @app.get("/sessions/{session_id}/jobs/{job_id}")
    def job_status(session_id: str, job_id: str):
        session = get_session(session_id)
        if session is None:
            return _error(404, "UNKNOWN_SESSION", f"no session {session_id!r}")
        job = session.jobs.get(job_id)
        if job is None:
            return _error(404, "UNKNOWN_JOB", f"no job {job_id!r}")
        body = {"job_id": job_id, "status": job["status"], "error": job["error"]}
        if job["status"] == "done":
            body["matrix"] = json.loads(job["result"].decode("utf-8"))
        return JSONResponse(content=body, headers={"X-Config-Hash": job["config_hash"]})

    return app
