"""HTTP scoring service: a thin wrapper over the library scoring calls.

Scoring responses are serialized with the same canonical JSON encoder
the library uses, so a service response is byte-identical to scoring
the same inputs in-process.
"""

from __future__ import annotations

import json
from pathlib import Path

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from . import __version__
from .assessment import (
    TASK_TAGS,
    RanTrial,
    UnknownWordError,
    score_pseudoword,
    score_ran,
)
from .audio import AudioFormatError, decode_wav
from .phonology import G2pError, bundled_lexicon
from .store import NotFoundError, Store
from .transcribe import Transcriber, TranscriberError, Transcript


def canonical_json(obj) -> bytes:
    return json.dumps(obj, ensure_ascii=False, separators=(",", ":")).encode("utf-8")


def _json_response(obj, status_code: int = 200) -> Response:
    return Response(content=canonical_json(obj), status_code=status_code,
                    media_type="application/json")


def _error(status_code: int, detail: str) -> JSONResponse:
    return JSONResponse({"detail": detail}, status_code=status_code)


async def _read_json(request: Request) -> dict | None:
    try:
        payload = await request.json()
    except (json.JSONDecodeError, UnicodeDecodeError, ValueError):
        return None
    return payload if isinstance(payload, dict) else None


def create_app(store: Store, transcriber: Transcriber, lexicon=None,
               static_dir=None) -> FastAPI:
    lexicon = lexicon if lexicon is not None else bundled_lexicon()
    app = FastAPI(title="kidspeech scoring service", version=__version__)

    def transcribe_recording(recording: dict) -> tuple[Transcript, float]:
        wav_bytes = store.load_blob(recording["audio_sha256"])
        return transcriber.transcribe(wav_bytes), recording["duration_s"]

    @app.get("/healthz")
    async def healthz():
        return _json_response({"service": "kidspeech", "version": __version__,
                               "status": "ok"})

    @app.post("/sessions")
    async def create_session(request: Request):
        payload = await _read_json(request)
        if payload is None:
            return _error(400, "body must be a JSON object")
        alias = payload.get("child_alias")
        if not isinstance(alias, str) or not alias.strip():
            return _error(400, "child_alias must be a nonempty string")
        record = store.create_session(alias.strip())
        return _json_response({"session_id": record["id"]})

    @app.post("/sessions/{session_id}/recordings")
    async def upload_recording(session_id: str, request: Request, task: str = ""):
        if task not in TASK_TAGS:
            return _error(400, f"task query parameter must be one of {list(TASK_TAGS)}")
        wav_bytes = await request.body()
        try:
            clip = decode_wav(wav_bytes)
        except AudioFormatError as exc:
            return _error(400, f"undecodable audio: {exc}")
        try:
            record = store.add_recording(session_id, task, wav_bytes,
                                         clip.duration_s)
        except NotFoundError as exc:
            return _error(404, str(exc))
        return _json_response({"recording_id": record["id"],
                               "duration_s": record["duration_s"]})

    @app.post("/score/ran")
    async def score_ran_endpoint(request: Request):
        payload = await _read_json(request)
        if payload is None:
            return _error(400, "body must be a JSON object")
        recording_id = payload.get("recording_id")
        expected = payload.get("expected_sequence")
        if not isinstance(recording_id, str):
            return _error(400, "recording_id must be a string")
        if (not isinstance(expected, list) or not expected
                or not all(isinstance(w, str) for w in expected)):
            return _error(400, "expected_sequence must be a nonempty list of words")
        try:
            recording = store.get_recording(recording_id)
        except NotFoundError as exc:
            return _error(404, str(exc))
        try:
            transcript, duration_s = transcribe_recording(recording)
            result = score_ran(RanTrial(tuple(expected)), transcript, duration_s,
                               lexicon=lexicon)
        except UnknownWordError as exc:
            return _error(422, str(exc))
        except G2pError as exc:
            return _error(422, f"transcript could not be phonemized: {exc}")
        except TranscriberError as exc:
            return _error(502, f"transcription failed: {exc}")
        store.add_result(recording_id, "ran", result.to_payload())
        return _json_response(result.to_payload())

    @app.post("/score/pseudoword")
    async def score_pseudoword_endpoint(request: Request):
        payload = await _read_json(request)
        if payload is None:
            return _error(400, "body must be a JSON object")
        recording_id = payload.get("recording_id")
        target_word = payload.get("target_word")
        if not isinstance(recording_id, str):
            return _error(400, "recording_id must be a string")
        if not isinstance(target_word, str) or not target_word.strip():
            return _error(400, "target_word must be a nonempty string")
        try:
            recording = store.get_recording(recording_id)
        except NotFoundError as exc:
            return _error(404, str(exc))
        try:
            transcript, _ = transcribe_recording(recording)
            result = score_pseudoword(target_word, transcript.text, lexicon=lexicon)
        except UnknownWordError as exc:
            return _error(422, str(exc))
        except G2pError as exc:
            return _error(422, f"response could not be phonemized: {exc}")
        except TranscriberError as exc:
            return _error(502, f"transcription failed: {exc}")
        store.add_result(recording_id, "pseudoword", result.to_payload())
        return _json_response(result.to_payload())

    @app.get("/sessions/{session_id}/results")
    async def session_results(session_id: str):
        try:
            results = store.results_for_session(session_id)
        except NotFoundError as exc:
            return _error(404, str(exc))
        return _json_response({"results": results})

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/ui", StaticFiles(directory=str(static_dir), html=True), name="ui")
    return app
