"""Append-only file persistence for sessions, recordings, and results.

Each entity type lives in its own JSONL file under the data directory;
audio is stored once per content hash under blobs/.  State is rebuilt by
replaying the record files at startup.  Corrupt or truncated lines are
moved to a .quarantine file with a warning and the record file is
rewritten atomically without them.
"""

from __future__ import annotations

import json
import logging
import os
import threading
import time
import uuid
from pathlib import Path

from .transcribe import content_hash

logger = logging.getLogger(__name__)

_ENTITIES = ("sessions", "recordings", "results")


class NotFoundError(KeyError):
    pass


def _dumps(record: dict) -> str:
    return json.dumps(record, ensure_ascii=False, separators=(",", ":"))


class Store:
    def __init__(self, data_dir):
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self.blob_dir = self.data_dir / "blobs"
        self.blob_dir.mkdir(exist_ok=True)
        self._locks = {name: threading.Lock() for name in _ENTITIES}
        self._tables: dict = {name: {} for name in _ENTITIES}
        for name in _ENTITIES:
            self._replay(name)

    def _path(self, name: str) -> Path:
        return self.data_dir / f"{name}.jsonl"

    def _replay(self, name: str) -> None:
        path = self._path(name)
        if not path.exists():
            return
        good, bad = [], []
        with open(path, encoding="utf-8") as fh:
            for raw in fh.read().splitlines():
                if not raw.strip():
                    continue
                try:
                    record = json.loads(raw)
                    if not isinstance(record, dict) or "id" not in record:
                        raise ValueError("record is not an object with an id")
                except ValueError as exc:
                    bad.append((raw, str(exc)))
                    continue
                good.append(record)
        table = self._tables[name]
        for record in good:
            table[record["id"]] = record
        if bad:
            logger.warning("%s: quarantined %d corrupt line(s)", path, len(bad))
            with open(f"{path}.quarantine", "a", encoding="utf-8") as qf:
                for raw, _ in bad:
                    qf.write(raw + "\n")
            tmp = path.with_suffix(".jsonl.tmp")
            with open(tmp, "w", encoding="utf-8") as fh:
                for record in good:
                    fh.write(_dumps(record) + "\n")
                fh.flush()
                os.fsync(fh.fileno())
            os.replace(tmp, path)

    def _append(self, name: str, record: dict) -> dict:
        with self._locks[name]:
            with open(self._path(name), "a", encoding="utf-8") as fh:
                fh.write(_dumps(record) + "\n")
                fh.flush()
                os.fsync(fh.fileno())
            self._tables[name][record["id"]] = record
        return record

    # -- sessions ---------------------------------------------------------

    def create_session(self, child_alias: str) -> dict:
        record = {"id": uuid.uuid4().hex, "child_alias": child_alias,
                  "created_at": time.time()}
        return self._append("sessions", record)

    def get_session(self, session_id: str) -> dict:
        try:
            return self._tables["sessions"][session_id]
        except KeyError:
            raise NotFoundError(f"unknown session {session_id!r}") from None

    # -- recordings and blobs --------------------------------------------

    def save_blob(self, wav_bytes: bytes) -> str:
        digest = content_hash(wav_bytes)
        path = self.blob_dir / f"{digest}.wav"
        if not path.exists():
            tmp = path.with_suffix(".tmp")
            tmp.write_bytes(wav_bytes)
            os.replace(tmp, path)
        return digest

    def load_blob(self, digest: str) -> bytes:
        path = self.blob_dir / f"{digest}.wav"
        if not path.exists():
            raise NotFoundError(f"no blob for hash {digest!r}")
        return path.read_bytes()

    def add_recording(self, session_id: str, task: str, wav_bytes: bytes,
                      duration_s: float) -> dict:
        self.get_session(session_id)
        digest = self.save_blob(wav_bytes)
        record = {"id": uuid.uuid4().hex, "session_id": session_id, "task": task,
                  "audio_sha256": digest, "duration_s": duration_s,
                  "created_at": time.time()}
        return self._append("recordings", record)

    def get_recording(self, recording_id: str) -> dict:
        try:
            return self._tables["recordings"][recording_id]
        except KeyError:
            raise NotFoundError(f"unknown recording {recording_id!r}") from None

    # -- results ----------------------------------------------------------

    def add_result(self, recording_id: str, task: str, payload: dict) -> dict:
        self.get_recording(recording_id)
        record = {"id": uuid.uuid4().hex, "recording_id": recording_id,
                  "task": task, "payload": payload, "created_at": time.time()}
        return self._append("results", record)

    def results_for_session(self, session_id: str) -> list[dict]:
        self.get_session(session_id)
        recording_ids = {rid for rid, rec in self._tables["recordings"].items()
                         if rec["session_id"] == session_id}
        return [rec for rec in self._tables["results"].values()
                if rec["recording_id"] in recording_ids]
