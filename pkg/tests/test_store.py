"""Append-only store: replay, content-addressed blobs, quarantine of bad lines."""

import json
import logging

import pytest

from kidspeech.store import NotFoundError, Store
from kidspeech.transcribe import content_hash


@pytest.fixture()
def store(tmp_path):
    return Store(tmp_path / "data")


class TestLayout:
    def test_directories_created(self, tmp_path):
        store = Store(tmp_path / "data")
        assert store.data_dir.is_dir()
        assert store.blob_dir.is_dir()

    def test_reopening_existing_directory_is_fine(self, tmp_path):
        Store(tmp_path / "data")
        Store(tmp_path / "data")


class TestSessions:
    def test_create_and_get(self, store):
        record = store.create_session("leila")
        assert store.get_session(record["id"]) == record
        assert record["child_alias"] == "leila"
        assert "created_at" in record

    def test_ids_are_unique(self, store):
        ids = {store.create_session("x")["id"] for _ in range(20)}
        assert len(ids) == 20

    def test_unknown_session_raises(self, store):
        with pytest.raises(NotFoundError, match="unknown session"):
            store.get_session("nope")


class TestBlobs:
    def test_save_is_content_addressed(self, store):
        digest = store.save_blob(b"wav bytes")
        assert digest == content_hash(b"wav bytes")
        assert store.load_blob(digest) == b"wav bytes"

    def test_duplicate_content_stored_once(self, store):
        store.save_blob(b"same")
        store.save_blob(b"same")
        files = list(store.blob_dir.iterdir())
        assert len(files) == 1

    def test_distinct_content_kept_apart(self, store):
        a = store.save_blob(b"first")
        b = store.save_blob(b"second")
        assert a != b
        assert len(list(store.blob_dir.iterdir())) == 2

    def test_missing_blob_raises(self, store):
        with pytest.raises(NotFoundError, match="no blob"):
            store.load_blob("0" * 64)


class TestRecordingsAndResults:
    def test_recording_links_session_and_blob(self, store):
        session = store.create_session("leila")
        record = store.add_recording(session["id"], "ran", b"audio", 1.25)
        assert record["session_id"] == session["id"]
        assert record["audio_sha256"] == content_hash(b"audio")
        assert record["duration_s"] == 1.25
        assert store.get_recording(record["id"]) == record

    def test_recording_requires_existing_session(self, store):
        with pytest.raises(NotFoundError):
            store.add_recording("ghost", "ran", b"audio", 1.0)

    def test_result_requires_existing_recording(self, store):
        with pytest.raises(NotFoundError):
            store.add_result("ghost", "ran", {"accuracy": 1.0})

    def test_results_filtered_by_session(self, store):
        s1 = store.create_session("a")
        s2 = store.create_session("b")
        r1 = store.add_recording(s1["id"], "ran", b"one", 1.0)
        r2 = store.add_recording(s2["id"], "ran", b"two", 1.0)
        res1 = store.add_result(r1["id"], "ran", {"accuracy": 0.5})
        store.add_result(r2["id"], "ran", {"accuracy": 1.0})
        assert store.results_for_session(s1["id"]) == [res1]

    def test_results_for_unknown_session_raise(self, store):
        with pytest.raises(NotFoundError):
            store.results_for_session("ghost")


class TestReplay:
    def populate(self, data_dir):
        store = Store(data_dir)
        session = store.create_session("leila")
        recording = store.add_recording(session["id"], "ran", b"wav", 2.0)
        result = store.add_result(recording["id"], "ran", {"accuracy": 1.0})
        return session, recording, result

    def test_restart_rebuilds_identical_state(self, tmp_path):
        session, recording, result = self.populate(tmp_path / "data")
        reopened = Store(tmp_path / "data")
        assert reopened.get_session(session["id"]) == session
        assert reopened.get_recording(recording["id"]) == recording
        assert reopened.results_for_session(session["id"]) == [result]
        assert reopened.load_blob(recording["audio_sha256"]) == b"wav"

    def test_replay_leaves_clean_files_untouched(self, tmp_path):
        self.populate(tmp_path / "data")
        before = (tmp_path / "data" / "sessions.jsonl").read_bytes()
        Store(tmp_path / "data")
        assert (tmp_path / "data" / "sessions.jsonl").read_bytes() == before
        assert not (tmp_path / "data" / "sessions.jsonl.quarantine").exists()

    def test_blank_lines_ignored_without_quarantine(self, tmp_path):
        self.populate(tmp_path / "data")
        path = tmp_path / "data" / "sessions.jsonl"
        path.write_bytes(path.read_bytes() + b"\n\n")
        store = Store(tmp_path / "data")
        assert len(store._tables["sessions"]) == 1
        assert not (tmp_path / "data" / "sessions.jsonl.quarantine").exists()


class TestQuarantine:
    def test_truncated_final_line_quarantined_exactly(self, tmp_path, caplog):
        """A write cut off mid-record must not poison the rest of the log."""
        session, _, _ = TestReplay().populate(tmp_path / "data")
        path = tmp_path / "data" / "sessions.jsonl"
        good = path.read_bytes()
        partial = b'{"id":"deadbeef","child_alias":"tr'
        path.write_bytes(good + partial)
        with caplog.at_level(logging.WARNING, logger="kidspeech.store"):
            store = Store(tmp_path / "data")
        assert store.get_session(session["id"]) == session
        assert "deadbeef" not in store._tables["sessions"]
        quarantine = (tmp_path / "data" / "sessions.jsonl.quarantine").read_bytes()
        assert quarantine == partial + b"\n"
        assert path.read_bytes() == good
        assert "quarantined 1 corrupt line" in caplog.text

    def test_non_object_and_missing_id_lines_quarantined(self, tmp_path):
        data_dir = tmp_path / "data"
        data_dir.mkdir()
        path = data_dir / "sessions.jsonl"
        lines = ['[1,2,3]', '{"child_alias":"no id"}',
                 '{"id":"ok1","child_alias":"fine"}']
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        store = Store(data_dir)
        assert set(store._tables["sessions"]) == {"ok1"}
        quarantined = (data_dir / "sessions.jsonl.quarantine").read_text().splitlines()
        assert quarantined == ['[1,2,3]', '{"child_alias":"no id"}']

    def test_rewritten_file_replays_cleanly(self, tmp_path):
        data_dir = tmp_path / "data"
        data_dir.mkdir()
        path = data_dir / "sessions.jsonl"
        path.write_text('{"id":"ok1"}\nbroken\n', encoding="utf-8")
        Store(data_dir)
        store = Store(data_dir)  # second replay sees only the clean rewrite
        assert set(store._tables["sessions"]) == {"ok1"}
        quarantine = (data_dir / "sessions.jsonl.quarantine").read_text()
        assert quarantine == "broken\n"

    def test_appends_after_quarantine_preserve_history(self, tmp_path):
        data_dir = tmp_path / "data"
        data_dir.mkdir()
        (data_dir / "sessions.jsonl").write_text('garbage\n', encoding="utf-8")
        store = Store(data_dir)
        record = store.create_session("leila")
        reopened = Store(data_dir)
        assert reopened.get_session(record["id"]) == record

    def test_record_files_stay_canonical_json_lines(self, tmp_path):
        store = Store(tmp_path / "data")
        store.create_session("leila")
        raw = (tmp_path / "data" / "sessions.jsonl").read_text(encoding="utf-8")
        line = raw.splitlines()[0]
        record = json.loads(line)
        assert json.dumps(record, ensure_ascii=False,
                          separators=(",", ":")) == line
