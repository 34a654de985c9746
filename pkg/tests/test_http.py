"""HTTP API wire shapes and static serving."""

import json
import threading
import urllib.error
import urllib.request

import pytest

from birdbox.records import DetectionRecord
from birdbox.service import DetectionService, DetectionStore


def rec(species="Parus major", confidence=0.9, ts=1_700_000_000_000, modality="audio",
        media_ref=None):
    return DetectionRecord(species=species, confidence=confidence, timestamp_ms=ts,
                           modality=modality, media_ref=media_ref)


@pytest.fixture
def service():
    store = DetectionStore(capacity=100)
    svc = DetectionService(store, listen="127.0.0.1:0")  # ephemeral port
    svc.start()
    yield svc
    svc.stop()


def get_json(svc, path):
    with urllib.request.urlopen(f"http://127.0.0.1:{svc.port}{path}", timeout=5) as resp:
        return json.loads(resp.read().decode("utf-8"))


class TestDetectionsEndpoint:
    def test_exact_wire_shape(self, service):
        service.store.append(rec(media_ref="clip-7.wav"))
        payload = get_json(service, "/api/detections?after=0&limit=10")
        assert set(payload.keys()) == {"records", "latest_seq", "evicted_before"}
        record = payload["records"][0]
        assert set(record.keys()) == {"seq", "species", "confidence", "timestamp_ms",
                                      "modality", "media_ref"}
        assert record["seq"] == 1
        assert record["species"] == "Parus major"
        assert record["confidence"] == 0.9
        assert record["timestamp_ms"] == 1_700_000_000_000
        assert record["modality"] == "audio"
        assert payload["latest_seq"] == 1
        assert payload["evicted_before"] == 1

    def test_media_ref_omitted_when_absent(self, service):
        service.store.append(rec())
        record = get_json(service, "/api/detections?after=0")["records"][0]
        assert "media_ref" not in record

    def test_round_trip_through_wire(self, service):
        original = rec(species="Sitta europaea", confidence=0.37, modality="image")
        service.store.append(original)
        wire = get_json(service, "/api/detections?after=0")["records"][0]
        parsed = DetectionRecord.from_wire(wire)
        assert parsed.species == original.species
        assert parsed.confidence == original.confidence
        assert parsed.timestamp_ms == original.timestamp_ms
        assert parsed.modality == original.modality

    def test_after_and_limit(self, service):
        for _ in range(5):
            service.store.append(rec())
        payload = get_json(service, "/api/detections?after=2&limit=2")
        assert [r["seq"] for r in payload["records"]] == [3, 4]

    def test_bad_parameters_rejected(self, service):
        with pytest.raises(urllib.error.HTTPError) as err:
            get_json(service, "/api/detections?after=notanumber")
        assert err.value.code == 400

    def test_poll_loop_observes_every_record_once(self):
        # capacity must stay ahead of the cursor: completeness holds only
        # while eviction has not overtaken the reader
        total = 200
        store = DetectionStore(capacity=total)
        svc = DetectionService(store, listen="127.0.0.1:0")
        svc.start()
        try:
            def produce():
                for _ in range(total):
                    store.append(rec())

            thread = threading.Thread(target=produce)
            thread.start()
            seen = []
            cursor = 0
            while len(seen) < total:
                payload = get_json(svc, f"/api/detections?after={cursor}&limit=50")
                seen.extend(r["seq"] for r in payload["records"])
                if payload["records"]:
                    cursor = payload["records"][-1]["seq"]
                elif not thread.is_alive() and payload["latest_seq"] == cursor:
                    break
            thread.join()
            assert seen == list(range(1, total + 1))
        finally:
            svc.stop()


class TestStatusEndpoint:
    def test_status_shape(self, service):
        service.store.append(rec(modality="image"))
        status = get_json(service, "/api/status")
        for key in ("uptime_seconds", "counts", "buffer_len", "buffer_capacity",
                    "last_detection_timestamp", "backend_identities", "duty_cycle",
                    "persist_failures", "poll_interval_ms"):
            assert key in status
        assert status["counts"] == {"audio": 0, "image": 1}
        assert status["poll_interval_ms"] == 2000

    def test_duty_cycle_surfaced(self, service):
        service.store.set_duty_cycle({"segments_total": 10, "segments_gated_in": 3,
                                      "duty_cycle": 0.3})
        status = get_json(service, "/api/status")
        assert status["duty_cycle"]["duty_cycle"] == 0.3


class TestStatic:
    def test_placeholder_page_without_static_dir(self, service):
        with urllib.request.urlopen(f"http://127.0.0.1:{service.port}/", timeout=5) as resp:
            assert resp.status == 200
            assert b"birdbox" in resp.read()

    def test_static_files_served(self, tmp_path):
        (tmp_path / "assets").mkdir()
        (tmp_path / "index.html").write_text("<html>dash</html>")
        (tmp_path / "assets" / "app.js").write_text("console.log(1)")
        store = DetectionStore(capacity=10)
        svc = DetectionService(store, listen="127.0.0.1:0", static_dir=tmp_path)
        svc.start()
        try:
            base = f"http://127.0.0.1:{svc.port}"
            with urllib.request.urlopen(base + "/", timeout=5) as resp:
                assert b"dash" in resp.read()
            with urllib.request.urlopen(base + "/assets/app.js", timeout=5) as resp:
                assert resp.headers["Content-Type"].startswith(("text/javascript",
                                                                "application/javascript"))
        finally:
            svc.stop()

    def test_traversal_blocked(self, tmp_path):
        (tmp_path / "index.html").write_text("ok")
        store = DetectionStore(capacity=10)
        svc = DetectionService(store, listen="127.0.0.1:0", static_dir=tmp_path)
        svc.start()
        try:
            with pytest.raises(urllib.error.HTTPError) as err:
                urllib.request.urlopen(
                    f"http://127.0.0.1:{svc.port}/assets/../../etc/passwd", timeout=5)
            assert err.value.code in (403, 404)
        finally:
            svc.stop()
