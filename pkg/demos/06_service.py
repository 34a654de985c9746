"""Detection service walkthrough: buffer, persistence, HTTP API, polling client.

Run:  python demos/06_service.py
"""

import json
import tempfile
import urllib.request
from pathlib import Path

from birdbox.records import DetectionRecord, now_ms
from birdbox.service import DetectionService, DetectionStore, load_history

log_path = Path(tempfile.mkdtemp()) / "detections.log"

# ---------------------------------------------------------------------------
# 1. The store is the meeting point of both pipelines: bounded ring +
#    append-only log, safe for concurrent producers and readers.
# ---------------------------------------------------------------------------
with DetectionStore(capacity=100, log_path=log_path) as store:
    for species, conf, modality in [
        ("Parus major", 0.93, "audio"),
        ("Erithacus rubecula", 0.81, "audio"),
        ("Turdus merula", 0.64, "image"),
    ]:
        seq = store.append(DetectionRecord(species=species, confidence=conf,
                                           timestamp_ms=now_ms(), modality=modality))
        print(f"appended seq {seq}: {species} ({modality})")

    # -----------------------------------------------------------------------
    # 2. Serve the API on an ephemeral port and poll it like the dashboard.
    # -----------------------------------------------------------------------
    service = DetectionService(store, listen="127.0.0.1:0")
    service.start()
    base = f"http://127.0.0.1:{service.port}"
    try:
        with urllib.request.urlopen(base + "/api/status") as resp:
            status = json.loads(resp.read())
        print(f"status: {status['counts']} in buffer {status['buffer_len']}"
              f"/{status['buffer_capacity']}, poll every {status['poll_interval_ms']} ms")

        cursor = 0
        with urllib.request.urlopen(f"{base}/api/detections?after={cursor}&limit=10") as resp:
            payload = json.loads(resp.read())
        for record in payload["records"]:
            print(f"  polled seq {record['seq']}: {record['species']} "
                  f"{record['confidence']:.0%} [{record['modality']}]")
        print(f"cursor advances to {payload['latest_seq']}")
    finally:
        service.stop()

# ---------------------------------------------------------------------------
# 3. History survives the process: the log replays on the next start.
# ---------------------------------------------------------------------------
records, warning = load_history(log_path)
print(f"log holds {len(records)} records (warning: {warning})")
with DetectionStore(capacity=100, log_path=log_path) as store:
    print(f"resumed store continues at seq {store.latest_seq() + 1}")
