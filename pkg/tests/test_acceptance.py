"""Acceptance criteria, one test per criterion.

Run with `pytest tests/test_acceptance.py -v -s` to stream one PASS/FAIL
line per criterion. Tolerances are pinned here and nowhere else.
"""

import json
import threading
import time
import urllib.request
from contextlib import contextmanager

import numpy as np
import pytest

from birdbox import audio, dataset, metrics
from birdbox.audio import AudioClip
from birdbox.cli import main as cli_main
from birdbox.engine import ConstantBackend, EnergyGateBackend, PipelineConfig, run_audio_pipeline
from birdbox.records import DetectionRecord
from birdbox.service import DetectionService, DetectionStore, load_history

from oracles import (
    oracle_balanced_accuracy,
    oracle_cmap,
    oracle_detection_map,
    oracle_iou,
    oracle_species_frontend,
    oracle_top_k,
)

QUANT_STEP_DB = 80.0 / 255.0
NORMALIZED_QUANT_STEP = QUANT_STEP_DB / (2.0 * audio.AUDIOSET_SIGMA)


@contextmanager
def criterion(name):
    try:
        yield
    except BaseException:
        print(f"ACCEPTANCE {name}: FAIL")
        raise
    print(f"ACCEPTANCE {name}: PASS")


def seeded_chirp(seconds=10.0, rate=48000, f0=500.0, f1=8000.0, seed=42):
    t = np.arange(int(seconds * rate)) / rate
    sweep = f0 * t + (f1 - f0) / (2.0 * seconds) * t**2
    rng = np.random.default_rng(seed)
    return 0.5 * np.sin(2.0 * np.pi * sweep) + rng.normal(scale=1e-4, size=t.size)


class TestDspGolden:
    def test_species_frontend_matches_independent_oracle(self):
        with criterion("dsp-golden"):
            x = seeded_chirp()
            start = time.perf_counter()
            got = audio.species_features(AudioClip(x, 48000))
            elapsed = time.perf_counter() - start

            expected = oracle_species_frontend(x, 48000)
            assert got.values.shape == (1, 128, 1000)
            assert expected.shape == (1, 128, 1000)
            worst = float(np.max(np.abs(got.values - expected)))
            assert worst <= NORMALIZED_QUANT_STEP + 1e-9, \
                f"worst cell error {worst:.6f} exceeds one quantization level"
            assert elapsed < 1.0, f"front-end took {elapsed:.3f}s, budget is 1s"


class TestQuantizationRoundTrip:
    def test_all_codes_and_random_db_values(self):
        with criterion("quantization-roundtrip"):
            codes = np.arange(256, dtype=np.uint8).reshape(1, 256)
            q = audio.QuantizedSpectrogram(values=codes, config=audio.SPECIES_MEL)
            again = audio.quantize_u8(audio.dequantize(q))
            assert np.array_equal(again.values, codes), "code round-trip not bit-exact"

            rng = np.random.default_rng(1234)
            values = rng.uniform(-80.0, 0.0, size=10_000).reshape(100, 100)
            feat = audio.MelFeatures(values=values, config=audio.SPECIES_MEL)
            back = audio.dequantize(audio.quantize_u8(feat))
            worst = float(np.max(np.abs(back.values - values)))
            assert worst <= 0.157, f"dB round-trip error {worst:.5f} exceeds 0.157"


def random_manifest(rng, min_count=1, max_count=80, max_classes=12):
    spec = {}
    for i in range(int(rng.integers(2, max_classes))):
        spec[f"Species {i:03d}"] = int(rng.integers(min_count, max_count))
    records = []
    k = 0
    for species, count in spec.items():
        for _ in range(count):
            records.append(dataset.SampleRecord(
                id=f"r{k}", species=species, quality="A", modality="audio",
                media_path=f"m/{k}.wav"))
            k += 1
    return dataset.ingest(records)


class TestClassWeightIdentity:
    def test_eq2_identity_and_balanced_case(self):
        with criterion("class-weight-identity"):
            rng = np.random.default_rng(7)
            for _ in range(100):
                manifest = random_manifest(rng)
                weights = dataset.class_weights(manifest)
                counts = manifest.class_counts()
                total = sum(w * counts[s] for s, w in
                            zip(weights.species_catalog, weights.weights))
                assert abs(total - len(manifest)) <= 1e-9 * len(manifest), \
                    "sum w_c * n_c deviates from N"

            balanced = random_manifest(rng, min_count=20, max_count=21, max_classes=6)
            # force exact balance
            spec = {s: 20 for s in balanced.species_catalog}
            records = [r for r in balanced.records]
            by_class = {}
            for r in records:
                by_class.setdefault(r.species, []).append(r)
            trimmed = [r for s in spec for r in by_class[s][:20]]
            manifest = dataset.DatasetManifest(records=trimmed,
                                               species_catalog=balanced.species_catalog)
            weights = dataset.class_weights(manifest)
            np.testing.assert_allclose(weights.weights, 1.0, atol=1e-12)


class TestOversampleSplitSuite:
    def test_floor_partition_proportions_determinism(self):
        with criterion("oversample-split-suite"):
            rng = np.random.default_rng(11)
            manifest = random_manifest(rng, min_count=3, max_count=700, max_classes=8)

            over = dataset.oversample(manifest, min_per_class=500, rng_seed=5)
            counts = over.class_counts()
            assert min(counts.values()) >= 500, "oversampling floor violated"
            untouched = {s for s, n in manifest.class_counts().items() if n >= 500}
            originals = [r for r in manifest.records if r.species in untouched]
            kept = [r for r in over.records[:len(manifest.records)]
                    if r.species in untouched]
            assert originals == kept, "records of full classes were altered"

            for fractions in ((0.9, 0.1), (0.6, 0.2, 0.2)):
                splits = dataset.stratified_split(over, fractions, rng_seed=3)
                ids = sorted(r.id for s in splits for r in s.records)
                assert ids == sorted(r.id for r in over.records), "splits lose records"
                assert len(set(ids)) == len(ids), "splits overlap"
                for species, n in over.class_counts().items():
                    for frac, split in zip(fractions, splits):
                        got = split.class_counts()[species]
                        assert abs(got - frac * n) <= 1.0 + 1e-9, \
                            f"{species}: {got} vs target {frac * n:.1f}"

            once = dataset.oversample(manifest, min_per_class=500, rng_seed=9)
            twice = dataset.oversample(manifest, min_per_class=500, rng_seed=9)
            assert once.records == twice.records
            s1 = dataset.stratified_split(once, (0.9, 0.1), rng_seed=2)
            s2 = dataset.stratified_split(twice, (0.9, 0.1), rng_seed=2)
            for a, b in zip(s1, s2):
                assert a.records == b.records, "seeded splits differ between runs"


class TestCropRuleSuite:
    def test_rejections_nms_padding(self):
        with criterion("crop-rule-suite"):
            low_conf = dataset.BoundingBox(0, 0, 300, 300, confidence=0.09, class_id=14)
            assert dataset.select_bird_crop([low_conf], (1000, 1000)) is None, \
                "confidence 0.09 must be rejected"

            small = dataset.BoundingBox(0, 0, 70, 70, confidence=0.9, class_id=14)
            assert dataset.select_bird_crop([small], (1000, 1000)) is None, \
                "0.49% area must be rejected"

            rng = np.random.default_rng(21)
            dets = [dataset.BoundingBox(float(rng.uniform(0, 400)), float(rng.uniform(0, 400)),
                                        float(rng.uniform(20, 300)), float(rng.uniform(20, 300)),
                                        confidence=float(rng.uniform()), class_id=14)
                    for _ in range(50)]
            once = dataset.nms(dets, 0.5)
            assert dataset.nms(once, 0.5) == once, "NMS not idempotent"

            for _ in range(10_000):
                W = int(rng.integers(20, 3000))
                H = int(rng.integers(20, 3000))
                w = float(rng.uniform(1, W))
                h = float(rng.uniform(1, H))
                x0 = float(rng.uniform(0, W - w))
                y0 = float(rng.uniform(0, H - h))
                b = dataset.BoundingBox(x0, y0, w, h)
                padded = dataset.pad_bbox(b, 0.15, (W, H))
                assert padded.x0 <= b.x0 and padded.y0 <= b.y0
                assert padded.x1 >= b.x1 and padded.y1 >= b.y1, "padded box not a superset"


class TestGatingExactness:
    def test_five_minute_replay_and_bench_monotonicity(self, tmp_path, capsys):
        with criterion("gating-exactness"):
            rate = 48000
            rng = np.random.default_rng(99)
            blocks = []
            for _ in range(100):  # 100 x 3 s = 5 minutes
                loudness = float(rng.choice([2e-4, 5e-3, 2e-2, 1e-1]))
                blocks.append(rng.normal(scale=loudness, size=3 * rate))
            samples = np.concatenate(blocks)
            clip = AudioClip(samples, rate)

            level = 0.01
            anchor = 0.8
            # independent per-segment expectation straight from the RMS formula
            expected_pass = 0
            for i in range(100):
                seg = samples[i * 3 * rate:(i + 1) * 3 * rate]
                rms = float(np.sqrt(np.mean(seg**2)))
                p = anchor * rms / level if rms < level \
                    else anchor + (1 - anchor) * (1 - level / rms)
                if p >= 0.80:
                    expected_pass += 1
            assert 0 < expected_pass < 100, "degenerate synthetic recording"

            cfg = PipelineConfig(gate_threshold=0.80)
            classifier = ConstantBackend([0.6, 0.25, 0.15], input_kind="species")
            catalog = ["Parus major", "Erithacus rubecula", "Turdus merula"]
            start = time.perf_counter()
            stats = run_audio_pipeline(clip, EnergyGateBackend(rms_level=level, anchor=anchor),
                                       classifier, catalog, cfg, lambda r: None)
            elapsed = time.perf_counter() - start
            assert stats.segments_total == 100
            assert stats.classifier_invocations == expected_pass, \
                f"{stats.classifier_invocations} invocations vs {expected_pass} gate passes"
            assert stats.classifier_invocations == stats.segments_gated_in
            assert elapsed < 30.0, f"5-minute replay took {elapsed:.1f}s, budget 30s"

            wav = tmp_path / "five_minutes.wav"
            wav.write_bytes(audio.encode_wav(clip))
            code = cli_main(["bench-gate", "--replay", str(wav),
                             "--thresholds", "0.0,0.2,0.4,0.6,0.8,1.0",
                             "--gate-level", str(level),
                             "--out", str(tmp_path / "bench.json")])
            capsys.readouterr()
            assert code == 0
            rows = json.loads((tmp_path / "bench.json").read_text())
            duties = [row["duty_cycle"] for row in rows]
            assert duties[0] == 1.0
            assert all(a >= b for a, b in zip(duties, duties[1:])), \
                "duty cycle not monotone non-increasing"


class TestMetricsOracleEquivalence:
    def test_200_random_instances_and_hand_cases(self):
        with criterion("metrics-oracle-equivalence"):
            assert metrics.average_precision([1, 0, 1]) == pytest.approx(5 / 6, abs=1e-12)
            a = dataset.BoundingBox(0, 0, 10, 10)
            b = dataset.BoundingBox(5, 0, 10, 10)
            assert metrics.iou(a, b) == pytest.approx(1 / 3, abs=1e-12)
            assert oracle_iou((0, 0, 10, 10), (5, 0, 10, 10)) == pytest.approx(1 / 3)

            rng = np.random.default_rng(17)
            for trial in range(200):
                n_classes = int(rng.integers(2, 7))
                n_samples = int(rng.integers(2, 21))
                samples = [metrics.EvalSample(
                    scores=rng.uniform(0, 1, size=n_classes),
                    true_class=int(rng.integers(0, n_classes)))
                    for _ in range(n_samples)]
                raw = [(s.scores.tolist(), s.true_class) for s in samples]

                k = int(rng.integers(1, n_classes + 1))
                assert abs(metrics.top_k_accuracy(samples, k) - oracle_top_k(raw, k)) <= 1e-9
                assert abs(metrics.balanced_accuracy(samples)
                           - oracle_balanced_accuracy(raw)) <= 1e-9
                assert abs(metrics.class_mean_average_precision(samples)
                           - oracle_cmap(raw)) <= 1e-9

                pairs, raw_pairs = [], []
                for _ in range(int(rng.integers(1, 4))):
                    gts, preds = [], []
                    for _ in range(int(rng.integers(0, 6))):
                        box = (float(rng.uniform(0, 40)), float(rng.uniform(0, 40)),
                               float(rng.uniform(5, 25)), float(rng.uniform(5, 25)))
                        gts.append((dataset.BoundingBox(*box), int(rng.integers(0, 3))))
                    for _ in range(int(rng.integers(0, 6))):
                        box = (float(rng.uniform(0, 40)), float(rng.uniform(0, 40)),
                               float(rng.uniform(5, 25)), float(rng.uniform(5, 25)))
                        preds.append((dataset.BoundingBox(*box), int(rng.integers(0, 3)),
                                      float(rng.uniform())))
                    pairs.append(metrics.DetectionEvalPair(predictions=preds,
                                                           ground_truth=gts))
                    raw_pairs.append((
                        [((p[0].x0, p[0].y0, p[0].w, p[0].h), p[1], p[2]) for p in preds],
                        [((g[0].x0, g[0].y0, g[0].w, g[0].h), g[1]) for g in gts]))
                threshold = float(rng.choice([0.3, 0.5, 0.75]))
                expected = oracle_detection_map(raw_pairs, threshold)
                if expected is not None:
                    got = metrics.detection_map(pairs, iou_thresholds=(threshold,))
                    assert abs(got.map_per_threshold[threshold] - expected) <= 1e-9


class TestServiceSuite:
    def test_stress_recovery_polling_wire(self, tmp_path):
        with criterion("service-suite"):
            # concurrent producers: gap-free seqs
            store = DetectionStore(capacity=5000)

            def produce(modality):
                for _ in range(1000):
                    store.append(DetectionRecord(species="Parus major", confidence=0.9,
                                                 timestamp_ms=1, modality=modality))

            threads = [threading.Thread(target=produce, args=(m,))
                       for m in ("audio", "image")]
            for t in threads:
                t.start()
            for t in threads:
                t.join()
            seqs = [r.seq for r in store.query_since(0)]
            assert seqs == list(range(1, 2001)), "concurrent appends produced gaps"

            # crash recovery: only the torn final line is dropped
            log_path = tmp_path / "acc.log"
            with DetectionStore(capacity=100, log_path=log_path) as persistent:
                for _ in range(5):
                    persistent.append(DetectionRecord(species="Sitta europaea",
                                                      confidence=0.5, timestamp_ms=2,
                                                      modality="audio"))
            with open(log_path, "a", encoding="utf-8") as fh:
                fh.write('{"seq": 6, "species": "torn')
            records, warning = load_history(log_path)
            assert len(records) == 5 and warning is not None

            # cursor polling over the HTTP API observes every record exactly once
            store2 = DetectionStore(capacity=1000)
            service = DetectionService(store2, listen="127.0.0.1:0")
            service.start()
            try:
                total = 300
                writer = threading.Thread(target=lambda: [
                    store2.append(DetectionRecord(species="Parus major", confidence=0.8,
                                                  timestamp_ms=3, modality="audio"))
                    for _ in range(total)])
                writer.start()
                seen, cursor = [], 0
                while len(seen) < total:
                    url = f"http://127.0.0.1:{service.port}/api/detections?after={cursor}&limit=64"
                    with urllib.request.urlopen(url, timeout=5) as resp:
                        payload = json.loads(resp.read())
                    seen.extend(r["seq"] for r in payload["records"])
                    if payload["records"]:
                        cursor = payload["records"][-1]["seq"]
                writer.join()
                assert seen == list(range(1, total + 1)), "poller missed or repeated records"

                # exact wire shapes
                store2.append(DetectionRecord(species="Erithacus rubecula", confidence=0.42,
                                              timestamp_ms=1_700_000_000_123,
                                              modality="image", media_ref="x.jpg"))
                url = f"http://127.0.0.1:{service.port}/api/detections?after={total}&limit=5"
                with urllib.request.urlopen(url, timeout=5) as resp:
                    payload = json.loads(resp.read())
                assert set(payload.keys()) == {"records", "latest_seq", "evicted_before"}
                wire = payload["records"][0]
                assert set(wire.keys()) == {"seq", "species", "confidence", "timestamp_ms",
                                            "modality", "media_ref"}
                parsed = DetectionRecord.from_wire(wire)
                assert parsed.species == "Erithacus rubecula"
                assert parsed.confidence == 0.42
                assert parsed.timestamp_ms == 1_700_000_000_123
                with urllib.request.urlopen(
                        f"http://127.0.0.1:{service.port}/api/status", timeout=5) as resp:
                    status = json.loads(resp.read())
                assert status["poll_interval_ms"] == 2000
                assert status["counts"]["audio"] == total
            finally:
                service.stop()
