"""Operator entry points for DiY deployment.

Subcommands: prep-audio, prep-dataset, crops, eval, run, serve, bench-gate.
Every subcommand validates its paths up front, writes machine-readable
summaries beside its outputs, and exits 0 iff no per-item failure occurred.
"""

from __future__ import annotations

import argparse
import json
import signal
import sys
import threading
from pathlib import Path

import numpy as np

from . import audio, dataset, metrics
from .config import load_config, overlay
from .engine import (
    BackendManifest,
    ConstantBackend,
    ConstantDetectorBackend,
    EnergyGateBackend,
    PipelineConfig,
    load_backend,
    run_audio_pipeline,
    run_image_pipeline,
)
from .errors import BirdboxError
from .service import DetectionService, DetectionStore

DEFAULT_CATALOG = ["Parus major", "Erithacus rubecula", "Turdus merula"]
DEFAULT_STUB_PROBS = [0.6, 0.25, 0.15]
RUN_DEFAULTS = {
    "listen": "0.0.0.0:8080",
    "capacity": 1000,
    "gate_threshold": 0.80,
    "gate_level": 0.01,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except BirdboxError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="birdbox",
                                     description="edge bird-monitoring toolkit")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("prep-audio", help="audio files -> quantized spectrograms (ZWSP)")
    p.add_argument("--in", dest="in_dir", required=True, help="directory of WAV files")
    p.add_argument("--out", dest="out_dir", required=True)
    p.add_argument("--frames", type=int, default=1000,
                   help="standardized frame count (0 disables)")
    p.set_defaults(handler=cmd_prep_audio)

    p = sub.add_parser("prep-dataset", help="manifest -> filtered, balanced, split dataset")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", dest="out_dir", required=True)
    p.add_argument("--qualities", default="A,B,C")
    p.add_argument("--exclude-list", default=None, help="file of species to drop, one per line")
    p.add_argument("--classes", type=int, default=256)
    p.add_argument("--min-per-class", type=int, default=500)
    p.add_argument("--split", default="0.9,0.1")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--oversample-after-split", action="store_true",
                   help="leakage-free order: split first, oversample the training split")
    p.set_defaults(handler=cmd_prep_dataset)

    p = sub.add_parser("crops", help="detector outputs -> weak labels and crop boxes")
    p.add_argument("--detections", required=True, help="JSONL of per-image detections")
    p.add_argument("--out", dest="out_dir", required=True)
    p.add_argument("--pad", type=float, default=0.15)
    p.set_defaults(handler=cmd_crops)

    p = sub.add_parser("eval", help="score files -> metric report")
    p.add_argument("--scores", default=None, help="classification eval file")
    p.add_argument("--detections", default=None, help="detection eval file")
    p.add_argument("--topk", default="1,5")
    p.add_argument("--out", default=None, help="write the summary object here")
    p.set_defaults(handler=cmd_eval)

    p = sub.add_parser("run", help="run the monitor (replay mode) plus the API")
    p.add_argument("--replay", required=True, help="WAV file processed as if live")
    p.add_argument("--images", default=None, help="optional directory of images to process")
    p.add_argument("--stub-backends", action="store_true")
    p.add_argument("--backend-manifest", default=None, help="backend manifest JSON")
    p.add_argument("--catalog", default=None, help="species catalog file")
    p.add_argument("--config", default=None, help="flat key=value config file")
    p.add_argument("--log", dest="log_path", default=None)
    p.add_argument("--capacity", type=int, default=None)
    p.add_argument("--listen", default=None)
    p.add_argument("--static-dir", default=None)
    p.add_argument("--gate-threshold", type=float, default=None)
    p.add_argument("--gate-level", type=float, default=None,
                   help="RMS level of the energy gate stub")
    p.add_argument("--serve", action="store_true",
                   help="keep the API up after the replay finishes")
    p.set_defaults(handler=cmd_run)

    p = sub.add_parser("serve", help="serve the API and dashboard only")
    p.add_argument("--config", default=None)
    p.add_argument("--log", dest="log_path", default=None)
    p.add_argument("--capacity", type=int, default=None)
    p.add_argument("--listen", default=None)
    p.add_argument("--static-dir", default=None)
    p.set_defaults(handler=cmd_serve)

    p = sub.add_parser("bench-gate", help="duty-cycle table over gate thresholds")
    p.add_argument("--replay", required=True)
    p.add_argument("--thresholds", default="0.0,0.2,0.4,0.6,0.8,1.0")
    p.add_argument("--gate-level", type=float, default=0.01)
    p.add_argument("--out", default=None, help="write the table as JSON here")
    p.set_defaults(handler=cmd_bench_gate)

    return parser


# -- prep-audio ---------------------------------------------------------


def cmd_prep_audio(args) -> int:
    in_dir = Path(args.in_dir)
    out_dir = Path(args.out_dir)
    if not in_dir.is_dir():
        print(f"error: --in {in_dir} is not a directory", file=sys.stderr)
        return 2
    out_dir.mkdir(parents=True, exist_ok=True)

    processed, failures = [], []
    for path in sorted(in_dir.glob("*.wav")):
        try:
            clip = audio.decode_and_downmix(path.read_bytes())
            clip = audio.resample(clip, audio.SPECIES_MEL.sample_rate)
            feat = audio.mel_spectrogram(clip, audio.SPECIES_MEL)
            if args.frames > 0:
                feat = audio.standardize_length(feat, args.frames)
            target = out_dir / (path.stem + ".zwsp")
            audio.write_zwsp(target, audio.quantize_u8(feat))
            processed.append({"input": path.name, "output": target.name,
                              "n_frames": feat.n_frames})
        except BirdboxError as exc:
            failures.append({"input": path.name, "error": str(exc)})
            print(f"prep-audio: {path.name}: {exc}", file=sys.stderr)

    summary = {"processed": len(processed), "failed": len(failures),
               "files": processed, "failures": failures}
    (out_dir / "run_summary.json").write_text(json.dumps(summary, indent=2) + "\n")
    print(f"prep-audio: {len(processed)} processed, {len(failures)} failed")
    return 0 if not failures else 1


# -- prep-dataset -------------------------------------------------------


def cmd_prep_dataset(args) -> int:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    records = dataset.read_manifest_file(args.manifest)
    qualities = frozenset(q.strip() for q in args.qualities.split(",") if q.strip())
    exclude = ()
    if args.exclude_list:
        exclude = dataset.read_catalog_file(args.exclude_list)

    manifest = dataset.ingest(records, allowed_qualities=qualities, exclude_species=exclude)
    manifest = dataset.select_top_classes(manifest, class_count=args.classes)

    fractions = tuple(float(f) for f in args.split.split(","))
    split_names = dataset.SPLIT_NAMES.get(len(fractions),
                                          tuple(f"split{i}" for i in range(len(fractions))))

    if args.oversample_after_split:
        splits = dataset.stratified_split(manifest, fractions, rng_seed=args.seed)
        if args.min_per_class > 0:
            splits[0] = dataset.oversample(splits[0], min_per_class=args.min_per_class,
                                           rng_seed=args.seed)
    else:
        if args.min_per_class > 0:
            manifest = dataset.oversample(manifest, min_per_class=args.min_per_class,
                                          rng_seed=args.seed)
        splits = dataset.stratified_split(manifest, fractions, rng_seed=args.seed)

    for name, split in zip(split_names, splits):
        dataset.write_manifest_file(out_dir / f"{name}.jsonl", split, split_name=name)
    dataset.write_catalog_file(out_dir / "catalog.txt", manifest.species_catalog)
    weights = dataset.class_weights(splits[0])
    dataset.write_weights_file(out_dir / "weights.tsv", weights)

    summary = {
        "classes": len(manifest.species_catalog),
        "splits": {name: len(split) for name, split in zip(split_names, splits)},
        "seed": args.seed,
        "fractions": list(fractions),
        "oversample_after_split": bool(args.oversample_after_split),
    }
    (out_dir / "run_summary.json").write_text(json.dumps(summary, indent=2) + "\n")
    print(f"prep-dataset: {summary['classes']} classes, splits {summary['splits']}")
    return 0


# -- crops --------------------------------------------------------------


def cmd_crops(args) -> int:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    kept, skipped, failures = 0, 0, []
    with open(args.detections, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
                dims = (int(obj["width"]), int(obj["height"]))
                dets = [dataset.BoundingBox(
                            x0=float(d["box"][0]), y0=float(d["box"][1]),
                            w=float(d["box"][2]), h=float(d["box"][3]),
                            confidence=float(d["confidence"]), class_id=int(d["class"]))
                        for d in obj.get("detections", [])]
                selected = dataset.select_bird_crop(dets, dims)
                if selected is None:
                    skipped += 1
                    continue
                padded = dataset.pad_bbox(selected, pad_fraction=args.pad, image_dims=dims)
                label = dataset.emit_yolo_label(padded, int(obj["label"]), dims)
                stem = Path(str(obj["image"])).stem
                dataset.write_label_file(out_dir / f"{stem}.txt", [label])
                kept += 1
            except (KeyError, ValueError, TypeError, json.JSONDecodeError) as exc:
                failures.append({"line": line_no, "error": str(exc)})
                print(f"crops: line {line_no}: {exc}", file=sys.stderr)

    summary = {"labeled": kept, "no_usable_bird": skipped, "failed": len(failures),
               "failures": failures}
    (out_dir / "run_summary.json").write_text(json.dumps(summary, indent=2) + "\n")
    print(f"crops: {kept} labeled, {skipped} without a usable bird, {len(failures)} failed")
    return 0 if not failures else 1


# -- eval ---------------------------------------------------------------


def cmd_eval(args) -> int:
    if not args.scores and not args.detections:
        print("error: provide --scores and/or --detections", file=sys.stderr)
        return 2
    samples = metrics.read_eval_file(args.scores) if args.scores else None
    pairs = metrics.read_detection_file(args.detections) if args.detections else None
    top_k = tuple(int(k) for k in args.topk.split(","))
    report = metrics.evaluation_report(samples=samples, pairs=pairs, top_k=top_k)
    for line in metrics.format_report_lines(report):
        print(line)
    if args.out:
        Path(args.out).write_text(json.dumps(report, indent=2) + "\n")
    return 0


# -- run / serve --------------------------------------------------------


def _merged_runtime_config(args) -> dict:
    file_values = load_config(args.config) if getattr(args, "config", None) else {}
    cli_values = {
        "listen": getattr(args, "listen", None),
        "capacity": getattr(args, "capacity", None),
        "gate_threshold": getattr(args, "gate_threshold", None),
        "gate_level": getattr(args, "gate_level", None),
    }
    return overlay(RUN_DEFAULTS, file_values, cli_values)


def _load_catalog(args) -> list[str]:
    if getattr(args, "catalog", None):
        return dataset.read_catalog_file(args.catalog)
    return list(DEFAULT_CATALOG)


def _make_backends(args, catalog, gate_level: float):
    """Gate + species classifier from a manifest, or the built-in stubs."""
    if getattr(args, "backend_manifest", None):
        manifest = BackendManifest.from_file(args.backend_manifest)
        backend = load_backend(manifest)
        if manifest.modality == "audio-gate":
            return backend, ConstantBackend(_stub_probs(len(catalog)), input_kind="species")
        if manifest.modality == "audio-species":
            return EnergyGateBackend(rms_level=gate_level), backend
    gate_backend = EnergyGateBackend(rms_level=gate_level)
    classifier = ConstantBackend(_stub_probs(len(catalog)), input_kind="species",
                                 name="species-stub")
    return gate_backend, classifier


def _stub_probs(n: int) -> list[float]:
    if n == len(DEFAULT_STUB_PROBS):
        return list(DEFAULT_STUB_PROBS)
    probs = np.full(n, 0.4 / max(n - 1, 1))
    probs[0] = 0.6
    return (probs / probs.sum()).tolist()


def _replay_clip(path: str) -> audio.AudioClip:
    clip = audio.decode_and_downmix(Path(path).read_bytes())
    return audio.resample(clip, 48000)


def cmd_run(args) -> int:
    cfg_values = _merged_runtime_config(args)
    catalog = _load_catalog(args)
    gate_backend, classifier = _make_backends(args, catalog, cfg_values["gate_level"])
    pipe_cfg = PipelineConfig(gate_threshold=cfg_values["gate_threshold"])
    clip = _replay_clip(args.replay)

    stop = threading.Event()
    signal.signal(signal.SIGINT, lambda *_: stop.set())
    signal.signal(signal.SIGTERM, lambda *_: stop.set())

    with DetectionStore(capacity=cfg_values["capacity"], log_path=args.log_path) as store:
        store.set_backend_identities([gate_backend.identity, classifier.identity])
        service = DetectionService(store, listen=cfg_values["listen"],
                                   static_dir=args.static_dir)
        service.start()
        try:
            workers = []
            stats_box = {}

            def audio_worker():
                stats = run_audio_pipeline(clip, gate_backend, classifier, catalog,
                                           pipe_cfg, store.append, stop=stop)
                stats_box["audio"] = stats
                store.set_duty_cycle(stats.as_dict())

            workers.append(threading.Thread(target=audio_worker, name="audio-pipeline"))

            if args.images:

                def image_worker():
                    from PIL import Image
                    emitted = 0
                    for img_path in sorted(Path(args.images).glob("*")):
                        if stop.is_set():
                            break
                        if img_path.suffix.lower() not in (".png", ".jpg", ".jpeg"):
                            continue
                        image = np.asarray(Image.open(img_path).convert("RGB"))
                        h, w = image.shape[:2]
                        det = ConstantDetectorBackend([dataset.BoundingBox(
                            0, 0, w, h, confidence=1.0, class_id=14)])
                        img_classifier = ConstantBackend(_stub_probs(len(catalog)),
                                                         input_kind="image")
                        record = run_image_pipeline(image, det, img_classifier, catalog,
                                                    cfg=pipe_cfg, media_ref=img_path.name)
                        if record is not None:
                            store.append(record)
                            emitted += 1
                    stats_box["image_records"] = emitted

                workers.append(threading.Thread(target=image_worker, name="image-pipeline"))

            for worker in workers:
                worker.start()
            for worker in workers:
                worker.join()

            stats = stats_box.get("audio")
            if stats is not None:
                print(json.dumps({"replay": Path(args.replay).name, **stats.as_dict()}))
            if args.serve and not stop.is_set():
                print(f"serving on {service.address} (SIGINT to stop)")
                stop.wait()
        finally:
            service.stop()
    return 0


def cmd_serve(args) -> int:
    cfg_values = _merged_runtime_config(args)
    stop = threading.Event()
    signal.signal(signal.SIGINT, lambda *_: stop.set())
    signal.signal(signal.SIGTERM, lambda *_: stop.set())
    with DetectionStore(capacity=cfg_values["capacity"], log_path=args.log_path) as store:
        service = DetectionService(store, listen=cfg_values["listen"],
                                   static_dir=args.static_dir)
        service.start()
        print(f"serving on {service.address} (SIGINT to stop)")
        try:
            stop.wait()
        finally:
            service.stop()
    return 0


# -- bench-gate ---------------------------------------------------------


def cmd_bench_gate(args) -> int:
    from .engine.pipeline import gate, segment_stream

    clip = _replay_clip(args.replay)
    thresholds = [float(t) for t in args.thresholds.split(",")]
    detector = EnergyGateBackend(rms_level=args.gate_level)
    base_cfg = PipelineConfig()

    p_values = [gate(segment, detector, base_cfg).p_bird
                for segment in segment_stream(clip, base_cfg)]

    rows = []
    print(f"{'threshold':>9}  {'total':>6}  {'gated_in':>8}  {'duty_cycle':>10}")
    for threshold in thresholds:
        gated = sum(1 for p in p_values if p >= threshold)
        duty = gated / len(p_values) if p_values else 0.0
        rows.append({"threshold": threshold, "segments_total": len(p_values),
                     "segments_gated_in": gated, "duty_cycle": duty})
        print(f"{threshold:9.2f}  {len(p_values):6d}  {gated:8d}  {duty:10.4f}")
    if args.out:
        Path(args.out).write_text(json.dumps(rows, indent=2) + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
