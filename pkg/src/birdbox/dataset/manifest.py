"""Dataset manifests: ingestion, class cutoff, balancing, weights, splits.

A manifest file is UTF-8 JSON lines, one flat object per record with keys
{id, species, quality, modality, media_path, license, origin_split?}.
All transformations are pure; file emission is confined to explicit paths.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field, replace

import numpy as np

from ..errors import ConfigurationError, IngestError, PreconditionError

log = logging.getLogger(__name__)

QUALITY_GRADES = ("A", "B", "C", "D", "E", "unknown")
DEFAULT_QUALITIES = frozenset({"A", "B", "C"})
SPLIT_NAMES = {2: ("train", "val"), 3: ("train", "val", "test")}


@dataclass(frozen=True)
class SampleRecord:
    id: str
    species: str
    quality: str
    modality: str
    media_path: str
    license: str = ""
    origin_split: str | None = None

    def to_json(self) -> str:
        obj = {
            "id": self.id,
            "species": self.species,
            "quality": self.quality,
            "modality": self.modality,
            "media_path": self.media_path,
            "license": self.license,
        }
        if self.origin_split is not None:
            obj["origin_split"] = self.origin_split
        return json.dumps(obj, ensure_ascii=False)

    @classmethod
    def from_json(cls, line: str) -> "SampleRecord":
        obj = json.loads(line)
        return cls(
            id=str(obj["id"]),
            species=str(obj.get("species", "")),
            quality=str(obj.get("quality", "unknown")),
            modality=str(obj.get("modality", "audio")),
            media_path=str(obj.get("media_path", "")),
            license=str(obj.get("license", "")),
            origin_split=obj.get("origin_split"),
        )


@dataclass
class DatasetManifest:
    records: list[SampleRecord]
    species_catalog: list[str] = field(default_factory=list)

    def __post_init__(self):
        known = set(self.species_catalog)
        for rec in self.records:
            if rec.species not in known:
                raise PreconditionError(f"record {rec.id} species {rec.species!r} not in catalog")

    def class_counts(self) -> dict[str, int]:
        counts = {s: 0 for s in self.species_catalog}
        for rec in self.records:
            counts[rec.species] += 1
        return counts

    def class_id(self, species: str) -> int:
        return self.species_catalog.index(species)

    def __len__(self) -> int:
        return len(self.records)


@dataclass
class ClassWeights:
    species_catalog: list[str]
    weights: np.ndarray  # aligned to species_catalog


def read_manifest_lines(lines) -> list[SampleRecord]:
    records = []
    for line_no, line in enumerate(lines, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            records.append(SampleRecord.from_json(line))
        except (json.JSONDecodeError, KeyError) as exc:
            raise IngestError(f"manifest line {line_no} unparseable: {exc}") from exc
    return records


def read_manifest_file(path) -> list[SampleRecord]:
    with open(path, encoding="utf-8") as fh:
        return read_manifest_lines(fh)


def write_manifest_file(path, manifest: DatasetManifest, split_name: str | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in manifest.records:
            if split_name is not None:
                rec = replace(rec, origin_split=split_name)
            fh.write(rec.to_json() + "\n")


def write_catalog_file(path, catalog: list[str]) -> None:
    """One scientific name per line; line number - 1 is the class id."""
    with open(path, "w", encoding="utf-8") as fh:
        for name in catalog:
            fh.write(name + "\n")


def read_catalog_file(path) -> list[str]:
    with open(path, encoding="utf-8") as fh:
        return [line.strip() for line in fh if line.strip()]


def write_weights_file(path, weights: ClassWeights) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for name, w in zip(weights.species_catalog, weights.weights):
            fh.write(f"{name}\t{w!r}\n")


def ingest(records, allowed_qualities=DEFAULT_QUALITIES, exclude_species=()) -> DatasetManifest:
    """Filter by quality grade, reject bad records, build the species catalog.

    The catalog orders species by descending record count, lexicographic on
    the scientific name among equals; that order defines class ids.
    """
    seen = {}
    duplicates = []
    for rec in records:
        if rec.id in seen:
            duplicates.append(rec.id)
        seen[rec.id] = rec
    if duplicates:
        raise IngestError(f"duplicate record ids: {sorted(set(duplicates))}")

    excluded = set(exclude_species)
    kept = []
    for rec in records:
        if not rec.species.strip():
            log.warning("record %s rejected: empty species field", rec.id)
            continue
        if rec.quality not in allowed_qualities:
            continue
        if rec.species in excluded:
            continue
        kept.append(rec)

    counts = {}
    for rec in kept:
        counts[rec.species] = counts.get(rec.species, 0) + 1
    catalog = sorted(counts, key=lambda s: (-counts[s], s))
    return DatasetManifest(records=kept, species_catalog=catalog)


def select_top_classes(manifest: DatasetManifest, class_count: int = 256) -> DatasetManifest:
    """Keep only the class_count most frequent species (catalog is rank order)."""
    keep = set(manifest.species_catalog[:class_count])
    records = [r for r in manifest.records if r.species in keep]
    return DatasetManifest(records=records, species_catalog=manifest.species_catalog[:class_count])


def oversample(manifest: DatasetManifest, min_per_class: int = 500,
               rng_seed: int = 0) -> DatasetManifest:
    """Duplicate records of under-represented classes up to min_per_class.

    Replicas are drawn uniformly with replacement (seeded) and carry the
    original id plus a replica counter, so ids stay unique. Classes already
    at or above the minimum pass through untouched.
    """
    by_class = {s: [] for s in manifest.species_catalog}
    for rec in manifest.records:
        by_class[rec.species].append(rec)

    rng = np.random.default_rng(rng_seed)
    replicas = []
    for species in manifest.species_catalog:
        pool = by_class[species]
        if not pool:
            raise PreconditionError(f"class {species!r} has no records to oversample")
        deficit = min_per_class - len(pool)
        if deficit <= 0:
            continue
        picks = rng.integers(0, len(pool), size=deficit)
        tally = {}
        for i in picks:
            origin = pool[int(i)]
            tally[origin.id] = tally.get(origin.id, 0) + 1
            replicas.append(replace(origin, id=f"{origin.id}~r{tally[origin.id]}"))
    return DatasetManifest(records=manifest.records + replicas,
                           species_catalog=list(manifest.species_catalog))


def class_weights(manifest: DatasetManifest) -> ClassWeights:
    """Inverse-frequency weights: w_c = N / (C * n_c)."""
    counts = manifest.class_counts()
    total = len(manifest.records)
    n_classes = len(manifest.species_catalog)
    weights = np.empty(n_classes, dtype=np.float64)
    for i, species in enumerate(manifest.species_catalog):
        n_c = counts[species]
        if n_c == 0:
            raise PreconditionError(f"class {species!r} has zero records; cannot weight")
        weights[i] = total / (n_classes * n_c)
    return ClassWeights(species_catalog=list(manifest.species_catalog), weights=weights)


def largest_remainder_allocation(n: int, fractions) -> list[int]:
    """Allocate n items to len(fractions) buckets; ties go to the lower index."""
    exact = [f * n for f in fractions]
    base = [int(np.floor(e)) for e in exact]
    leftover = n - sum(base)
    order = sorted(range(len(fractions)), key=lambda i: (-(exact[i] - base[i]), i))
    for i in order[:leftover]:
        base[i] += 1
    return base


def stratified_split(manifest: DatasetManifest, fractions, rng_seed: int = 0
                     ) -> list[DatasetManifest]:
    """Per-class largest-remainder split after a seeded shuffle.

    Every split receives at least one record per class whenever the class has
    at least as many records as there are splits. Splits partition the input
    exactly (disjoint by record identity, union preserved).
    """
    fractions = list(fractions)
    if any(f <= 0 for f in fractions):
        raise ConfigurationError("split fractions must be positive")
    if abs(sum(fractions) - 1.0) > 1e-9:
        raise ConfigurationError(f"split fractions sum to {sum(fractions)}, expected 1")
    n_splits = len(fractions)

    by_class = {s: [] for s in manifest.species_catalog}
    for rec in manifest.records:
        by_class[rec.species].append(rec)

    rng = np.random.default_rng(rng_seed)
    buckets: list[list[SampleRecord]] = [[] for _ in fractions]
    for species in manifest.species_catalog:
        pool = list(by_class[species])
        rng.shuffle(pool)
        alloc = largest_remainder_allocation(len(pool), fractions)
        if len(pool) >= n_splits:
            # min-fill guarantee: steal from the fullest bucket
            while min(alloc) == 0:
                alloc[alloc.index(max(alloc))] -= 1
                alloc[alloc.index(0)] += 1
        start = 0
        for i, k in enumerate(alloc):
            buckets[i].extend(pool[start:start + k])
            start += k
    return [DatasetManifest(records=b, species_catalog=list(manifest.species_catalog))
            for b in buckets]
