"""Dataset curation walkthrough: ingest -> cutoff -> oversample -> weights -> split.

Run:  python demos/02_dataset_curation.py
"""

import numpy as np

from birdbox import dataset

# ---------------------------------------------------------------------------
# 1. A long-tailed synthetic manifest: few common species, many rare ones.
# ---------------------------------------------------------------------------
rng = np.random.default_rng(0)
species_pool = [f"Species {chr(65 + i)}" for i in range(10)]
records = []
for i, name in enumerate(species_pool):
    count = max(2, int(800 * (0.5 ** i)))  # geometric tail
    for k in range(count):
        records.append(dataset.SampleRecord(
            id=f"{name}-{k}", species=name,
            quality=str(rng.choice(["A", "B", "C", "D"], p=[0.4, 0.3, 0.2, 0.1])),
            modality="audio", media_path=f"xc/{name}/{k}.wav"))
print(f"raw records: {len(records)}")

# ---------------------------------------------------------------------------
# 2. Ingest keeps quality A/B/C and orders the catalog by frequency.
# ---------------------------------------------------------------------------
manifest = dataset.ingest(records)
counts = manifest.class_counts()
print(f"after quality filter: {len(manifest)} records, {len(counts)} species")
print("top 3 by count:", sorted(counts.items(), key=lambda kv: -kv[1])[:3])

# ---------------------------------------------------------------------------
# 3. Keep the most frequent classes (the deployment target is a fixed head).
# ---------------------------------------------------------------------------
manifest = dataset.select_top_classes(manifest, class_count=6)
print(f"after cutoff: catalog {manifest.species_catalog}")

# ---------------------------------------------------------------------------
# 4. Oversample rare classes to a floor of 100 (production default is 500).
# ---------------------------------------------------------------------------
manifest = dataset.oversample(manifest, min_per_class=100, rng_seed=1)
print("post-oversample floor:", min(manifest.class_counts().values()))

# ---------------------------------------------------------------------------
# 5. Inverse-frequency class weights obey sum(w_c * n_c) == N.
# ---------------------------------------------------------------------------
weights = dataset.class_weights(manifest)
counts = manifest.class_counts()
identity = sum(w * counts[s] for s, w in zip(weights.species_catalog, weights.weights))
print(f"sum w_c*n_c = {identity:.9f} vs N = {len(manifest)}")
for name, w in list(zip(weights.species_catalog, weights.weights))[:3]:
    print(f"  w[{name}] = {w:.3f}")

# ---------------------------------------------------------------------------
# 6. Stratified 90/10 split: per-class proportions within one record.
# ---------------------------------------------------------------------------
train, val = dataset.stratified_split(manifest, (0.9, 0.1), rng_seed=2)
print(f"split sizes: train {len(train)}, val {len(val)}")
for name in manifest.species_catalog[:3]:
    n = counts[name]
    print(f"  {name}: {train.class_counts()[name]}/{val.class_counts()[name]} "
          f"(target {0.9 * n:.1f}/{0.1 * n:.1f})")
