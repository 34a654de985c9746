"""Evaluation walkthrough: the metrics behind the result tables.

Run:  python demos/05_metrics.py
"""

import numpy as np

from birdbox import metrics
from birdbox.dataset import BoundingBox

rng = np.random.default_rng(5)

# ---------------------------------------------------------------------------
# 1. A small synthetic eval set: 4 classes, noisy-but-informative scores.
# ---------------------------------------------------------------------------
samples = []
for _ in range(200):
    true = int(rng.integers(0, 4))
    scores = rng.uniform(0, 0.6, size=4)
    scores[true] += rng.uniform(0, 0.8)  # signal
    samples.append(metrics.EvalSample(scores=scores / scores.sum(), true_class=true))

print(f"top-1 accuracy:     {metrics.top_k_accuracy(samples, 1):.4f}")
print(f"top-3 accuracy:     {metrics.top_k_accuracy(samples, 3):.4f}")
print(f"balanced accuracy:  {metrics.balanced_accuracy(samples):.4f}")
print(f"cmAP:               {metrics.class_mean_average_precision(samples):.4f}")

# ---------------------------------------------------------------------------
# 2. AP on a hand ranking: relevance (1, 0, 1) gives (1 + 2/3) / 2 = 5/6.
# ---------------------------------------------------------------------------
print(f"AP of (1,0,1):      {metrics.average_precision([1, 0, 1]):.4f}")

# ---------------------------------------------------------------------------
# 3. Detection mAP: boxes shifted by half their width overlap at IoU 1/3.
# ---------------------------------------------------------------------------
a = BoundingBox(0, 0, 10, 10)
b = BoundingBox(5, 0, 10, 10)
print(f"IoU of the pair:    {metrics.iou(a, b):.4f}")

pairs = [metrics.DetectionEvalPair(
    predictions=[(BoundingBox(1, 1, 10, 10), 0, 0.9),   # good match
                 (BoundingBox(5, 0, 10, 10), 0, 0.6),   # duplicate-ish
                 (BoundingBox(80, 80, 8, 8), 1, 0.7)],  # wrong class position
    ground_truth=[(BoundingBox(0, 0, 10, 10), 0),
                  (BoundingBox(40, 40, 12, 12), 1)],
)]
result = metrics.detection_map(pairs)
print(f"mAP@0.5:            {result.map_per_threshold[0.5]:.4f}")
print(f"mAP@0.5:0.95:       {result.map_mean:.4f}")

# ---------------------------------------------------------------------------
# 4. The whole report in one call (this is what `birdbox eval` prints).
# ---------------------------------------------------------------------------
report = metrics.evaluation_report(samples=samples, pairs=pairs)
for line in metrics.format_report_lines(report):
    print("  " + line)
