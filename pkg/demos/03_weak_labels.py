"""Weak-label walkthrough: detector outputs -> crop rules -> YOLO labels.

Run:  python demos/03_weak_labels.py
"""

from birdbox import dataset

IMAGE_DIMS = (1000, 800)

# ---------------------------------------------------------------------------
# 1. Raw detector candidates for one image (bird class is COCO index 14).
# ---------------------------------------------------------------------------
detections = [
    dataset.BoundingBox(200, 200, 200, 100, confidence=0.91, class_id=14),
    dataset.BoundingBox(210, 195, 190, 110, confidence=0.78, class_id=14),  # duplicate
    dataset.BoundingBox(700, 100, 60, 50, confidence=0.45, class_id=14),
    dataset.BoundingBox(30, 600, 25, 20, confidence=0.88, class_id=14),     # tiny: 0.06%
    dataset.BoundingBox(0, 0, 400, 400, confidence=0.97, class_id=15),      # a cat
    dataset.BoundingBox(500, 500, 200, 200, confidence=0.08, class_id=14),  # too unsure
]
print(f"{len(detections)} raw detections")

# ---------------------------------------------------------------------------
# 2. One rule set picks the training crop: bird class only, NMS at IoU 0.5,
#    confidence >= 0.1, area >= 0.5% of the image, most confident wins.
# ---------------------------------------------------------------------------
selected = dataset.select_bird_crop(detections, IMAGE_DIMS)
print(f"selected: ({selected.x0:.0f}, {selected.y0:.0f}, {selected.w:.0f}, "
      f"{selected.h:.0f}) conf {selected.confidence}")

# ---------------------------------------------------------------------------
# 3. Pad by 15% (context helps the classifier), clamped and outward-rounded.
# ---------------------------------------------------------------------------
padded = dataset.pad_bbox(selected, pad_fraction=0.15, image_dims=IMAGE_DIMS)
print(f"padded:   ({padded.x0:.0f}, {padded.y0:.0f}, {padded.w:.0f}, {padded.h:.0f})")

# ---------------------------------------------------------------------------
# 4. Emit the normalized label the detection trainer consumes.
# ---------------------------------------------------------------------------
label = dataset.emit_yolo_label(padded, class_index=42, image_dims=IMAGE_DIMS)
print("label line:", label.to_line())

# ---------------------------------------------------------------------------
# 5. Crop geometry for the classifier stage.
# ---------------------------------------------------------------------------
train_rect = dataset.train_crop_geometry((padded.w, padded.h), rng_seed=7)
print(f"train view: {train_rect} "
      f"({train_rect.w * train_rect.h / (padded.w * padded.h):.0%} of the crop)")

plan = dataset.val_crop_geometry((padded.w, padded.h))
print(f"val view:   scale {plan.scale:.3f} -> {plan.resized_dims}, window {plan.window}")
