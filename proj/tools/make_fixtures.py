#!/usr/bin/env python3
# Copyright 2026 The Iconoread Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Regenerates the fixture corpus under data/fixtures.

Each painting is described in normalized-image coordinates (the pipeline's
512*512 pixel budget). The script renders a stylized stand-in image at the
painting's original size and writes the provider sidecar at normalized size.
Output is deterministic; rerunning it must leave the tree unchanged.
"""

import json
import math
import pathlib

import numpy as np
from PIL import Image, ImageDraw

TARGET_PIXELS = 512 * 512
ROOT = pathlib.Path(__file__).resolve().parent.parent / "data" / "fixtures"


def normalized_dims(width, height):
    scale = math.sqrt(TARGET_PIXELS / (width * height))
    # Python's round() is half-to-even, like the engine.
    return max(1, round(width * scale)), max(1, round(height * scale))


def ellipse_mask(dims, ellipses):
    w, h = dims
    ys, xs = np.mgrid[0:h, 0:w]
    cx_, cy_ = xs + 0.5, ys + 0.5
    mask = np.zeros((h, w), dtype=bool)
    for cx, cy, rx, ry in ellipses:
        mask |= ((cx_ - cx) / rx) ** 2 + ((cy_ - cy) / ry) ** 2 <= 1.0
    return mask


def rle(mask):
    h, w = mask.shape
    rows = []
    for y in range(h):
        runs, x = [], 0
        row = mask[y]
        while x < w:
            if not row[x]:
                x += 1
                continue
            start = x
            while x < w and row[x]:
                x += 1
            runs.append([start, x - start])
        rows.append(runs)
    return {"width": int(w), "height": int(h), "rows": rows}


def render(path, original, dims, painting):
    sx = original[0] / dims[0]
    sy = original[1] / dims[1]
    w, h = original
    t = np.linspace(0.0, 1.0, h)[:, None]
    sky = np.array(painting.get("sky", (70, 110, 170)), dtype=float)
    ground = np.array((120, 96, 60), dtype=float)
    column = sky * (1.0 - t) + ground * t
    rgb = np.broadcast_to(column[:, None, :], (h, w, 3)).astype(np.uint8)
    img = Image.fromarray(rgb)
    draw = ImageDraw.Draw(img)
    palette = [(214, 170, 140), (190, 60, 60), (90, 60, 140), (230, 210, 150)]
    for i, region in enumerate(painting["regions"]):
        color = (240, 240, 235) if region["label"] != "person" else palette[i % len(palette)]
        for cx, cy, rx, ry in region["ellipses"]:
            draw.ellipse([(cx - rx) * sx, (cy - ry) * sy, (cx + rx) * sx, (cy + ry) * sy],
                         fill=color)
    for det in painting["detections"]:
        x0, y0, x1, y1 = det["box"]
        draw.rectangle([x0 * sx, y0 * sy, x1 * sx, y1 * sy],
                       outline=(250, 220, 60), width=max(1, int(2 * sx)))
    img.save(path, optimize=True)


def write_painting(directory, name, original, painting):
    dims = normalized_dims(*original)
    directory.mkdir(parents=True, exist_ok=True)
    render(directory / f"{name}.png", original, dims, painting)
    detections = []
    for det in painting["detections"]:
        item = {"label": det["label"], "confidence": det["confidence"],
                "box": det["box"]}
        if det.get("mask"):
            item["mask"] = rle(ellipse_mask(dims, det["mask"]))
        detections.append(item)
    regions = [{"raw_label": r["label"], "confidence": r["confidence"],
                "mask": rle(ellipse_mask(dims, r["ellipses"]))}
               for r in painting["regions"]]
    doc = {"dims": {"width": dims[0], "height": dims[1]},
           "detections": detections, "regions": regions}
    (directory / f"{name}.detections.json").write_text(
        json.dumps(doc, separators=(",", ":")) + "\n")
    return dims


def person(cx, cy, rx, ry, confidence=0.97):
    # Head plus body.
    return {"label": "person", "confidence": confidence,
            "ellipses": [(cx, cy, rx, ry), (cx, cy - ry - rx * 0.45, rx * 0.5, rx * 0.5)]}


def verrocchio():
    # 151 x 177 cm panel, rendered at 10 px/cm.
    original = (1510, 1770)
    painting = {
        "sky": (95, 130, 160),
        "regions": [
            person(85, 400, 60, 110, 0.95),    # kneeling angel, left
            person(240, 360, 58, 170, 0.98),   # Christ, center
            person(385, 350, 62, 175, 0.97),   # John the Baptist, right
            # Dove with outstretched wings, touching the head of the central figure.
            {"label": "bird", "confidence": 0.91,
             "ellipses": [(240, 118, 34, 14), (240, 135, 10, 22)]},
        ],
        "detections": [
            {"label": "dove", "confidence": 0.99, "box": [200, 98, 280, 150],
             "mask": [(240, 118, 34, 14), (240, 135, 10, 22)]},
            {"label": "cross", "confidence": 0.99, "box": [405, 110, 445, 300]},
        ],
    }
    d = ROOT / "verrocchio"
    write_painting(d, "baptism_of_christ", original, painting)
    # Reading-local override: dove identifies Christ in this scene.
    db = json.loads((ROOT.parent / "default_database.json").read_text())
    for entry in db["entries"]:
        if entry["attribute"] == "dove":
            entry["candidates"] = [{"saint": "Christ", "prior": 1.0}]
    db["version"] = db["version"] + "+baptism-override"
    (d / "database_override.json").write_text(json.dumps(db, indent=2) + "\n")


def blank():
    write_painting(ROOT / "blank", "empty_panel", (512, 512),
                   {"regions": [], "detections": []})


def table2():
    d = ROOT / "table2"
    images = d / "images"
    corpus = [
        # (name, original dims, painting, truth saints)
        ("holy_trinity_a", (1024, 1024), {
            "regions": [person(256, 330, 70, 140)],
            "detections": [{"label": "dove", "confidence": 0.97, "box": [226, 40, 286, 90]},
                           {"label": "cross", "confidence": 0.41, "box": [60, 200, 100, 380]}],
        }, [{"saint": "God"}]),
        ("holy_trinity_b", (512, 512), {
            "regions": [person(170, 320, 60, 130), person(350, 320, 60, 130)],
            "detections": [{"label": "dove", "confidence": 0.95, "box": [150, 50, 200, 95]}],
        }, [{"saint": "God"}]),
        ("st_mark_writing", (800, 600), {
            "regions": [person(300, 230, 70, 130),
                        {"label": "animal", "confidence": 0.88,
                         "ellipses": [(420, 340, 70, 40)]}],
            "detections": [{"label": "winged_lion", "confidence": 0.96,
                            "box": [360, 290, 490, 390]}],
        }, [{"saint": "Saint Mark"}]),
        ("lion_of_st_mark", (1024, 768), {
            "regions": [{"label": "animal", "confidence": 0.93,
                         "ellipses": [(290, 250, 150, 80), (400, 170, 45, 45)]}],
            "detections": [{"label": "winged_lion", "confidence": 0.99,
                            "box": [140, 90, 450, 330]}],
        }, [{"saint": "Saint Mark"}]),
        ("st_peter_misread", (512, 512), {
            "regions": [person(256, 300, 80, 150),
                        {"label": "chair", "confidence": 0.7,
                         "ellipses": [(256, 440, 120, 40)]}],
            "detections": [{"label": "winged_lion", "confidence": 0.93,
                            "box": [330, 360, 470, 470]},
                           {"label": "keys", "confidence": 0.62,
                            "box": [300, 250, 340, 300]}],
        }, [{"saint": "Saint Peter"}]),
        ("st_john_patmos", (1024, 1024), {
            "regions": [person(230, 300, 75, 150)],
            "detections": [{"label": "eagle", "confidence": 0.98,
                            "box": [330, 120, 450, 220]}],
        }, [{"saint": "Saint John"}]),
        ("st_john_evangelist", (512, 512), {
            "regions": [person(150, 310, 60, 130), person(360, 310, 60, 130)],
            "detections": [{"label": "eagle", "confidence": 0.94,
                            "box": [390, 400, 480, 480]},
                           {"label": "ax", "confidence": 0.3,
                            "box": [40, 40, 80, 80]}],
        }, [{"saint": "Saint John"}]),
        ("st_john_altarpiece", (600, 800), {
            "regions": [person(220, 380, 80, 180),
                        {"label": "bird", "confidence": 0.9,
                         "ellipses": [(330, 560, 40, 25)]}],
            "detections": [{"label": "eagle", "confidence": 0.95,
                            "box": [280, 520, 380, 586]}],
        }, [{"saint": "Saint John", "box": [120, 160, 330, 590]}]),
        ("st_john_faded", (512, 512), {
            "regions": [person(256, 300, 70, 140)],
            "detections": [{"label": "eagle", "confidence": 0.55,
                            "box": [360, 110, 450, 190]}],
        }, [{"saint": "Saint John"}]),
        ("st_peter_keys", (1024, 1024), {
            "regions": [person(180, 300, 75, 150), person(370, 330, 55, 110, 0.9)],
            "detections": [{"label": "keys", "confidence": 0.99,
                            "box": [220, 260, 270, 320]}],
        }, [{"saint": "Saint Peter", "box": [90, 60, 270, 460]}]),
    ]
    manifest, truth = [], []
    for name, original, painting, saints in corpus:
        write_painting(images, name, original, painting)
        manifest.append({"image_id": name, "image_path": f"images/{name}.png"})
        truth.append({"image_id": name, "saints": saints})
    (d / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    (d / "truth.json").write_text(json.dumps(truth, indent=2) + "\n")
    notes = {
        "description": "Ten-painting fixture corpus for the per-saint metrics table.",
        "expected_counts": {
            "God": {"tp": 2, "fp": 0, "fn": 0},
            "Saint Mark": {"tp": 2, "fp": 1, "fn": 0},
            "Saint John": {"tp": 3, "fp": 0, "fn": 1},
            "Saint Peter": {"tp": 1, "fp": 0, "fn": 1},
        },
        "expected_metrics": {
            "God": [1.00, 1.00], "Saint Mark": [0.67, 1.00],
            "Saint John": [1.00, 0.75], "Saint Peter": [1.00, 0.50],
        },
        "provenance": "Underlying corpus counts were never published; these are "
                      "the smallest integer counts that reproduce the target "
                      "two-decimal precision/recall values.",
    }
    (d / "corpus_notes.json").write_text(json.dumps(notes, indent=2) + "\n")


if __name__ == "__main__":
    verrocchio()
    blank()
    table2()
