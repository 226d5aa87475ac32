#!/usr/bin/env python3
"""Records per-field checksums of a scene file so loader tests can compare
against numbers computed without the C++ parser.

usage: checksum_manifest.py scene.json [out.json]
"""
import json
import math
import sys


def expand(raster):
    if isinstance(raster, dict):
        out = []
        for label, n in raster["runs"]:
            out += [label] * n
        return out
    return list(raster)


def manifest(doc):
    sp = expand(doc["superpixels"])
    dets = doc["detections"]
    return {
        "scene_id": doc["scene_id"],
        "pixels": doc["width"] * doc["height"],
        "detections": len(dets),
        "detection_ids": sorted(d["id"] for d in dets),
        "bbox_sum": math.fsum(x for d in dets for x in d["bbox"]),
        "class_score_sum": math.fsum(x for d in dets for x in d["class_scores"]),
        "box_score_sum": math.fsum(d["box_score"] for d in dets),
        "superpixel_count": max(sp) + 1,
        "superpixel_weighted_sum": sum(i * l for i, l in enumerate(sp)) % 1000000007,
        "point_sum": [math.fsum(doc["points"][c::3]) for c in range(3)],
        "normal_sum": [math.fsum(doc["normals"][c::3]) for c in range(3)],
        "rgb_sum": sum(doc.get("rgb") or []),
        "lines": len(doc.get("lines", [])),
        "scene_score_sum": math.fsum(doc["scene_scores"]),
        "support_pairs": len(doc["support"]["pairs"]) if doc.get("support") else 0,
    }


def main():
    if len(sys.argv) < 2:
        sys.exit(__doc__)
    with open(sys.argv[1]) as f:
        m = manifest(json.load(f))
    text = json.dumps(m, indent=1) + "\n"
    if len(sys.argv) > 2:
        with open(sys.argv[2], "w") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


if __name__ == "__main__":
    main()
