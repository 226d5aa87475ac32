#!/usr/bin/env python3
"""Regenerates the committed test fixtures under tests/fixtures/.

Scenes are ray-cast from a handful of axis-aligned boxes in a room with a
floor at y = 0 and a back wall, seen from a slightly pitched and rolled
camera. Output is deterministic.
"""
import json
import math
import pathlib

import numpy as np

import make_data

ROOT = pathlib.Path(__file__).resolve().parent.parent
OUT = ROOT / "tests" / "fixtures"
CLASSES = make_data.CLASSES
SCENES = make_data.SCENES


def rot_x(a):
    c, s = math.cos(a), math.sin(a)
    return np.array([[1, 0, 0], [0, c, -s], [0, s, c]])


def rot_z(a):
    c, s = math.cos(a), math.sin(a)
    return np.array([[c, -s, 0], [s, c, 0], [0, 0, 1]])


class Camera:
    def __init__(self, width, height, focal, eye, pitch_deg, roll_deg):
        self.w, self.h, self.f = width, height, focal
        self.eye = np.asarray(eye, float)
        # columns: camera axes (x right, y up, z forward) in room coordinates
        # rot_x with a positive angle tips the forward axis towards -y
        self.axes = rot_x(math.radians(pitch_deg)) @ rot_z(math.radians(roll_deg))

    def ray(self, u, v):
        d_cam = np.array([(u + 0.5 - self.w / 2) / self.f, -(v + 0.5 - self.h / 2) / self.f, 1.0])
        return self.axes @ d_cam

    def to_camera(self, p_room):
        return self.axes.T @ (np.asarray(p_room) - self.eye)

    def dir_to_camera(self, d_room):
        return self.axes.T @ np.asarray(d_room)


def hit_box(o, d, lo, hi):
    tmin, tmax, axis = -math.inf, math.inf, -1
    for a in range(3):
        if abs(d[a]) < 1e-12:
            if o[a] < lo[a] or o[a] > hi[a]:
                return None
            continue
        t1, t2 = (lo[a] - o[a]) / d[a], (hi[a] - o[a]) / d[a]
        near = min(t1, t2)
        if near > tmin:
            tmin, axis = near, a
        tmax = min(tmax, max(t1, t2))
    if tmin > tmax or tmin <= 1e-9 or axis < 0:
        return None
    n = np.zeros(3)
    n[axis] = -math.copysign(1.0, d[axis])
    return tmin, n


def render(cam, boxes, wall_z):
    """boxes: list of (name, lo, hi). Floor is 'ground', back wall is 'wall'."""
    names = ["ground", "wall"] + [b[0] for b in boxes]
    label = np.zeros((cam.h, cam.w), int)
    pts = np.zeros((cam.h, cam.w, 3))
    nrm = np.zeros((cam.h, cam.w, 3))
    for v in range(cam.h):
        for u in range(cam.w):
            d = cam.ray(u, v)
            best = (math.inf, -1, None)
            if d[1] < 0:
                t = -cam.eye[1] / d[1]
                if cam.eye[2] + t * d[2] < wall_z:
                    best = (t, 0, np.array([0.0, 1.0, 0.0]))
            if d[2] > 0:
                t = (wall_z - cam.eye[2]) / d[2]
                if t < best[0]:
                    best = (t, 1, np.array([0.0, 0.0, -1.0]))
            for k, (_, lo, hi) in enumerate(boxes):
                h = hit_box(cam.eye, d, np.array(lo), np.array(hi))
                if h and h[0] < best[0]:
                    best = (h[0], k + 2, h[1])
            t, k, n = best
            if k < 0:
                raise SystemExit("ray escaped the room")
            label[v, u] = k
            pts[v, u] = cam.to_camera(cam.eye + t * d)
            nrm[v, u] = cam.dir_to_camera(n)
    return names, label, pts, nrm


def superpixels(label, tile, whole=("ground", "wall"), names=None):
    """Structure surfaces are one superpixel each; objects are cut into tiles."""
    h, w = label.shape
    key = {}
    out = np.zeros_like(label)
    for v in range(h):
        for u in range(w):
            k = label[v, u]
            kk = (k,) if names[k] in whole else (k, v // tile, u // tile)
            if kk not in key:
                key[kk] = len(key)
            out[v, u] = key[kk]
    return out


def bbox_of(label, k, pad=0):
    vs, us = np.nonzero(label == k)
    h, w = label.shape
    return [max(0, int(us.min()) - pad), max(0, int(vs.min()) - pad),
            min(w, int(us.max()) + 1 + pad), min(h, int(vs.max()) + 1 + pad)]


def scores(pairs):
    s = [0.0] * len(CLASSES)
    for name, p in pairs.items():
        s[CLASSES.index(name)] = p
    return s


def shade(colour, n):
    light = np.array([0.3, 0.8, -0.5])
    light /= np.linalg.norm(light)
    k = 0.8 + 0.2 * max(0.0, float(np.dot(n, light)))
    return [int(round(min(255, c * k))) for c in colour]


def rle(a):
    flat = a.ravel().tolist()
    runs = []
    for x in flat:
        if runs and runs[-1][0] == x:
            runs[-1][1] += 1
        else:
            runs.append([x, 1])
    return {"encoding": "rle", "runs": runs}


def r6(x):
    return round(float(x), 6)


def scene_doc(scene_id, cam, names, label, pts, nrm, detections, colours, scene_scores, lines, support=None):
    sp = superpixels(label, 8, names=names)
    rgb = []
    for v in range(cam.h):
        for u in range(cam.w):
            rgb += shade(colours[names[label[v, u]]], cam.axes @ nrm[v, u])
    doc = {
        "schema": "supportgraph.scene/v1",
        "scene_id": scene_id,
        "width": cam.w,
        "height": cam.h,
        "num_classes": len(CLASSES),
        "detections": detections,
        "superpixels": rle(sp),
        "points": [r6(x) for x in pts.reshape(-1)],
        "normals": [r6(x) for x in nrm.reshape(-1)],
        "rgb": rgb,
        "lines": lines,
        "scene_scores": scene_scores,
    }
    if support is not None:
        doc["support"] = support
    return doc


def unit(v):
    v = np.asarray(v, float)
    return v / np.linalg.norm(v)


def manhattan_lines(cam):
    up = cam.dir_to_camera([0, 1, 0])
    lines = []
    for jitter in ([0.004, 0, 0.002], [-0.003, 0, 0.001], [0.0, 0, -0.003]):
        lines.append({"direction": [r6(x) for x in unit(up + np.array(jitter))], "near_y": True})
    for d in ([1, 0, 0], [1, 0.003, 0], [0, 0, 1], [0.002, 0, 1]):
        lines.append({"direction": [r6(x) for x in unit(cam.dir_to_camera(d))], "near_y": False})
    return lines


def dining_room():
    cam = Camera(128, 96, 100.0, [0.0, 1.3, 0.0], pitch_deg=12.0, roll_deg=2.0)
    boxes = [
        ("sofa", [-1.9, 0.0, 3.0], [-1.0, 0.8, 3.8]),
        ("table", [-0.4, 0.0, 2.1], [0.8, 0.7, 2.7]),
        ("cup", [-0.1, 0.7, 2.3], [0.02, 0.82, 2.42]),
        ("book", [0.35, 0.7, 2.25], [0.65, 0.75, 2.55]),
        ("picture", [0.9, 1.35, 3.96], [1.6, 1.9, 4.0]),
    ]
    names, label, pts, nrm = render(cam, boxes, wall_z=4.0)
    idx = {n: k for k, n in enumerate(names)}
    det = []

    def add(did, name, cls, box_score, pad=0, shift=(0, 0)):
        b = bbox_of(label, idx[name], pad)
        b = [b[0] + shift[0], b[1] + shift[1], b[2] + shift[0], b[3] + shift[1]]
        b = [max(0, min(cam.w, b[0])), max(0, min(cam.h, b[1])), max(0, min(cam.w, b[2])), max(0, min(cam.h, b[3]))]
        det.append({"id": did, "bbox": b, "box_score": box_score, "class_scores": scores(cls)})

    add(0, "ground", {"ground": 0.9, "floor mat": 0.1}, 0.95)
    add(1, "wall", {"wall": 0.85, "other structure": 0.15}, 0.93)
    add(2, "sofa", {"sofa": 0.7, "chair": 0.2, "bed": 0.1}, 0.9)
    add(3, "table", {"table": 0.6, "desk": 0.3, "counter": 0.1}, 0.88)
    add(4, "cup", {"cup": 0.6, "box": 0.25, "other prop": 0.15}, 0.8)
    add(5, "book", {"book": 0.7, "paper": 0.3}, 0.82)
    add(6, "picture", {"picture": 0.6, "window": 0.2, "mirror": 0.2}, 0.86)
    # a second, weaker proposal for the table that NMS should drop
    add(7, "table", {"table": 0.5, "desk": 0.4, "counter": 0.1}, 0.6, shift=(2, 1))
    colours = {"ground": [150, 150, 150], "wall": [235, 230, 215], "sofa": [40, 50, 230],
               "table": [150, 75, 25], "cup": [250, 250, 250], "book": [225, 30, 30], "picture": [245, 225, 40]}
    sc = [0.0] * len(SCENES)
    sc[SCENES.index("dining room")] = 0.7
    sc[SCENES.index("living room")] = 0.2
    sc[SCENES.index("kitchen")] = 0.1
    return scene_doc("dining_room", cam, names, label, pts, nrm, det, colours, sc, manhattan_lines(cam))


def small_kitchen():
    cam = Camera(64, 48, 50.0, [0.0, 1.2, 0.0], pitch_deg=10.0, roll_deg=-1.5)
    boxes = [
        ("table", [-0.6, 0.0, 2.0], [0.6, 0.75, 2.8]),
        ("cup", [-0.1, 0.75, 2.3], [0.05, 0.87, 2.45]),
    ]
    names, label, pts, nrm = render(cam, boxes, wall_z=3.5)
    idx = {n: k for k, n in enumerate(names)}
    det = [
        {"id": 10, "bbox": bbox_of(label, idx["ground"]), "box_score": 0.9,
         "class_scores": scores({"ground": 0.8, "floor mat": 0.2})},
        {"id": 11, "bbox": bbox_of(label, idx["wall"]), "box_score": 0.9,
         "class_scores": scores({"wall": 0.7, "other structure": 0.2, "door": 0.1})},
        {"id": 12, "bbox": bbox_of(label, idx["table"]), "box_score": 0.85,
         "class_scores": scores({"table": 0.5, "counter": 0.3, "desk": 0.2})},
        {"id": 13, "bbox": bbox_of(label, idx["cup"]), "box_score": 0.7,
         "class_scores": scores({"cup": 0.5, "box": 0.3, "other prop": 0.2})},
    ]
    ids = [10, 11, 12, 13]
    # [below, behind, none] per ordered pair, deliberately not symmetric
    table = {
        (11, 10): [0.55, 0.15, 0.30], (12, 10): [0.70, 0.05, 0.25], (13, 10): [0.20, 0.05, 0.75],
        (10, 11): [0.05, 0.10, 0.85], (12, 11): [0.10, 0.25, 0.65], (13, 11): [0.05, 0.20, 0.75],
        (10, 12): [0.02, 0.03, 0.95], (11, 12): [0.05, 0.05, 0.90], (13, 12): [0.75, 0.05, 0.20],
        (10, 13): [0.01, 0.01, 0.98], (11, 13): [0.02, 0.03, 0.95], (12, 13): [0.05, 0.05, 0.90],
    }
    pairs = []
    for i in ids:
        for s in ids:
            if i != s:
                pairs.append({"supported": i, "supporter": s, "p": table[(i, s)]})
        pairs.append({"supported": i, "supporter": "hidden", "p": [0.1, 0.05, 0.85]})
    colours = {"ground": [140, 140, 140], "wall": [200, 220, 210], "table": [120, 90, 60], "cup": [240, 240, 240]}
    sc = [0.0] * len(SCENES)
    sc[SCENES.index("kitchen")] = 0.6
    sc[SCENES.index("dining room")] = 0.4
    return scene_doc("small_kitchen", cam, names, label, pts, nrm, det, colours, sc, manhattan_lines(cam),
                     support={"type": "probabilities", "pairs": pairs})


def table_graph(variant):
    """Kitchen example graph; the erroneous variant hangs the table on the wall."""
    v = [
        {"id": 0, "kind": "root", "label": "kitchen", "detection_id": None, "bbox": None},
        {"id": 1, "kind": "hidden", "label": "hidden", "detection_id": None, "bbox": None},
        {"id": 2, "kind": "structure", "label": "ground", "detection_id": 0, "bbox": [0, 300, 640, 480]},
        {"id": 3, "kind": "structure", "label": "wall", "detection_id": 1, "bbox": [0, 0, 640, 320]},
        {"id": 4, "kind": "object", "label": "table", "detection_id": 2, "bbox": [200, 250, 420, 400]},
        {"id": 5, "kind": "object", "label": "chair", "detection_id": 3, "bbox": [420, 260, 520, 440]},
        {"id": 6, "kind": "object", "label": "picture", "detection_id": 4, "bbox": [80, 60, 200, 160]},
        {"id": 7, "kind": "object", "label": "cup", "detection_id": 5, "bbox": [240, 220, 270, 255]},
        {"id": 8, "kind": "object", "label": "book", "detection_id": 6, "bbox": [320, 235, 380, 252]},
    ]
    for x in v:
        x.update({"z_min": 0.0, "z_max": 0.0, "attributes": []})
    table_on = [4, 2, "below"] if variant == "gt" else [4, 3, "behind"]
    edges = [[1, 0, "layer"], [2, 0, "layer"], [3, 0, "layer"], table_on, [5, 2, "below"],
             [6, 3, "behind"], [7, 4, "below"], [8, 4, "below"]]
    return {
        "schema": "supportgraph.graph/v1",
        "scene_type": "kitchen",
        "vertices": v,
        "support_edges": [{"from": a, "to": b, "kind": k} for a, b, k in edges],
        "default_edges": [{"from": 3, "to": 2}],
        "position_edges": [],
    }


def write(path, doc):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc, separators=(",", ":")) + "\n")


def main():
    write(OUT / "scenes" / "dining_room.json", dining_room())
    write(OUT / "scenes" / "small_kitchen.json", small_kitchen())
    (OUT / "graphs").mkdir(parents=True, exist_ok=True)
    (OUT / "graphs" / "kitchen_gt.json").write_text(json.dumps(table_graph("gt"), indent=1) + "\n")
    (OUT / "graphs" / "kitchen_err.json").write_text(json.dumps(table_graph("err"), indent=1) + "\n")


if __name__ == "__main__":
    main()
