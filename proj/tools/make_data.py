#!/usr/bin/env python3
"""Writes data/priors_default.json and data/support_model_demo.json.

The numbers are hand-set plausibility values, not statistics from any
dataset; they exist so the engine runs end to end out of the box.
"""
import json
import pathlib

ROOT = pathlib.Path(__file__).resolve().parent.parent

STRUCTURE = ["ground", "wall", "ceiling"]
OBJECTS = [
    "cabinet", "bed", "chair", "sofa", "table", "door", "window", "bookshelf",
    "picture", "counter", "blinds", "desk", "shelves", "curtain", "dresser", "pillow",
    "mirror", "floor mat", "clothes", "book", "refrigerator", "television", "paper", "towel",
    "box", "whiteboard", "night stand", "toilet", "sink", "lamp", "bathtub", "cup",
]
OTHER = ["other prop", "other furniture", "other structure"]
CLASSES = STRUCTURE + OBJECTS + OTHER

SCENES = [
    "bedroom", "kitchen", "living room", "bathroom", "dining room",
    "office", "home office", "classroom", "bookstore", "other",
]

# furniture and large items standing on the floor
ON_FLOOR = {"cabinet", "bed", "chair", "sofa", "table", "bookshelf", "counter", "desk", "dresser",
            "floor mat", "refrigerator", "night stand", "toilet", "bathtub", "box", "other furniture",
            "lamp", "shelves", "door", "person"}
# things hanging on / fixed to walls
ON_WALL = {"door", "window", "picture", "blinds", "curtain", "mirror", "whiteboard", "television",
           "shelves", "cabinet", "sink", "towel", "other structure", "counter", "lamp"}
# flat-topped furniture that carries small items
SURFACES = {"table", "desk", "counter", "shelves", "bookshelf", "cabinet", "dresser", "night stand",
            "sink", "bed", "sofa", "chair", "box", "other furniture"}
SMALL = {"cup", "book", "paper", "box", "lamp", "television", "pillow", "clothes", "towel",
         "other prop", "picture", "mirror"}
SOFT = {"bed", "sofa", "chair"}  # carry pillows and clothes

SCENE_CLASSES = {
    "bedroom": {"bed", "pillow", "night stand", "dresser", "lamp", "clothes", "curtain", "mirror", "picture"},
    "kitchen": {"counter", "cabinet", "refrigerator", "sink", "cup", "table", "chair", "box", "towel"},
    "living room": {"sofa", "table", "chair", "television", "picture", "lamp", "pillow", "book", "cup",
                    "bookshelf", "curtain"},
    "bathroom": {"toilet", "sink", "bathtub", "towel", "mirror", "cabinet", "counter"},
    "dining room": {"table", "chair", "cup", "picture", "cabinet", "lamp", "sofa", "book", "window"},
    "office": {"desk", "chair", "paper", "book", "shelves", "box", "cabinet", "whiteboard", "lamp"},
    "home office": {"desk", "chair", "paper", "book", "bookshelf", "lamp", "cup", "picture"},
    "classroom": {"desk", "chair", "whiteboard", "table", "paper", "book", "door", "window"},
    "bookstore": {"bookshelf", "shelves", "book", "table", "box", "paper"},
    "other": set(),
}


def support_prior(supporter, supported):
    if supported == "ground" or supporter == supported:
        return 0.0
    if supported in ("wall", "ceiling"):
        return 0.9 if supporter == "ground" and supported == "wall" else (0.8 if supporter == "wall" else 0.0)
    if supporter == "ground":
        return 0.9 if supported in ON_FLOOR else 0.05
    if supporter == "wall":
        return 0.85 if supported in ON_WALL else 0.05
    if supporter == "ceiling":
        return 0.6 if supported == "lamp" else 0.02
    if supporter in SURFACES and supported in SMALL:
        return 0.8
    if supporter in SOFT and supported in {"pillow", "clothes", "book"}:
        return 0.7
    return 0.02


def presence(scene, cls):
    if cls in STRUCTURE:
        return 0.95 if cls != "ceiling" else 0.6
    if cls in SCENE_CLASSES[scene]:
        return 0.8
    return 0.2


def demo_model():
    # rows: below, behind, none; columns follow the 20-entry feature layout
    f = 20
    below = [0.0] * f
    behind = [0.0] * f
    none = [0.0] * f
    below[0] = -6.0    # vertical gap
    below[1] = -4.0    # horizontal gap
    below[2] = -0.5    # centroid distance
    below[6] = 1.5     # hull containment
    below[7] = 1.5     # horizontal hull containment
    below[9] = 2.0     # supporter horizontal fraction
    below[13] = -1.0   # supporter vertical fraction
    below[18] = 0.5    # touching regions
    below[19] = -2.0   # hidden supporter
    behind[0] = -2.0
    behind[1] = -6.0
    behind[2] = -0.5
    behind[9] = -1.0
    behind[13] = 2.5
    behind[15] = 0.5   # supported vertical fraction
    behind[18] = 0.5
    behind[19] = -2.0
    none[2] = 0.3
    return {
        "schema": "supportgraph.linear-classifier/v1",
        "note": "hand-set demonstration weights, not trained on any data",
        "labels": ["below", "behind", "none"],
        "classes": 3,
        "features": f,
        "weights": below + behind + none,
        "bias": [0.5, 0.0, 1.0],
    }


def main():
    data = ROOT / "data"
    data.mkdir(exist_ok=True)
    priors = {
        "schema": "supportgraph.priors/v1",
        "note": "hand-set plausibility values, not dataset statistics",
        "classes": CLASSES,
        "scenes": SCENES,
        "class_given_scene": [[presence(s, c) for c in CLASSES] for s in SCENES],
        "support_prior": [[support_prior(a, b) for b in CLASSES] for a in CLASSES],
    }
    (data / "priors_default.json").write_text(json.dumps(priors, indent=1) + "\n")
    (data / "support_model_demo.json").write_text(json.dumps(demo_model(), indent=1) + "\n")
    config = {
        "schema": "supportgraph.config/v1",
        "nms": {"weight": 1.0, "iou_threshold": 0.5},
        "segmentation": {"ratio": 0.8},
        "alignment": {"normal_weight": 1.0, "line_weight": 1.0, "sigma": 0.25, "near_y_degrees": 15.0,
                      "orientation_cone_degrees": 30.0, "sweep_step_degrees": 1.0},
        "energy": {"alpha_class": 1.0, "alpha_distance": 1.0, "alpha_support": 1.0, "k_hidden": 5.0},
        "features": {"histogram_bins": 16},
        "solver": {"max_nodes": 200000},
        "graph": {"proximity": 0.5},
        "support_model": "support_model_demo.json",
    }
    (data / "config_default.json").write_text(json.dumps(config, indent=2) + "\n")


if __name__ == "__main__":
    main()
