"""Support relations and scene graphs from RGBD scenes.

Documents are plain dicts in the same layout as the JSON files the
command-line tool reads and writes.
"""
import json
import os

from ._core import (
    ConfigError,
    InputError,
    IoError,
    SolverError,
    cheeger_bounds,
    cheeger_constant,
    naive_distance,
)
from . import _core

__all__ = [
    "ConfigError", "InputError", "IoError", "SolverError",
    "infer", "graph_from_solution", "compare", "validate",
    "cheeger_bounds", "cheeger_constant", "naive_distance",
]


def _path(p):
    return None if p is None else os.fspath(p)


def infer(scene, priors, config=None, model=None):
    """Solution document for a scene file."""
    return json.loads(_core.infer_json(_path(scene), _path(priors), _path(config), _path(model)))


def graph_from_solution(solution, proximity=0.5):
    return json.loads(_core.graph_json(json.dumps(solution), proximity))


def compare(hypothesis, ground_truth):
    """Cheeger, spectral and naive distances between two graph documents."""
    return json.loads(_core.compare_json(json.dumps(hypothesis), json.dumps(ground_truth)))


def validate(graph):
    return list(_core.validate_json(json.dumps(graph)))
