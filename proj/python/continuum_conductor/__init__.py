"""Placement decisions for process mining on the edge-cloud continuum.

Thin wrapper over the C++ core. Inputs that are documents (assessments,
topologies, plans, metrics) may be given as dicts, lists or JSON text;
results come back decoded.
"""

import json

from . import _core
from ._core import ConductorError

__all__ = [
    "ConductorError",
    "Service",
    "all_cloud_plan",
    "assess",
    "catalog",
    "compare",
    "discover",
    "fixture",
    "fixture_names",
    "plan",
    "simulate",
]


def _text(doc):
    if doc is None or isinstance(doc, str):
        return doc
    return json.dumps(doc)


def catalog():
    return json.loads(_core.catalog())


def fixture(name):
    return json.loads(_core.fixture(name))


def fixture_names():
    return list(_core.fixture_names())


def assess(answers, tie_break=None):
    return json.loads(_core.assess(_text(answers), tie_break))


def plan(answers, topology=None, demands=None, settings=None, rules=None, tie_break=None):
    return json.loads(
        _core.plan(_text(answers), _text(topology), _text(demands), _text(settings), _text(rules), tie_break)
    )


def all_cloud_plan(topology=None, settings=None, rules=None):
    return json.loads(_core.all_cloud_plan(_text(topology), _text(settings), _text(rules)))


def simulate(plan, scenario=None, topology=None):
    """Returns {"metrics": dict, "log": str, "footprint": str, "kpis": dict}."""
    raw = _core.simulate(_text(plan), _text(scenario), _text(topology))
    return {
        "metrics": json.loads(raw["metrics"]),
        "log": raw["log"],
        "footprint": raw["footprint"],
        "kpis": json.loads(raw["kpis"]),
    }


def compare(a, b):
    return json.loads(_core.compare(_text(a), _text(b)))


def discover(log, min_edge_count=1):
    return dict(_core.discover(log, min_edge_count))


class Service:
    """In-process HTTP API: handle(method, path, body) -> (status, dict)."""

    def __init__(self, fixtures_dir=None):
        self._svc = _core.Service(None if fixtures_dir is None else str(fixtures_dir))

    def handle(self, method, path, body=None):
        status, payload = self._svc.handle(method, path, _text(body) or "")
        return status, json.loads(payload)
