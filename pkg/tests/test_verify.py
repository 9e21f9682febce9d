from __future__ import annotations

import json
import random

import pytest

from graphflow import verify as vf


@pytest.mark.parametrize("scope", vf.SCOPES)
def test_each_scope_passes(scope):
    report = vf.run(scope, seed=2, max_d=5, count=8)
    assert report.outcomes and all(o.scope == scope for o in report.outcomes)
    assert report.ok, report.failures()


def test_every_property_is_registered_once():
    names = [p.name for p in vf.PROPERTIES]
    assert len(names) == len(set(names)) == len(vf.BY_NAME)
    assert {p.scope for p in vf.PROPERTIES} == set(vf.SCOPES)


@pytest.mark.parametrize("prop", vf.PROPERTIES, ids=lambda p: p.name)
def test_instances_are_json_and_replayable(prop):
    inst = prop.generate(random.Random(0), 5)
    back = json.loads(json.dumps(inst))
    assert vf.replay({"property": prop.name, "instance": back}) is None


def test_streams_are_per_property():
    # running one scope alone draws the same instances as running everything
    alone = vf.run("matrix", seed=4, max_d=5, count=3).to_dict()["properties"]
    full = [p for p in vf.run("all", seed=4, max_d=5, count=3).to_dict()["properties"]
            if p["scope"] == "matrix"]
    assert alone == full


def test_fact_table_counts():
    report = vf.run("chain", seed=9, max_d=4, count=4)
    assert sorted(report.facts) == list(range(1, 14))
    assert all(v == [4, 4] for v in report.facts.values())
    assert "Fact  passed/total" in vf.format_table(report)


def test_crash_is_reported_as_failure():
    def boom(inst):
        raise ZeroDivisionError("kaboom")

    prop = vf.Property("boom", "graph", vf.PROPERTIES[0].generate, boom)
    report = vf.run("graph", seed=0, count=2, properties=(prop,))
    assert not report.ok
    [w] = report.failures()
    assert w["detail"] == "ZeroDivisionError: kaboom" and w["property"] == "boom"


def test_unknown_scope():
    with pytest.raises(ValueError):
        vf.run("everything")


def test_unknown_replay_property():
    with pytest.raises(ValueError):
        vf.replay({"property": "nope", "instance": {}})
