import os
from fractions import Fraction

import pytest

import switchlens

DATA = os.environ.get("SWITCHLENS_DATA_DIR", os.path.join(os.path.dirname(__file__), "..", "..", "data"))
SENTENCE = "Self-switching a requirements modeling task in the morning contributes to a greater interruption lag"


def case_study_lines():
    with open(os.path.join(DATA, "case_study.jsonl"), encoding="utf-8") as f:
        return f.read().splitlines()


def test_store_round_trip_and_mining():
    store = switchlens.Store()
    report = store.ingest(case_study_lines())
    assert report["accepted"] == 46
    assert report["rejected"] == []
    assert store.export().splitlines() == case_study_lines()
    rules = store.mine("modeling", 0.5, 0.5, thresholds={"D3": 600},
                       characteristics=["initiator", "time_of_day", "context_switch"], maximal_only=True)
    assert len(rules) == 1
    assert rules[0]["text"] == SENTENCE + " (confidence 100%, support 60%)"
    assert rules[0]["rule"]["support_exact"] == "3/5"
    assert switchlens.render(rules[0]["rule"]) == rules[0]["text"]


def test_raw_records():
    rows = [
        ("self", "morning", 900), ("self", "morning", 1200), ("self", "morning", 700),
        ("external", "afternoon", 200), ("external", "evening", 300),
    ]
    records = [{"task_type": "modeling", "characteristics": [f"initiator={i}", f"time_of_day={t}"],
                "measures": {"D3": d3}} for i, t, d3 in rows]
    rules = switchlens.mine(records, "modeling", Fraction(1, 2), "1/2", thresholds={"D3": 600}, maximal_only=True)
    assert [r["rule"]["antecedent"] for r in rules] == [["initiator=self", "time_of_day=morning"]]
    with pytest.raises(switchlens.SwitchlensError):
        switchlens.mine([{"task_type": "modeling", "characteristics": ["D1=high"]}], "modeling")


def test_replay_and_graph():
    store = switchlens.Store()
    store.ingest(case_study_lines())
    m1 = store.task_state("M1")
    assert m1["state"]["phase"] == "Completed"
    assert m1["measures"]["d1_fragments"] == 2
    graph = store.communication_graph()
    weights = {(e["from"], e["to"]): e["weight"] for e in graph["edges"]}
    assert weights == {("alice", "alice"): 3, ("bob", "alice"): 1, ("carol", "alice"): 1}

    desc = {"task_id": "T", "task_type": "analysis"}
    kinds = ["Started", "SwitchRequested", "Resumed"]
    events = [{"task_id": "T", "at": f"2024-03-04T09:0{i}:00Z", "kind": k, **({"initiator": "self"} if k == "SwitchRequested" else {})}
              for i, k in enumerate(kinds)]
    with pytest.raises(switchlens.SwitchlensError):
        switchlens.replay(desc, events)


def test_cues():
    rules = switchlens.mine_cue_sequences([["Annotation", "Thumbnail"], ["Annotation", "Verbal", "Thumbnail"],
                                          ["Thumbnail", "Annotation"]], "0.6")
    assert [r["sequence"] for r in rules] == [["Annotation", "Thumbnail"]]
    assert rules[0]["support_exact"] == "2/3"
    assert switchlens.recommend_order("modeling") == ["Annotation", "Thumbnail", "Verbal", "Eye", "BehaviorGraph"]
    eye_verbal = {"sequence": ["Eye", "Verbal"], "support": 1, "confidence": 1, "task_type": "modeling"}
    assert switchlens.recommend_order("modeling", [eye_verbal])[:2] == ["Eye", "Verbal"]
