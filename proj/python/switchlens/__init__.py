"""Task-interruption analytics: mining disruptiveness patterns and resumption cues."""

import json
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence

from . import _switchlens
from ._switchlens import SwitchlensError

__all__ = [
    "Store",
    "SwitchlensError",
    "mine",
    "mine_cue_sequences",
    "recommend_order",
    "render",
    "replay",
]


def _ratio(value) -> str:
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    return str(value)


def _thresholds(thresholds: Optional[Mapping[str, object]]) -> str:
    if not thresholds:
        return ""
    return ",".join(f"{k}={v}" for k, v in thresholds.items())


def mine(records: Iterable[Mapping], task_type: str, min_support=0.5, min_confidence=0.5,
         thresholds: Optional[Mapping[str, object]] = None, maximal_only: bool = False) -> list:
    """Mine rules from raw records.

    Each record is ``{"task_type": ..., "characteristics": ["initiator=self", ...],
    "measures": {"D1": 2, "D2": 240.0, "D3": 900.0}}``. Thresholds map a measure to a
    number or ``"median"``. Returns narrative payloads ``{text, kind, rule}``.
    """
    out = _switchlens.mine_records(json.dumps(list(records)), task_type, _ratio(min_support),
                                   _ratio(min_confidence), _thresholds(thresholds), maximal_only)
    return json.loads(out)


def mine_cue_sequences(sessions: Sequence[Sequence[str]], min_support=0.5, max_len: int = 4) -> list:
    return json.loads(_switchlens.mine_cue_sequences([list(s) for s in sessions], _ratio(min_support), max_len))


def recommend_order(task_type: str, rules: Sequence[Mapping] = ()) -> list:
    return _switchlens.recommend_order(task_type, json.dumps(list(rules)))


def replay(descriptor: Mapping, events: Sequence[Mapping]) -> dict:
    """Final state and disruptiveness measures of one task's event log."""
    return json.loads(_switchlens.replay(json.dumps(dict(descriptor)), json.dumps(list(events))))


def render(rule: Mapping) -> str:
    return _switchlens.render(json.dumps(dict(rule)))


class Store:
    """Append-only task log; in memory unless a path is given."""

    def __init__(self, path: Optional[str] = None):
        self._store = _switchlens.Store(path)

    def ingest(self, lines: Iterable) -> dict:
        encoded = [line if isinstance(line, str) else json.dumps(line) for line in lines]
        return json.loads(self._store.ingest(encoded))

    def export(self) -> str:
        return self._store.export()

    def mine(self, task_type: str, min_support=0.5, min_confidence=0.5,
             thresholds: Optional[Mapping[str, object]] = None,
             characteristics: Sequence[str] = (), maximal_only: bool = False) -> list:
        out = self._store.mine(task_type, _ratio(min_support), _ratio(min_confidence),
                               _thresholds(thresholds), list(characteristics), maximal_only)
        return json.loads(out)

    def communication_graph(self, start: Optional[str] = None, end: Optional[str] = None) -> dict:
        return json.loads(self._store.graph(start, end))

    def task_state(self, task_id: str) -> dict:
        return json.loads(self._store.task_state(task_id))
