from __future__ import annotations

import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from storyline import StorylineLayout
from storyline.exceptions import StageError
from storyline.ingest import Event, EventSequence

from conftest import make_gs


def _events():
    rows = [(0, "a", "b"), (1, "b", "c"), (2, "a", "c"), (3, "c", "d"), (4, "a", "d"), (5, "b", "d")]
    return EventSequence.from_events(Event(float(t), u, v) for t, u, v in rows)


def test_params_and_clone():
    est = StorylineLayout(ordering="dendrogram", window_count=3)
    params = est.get_params()
    assert params["ordering"] == "dendrogram" and params["window_count"] == 3
    twin = clone(est)
    assert twin.get_params() == params
    est.set_params(ordering="identity")
    assert est.ordering == "identity"


def test_fit_transform():
    est = StorylineLayout(window_count=3)
    layout = est.fit_transform(_events())
    assert layout is est.transform(_events())
    assert len(layout.windows) == 3
    assert est.score() == -est.metrics_.clutter
    assert set(est.stage_millis_) == {"ingest", "order", "align", "place"}


def test_not_fitted():
    with pytest.raises(NotFittedError):
        StorylineLayout().transform(_events())


@pytest.mark.parametrize("method", ["spectral", "dendrogram", "identity"])
def test_orderings(method):
    est = StorylineLayout(ordering=method, breaks=[2.5]).fit(_events())
    assert [sorted(o) for o in est.ordering_.orders] == [sorted(w.nodes) for w in est.graphs_]
    if method == "dendrogram":
        assert est.dendrogram_ is not None


def test_given_order_verbatim():
    gs = make_gs([(["c", "a", "b"], [("a", "b", 1.0)]), (["b", "a"], [])])
    orders = [["b", "c", "a"], ["a", "b"]]
    est = StorylineLayout(ordering="given", given_order={"orders": orders}, align_weight_mode="none").fit(gs)
    for i, order in enumerate(orders):
        ys = sorted((p.y, p.id) for p in est.layout_.window_nodes(i))
        assert [v for _, v in ys] == order


def test_alignment_weight_file():
    gs = make_gs([(["a", "b"], []), (["b", "a"], [])])
    est = StorylineLayout(ordering="given", given_order=[["a", "b"], ["b", "a"]],
                          align_weight_mode="file", align_weights={"weights": {"b": 5.0}, "default": 1.0}).fit(gs)
    assert est.selections_[(0, 1)] == {"b"}


def test_continuation_and_discretize():
    gs = make_gs([(["a", "b"], [("a", "b", 1.0)]), (["c", "d"], [("c", "d", 1.0)]), (["a", "c"], [("a", "c", 1.0)])])
    est = StorylineLayout(continuation=True).fit(gs)
    assert "a" in est.graphs_[1].nodes
    with pytest.raises(StageError, match="ingest: empty sequence"):
        StorylineLayout(discretize=True).fit(make_gs([(["a"], [])]))


@pytest.mark.parametrize("kw, msg", [
    ({"ordering": "bogus"}, "ordering must be one of"),
    ({"ordering": "given"}, "needs given_order"),
    ({"align_weight_mode": "file"}, "needs align_weights"),
    ({"continuity_weight": 0}, "continuity_weight"),
    ({"min_separation": 0}, "min_separation"),
    ({"breaks": [1.0], "window_count": 2}, "not both"),
])
def test_invalid_params(kw, msg):
    with pytest.raises(StageError, match=msg) as info:
        StorylineLayout(**kw).fit(_events())
    assert info.value.stage == "ingest"


def test_empty_events():
    with pytest.raises(StageError, match="empty sequence"):
        StorylineLayout().fit(EventSequence.from_events([]))


def test_order_stage_error_names_stage():
    gs = make_gs([(["a", "b"], [])])
    with pytest.raises(StageError) as info:
        StorylineLayout(ordering="given", given_order=[["a"]]).fit(gs)
    assert info.value.stage == "order" and "missing" in str(info.value)


def test_cyclic_override():
    gs = make_gs([(["a"], [])] * 3)
    assert StorylineLayout(cyclic=True).fit(gs).graphs_.cyclic


def test_rejects_other_input():
    with pytest.raises(StageError):
        StorylineLayout().fit([1, 2, 3])
