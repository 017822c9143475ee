"""Bundled fixtures and synthetic generators.

Every loader returns ``(graph_or_events, options)`` where ``options`` is a
dict of :class:`~storyline.estimator.StorylineLayout` keyword arguments
that suit the data (for instance the fixed ordering of a weekly poll).
"""

from __future__ import annotations

from importlib import resources

import numpy as np

from . import ingest

__all__ = [
    "FIXTURES",
    "data_path",
    "load_macbeth",
    "load_midsummer",
    "load_yeast_cycle",
    "load_weekly_poll",
    "load_crossings_toy",
    "fraternity_rankings",
    "load_fraternity",
    "load_fixture",
    "random_events",
]


def data_path(name: str):
    return resources.files("storyline").joinpath("data", name)


def _read(name: str) -> str:
    return data_path(name).read_text(encoding="utf-8")


def _dialogue(name: str):
    return ingest.dialogue_events(ingest.parse_dialogue(_read(name))), {}


def load_macbeth():
    """Abridged speaker turns of *Macbeth*, windowed by act."""
    return _dialogue("macbeth.txt")


def load_midsummer():
    """Abridged speaker turns of *A Midsummer Night's Dream*, windowed by act."""
    return _dialogue("midsummer.txt")


def load_yeast_cycle():
    """Cyclic graph sequence over the states of a budding-yeast cell-cycle Boolean model.

    Each window holds the proteins active in one state and the regulatory
    interactions among them; the last state wraps around to the first.
    """
    return ingest.parse_graph_sequence(_read("yeast_cycle.json")), {}


def load_weekly_poll():
    """Synthetic weekly top-10 poll with a fixed rank ordering.

    The storylines keep the poll's own order; alignment favours teams that
    hold or improve their rank so drops show up as long descents.
    """
    gs, orders = ingest.parse_poll_csv(_read("weekly_poll.csv"))
    return gs, {"ordering": "given", "given_order": orders, "align_weight_mode": "rank-increase"}


def load_crossings_toy():
    """Two windows drawn with exactly one node-node and one node-edge crossing."""
    gs = ingest.parse_graph_sequence(_read("crossings_toy.json"))
    orders = [list(win.nodes) for win in gs]
    return gs, {"ordering": "given", "given_order": orders}


def fraternity_rankings(n_members: int = 17, n_weeks: int = 15, n_groups: int = 4, seed: int = 0) -> list[np.ndarray]:
    """Synthetic friendship-ranking study.

    Members sit in a latent 2-D space around ``n_groups`` drifting group
    centres; each week every member ranks the others 1..n-1 by noisy
    distance.  Returns ``n_weeks`` integer matrices with a zero diagonal.
    """
    rng = np.random.default_rng(seed)
    group = np.arange(n_members) % n_groups
    centres = rng.normal(0.0, 3.0, size=(n_groups, 2))
    offset = rng.normal(0.0, 0.6, size=(n_members, 2))
    mats = []
    for _ in range(n_weeks):
        centres += rng.normal(0.0, 0.4, size=centres.shape)
        offset += rng.normal(0.0, 0.25, size=offset.shape)
        pos = centres[group] + offset
        dist = np.linalg.norm(pos[:, None, :] - pos[None, :, :], axis=-1)
        dist += rng.exponential(0.3, size=dist.shape)
        np.fill_diagonal(dist, np.inf)
        ranks = np.argsort(np.argsort(dist, axis=1, kind="stable"), axis=1, kind="stable") + 1
        np.fill_diagonal(ranks, 0)
        mats.append(ranks.astype(int))
    return mats


def load_fraternity(epsilon: int = 2, seed: int = 0):
    mats = fraternity_rankings(seed=seed)
    return ingest.rankings_to_graphs(mats, epsilon=epsilon), {}


FIXTURES = {
    "macbeth": load_macbeth,
    "midsummer": load_midsummer,
    "weekly-poll": load_weekly_poll,
    "fraternity": load_fraternity,
    "yeast-cycle": load_yeast_cycle,
}


def load_fixture(name: str):
    try:
        return FIXTURES[name]()
    except KeyError:
        raise KeyError(f"unknown fixture {name!r}; choose from {', '.join(FIXTURES)}") from None


def random_events(n_nodes: int = 1000, n_events: int = 5000, seed: int = 0) -> ingest.EventSequence:
    """Uniform random contact sequence on ``n_nodes`` ids over t in [0, 1)."""
    rng = np.random.default_rng(seed)
    t = np.sort(rng.random(n_events))
    u = rng.integers(0, n_nodes, n_events)
    v = (u + rng.integers(1, n_nodes, n_events)) % n_nodes
    ids = [f"n{k}" for k in range(n_nodes)]
    events = [ingest.Event(float(tt), ids[a], ids[b]) for tt, a, b in zip(t, u, v)]
    return ingest.EventSequence.from_events(events, nodes=ids)
