from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, strategies as st

from storyline import alignment, ingest, ordering, placement
from storyline.alignment import AlignmentClasses
from storyline.exceptions import ConstraintCycleError
from storyline.ordering import Ordering
from storyline.placement import ConstraintDag
from storyline.simplex import assignment_cost, solve_ranks

from conftest import graph_sequences, make_gs
from oracles import exhaustive_min_cost, lp_min_cost, random_dag


def singleton_classes(o: Ordering) -> AlignmentClasses:
    return alignment.build_alignment_classes(o, {})


class TestConstraintDag:
    def test_single_span(self):
        gs = make_gs([(["a", "b"], [("a", "b", 5.0)])])
        o = ordering.identity_order(gs)
        dag = placement.build_constraint_dag(o, singleton_classes(o), gs)
        assert dag.arcs == ((0, 1, 5.0, 1),)

    def test_spanning_rule(self):
        gs = make_gs([(["a", "b", "c"], [("a", "c", 2.0)])])
        o = ordering.identity_order(gs)
        dag = placement.build_constraint_dag(o, singleton_classes(o), gs)
        assert dag.arcs == ((0, 1, 2.0, 1), (1, 2, 2.0, 1))

    def test_aligned_across_windows(self):
        gs = make_gs([(["a", "b"], []), (["a", "b"], [])])
        o = ordering.identity_order(gs)
        cls = alignment.build_alignment_classes(o, {(0, 1): {"a"}})
        dag = placement.build_constraint_dag(o, cls, gs)
        assert dag.n_vertices == 3
        A = cls(0, "a")
        assert sorted((t, h) for t, h, *_ in dag.arcs) == [(A, cls(0, "b")), (A, cls(1, "b"))]

    def test_parallel_arcs_merge(self):
        gs = make_gs([(["a", "b"], [("a", "b", 1.0)]), (["a", "b"], [("a", "b", 2.0)])])
        o = ordering.identity_order(gs)
        cls = alignment.build_alignment_classes(o, {(0, 1): {"a", "b"}})
        dag = placement.build_constraint_dag(o, cls, gs)
        assert dag.arcs == ((0, 1, 3.0, 1),)

    def test_cycle_detected(self):
        gs = make_gs([(["a", "b"], []), (["b", "a"], [])])
        o = ordering.identity_order(gs)
        cls = alignment.build_alignment_classes(o, {(0, 1): {"a", "b"}})
        with pytest.raises(ConstraintCycleError) as info:
            placement.build_constraint_dag(o, cls, gs)
        assert info.value.cycle[0] == info.value.cycle[-1]

    @given(st.integers(0, 2**31))
    def test_spanning_weights_oracle(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(2, 8))
        names = [f"n{k}" for k in range(n)]
        edges = [(names[a], names[b], float(rng.integers(1, 5)))
                 for a in range(n) for b in range(a + 1, n) if rng.random() < 0.4]
        gs = make_gs([(names, edges)])
        o = ordering.identity_order(gs)
        dag = placement.build_constraint_dag(o, singleton_classes(o), gs)
        for j, (t, h, w, m) in enumerate(dag.arcs):
            expect = sum(ew for a, b, ew in edges if names.index(a) <= j < names.index(b))
            assert (t, h, m) == (j, j + 1, 1) and w == expect


class TestSimplex:
    def test_single_arc(self):
        rank, _ = solve_ranks(2, [0], [1], [1], [1])
        assert rank == [0, 1]

    def test_chain_with_shortcut(self):
        T, H, W, M = [0, 1, 0], [1, 2, 2], [1, 1, 10], [1, 1, 1]
        rank, _ = solve_ranks(3, T, H, W, M)
        assert rank == [0, 1, 2] and assignment_cost(rank, T, H, W) == 22
        assert exhaustive_min_cost(3, T, H, W, M, bound=4) == 22

    def test_zero_weight_slack(self):
        rank, _ = solve_ranks(3, [0, 1], [2, 2], [0, 5], [1, 1])
        assert min(rank) == 0 and rank[2] - rank[1] == 1 and rank[2] - rank[0] >= 1

    @given(st.integers(0, 2**31))
    def test_matches_lp(self, seed):
        rng = np.random.default_rng(seed)
        n, T, H, W, M = random_dag(rng, 14, 30, 10, 3)
        rank, _ = solve_ranks(n, T, H, W, M)
        for t, h, m in zip(T, H, M):
            assert rank[h] - rank[t] >= m
        assert assignment_cost(rank, T, H, W) == pytest.approx(lp_min_cost(n, T, H, W, M), abs=1e-6)

    @given(st.integers(0, 2**31))
    def test_matches_exhaustive(self, seed):
        rng = np.random.default_rng(seed)
        n, T, H, W, M = random_dag(rng, 7, 12)
        rank, _ = solve_ranks(n, T, H, W, M)
        assert assignment_cost(rank, T, H, W) == exhaustive_min_cost(n, T, H, W, M)

    def test_float_weights(self):
        rank, _ = solve_ranks(3, [0, 1, 0], [1, 2, 2], [0.5, 0.5, 2.5], [1, 1, 1])
        assert rank == [0, 1, 2]

    def test_deterministic(self):
        rng = np.random.default_rng(5)
        args = random_dag(rng, 40, 120, 10, 2)
        assert solve_ranks(*args) == solve_ranks(*args)

    def test_disconnected_components_normalised(self):
        rank, _ = solve_ranks(5, [0, 2], [1, 3], [1, 1], [1, 1])
        assert rank == [0, 1, 0, 1, 0]


class TestLevels:
    @given(graph_sequences())
    def test_feasible_and_aligned(self, gs):
        o = ordering.spectral_order(ingest.build_aggregate(gs))
        sel, cls, _ = alignment.align(gs, o)
        dag = placement.build_constraint_dag(o, cls, gs)
        lv = placement.network_simplex_levels(dag)
        assert min(lv.level, default=0) == 0
        for t, h, _, m in dag.arcs:
            assert lv[h] - lv[t] >= m
        lay = placement.assign_positions(gs, o, cls, lv)
        for i, order in enumerate(o.orders):
            ys = [lay.y(i, v) for v in order]
            assert all(a < b for a, b in zip(ys, ys[1:]))
        for (i, j), chosen in sel.items():
            for v in chosen:
                assert lay.y(i, v) == lay.y(j, v)

    @given(graph_sequences())
    def test_unaligned_not_longer_than_unit_spacing(self, gs):
        o = ordering.spectral_order(ingest.build_aggregate(gs))
        cls = singleton_classes(o)
        dag = placement.build_constraint_dag(o, cls, gs)
        solved = placement.network_simplex_levels(dag)
        unit = placement.unit_levels(o, cls)
        T, H, W = ([a[k] for a in dag.arcs] for k in range(3))
        assert solved.cost <= assignment_cost(unit.level, T, H, W) + 1e-9

    def test_wiggle_weight_pulls_unaligned_together(self):
        gs = make_gs([(["a", "b", "c"], [("a", "c", 1.0)]), (["c", "a"], [])])
        o = ordering.identity_order(gs)
        cls = singleton_classes(o)
        free = placement.network_simplex_levels(placement.build_constraint_dag(o, cls, gs))
        tight_dag = placement.build_constraint_dag(o, cls, gs, wiggle_weight=5.0)
        tight = placement.network_simplex_levels(tight_dag)
        assert tight_dag.n_vertices > tight_dag.n_classes
        assert len(tight.level) == cls.n_classes

        def wiggle(lv):
            return sum(abs(lv[cls(0, v)] - lv[cls(1, v)]) for v in "ac")

        assert wiggle(tight) <= wiggle(free)

    def test_min_separation(self):
        gs = make_gs([(["a", "b", "c"], [])])
        o = ordering.identity_order(gs)
        cls = singleton_classes(o)
        lv = placement.network_simplex_levels(placement.build_constraint_dag(o, cls, gs, min_separation=3))
        assert sorted(lv.level) == [0, 3, 6]


class TestPositions:
    def test_midpoint(self):
        gs = make_gs([(["a", "b"], [("a", "b", 1.0)])])
        o = ordering.identity_order(gs)
        cls = singleton_classes(o)
        lay = placement.assign_positions(gs, o, cls, placement.LevelAssignment((0, 1), 1.0), 100)
        assert {p.y for p in lay.nodes} == {0, 1} and lay.edges[0].x == 50

    def test_event_time(self):
        seq = ingest.EventSequence.from_events([ingest.Event(0.0, "x", "y"), ingest.Event(1.0, "a", "b"),
                                                ingest.Event(4.0, "x", "y")])
        gs = ingest.partition_windows(seq, breaks=[4.0])
        o = ordering.identity_order(gs)
        cls = singleton_classes(o)
        lv = placement.network_simplex_levels(placement.build_constraint_dag(o, cls, gs))
        lay = placement.assign_positions(gs, o, cls, lv, 100)
        ab = next(e for e in lay.edges if {e.u, e.v} == {"a", "b"})
        assert ab.x == pytest.approx(25.0)
        mid = placement.assign_positions(gs, o, cls, lv, 100, "midpoint")
        assert next(e for e in mid.edges if {e.u, e.v} == {"a", "b"}).x == 50.0

    def test_aligned_same_height(self):
        gs = make_gs([(["a", "b"], []), (["b"], [])])
        o = ordering.identity_order(gs)
        cls = alignment.build_alignment_classes(o, {(0, 1): {"b"}})
        lv = placement.network_simplex_levels(placement.build_constraint_dag(o, cls, gs))
        lay = placement.assign_positions(gs, o, cls, lv)
        assert lay.y(0, "b") == lay.y(1, "b") == 1
        assert lay.windows[1].x0 == placement.DEFAULT_WINDOW_WIDTH

    def test_bad_policy(self):
        gs = make_gs([(["a"], [])])
        o = ordering.identity_order(gs)
        with pytest.raises(ValueError):
            placement.assign_positions(gs, o, singleton_classes(o), placement.LevelAssignment((0,), 0.0), x_policy="x")

    def test_layout_dict_round_trip(self):
        gs = make_gs([(["a", "b"], [("a", "b", 2.0)]), (["b"], [])])
        o = ordering.identity_order(gs)
        cls = singleton_classes(o)
        lay = placement.assign_positions(gs, o, cls, placement.unit_levels(o, cls))
        assert placement.Layout.from_dict(lay.to_dict()) == lay


def test_dag_arc_map():
    dag = ConstraintDag(2, ((0, 1, 2.0, 1),))
    assert dag.arc_map() == {(0, 1): (2.0, 1)} and dag.n_classes == 2
