"""Bound rules: soundness against exact spectra, trace replay, direct sums."""

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from starspec import bounds as bnd
from starspec.bounds import (
    ContainmentViolation,
    Direction,
    DirectionMismatch,
    SpectralBound,
    TraceStep,
    bounds_from_eiglist,
    branch_threshold_floor,
    check_containment,
    direct_sum_bounds,
    direct_sum_eigs,
    dirichlet_monotone,
    dn_bracket,
    lower_bound,
    neumann_enclosure,
    neumann_enclosure_bounds,
    replay_bound,
    scale_bound,
    trace_to_json,
    upper_bound,
)
from starspec.exact import PI2, EigList, box_eigs, cross_section_threshold, equilateral_eigs, interval_eigs
from starspec.geom import CrossSection, simple_polygon

REPLAY_REL = 1e-13


def dn_square_lowers(k=3):
    eigs = box_eigs((1.0, 1.0), ("NN", "DN"), k)
    return bounds_from_eiglist(
        "dn-square", eigs, Direction.LOWER, "box-eig",
        {"dims": [1.0, 1.0], "bcs": ["NN", "DN"]},
    )


class TestRules:
    def test_dn_bracket_transports_lower_bounds(self):
        out = dn_bracket(dn_square_lowers(), "waveguide")
        assert [b.operator for b in out] == ["waveguide"] * 3
        assert out[1].value == pytest.approx(5 * PI2 / 4, rel=1e-12)
        assert out[1].trace[-1].rule == "dn-bracket"

    def test_dn_bracket_rejects_uppers(self):
        eigs = box_eigs((1.0, 1.0), ("DD", "DD"), 2)
        ups = bounds_from_eiglist("sq", eigs, Direction.UPPER, "box-eig", {"dims": [1, 1], "bcs": ["DD", "DD"]})
        with pytest.raises(DirectionMismatch):
            dn_bracket(ups, "waveguide")

    def test_dirichlet_monotone_rejects_lowers(self):
        with pytest.raises(DirectionMismatch):
            dirichlet_monotone(dn_square_lowers(), "waveguide")

    def test_scale_bound_rectangle_oracle(self):
        # bound for the (2, 3) Dirichlet rectangle from the unit square under
        # diag(2, 3); compare against the exact scaled spectrum
        src = bounds_from_eiglist(
            "unit-square",
            box_eigs((1.0, 1.0), ("DD", "DD"), 6),
            Direction.LOWER,
            "box-eig",
            {"dims": [1.0, 1.0], "bcs": ["DD", "DD"]},
        )
        scaled = scale_bound(src, (2.0, 3.0), "rect")
        exact_vals = box_eigs((2.0, 3.0), ("DD", "DD"), 6).values
        for b, ev in zip(scaled, exact_vals):
            assert b.value <= ev + 1e-12

    def test_scale_bound_is_sharp_for_isotropic_maps(self):
        src = bounds_from_eiglist(
            "unit-square",
            box_eigs((1.0, 1.0), ("DD", "DD"), 4),
            Direction.LOWER,
            "box-eig",
            {"dims": [1.0, 1.0], "bcs": ["DD", "DD"]},
        )
        scaled = scale_bound(src, (2.0, 2.0), "big-square")
        exact_vals = box_eigs((2.0, 2.0), ("DD", "DD"), 4).values
        for b, ev in zip(scaled, exact_vals):
            assert b.value == pytest.approx(ev, rel=1e-12)

    def test_scale_bound_cap_at_one_caps_factor(self):
        src = [lower_bound("x", 1, 10.0, "interval-eig", {"length": 1.0, "bc": "DD", "index": 1})]
        capped = scale_bound(src, (0.5, 1.0), "y", cap_at_one=True)[0]
        assert capped.value == pytest.approx(10.0)
        sharp = scale_bound(src, (0.5, 1.0), "y")[0]
        assert sharp.value == pytest.approx(10.0)  # min(4, 1) capped by axis 2

    def test_scale_bound_rejects_nonpositive(self):
        with pytest.raises(bnd.NonPositiveCoeff):
            scale_bound(dn_square_lowers(), (0.0, 1.0), "y")

    def test_neumann_enclosure_square_oracle(self):
        # mixed problem on the unit square vs the all-Neumann square: the
        # Neumann values never exceed the mixed ones
        neu = box_eigs((1.0, 1.0), ("NN", "NN"), 4)
        lows = neumann_enclosure("dn-square", None, None, neu)
        mixed = box_eigs((1.0, 1.0), ("NN", "DN"), 4).values
        for b, ev in zip(lows, mixed):
            assert b.value <= ev + 1e-12

    def test_neumann_enclosure_containment_violation(self):
        inner = simple_polygon([(0, 0), (2, 0), (2, 1), (0, 1)])
        outer = simple_polygon([(0, 0), (1, 0), (1, 1), (0, 1)])
        with pytest.raises(ContainmentViolation):
            neumann_enclosure("x", inner, outer, box_eigs((1.0, 1.0), ("NN", "NN"), 2))

    def test_neumann_enclosure_bounds_transport(self):
        inner = simple_polygon([(0.2, 0.2), (0.8, 0.2), (0.5, 0.8)])
        outer = simple_polygon([(0, 0), (1, 0), (1, 1), (0, 1)])
        lows = bounds_from_eiglist(
            "outer", box_eigs((1.0, 1.0), ("NN", "NN"), 2), Direction.LOWER,
            "box-eig", {"dims": [1.0, 1.0], "bcs": ["NN", "NN"]},
        )
        out = neumann_enclosure_bounds("inner-dn", inner, outer, lows)
        assert out[1].value == pytest.approx(PI2, rel=1e-12)
        assert out[1].trace[-1].rule == "neumann-enclosure"

    def test_containment_accepts_touching_boundary(self):
        inner = simple_polygon([(0, 0), (1, 0), (0.5, 0.5)])
        outer = simple_polygon([(0, 0), (1, 0), (1, 1), (0, 1)])
        check_containment(inner, outer)  # shared edge is fine

    def test_branch_floor_matches_threshold(self):
        for cs in (
            CrossSection.interval(1.0),
            CrossSection.interval(2.5),
            CrossSection.rectangle(1.0, 2.0),
            CrossSection.disk(0.5),
        ):
            b = branch_threshold_floor(cs)
            assert b.value == pytest.approx(cross_section_threshold(cs), rel=1e-12)
            assert b.direction is Direction.LOWER


class TestDirectSum:
    def test_merge_matches_sort_oracle(self):
        parts = [
            interval_eigs(1.0, "DD", 5),
            interval_eigs(2.0, "DN", 5),
            box_eigs((1.0, 1.5), ("DD", "NN"), 5),
        ]
        merged = direct_sum_eigs(parts, 8)
        oracle = sorted(v for p in parts for v in p.values)[:8]
        assert list(merged.values) == pytest.approx(oracle, rel=1e-12)

    def test_associative_and_commutative(self):
        a = interval_eigs(1.0, "DD", 4)
        b = interval_eigs(1.3, "NN", 4)
        c = interval_eigs(0.7, "DN", 4)
        v1 = direct_sum_eigs([direct_sum_eigs([a, b]), c], 6).values
        v2 = direct_sum_eigs([a, direct_sum_eigs([b, c])], 6).values
        v3 = direct_sum_eigs([c, b, a], 6).values
        assert list(v1) == pytest.approx(list(v2), rel=1e-12)
        assert list(v1) == pytest.approx(list(v3), rel=1e-12)

    def test_bound_merge_tail_extension_is_sound(self):
        # part one lists a single bound; indices beyond it must reuse that
        # value instead of pretending the part has no more spectrum
        one = [lower_bound("a", 1, 3.0, "interval-eig", {"length": 1, "bc": "DD", "index": 1})]
        two = [
            lower_bound("b", 1, 1.0, "interval-eig", {"length": 1, "bc": "NN", "index": 1}),
            lower_bound("b", 2, 10.0, "interval-eig", {"length": 1, "bc": "NN", "index": 2}),
        ]
        merged = direct_sum_bounds([one, two], "sum", 3)
        assert [b.value for b in merged] == pytest.approx([1.0, 3.0, 3.0])

    def test_bound_merge_rejects_mixed_directions(self):
        lo = [lower_bound("a", 1, 1.0, "interval-eig", {"length": 1, "bc": "DD", "index": 1})]
        hi = [upper_bound("b", 1, 2.0, "interval-eig", {"length": 1, "bc": "DD", "index": 1})]
        with pytest.raises((bnd.MixedDirections, DirectionMismatch)):
            direct_sum_bounds([lo, hi], "sum", 2)

    @given(
        st.lists(
            st.lists(st.floats(min_value=0.0, max_value=100.0), min_size=1, max_size=6),
            min_size=1,
            max_size=4,
        ),
        st.integers(min_value=1, max_value=8),
    )
    @settings(max_examples=80, deadline=None)
    def test_random_merges_match_tail_extended_oracle(self, groups, k):
        parts = []
        for gi, vals in enumerate(groups):
            vals = sorted(vals)
            parts.append(
                [
                    lower_bound(f"p{gi}", i + 1, v, "frozen", {"v": v})
                    for i, v in enumerate(vals)
                ]
            )
        merged = direct_sum_bounds(parts, "sum", k)
        oracle_pool = []
        for vals in (sorted(g) for g in groups):
            oracle_pool.extend(vals)
            oracle_pool.extend([vals[-1]] * max(0, k - len(vals)))
        oracle = sorted(oracle_pool)[:k]
        assert [b.value for b in merged] == pytest.approx(oracle, rel=1e-12)


class TestReplay:
    def test_catalog_pipelines_replay_identically(self):
        chains = []
        chains += dn_bracket(dn_square_lowers(), "waveguide")
        eq = bounds_from_eiglist(
            "tri", equilateral_eigs(2 * math.sqrt(3), "dirichlet", 4),
            Direction.LOWER, "equilateral-eig", {"side": 2 * math.sqrt(3), "bc": "dirichlet"},
        )
        chains += scale_bound(eq, (1.5, 1.0), "stretched")
        chains += [branch_threshold_floor(CrossSection.disk(0.5))]
        chains += direct_sum_bounds([dn_square_lowers(), dn_square_lowers(2)], "sum", 4)
        for b in chains:
            replayed = replay_bound(b)
            assert replayed == pytest.approx(b.value, rel=REPLAY_REL)

    def test_frozen_steps_replay_as_recorded(self):
        b = SpectralBound(
            "op", 1, 42.0, Direction.UPPER,
            (TraceStep("fem-upper", {"h0": 0.25}, 42.0),), 1e-8,
        )
        assert replay_bound(b) == 42.0

    def test_trace_serialization_round_trip_fields(self):
        b = dn_bracket(dn_square_lowers(), "wg")[0]
        js = trace_to_json(b)
        assert js[0]["rule"] == "box-eig"
        assert js[-1]["rule"] == "dn-bracket"
        d = bnd.bound_to_json(b)
        assert d["direction"] == "lower"
        assert d["index"] == 1


class TestConsistencyOnCatalog:
    def test_lower_rules_never_exceed_exact_values(self):
        # every lower-bound rule applied where the exact answer is known
        mixed = box_eigs((1.0, 1.0), ("NN", "DN"), 4).values
        for b, ev in zip(dn_square_lowers(4), mixed):
            assert b.value <= ev + 1e-12
        # scaling on rectangles
        src = bounds_from_eiglist(
            "s", box_eigs((1.0, 1.0), ("DD", "DD"), 5), Direction.LOWER,
            "box-eig", {"dims": [1.0, 1.0], "bcs": ["DD", "DD"]},
        )
        for c in ((1.5, 2.5), (3.0, 1.0), (1.0, 1.0)):
            got = scale_bound(src, c, "r")
            ev = box_eigs((c[0], c[1]), ("DD", "DD"), 5).values
            for b, e in zip(got, ev):
                assert b.value <= e + 1e-12
