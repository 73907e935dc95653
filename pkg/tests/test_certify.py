"""Certification layer: thresholds, counting, verdicts, sweeps, region."""

import math

import pytest

from starspec import bounds as bnd
from starspec import certify
from starspec.certify import (
    CertificationPlan,
    NoPipeline,
    Verdict,
    certify as run_certify,
    count_discrete,
    dn_lower_bounds,
    preset,
    region_inside,
    region_rows,
    threshold,
    y_alpha_certified_interval,
)
from starspec.exact import PI2, bessel_zero


class TestThreshold:
    def test_examples(self):
        assert threshold(certify.t_junction_config()) == pytest.approx(PI2, rel=1e-12)
        assert threshold(certify.rect_two_eigs_config(2.381, 2.041)) == pytest.approx(PI2, rel=1e-12)
        assert threshold(certify.cube_square_config()) == pytest.approx(2 * PI2, rel=1e-12)
        assert threshold(certify.cube_disk_config()) == pytest.approx(
            4 * bessel_zero(0.0, 1) ** 2, rel=1e-12
        )

    def test_minimum_over_branches(self):
        # a wider branch lowers the threshold: the bent guide with unit-width
        # branches keeps threshold pi^2 regardless of the angle
        for a in (0.5, 1.0, 1.4):
            assert threshold(certify.broken_config(a)) == pytest.approx(PI2, rel=1e-12)


class TestCounting:
    def test_exact_box_count_is_two(self):
        _, plan = preset("rect_two_eigs")
        n, ub = count_discrete(None, plan, PI2)
        assert n == 2
        assert ub[1].value < PI2 < ub[2].value

    def test_family_fact_records_assumption(self):
        plan = CertificationPlan(
            count_strategy="family_fact", lower_strategy="dn_square",
            params={"n": 1, "justification": "test"},
        )
        n, ub = count_discrete(None, plan, PI2)
        assert n == 1
        assert ub[0].trace[0].rule == "assumption"

    def test_unknown_strategies_raise(self):
        with pytest.raises(NoPipeline):
            count_discrete(None, CertificationPlan("nope", "dn_square"), PI2)
        with pytest.raises(NoPipeline):
            dn_lower_bounds(None, CertificationPlan("fem", "nope"), 2)
        with pytest.raises(NoPipeline):
            preset("nope")


class TestVerdicts:
    def test_rect_preset_certified_analytically(self):
        vcfg, plan = preset("rect_two_eigs")
        v = run_certify(vcfg, plan, name="rect")
        assert v.certified
        assert v.n_discrete == 2
        assert v.rigor == "analytic"
        assert v.margins["dn_gap"] > v.budget
        assert v.margins["count_gap"] > v.budget

    def test_cube_presets_certified(self):
        for name, gap in (("cube_square", 3 * PI2 / 4), ("cube_disk", None)):
            vcfg, plan = preset(name)
            v = run_certify(vcfg, plan, name=name)
            assert v.certified
            assert v.n_discrete == 1
            assert v.rigor == "numerically_assisted"  # counting is a family fact
            if gap is not None:
                assert v.margins["dn_gap"] == pytest.approx(gap, rel=1e-12)

    def test_broken_family_certifies_above_critical_angle(self):
        fact = {"n": 1, "justification": certify.BROKEN_EXISTENCE_NOTE}
        for alpha, want in ((1.0, True), (0.42, True), (0.3, False)):
            vcfg, plan = preset(
                "broken", alpha=alpha, count_strategy="family_fact", params=fact
            )
            v = run_certify(vcfg, plan, name=vcfg.name)
            assert v.certified is want
            if not want:
                assert v.margins["dn_gap"] <= v.budget

    def test_broken_margin_matches_closed_form(self):
        alpha = 1.0
        fact = {"n": 1, "justification": certify.BROKEN_EXISTENCE_NOTE}
        vcfg, plan = preset("broken", alpha=alpha, count_strategy="family_fact", params=fact)
        v = run_certify(vcfg, plan, name="b")
        odd_floor = PI2 * (1 + math.tan(alpha) ** 2 / 4)
        even_bound = 16 * PI2 / 9 * min(3 * math.tan(alpha) ** 2, 1.0)
        assert v.lower_bounds[1].value == pytest.approx(min(odd_floor, even_bound), rel=1e-12)

    def test_y_family_certifies_on_interval(self):
        fact = {"n": 1, "justification": "family"}
        for alpha, want in ((1.0, True), (0.8, False), (1.3, False)):
            vcfg, plan = preset(
                "y_alpha", alpha=alpha, count_strategy="family_fact", params=fact
            )
            v = run_certify(vcfg, plan, name=vcfg.name)
            assert v.certified is want

    def test_missing_lower_bounds_is_inconclusive(self, monkeypatch):
        vcfg, plan = preset("rect_two_eigs")
        monkeypatch.setattr(certify, "dn_lower_bounds", lambda *a, **k: [])
        v = run_certify(vcfg, plan, name="r")
        assert not v.certified
        assert "need" in v.reason

    def test_verdict_serialization(self):
        vcfg, plan = preset("rect_two_eigs")
        d = run_certify(vcfg, plan, name="rect").to_dict()
        assert d["verdict"] == "CertifiedNoResonance"
        assert d["n"] == 2
        for key in ("nu", "rigor", "margins", "budget", "lower_bounds", "upper_bounds"):
            assert key in d
        assert d["lower_bounds"][0]["direction"] == "lower"

    def test_traces_replay_to_reported_values(self):
        vcfg, plan = preset("rect_two_eigs")
        v = run_certify(vcfg, plan, name="rect")
        for b in list(v.lower_bounds) + list(v.upper_bounds):
            assert bnd.replay_bound(b) == pytest.approx(b.value, rel=1e-13)


class TestCrossingSymmetry:
    def test_parity_decomposition(self):
        # the waveguide count itself is supplied as a family fact here so the
        # parity bookkeeping can be checked without the finite-element step
        plan = CertificationPlan(
            count_strategy="family_fact",
            lower_strategy="crossing_symmetry",
            params={"n": 1, "justification": "anchored separately"},
        )
        v = run_certify(None, plan, name="crossing-sym")
        assert v.certified
        assert v.n_discrete == 1
        p = v.extra["parities"]
        assert v.extra["sum_njk"] == 1
        assert p["00"]["n_jk"] == 1
        assert p["11"]["n_jk"] == 0
        assert v.margins["parity_00_host_gap"] == pytest.approx(3 * PI2, rel=1e-12)
        assert v.margins["parity_11_host_gap"] == pytest.approx(PI2, rel=1e-12)
        assert v.margins["parity_01_host_gap"] == v.margins["parity_10_host_gap"]


class TestGeometryBuilders:
    def test_y_center_valid_across_the_angle_range(self):
        for alpha in (0.6, 0.9, math.pi / 3, 1.2, 1.45):
            vcfg = certify.y_alpha_config(alpha)
            assert vcfg.center.is_simple()
            assert vcfg.center.area() > 0
            assert len(vcfg.branches) == 3

    def test_y_junction_is_the_symmetric_case(self):
        vcfg = certify.y_junction_config()
        assert vcfg.center.n_edges == 3

    def test_rounded_corner_has_arc_wall(self):
        vcfg = certify.rounded_corner_config(math.pi / 2)
        assert vcfg.center.n_edges > 10  # polyline approximation of the arc
        assert len(vcfg.branches) == 2


class TestSweepHelpers:
    def test_first_certified(self):
        rows = [
            certify.SweepRow(0.3, PI2, False, None, -1.0, ""),
            certify.SweepRow(0.5, PI2, True, 1, 0.5, ""),
            certify.SweepRow(0.7, PI2, True, 1, 1.0, ""),
        ]
        assert certify.first_certified(rows) == 0.5
        assert certify.first_certified(rows[:1]) is None

    def test_y_interval_roots(self):
        a1, a2 = y_alpha_certified_interval()
        assert a1 == pytest.approx(0.9203379160993881, abs=1e-10)
        assert a2 == pytest.approx(1.1621584716973044, abs=1e-10)


class TestRegion:
    def test_membership_samples(self):
        assert region_inside(0.42, 0.49)
        assert not region_inside(0.1, 0.1)  # all strips too long: q1 small but q2 fails
        assert not region_inside(0.42, 0.3)  # third inequality violated
        assert not region_inside(0.5, 0.5)  # boundary of the admissible band
        assert not region_inside(-0.1, 0.2)

    def test_grid_rows_certify_inside_points(self):
        # the admissible set is a thin sliver near y = 1/2, so the grid must
        # be reasonably fine before any node lands inside
        rows = region_rows(100, 50)
        inside = [r for r in rows if r[2]]
        assert inside
        assert all(r[3] for r in inside)  # every inside point certifies n = 2
        assert all(not r[3] for r in rows if not r[2])
