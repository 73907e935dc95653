"""P1 finite elements: meshing, assembly invariants, convergence."""

import math

import numpy as np
import pytest

from starspec import fem
from starspec.exact import PI2, box_eigs, equilateral_eigs
from starspec.geom import BC, EdgeRole, Polygon, simple_polygon

DN_SQUARE = Polygon(
    vertices=((0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)),
    edge_tags=(BC.DIRICHLET, BC.NEUMANN, BC.NEUMANN, BC.NEUMANN),
    edge_roles=(EdgeRole.WALL, EdgeRole.CUT, EdgeRole.CUT, EdgeRole.CUT),
)

NEUMANN_TRIANGLE = Polygon(
    vertices=((0.0, 0.0), (1.0, 0.0), (0.5, math.sqrt(3) / 2)),
    edge_tags=(BC.NEUMANN,) * 3,
    edge_roles=(EdgeRole.CUT,) * 3,
)


class TestMeshing:
    def test_triangulate_respects_target(self):
        mesh = fem.triangulate(DN_SQUARE, 0.25)
        assert mesh.max_diameter() <= 0.25 + 1e-12
        assert mesh.min_angle_deg() > 0

    def test_triangle_areas_sum_to_polygon_area(self):
        for poly in (DN_SQUARE, NEUMANN_TRIANGLE):
            mesh = fem.triangulate(poly, 0.3)
            assert mesh.areas().sum() == pytest.approx(poly.area(), rel=1e-12)

    def test_refine_quarters_triangles(self):
        mesh = fem.triangulate(DN_SQUARE, 0.5)
        fine = fem.refine(mesh)
        assert fine.triangles.shape[0] == 4 * mesh.triangles.shape[0]
        assert fine.areas().sum() == pytest.approx(mesh.areas().sum(), rel=1e-12)
        assert fine.max_diameter() == pytest.approx(mesh.max_diameter() / 2, rel=1e-12)

    def test_boundary_tags_survive_refinement(self):
        mesh = fem.triangulate(DN_SQUARE, 0.5)
        fine = fem.refine(mesh)
        # total boundary length per tag is conserved
        def tag_length(m, tag):
            total = 0.0
            for (a, b), t in zip(m.boundary_edges, m.boundary_tags):
                if t is tag:
                    total += np.linalg.norm(m.nodes[a] - m.nodes[b])
            return total

        for tag in (BC.DIRICHLET, BC.NEUMANN):
            assert tag_length(fine, tag) == pytest.approx(tag_length(mesh, tag), rel=1e-12)

    def test_nonconvex_polygon_meshes(self):
        ell = simple_polygon([(0, 0), (2, 0), (2, 1), (1, 1), (1, 2), (0, 2)])
        mesh = fem.triangulate(ell, 0.25)
        assert mesh.areas().sum() == pytest.approx(3.0, rel=1e-12)


class TestAssembly:
    def test_mass_sums_to_area(self):
        for poly in (DN_SQUARE, NEUMANN_TRIANGLE):
            prob = fem.assemble(fem.triangulate(poly, 0.25))
            assert prob.total_mass == pytest.approx(poly.area(), rel=1e-12)

    def test_stiffness_kernel_is_constants_without_dirichlet(self):
        prob = fem.assemble(fem.triangulate(NEUMANN_TRIANGLE, 0.3))
        ones = np.ones(prob.stiffness.shape[0])
        assert np.abs(prob.stiffness @ ones).max() < 1e-12

    def test_dirichlet_nodes_eliminated(self):
        mesh = fem.triangulate(DN_SQUARE, 0.25)
        prob = fem.assemble(mesh)
        assert prob.stiffness.shape[0] == len(prob.free_nodes)
        assert prob.stiffness.shape[0] < mesh.nodes.shape[0]

    def test_translation_invariance(self):
        shifted = Polygon(
            vertices=tuple((x + 3.0, y - 2.0) for x, y in DN_SQUARE.vertices),
            edge_tags=DN_SQUARE.edge_tags,
            edge_roles=DN_SQUARE.edge_roles,
        )
        a = fem.lowest_eigs(fem.assemble(fem.triangulate(DN_SQUARE, 0.25)), 3).values
        b = fem.lowest_eigs(fem.assemble(fem.triangulate(shifted, 0.25)), 3).values
        assert b == pytest.approx(a, rel=1e-9)

    def test_rotation_invariance(self):
        th = 0.7
        R = lambda p: (
            p[0] * math.cos(th) - p[1] * math.sin(th),
            p[0] * math.sin(th) + p[1] * math.cos(th),
        )
        rotated = Polygon(
            vertices=tuple(R(p) for p in DN_SQUARE.vertices),
            edge_tags=DN_SQUARE.edge_tags,
            edge_roles=DN_SQUARE.edge_roles,
        )
        a = fem.lowest_eigs(fem.assemble(fem.triangulate(DN_SQUARE, 0.25)), 3).values
        b = fem.lowest_eigs(fem.assemble(fem.triangulate(rotated, 0.25)), 3).values
        assert b == pytest.approx(a, rel=1e-8)


class TestConvergence:
    def test_upper_bound_and_nesting_on_dn_square(self):
        exact_vals = np.array(box_eigs((1.0, 1.0), ("NN", "DN"), 3).values)
        spec = fem.dn_spectrum(DN_SQUARE, 3, 3, 0.25)
        prev = None
        for vals in spec.level_values:
            assert np.all(vals >= exact_vals - 1e-10)  # conforming upper bounds
            if prev is not None:
                assert np.all(vals <= prev + 1e-10)  # nested spaces
            prev = vals

    def test_observed_order_is_quadratic(self):
        spec = fem.dn_spectrum(DN_SQUARE, 2, 4, 0.25)
        orders = np.atleast_1d(spec.observed_order)
        assert np.all(orders > 1.8)
        assert np.all(orders < 2.2)

    def test_extrapolation_accuracy_square(self):
        exact_vals = np.array(box_eigs((1.0, 1.0), ("NN", "DN"), 2).values)
        spec = fem.dn_spectrum(DN_SQUARE, 2, 4, 0.25)
        rel = abs(spec.extrapolated[1] - exact_vals[1]) / exact_vals[1]
        assert rel < 0.005

    def test_extrapolation_accuracy_neumann_triangle(self):
        lam2 = equilateral_eigs(1.0, "neumann", 2).values[1]
        spec = fem.dn_spectrum(NEUMANN_TRIANGLE, 2, 4, 0.25)
        rel = abs(spec.extrapolated[1] - lam2) / lam2
        assert rel < 0.005

    def test_deterministic_repeat(self):
        a = fem.dn_spectrum(DN_SQUARE, 2, 3, 0.25)
        b = fem.dn_spectrum(DN_SQUARE, 2, 3, 0.25)
        assert a.extrapolated[1] == b.extrapolated[1]


class TestSolvers:
    def test_sparse_path_matches_dense(self, monkeypatch):
        mesh = fem.triangulate(DN_SQUARE, 0.25)
        prob = fem.assemble(mesh)
        monkeypatch.setattr(fem, "DENSE_DOF_LIMIT", 1)  # force the sparse solver
        import scipy.linalg

        dense = scipy.linalg.eigh(
            prob.stiffness.toarray(),
            prob.mass.toarray(),
            eigvals_only=True,
            subset_by_index=(0, 2),
        )
        got = np.array(fem.lowest_eigs(prob, 3).values)
        assert got == pytest.approx(dense, rel=1e-8)

    def test_too_many_eigs_raises(self):
        prob = fem.assemble(fem.triangulate(DN_SQUARE, 0.6))
        with pytest.raises(fem.SolverFailure):
            fem.lowest_eigs(prob, 10_000)


class TestDumps:
    def test_text_dump_contains_counts(self):
        mesh = fem.triangulate(DN_SQUARE, 0.5)
        dump = fem.mesh_text_dump(mesh)
        assert str(mesh.nodes.shape[0]) in dump

    def test_svg_has_triangles(self):
        mesh = fem.triangulate(DN_SQUARE, 0.5)
        svg = fem.mesh_svg(mesh)
        assert svg.startswith("<svg") or "<svg" in svg
        assert "polygon" in svg or "path" in svg or "line" in svg
