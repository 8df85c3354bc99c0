import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from circlepattern import surfaces
from circlepattern.covering import (
    derived_cover,
    homology_voltages,
    identity_cover,
    pullback_edge_data,
    pullback_vertex_data,
    unwrap,
)
from circlepattern.errors import EnumerationCapError, NotSimplicialError
from circlepattern.geometry import curvature_map
from circlepattern.kat import (
    check_base_necessary,
    check_cover,
    check_subsets,
    constant_curvature_interval,
    curvature_limit_base,
    kat_constraint,
    kat_rhs,
)

from . import oracles

PI = math.pi


class TestRhs:
    def test_tetrahedron_singleton(self, tetra):
        assert kat_rhs(tetra, np.zeros(6), {0}) == pytest.approx(-PI)

    def test_cover_singleton(self, torus_cover):
        assert kat_rhs(torus_cover.total, np.zeros(27), {0}) == pytest.approx(-4 * PI)

    def test_cover_complement(self, torus_cover):
        assert kat_rhs(torus_cover.total, np.zeros(27), set(range(1, 9))) == pytest.approx(-2 * PI)

    def test_needs_simplicial(self, torus_cover_p2):
        with pytest.raises(NotSimplicialError):
            kat_rhs(torus_cover_p2.total, np.zeros(12), {0})

    def test_improper(self, tetra):
        with pytest.raises(ValueError):
            kat_rhs(tetra, np.zeros(6), {0, 1, 2, 3})

    def test_vectorized_matches_reference(self, torus_cover, rng):
        tot = torus_cover.total
        phi = rng.uniform(0, PI / 2, tot.n_edges)
        K = rng.normal(size=tot.n_vertices)
        worst, viol, counts, _ = check_subsets(tot, phi, K, max_reported=10**6)
        ref = [kat_constraint(tot, phi, K, I) for I in oracles.all_proper_subsets(9)]
        assert counts[0] == len(ref) == 510
        assert worst.slack == pytest.approx(min(c.slack for c in ref), abs=1e-12)
        assert sorted(v.subset for v in viol) == sorted(c.subset for c in ref if c.slack <= 1e-9)
        for c in ref[::17]:
            assert c.rhs == pytest.approx(oracles.kat_rhs(tot, phi, c.subset), abs=1e-12)


class TestCheckCover:
    def test_flat_torus_feasible(self, torus_cover):
        v = check_cover(torus_cover, np.zeros(3), [0.0], "euclidean")
        assert v.feasible and v.gauss_bonnet_ok and v.subsets_checked == 510
        assert v.worst.slack > 0

    def test_all_rhs_negative(self, torus_cover):
        tot = torus_cover.total
        rhs = [oracles.kat_rhs(tot, np.zeros(27), I) for I in oracles.all_proper_subsets(9)]
        assert max(rhs) < 0

    def test_hyperbolic_gauss_bonnet_fails(self, torus_cover):
        v = check_cover(torus_cover, np.zeros(3), [-0.1], "hyperbolic")
        assert not v.feasible and not v.gauss_bonnet_ok

    def test_matches_oracle(self, torus_cover):
        v = check_cover(torus_cover, np.zeros(3), [0.5], "hyperbolic")
        ok, worst, bad = oracles.kat_oracle(
            torus_cover.total, np.zeros(27), np.full(9, 0.5), "hyperbolic"
        )
        # the oracle checks Gauss-Bonnet on the cover, which scales by the degree
        assert v.feasible == ok
        assert v.worst.slack == pytest.approx(worst, abs=1e-12)
        assert v.violation_count == bad

    def test_tetrahedron_identity(self, tetra):
        cov = identity_cover(tetra)
        K = np.full(4, PI)
        a = check_cover(cov, np.zeros(6), K, "euclidean")
        b = check_base_necessary(tetra, np.zeros(6), K, "euclidean")
        assert a.feasible and b.feasible and a.subsets_checked == b.subsets_checked == 14
        assert a.worst.slack == b.worst.slack

    def test_non_simplicial_cover(self, torus_cover_p2):
        with pytest.raises(NotSimplicialError):
            check_cover(torus_cover_p2, np.zeros(3), [0.0], "euclidean")

    def test_cap(self, torus_cover):
        with pytest.raises(EnumerationCapError) as exc:
            check_cover(torus_cover, np.zeros(3), [0.0], "euclidean", cap=8)
        assert exc.value.required == 9

    def test_verdict_invariant(self, torus_cover, rng):
        for K in rng.uniform(-1, 7, 15):
            v = check_cover(torus_cover, np.zeros(3), [K], "hyperbolic")
            assert v.feasible == (v.gauss_bonnet_ok and v.violation_count == 0)

    def test_cone_positivity_flag(self, torus_cover):
        plain = check_cover(torus_cover, np.zeros(3), [2 * PI + 0.5], "hyperbolic")
        cone = check_cover(torus_cover, np.zeros(3), [2 * PI + 0.5], "hyperbolic",
                           cone_positivity=True)
        assert plain.feasible and not cone.feasible
        assert cone.cone_positivity == {"ok": False, "vertices_at_or_above_2pi": [0]}

    def test_report_shape(self, torus_cover):
        d = check_cover(torus_cover, np.zeros(3), [-0.1], "hyperbolic").to_dict()
        for key in ("verdict", "gauss_bonnet", "worst", "violations", "violation_count",
                    "boundary_cases", "subsets_checked", "wall_time"):
            assert key in d
        assert d["gauss_bonnet"]["mode"] == "strict-greater"

    @pytest.mark.parametrize("bg", ["euclidean", "hyperbolic"])
    def test_soundness_tetrahedron(self, tetra, rng, bg):
        cov = identity_cover(tetra)
        for _ in range(20):
            r = rng.uniform(0.05, 5, 4)
            phi = rng.uniform(0, PI / 2, 6)
            K = curvature_map(tetra, phi, r, bg)
            assert check_cover(cov, phi, K, bg).feasible

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_relabel_equivariance(self, seed):
        rng = np.random.default_rng(seed)
        base = surfaces.grid_torus(3, 3)
        d, perm = surfaces.random_relabel(base, rng)
        phi = rng.uniform(0, PI / 2, base.n_edges)
        K = rng.normal(scale=2, size=9)
        K -= K.mean()
        Kd = np.empty_like(K)
        Kd[perm] = K
        a = check_cover(identity_cover(base), phi, K, "euclidean")
        b = check_cover(identity_cover(d), phi, Kd, "euclidean")
        assert a.feasible == b.feasible
        assert a.violation_count == b.violation_count
        assert a.worst.slack == pytest.approx(b.worst.slack, abs=1e-9)


class TestBaseNecessary:
    def test_one_vertex_vacuous(self, torus):
        v = check_base_necessary(torus, np.zeros(3), [0.0], "euclidean")
        assert v.feasible and v.subsets_checked == 0 and v.necessary_only
        assert v.to_dict()["label"] == "NECESSARY-ONLY"

    def test_tetrahedron_violation(self, tetra):
        # total curvature kept at 4 pi so only the singleton {0} fails
        K = np.array([-4.0, PI, PI, PI + 4 + PI])
        v = check_base_necessary(tetra, np.zeros(6), K, "euclidean")
        assert v.gauss_bonnet_ok and not v.feasible
        assert v.violations[0].subset == (0,)
        assert v.violations[0].rhs == pytest.approx(-PI)

    def test_necessary_when_cover_feasible(self, rng):
        base = surfaces.grid_torus(2, 1)
        cov = unwrap(base)
        for _ in range(5):
            r = rng.uniform(0.3, 3, 2)
            phi = rng.uniform(0, PI / 2, base.n_edges)
            K = curvature_map(base, phi, r, "hyperbolic")
            assert check_cover(cov, phi, K, "hyperbolic").feasible
            assert check_base_necessary(base, phi, K, "hyperbolic").feasible


class TestPreimage:
    @pytest.mark.parametrize("name", ["tetra", "grid21"])
    def test_scaling_by_degree(self, name, rng):
        base = {"tetra": surfaces.tetrahedron(), "grid21": surfaces.grid_torus(2, 1)}[name]
        cov = unwrap(base)
        phi = rng.uniform(0, PI / 2, base.n_edges)
        K = rng.normal(size=base.n_vertices)
        phat = pullback_edge_data(cov, phi)
        Khat = pullback_vertex_data(cov, K)
        fibers = cov.vertex_fibers()
        for I in oracles.all_proper_subsets(base.n_vertices):
            Ihat = fibers[list(I)].ravel()
            b = kat_constraint(base, phi, K, I, mode="delta")
            c = kat_constraint(cov.total, phat, Khat, Ihat)
            assert c.rhs == pytest.approx(cov.degree * b.rhs, abs=1e-12 * cov.degree)
            assert c.lhs == pytest.approx(cov.degree * b.lhs, abs=1e-12 * cov.degree)


class TestLimit:
    def test_tetrahedron_singleton(self, tetra):
        assert curvature_limit_base(tetra, np.zeros(6), {0}) == pytest.approx(-PI)

    def test_tetrahedron_pair(self, tetra):
        # two triangles contain both vertices; four link slots of weight pi
        link = len(oracles.link_multiset(tetra, {0, 1}))
        assert link == 2
        assert curvature_limit_base(tetra, np.zeros(6), {0, 1}) == pytest.approx(
            4 * PI - 2 * PI - link * PI
        )

    def test_numeric(self, tetra, rng):
        phi = rng.uniform(0, PI / 2, 6)
        for I in oracles.all_proper_subsets(4):
            r = np.ones(4)
            r[list(I)] = 1e-6
            K = curvature_map(tetra, phi, r)
            assert K[list(I)].sum() == pytest.approx(curvature_limit_base(tetra, phi, I), abs=1e-2)

    def test_improper(self, tetra):
        with pytest.raises(ValueError):
            curvature_limit_base(tetra, np.zeros(6), set())


class TestConstantCurvature:
    def test_flat_phi(self, torus_cover):
        out = constant_curvature_interval(torus_cover, np.zeros(3))
        assert out["lower_bound"] == 0.0 and out["binding"] == "gauss_bonnet"
        assert out["rhs_all_nonpositive"]
        assert out["base_constraints"] == []
        assert out["cover_subsets_checked"] == 510

    def test_obtuse_phi(self, torus_cover):
        out = constant_curvature_interval(torus_cover, np.full(3, 0.45 * PI))
        assert out["non_preimage_subsets"] == 510
        assert out["cover_bound"] == pytest.approx(-PI / 4)
        assert out["lower_bound"] == 0.0

    def test_multi_vertex_rejected(self, tetra):
        with pytest.raises(ValueError):
            constant_curvature_interval(identity_cover(tetra), np.zeros(6))

    def test_genus2_cover_exceeds_cap(self, genus2):
        cov = derived_cover(genus2, homology_voltages(genus2, 3))
        with pytest.raises(EnumerationCapError):
            check_cover(cov, np.zeros(9), [-2 * PI + 0.1], "hyperbolic")
