import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from circlepattern import surfaces
from circlepattern.complex import (
    DeltaComplex,
    boundary_matrices,
    euler_characteristic,
    format_triangulation,
    genus,
    is_connected,
    is_simplicial,
    link_pairs,
    orientation,
    parse_complex,
    parse_triangulation,
    subcomplex_summary,
)
from circlepattern.errors import (
    DisconnectedError,
    InvariantError,
    NonOrientableError,
    ParseError,
)

from . import oracles

FIXTURES = {
    "tetrahedron": surfaces.tetrahedron,
    "torus": surfaces.one_vertex_torus,
    "genus2": lambda: surfaces.one_vertex_surface(2),
    "grid3x3": lambda: surfaces.grid_torus(3, 3),
    "grid2x1": lambda: surfaces.grid_torus(2, 1),
    "doubled": surfaces.doubled_triangle,
    "genus3": lambda: surfaces.one_vertex_surface(3),
}


TORUS_TEXT = """\
# one-vertex torus
vertices 1
edge 0 0 0
edge 1 0 0
edge 2 0 0
triangle 0 1 2 0
triangle 1 0 2 1
"""


class TestParse:
    def test_torus_counts(self):
        c = parse_complex(TORUS_TEXT)
        assert (c.n_vertices, c.n_edges, c.n_faces) == (1, 3, 2)

    def test_tetrahedron_round_trip(self):
        c = surfaces.tetrahedron()
        again, phi = parse_triangulation(format_triangulation(c))
        assert again == c and phi is None
        assert is_simplicial(again)

    def test_phi_round_trip_is_bit_exact(self, rng):
        c = surfaces.tetrahedron()
        phi = rng.uniform(0, np.pi / 2, c.n_edges)
        _, back = parse_triangulation(format_triangulation(c, phi))
        assert np.array_equal(back, phi)

    def test_missing_edge_reference(self):
        text = TORUS_TEXT.replace("triangle 1 0 2 1", "triangle 1 0 2 7")
        with pytest.raises(InvariantError) as exc:
            parse_complex(text)
        assert exc.value.invariant == "triangle-reference"
        assert exc.value.cell == ("triangle", 1)

    def test_truncated_file_reports_line(self):
        text = "\n".join(TORUS_TEXT.splitlines()[:-1]) + "\ntriangle 1 0 2"
        with pytest.raises(ParseError) as exc:
            parse_complex(text)
        assert exc.value.line == 7

    def test_missing_triangle_is_closed_surface_violation(self):
        text = "\n".join(TORUS_TEXT.splitlines()[:-1])
        with pytest.raises(InvariantError) as exc:
            parse_complex(text)
        assert exc.value.invariant == "closed-surface"

    @pytest.mark.parametrize(
        "text",
        [
            "edge 0 0 0\n",
            "vertices 1\nvertices 1\n",
            "vertices 1\nedge 1 0 0\n",
            "vertices x\n",
            "vertices 1\nfoo 1\n",
            "",
        ],
    )
    def test_syntax_errors(self, text):
        with pytest.raises(ParseError):
            parse_complex(text)

    def test_phi_out_of_range(self):
        with pytest.raises(ParseError, match="outside"):
            parse_triangulation(TORUS_TEXT + "phi 0 3.5\n")

    def test_phi_defaults_missing_edges_to_zero(self):
        _, phi = parse_triangulation(TORUS_TEXT + "phi 1 0.5\n")
        assert phi.tolist() == [0.0, 0.5, 0.0]

    def test_simplicial_identity_violation(self):
        with pytest.raises(InvariantError) as exc:
            DeltaComplex(2, [(1, 0), (1, 0), (0, 1)], [(0, 1, 2), (0, 1, 2)], min_degree=0)
        assert exc.value.invariant == "simplicial-identity"

    def test_vertex_degree(self):
        with pytest.raises(InvariantError) as exc:
            DeltaComplex(3, [(2, 1), (2, 0), (1, 0)], [(0, 1, 2), (0, 1, 2)])
        assert exc.value.invariant == "vertex-degree"

    def test_arrays_are_read_only(self):
        c = surfaces.tetrahedron()
        with pytest.raises(ValueError):
            c.edges[0, 0] = 3


class TestVertexTriples:
    @pytest.mark.parametrize("name", sorted(FIXTURES))
    def test_against_oracle(self, name):
        c = FIXTURES[name]()
        assert c.vertex_triples.tolist() == [list(t) for t in oracles.vertex_triples(c)]


class TestSimplicial:
    def test_torus_loops(self):
        rep = is_simplicial(surfaces.one_vertex_torus())
        assert not rep
        assert rep.loops == (0, 1, 2)
        assert len(rep.witnesses()) == 3

    def test_tetrahedron(self):
        rep = is_simplicial(surfaces.tetrahedron())
        assert rep and rep.witnesses() == []

    def test_parallel_pair(self):
        rep = is_simplicial(surfaces.doubled_triangle())
        assert rep  # the doubled triangle has three distinct edges
        rep = is_simplicial(surfaces.grid_torus(2, 3))
        assert not rep and not rep.loops
        assert (0, 3) in rep.parallel_pairs  # h(0, 0) and h(1, 0) both join 0 and 1


class TestBoundary:
    @pytest.mark.parametrize("name", sorted(FIXTURES))
    def test_chain_complex(self, name):
        D1, D2 = boundary_matrices(FIXTURES[name]())
        assert not np.any(D1 @ D2)

    def test_torus_d1_zero(self):
        D1, _ = boundary_matrices(surfaces.one_vertex_torus())
        assert D1.shape == (1, 3) and not D1.any()

    def test_doubled_triangle_ranks(self):
        c = surfaces.doubled_triangle()
        D1, D2 = boundary_matrices(c)
        assert oracles.rank_rational(D1) == 2
        assert oracles.rank_rational(D2) == 1
        assert euler_characteristic(c) == 2

    def test_sign_convention(self):
        c = surfaces.tetrahedron()
        D1, D2 = boundary_matrices(c)
        for e, (d0, d1) in enumerate(c.edges):
            assert D1[d1, e] == 1 and D1[d0, e] == -1
        for t, (a, b, d) in enumerate(c.triangles):
            assert (D2[a, t], D2[b, t], D2[d, t]) == (1, -1, 1)


class TestTopology:
    @pytest.mark.parametrize(
        "name,chi,g", [("tetrahedron", 2, 0), ("torus", 0, 1), ("genus2", -2, 2), ("genus3", -4, 3)]
    )
    def test_euler_and_genus(self, name, chi, g):
        c = FIXTURES[name]()
        assert euler_characteristic(c) == chi
        assert genus(c) == g

    def test_genus2_cell_counts(self):
        c = surfaces.one_vertex_surface(2)
        assert (c.n_vertices, c.n_edges, c.n_faces) == (1, 9, 6)

    def test_torus_orientation(self):
        assert orientation(surfaces.one_vertex_torus()).tolist() == [1, -1]

    @pytest.mark.parametrize("name", ["tetrahedron", "torus", "genus2", "grid3x3", "grid2x1"])
    def test_orientation_unique_up_to_sign(self, name):
        c = FIXTURES[name]()
        eps = tuple(orientation(c).tolist())
        valid = oracles.brute_orientations(c)
        assert len(valid) == 2
        assert eps in valid and eps[0] == 1

    def test_klein_bottle(self):
        kb = surfaces.one_vertex_klein_bottle()
        assert oracles.brute_orientations(kb) == []
        with pytest.raises(NonOrientableError) as exc:
            orientation(kb)
        assert exc.value.edge_cycle
        with pytest.raises(NonOrientableError):
            genus(kb)

    def test_disconnected(self):
        t = surfaces.tetrahedron()
        edges = np.vstack([t.edges, t.edges + 4])
        tris = np.vstack([t.triangles, t.triangles + 6])
        c = DeltaComplex(8, edges, tris)
        assert not is_connected(c)
        with pytest.raises(DisconnectedError):
            orientation(c)

    def test_polygon_word_must_pair_sides(self):
        with pytest.raises(ValueError):
            surfaces.polygon_surface("ABab")


class TestSubcomplex:
    def test_tetrahedron_singleton(self):
        s = subcomplex_summary(surfaces.tetrahedron(), {0})
        assert (s.edge_count, s.face_count, s.euler_char) == (0, 0, 1)

    def test_tetrahedron_face(self):
        s = subcomplex_summary(surfaces.tetrahedron(), {0, 1, 2})
        assert (s.edge_count, s.face_count, s.euler_char) == (3, 1, 1)

    def test_cover_complement(self, torus_cover):
        s = subcomplex_summary(torus_cover.total, set(range(1, 9)))
        assert (s.edge_count, s.face_count, s.euler_char) == (21, 12, -1)

    @pytest.mark.parametrize("name", sorted(FIXTURES))
    def test_full_set(self, name):
        c = FIXTURES[name]()
        s = subcomplex_summary(c, range(c.n_vertices))
        assert (s.edge_count, s.face_count) == (c.n_edges, c.n_faces)
        assert s.euler_char == euler_characteristic(c)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            subcomplex_summary(surfaces.tetrahedron(), set())

    @pytest.mark.parametrize("name", ["grid3x3", "grid2x1", "tetrahedron"])
    def test_against_oracle(self, name):
        c = FIXTURES[name]()
        for I in oracles.all_proper_subsets(c.n_vertices):
            s = subcomplex_summary(c, I)
            assert (s.edge_count, s.face_count) == oracles.subcomplex_counts(c, I)


class TestLink:
    def test_tetrahedron_singleton(self):
        assert len(link_pairs(surfaces.tetrahedron(), {0})) == 3

    def test_cover_singleton(self, torus_cover):
        assert len(link_pairs(torus_cover.total, {0})) == 6

    def test_cover_complement_empty(self, torus_cover):
        assert link_pairs(torus_cover.total, set(range(1, 9))) == []

    def test_improper_subsets(self):
        c = surfaces.tetrahedron()
        with pytest.raises(ValueError):
            link_pairs(c, set())
        with pytest.raises(ValueError):
            link_pairs(c, {0, 1, 2, 3})

    def test_simplicial_mode_needs_simplicial(self):
        with pytest.raises(ValueError):
            link_pairs(surfaces.grid_torus(2, 1), {0})

    @pytest.mark.parametrize("name", ["tetrahedron", "grid3x3"])
    def test_modes_agree_on_simplicial(self, name):
        c = FIXTURES[name]()
        for I in oracles.all_proper_subsets(c.n_vertices):
            simp = sorted((p.edge, p.triangle) for p in link_pairs(c, I, "simplicial"))
            delta = sorted((p.edge, p.triangle) for p in link_pairs(c, I, "delta"))
            assert simp == delta == oracles.simplicial_link(c, I)

    def test_delta_mode_against_oracle(self):
        c = surfaces.grid_torus(2, 1)
        for I in ({0}, {1}):
            got = sorted((p.edge, p.triangle, p.slot) for p in link_pairs(c, I, "delta"))
            assert got == oracles.link_multiset(c, I)


class TestProperties:
    @pytest.mark.parametrize("name", sorted(FIXTURES))
    def test_edge_face_count(self, name):
        c = FIXTURES[name]()
        assert 2 * c.n_edges == 3 * c.n_faces

    @settings(max_examples=25, deadline=None)
    @given(st.integers(1, 4), st.integers(1, 4), st.integers(0, 2**32 - 1))
    def test_relabel_invariance(self, n, m, seed):
        c = surfaces.grid_torus(n, m)
        d, perm = surfaces.random_relabel(c, np.random.default_rng(seed))
        assert euler_characteristic(d) == euler_characteristic(c)
        assert genus(d) == genus(c)
        assert bool(is_simplicial(d)) == bool(is_simplicial(c))
        assert np.array_equal(d.vertex_triples, perm[c.vertex_triples])
        assert np.array_equal(orientation(d), orientation(c))

    @settings(max_examples=25, deadline=None)
    @given(st.integers(1, 4), st.integers(1, 4))
    def test_grid_torus_is_torus(self, n, m):
        c = surfaces.grid_torus(n, m)
        assert euler_characteristic(c) == 0 and genus(c) == 1
        D1, D2 = boundary_matrices(c)
        assert not np.any(D1 @ D2)
        assert bool(is_simplicial(c)) == (n >= 3 and m >= 3)
