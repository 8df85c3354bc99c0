"""Small named triangulations used by the tests, demos and data files."""

from .complex import DeltaComplex

__all__ = [
    "tetrahedron",
    "one_vertex_torus",
    "one_vertex_surface",
    "polygon_surface",
    "grid_torus",
    "doubled_triangle",
    "one_vertex_klein_bottle",
    "random_relabel",
]


def tetrahedron():
    """Boundary of the 3-simplex with vertex order 0 < 1 < 2 < 3."""
    # edge (a, b) with a < b stored as d0 = b, d1 = a
    pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
    eid = {p: i for i, p in enumerate(pairs)}
    edges = [(b, a) for a, b in pairs]
    tris = []
    for a, b, c in [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)]:
        tris.append((eid[(b, c)], eid[(a, c)], eid[(a, b)]))
    return DeltaComplex(4, edges, tris)


def grid_torus(n, m):
    """Torus ``Z^2 / (nZ x mZ)`` cut into 2nm triangles along (1, 1) diagonals.

    Edges are numbered horizontal, vertical, diagonal for each grid cell in
    row-major order, so ``grid_torus(1, 1)`` has edges ``a, b, c`` with
    ``a + b = c``.
    """
    vid = lambda i, j: (j % m) * n + (i % n)  # noqa: E731
    edges = []
    for j in range(m):
        for i in range(n):
            edges.append((vid(i + 1, j), vid(i, j)))
            edges.append((vid(i, j + 1), vid(i, j)))
            edges.append((vid(i + 1, j + 1), vid(i, j)))
    h = lambda i, j: 3 * vid(i, j)  # noqa: E731
    v = lambda i, j: 3 * vid(i, j) + 1  # noqa: E731
    d = lambda i, j: 3 * vid(i, j) + 2  # noqa: E731
    tris = []
    for j in range(m):
        for i in range(n):
            tris.append((v(i + 1, j), d(i, j), h(i, j)))
            tris.append((h(i, j + 1), d(i, j), v(i, j)))
    return DeltaComplex(n * m, edges, tris)


def one_vertex_torus():
    """One vertex, loops ``a=0, b=1, c=2`` and two triangles."""
    return grid_torus(1, 1)


def polygon_surface(word):
    """One-vertex complex from a side-pairing word of a polygon.

    ``word`` is a sequence of letters; uppercase means the inverse of the
    lowercase generator. The polygon is fan-triangulated from its first
    corner. Generator edges come first (in order of first appearance), then
    the fan diagonals. Every corner must be identified to a single vertex.
    """
    letters = list(word)
    n = len(letters)
    gens = []
    for ch in letters:
        if ch.lower() not in gens:
            gens.append(ch.lower())
    gid = {g: i for i, g in enumerate(gens)}
    ng = len(gens)
    # sides: s_k goes P_k -> P_{k+1}; forward iff the letter is lowercase
    side_edge = [gid[ch.lower()] for ch in letters]
    forward = [ch.islower() for ch in letters]
    if not forward[0] or forward[-1]:
        raise ValueError("word must start with a generator and end with an inverse")
    # D_k: P_0 -> P_k for k = 1..n-1; D_1 = s_0, D_{n-1} = inverse of s_{n-1}
    diag = {1: side_edge[0], n - 1: side_edge[-1]}
    for k in range(2, n - 1):
        diag[k] = ng + (k - 2)
    edges = [(0, 0)] * (ng + n - 3)
    tris = []
    for k in range(1, n - 1):
        s = side_edge[k]
        if forward[k]:
            tris.append((s, diag[k + 1], diag[k]))
        else:
            tris.append((s, diag[k], diag[k + 1]))
    return DeltaComplex(1, edges, tris)


def one_vertex_surface(genus):
    """One-vertex genus-``g`` complex from the word ``x1..x2g X1..X2g``.

    For ``g = 2`` this has 9 loop edges and 6 triangles. Its fan diagonals
    lie in pairwise distinct homology classes, so mod-3 homology covers
    unwrap it; the commutator word ``abAB...`` does not have that property
    (see ``polygon_surface("abABcdCD")``).
    """
    if genus < 1:
        raise ValueError("one-vertex triangulations need genus >= 1")
    if genus == 1:
        return one_vertex_torus()
    gens = "abcdefghijklmnopqrstuvwxyz"[: 2 * genus]
    return polygon_surface(gens + gens.upper())


def doubled_triangle():
    """Sphere made of two triangles glued along their boundary.

    Its vertices have degree 2, so the degree check is relaxed.
    """
    edges = [(2, 1), (2, 0), (1, 0)]
    return DeltaComplex(3, edges, [(0, 1, 2), (0, 1, 2)], min_degree=2)


def one_vertex_klein_bottle():
    """Square with sides ``a`` parallel and ``b`` antiparallel."""
    return DeltaComplex(1, [(0, 0)] * 3, [(1, 0, 2), (0, 2, 1)])


def random_relabel(c, rng):
    """Copy of ``c`` with vertex ids permuted; returns ``(complex, perm)``.

    ``perm[old] = new``.
    """
    perm = rng.permutation(c.n_vertices)
    return DeltaComplex(c.n_vertices, perm[c.edges], c.triangles), perm

