"""Finite abelian covers built from voltage assignments.

The group is ``(Z/p)^k``. Group elements are ``k``-tuples of residues ranked
lexicographically, and the lift ``(x, g)`` of a base cell ``x`` gets id
``x * p**k + rank(g)``.
"""

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .complex import (
    DeltaComplex,
    _require_connected,
    _vertex_adjacency,
    euler_characteristic,
    genus,
    is_simplicial,
)
from .errors import CoverNotFoundError, ParseError, VoltageError

__all__ = [
    "VoltageAssignment",
    "Covering",
    "spanning_tree",
    "homology_voltages",
    "trivial_voltages",
    "derived_cover",
    "identity_cover",
    "unwrap",
    "primes_up_to",
    "pullback_vertex_data",
    "pullback_edge_data",
    "pushforward_average",
    "is_deck_invariant",
    "verify_covering",
    "parse_voltages",
    "format_voltages",
    "cover_sidecar",
]


@dataclass(frozen=True, eq=False)
class VoltageAssignment:
    modulus: int
    rank: int
    alpha: np.ndarray  # (E, rank) residues

    def __post_init__(self):
        a = np.array(self.alpha, dtype=np.int64)
        a = a.reshape(len(a), self.rank) % self.modulus
        a.setflags(write=False)
        object.__setattr__(self, "alpha", a)

    @property
    def order(self):
        return self.modulus**self.rank

    def elements(self):
        """All group elements in lexicographic order, shape (order, rank)."""
        if self.rank == 0:
            return np.zeros((1, 0), dtype=np.int64)
        grids = np.meshgrid(*[np.arange(self.modulus)] * self.rank, indexing="ij")
        return np.stack([g.ravel() for g in grids], axis=1)

    def index(self, g):
        """Lexicographic rank of element(s) ``g`` (last axis = coordinates)."""
        g = np.asarray(g, dtype=np.int64) % self.modulus
        w = self.modulus ** np.arange(self.rank - 1, -1, -1, dtype=np.int64)
        return g @ w

    def relator_residuals(self, c):
        """``alpha(d2) + alpha(d0) - alpha(d1)`` per triangle."""
        a = self.alpha
        t = c.triangles
        return (a[t[:, 2]] + a[t[:, 0]] - a[t[:, 1]]) % self.modulus


@dataclass(frozen=True, eq=False)
class Covering:
    base: DeltaComplex
    voltages: VoltageAssignment
    total: DeltaComplex
    rejected: dict = field(default_factory=dict)

    @property
    def degree(self):
        return self.voltages.order

    @property
    def proj_v(self):
        return np.arange(self.total.n_vertices) // self.degree

    @property
    def proj_e(self):
        return np.arange(self.total.n_edges) // self.degree

    @property
    def proj_f(self):
        return np.arange(self.total.n_faces) // self.degree

    def sheet(self, ids):
        return np.asarray(ids) % self.degree

    def vertex_fibers(self):
        """Total vertex ids grouped by base vertex, shape (|V|, degree)."""
        return np.arange(self.total.n_vertices).reshape(self.base.n_vertices, self.degree)

    def deck_permutation(self, h, kind="vertex"):
        """Permutation of total cells of ``kind`` induced by group element ``h``."""
        va = self.voltages
        n = {"vertex": self.base.n_vertices, "edge": self.base.n_edges,
             "triangle": self.base.n_faces}[kind]
        G = va.elements()
        shifted = va.index(G + np.asarray(h, dtype=np.int64))
        return (np.arange(n)[:, None] * self.degree + shifted[None, :]).ravel()

    def total_genus(self):
        return genus(self.total)


def spanning_tree(c):
    """Breadth-first spanning tree from vertex 0, smallest edge id first."""
    _require_connected(c)
    adj = _vertex_adjacency(c)
    seen = [False] * c.n_vertices
    tree = []
    if c.n_vertices == 0:
        return tree
    seen[0] = True
    queue = deque([0])
    while queue:
        v = queue.popleft()
        for e, w in adj[v]:
            if not seen[w]:
                seen[w] = True
                tree.append(e)
                queue.append(w)
    return sorted(tree)


def _nullspace_mod_p(R, p):
    """Basis of ``{x : R x = 0 mod p}`` as rows.

    Pivots are taken from the rightmost columns, so the free variables (and
    hence the basis coordinates) sit on the lowest column indices.
    """
    R = np.array(R, dtype=np.int64) % p
    m, n = R.shape
    order = list(range(n - 1, -1, -1))
    A = R[:, order]
    pivots = []
    row = 0
    for col in range(n):
        if row >= m:
            break
        nz = np.flatnonzero(A[row:, col])
        if nz.size == 0:
            continue
        r = row + nz[0]
        A[[row, r]] = A[[r, row]]
        A[row] = (A[row] * pow(int(A[row, col]), -1, p)) % p
        others = np.flatnonzero(A[:, col])
        for r2 in others:
            if r2 != row:
                A[r2] = (A[r2] - A[r2, col] * A[row]) % p
        pivots.append(col)
        row += 1
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        x = np.zeros(n, dtype=np.int64)
        x[f] = 1
        for i, pc in enumerate(pivots):
            x[pc] = (-A[i, f]) % p
        # undo the column reversal
        y = np.empty(n, dtype=np.int64)
        y[order] = x
        basis.append((order[f], y))
    basis = [y for _, y in sorted(basis, key=lambda item: item[0])]
    return np.array(basis, dtype=np.int64).reshape(len(basis), n)


def homology_voltages(c, p):
    """Voltages of the mod-``p`` homology cover.

    Tree edges get 0; the remaining edges take the coordinates of a basis of
    mod-``p`` solutions of the triangle relators. The rank equals
    ``2 * genus(c)``.
    """
    if p < 2 or any(p % q == 0 for q in range(2, int(p**0.5) + 1)):
        raise ValueError(f"{p} is not prime")
    g = genus(c)  # checks connectivity, orientability
    tree = set(spanning_tree(c))
    free = [e for e in range(c.n_edges) if e not in tree]
    t = c.triangles
    R = np.zeros((c.n_faces, c.n_edges), dtype=np.int64)
    np.add.at(R, (np.arange(c.n_faces), t[:, 2]), 1)
    np.add.at(R, (np.arange(c.n_faces), t[:, 0]), 1)
    np.add.at(R, (np.arange(c.n_faces), t[:, 1]), -1)
    basis = _nullspace_mod_p(R[:, free], p)
    k = len(basis)
    if k != 2 * g:
        raise VoltageError(f"mod-{p} relator nullity {k} differs from 2*genus = {2 * g}")
    alpha = np.zeros((c.n_edges, k), dtype=np.int64)
    if k:
        alpha[free] = basis.T
    va = VoltageAssignment(p, k, alpha)
    assert not va.relator_residuals(c).any()
    return va


def trivial_voltages(c, p=2):
    return VoltageAssignment(p, 0, np.zeros((c.n_edges, 0), dtype=np.int64))


def derived_cover(c, va):
    """Build the derived complex of a voltage assignment.

    Vertices ``V x G``; edge ``(e, h)`` runs from ``(d1 e, h)`` to
    ``(d0 e, h + alpha(e))``; triangle ``(t, g)`` has faces ``(d2 t, g)``,
    ``(d1 t, g)`` and ``(d0 t, g + alpha(d2 t))``.
    """
    if va.alpha.shape[0] != c.n_edges:
        raise VoltageError(f"voltages cover {va.alpha.shape[0]} edges, complex has {c.n_edges}")
    bad = np.flatnonzero(va.relator_residuals(c).any(axis=1))
    if bad.size:
        raise VoltageError(f"triangle relator violated at triangle {int(bad[0])}")
    deg = va.order
    G = va.elements()
    gi = np.arange(deg)
    E, T = c.edges, c.triangles
    shift_e = va.index(G[None, :, :] + va.alpha[:, None, :])  # (E, deg)
    edges = np.empty((c.n_edges, deg, 2), dtype=np.int64)
    edges[:, :, 1] = E[:, 1, None] * deg + gi[None, :]
    edges[:, :, 0] = E[:, 0, None] * deg + shift_e
    tris = np.empty((c.n_faces, deg, 3), dtype=np.int64)
    tris[:, :, 2] = T[:, 2, None] * deg + gi[None, :]
    tris[:, :, 1] = T[:, 1, None] * deg + gi[None, :]
    tris[:, :, 0] = T[:, 0, None] * deg + shift_e[T[:, 2]]
    min_deg = int(c.vertex_degrees.min()) if c.n_vertices else 0
    total = DeltaComplex(
        c.n_vertices * deg, edges.reshape(-1, 2), tris.reshape(-1, 3),
        min_degree=min(3, min_deg),
    )
    return Covering(c, va, total)


def identity_cover(c):
    return derived_cover(c, trivial_voltages(c))


def primes_up_to(n):
    return [q for q in range(2, n + 1) if all(q % d for d in range(2, int(q**0.5) + 1))]


def unwrap(c, p_max=31):
    """First mod-``p`` homology cover (increasing ``p <= p_max``) that is simplicial.

    A simplicial base gives the identity cover. The returned covering records
    rejected primes with their witnesses in ``rejected``.
    """
    if is_simplicial(c):
        return identity_cover(c)
    attempts = {}
    for p in primes_up_to(p_max):
        cov = derived_cover(c, homology_voltages(c, p))
        rep = is_simplicial(cov.total)
        if rep:
            return Covering(c, cov.voltages, cov.total, rejected=attempts)
        attempts[p] = rep
    raise CoverNotFoundError(attempts, p_max)


# ---------------------------------------------------------------------------
# functions on covers


def pullback_vertex_data(cov, f):
    f = np.asarray(f, dtype=float)
    if f.shape != (cov.base.n_vertices,):
        raise ValueError("vertex data must have one value per base vertex")
    return np.repeat(f, cov.degree)


def pullback_edge_data(cov, f):
    f = np.asarray(f, dtype=float)
    if f.shape != (cov.base.n_edges,):
        raise ValueError("edge data must have one value per base edge")
    return np.repeat(f, cov.degree)


def pushforward_average(cov, fhat):
    """Mean of ``fhat`` over each vertex fiber.

    Averaged as offsets from the first fiber entry so that constant fibers
    (pullbacks) come back bit-exactly.
    """
    F = np.asarray(fhat, dtype=float).reshape(cov.base.n_vertices, cov.degree)
    ref = F[:, :1]
    return (ref + (F - ref).mean(axis=1, keepdims=True))[:, 0]


def is_deck_invariant(cov, fhat, tol=0.0):
    """Return ``(verdict, deviation)`` with deviation the largest orbit spread."""
    fhat = np.asarray(fhat, dtype=float).reshape(cov.base.n_vertices, cov.degree)
    dev = float(np.ptp(fhat, axis=1).max()) if fhat.size else 0.0
    return dev <= tol, dev


def verify_covering(cov):
    """Exhaustively check the covering invariants; return a list of problems."""
    problems = []
    base, tot, deg = cov.base, cov.total, cov.degree
    pv, pe, pf = cov.proj_v, cov.proj_e, cov.proj_f
    if tot.n_vertices != deg * base.n_vertices or tot.n_edges != deg * base.n_edges \
            or tot.n_faces != deg * base.n_faces:
        problems.append("fiber sizes differ from the degree")
    if not np.array_equal(pv[tot.edges], base.edges[pe]):
        problems.append("edge face maps do not commute with projection")
    if not np.array_equal(pe[tot.triangles], base.triangles[pf]):
        problems.append("triangle face maps do not commute with projection")
    if not np.array_equal(pv[tot.vertex_triples], base.vertex_triples[pf]):
        problems.append("vertex triples do not project")
    for h in cov.voltages.elements():
        gv = cov.deck_permutation(h, "vertex")
        ge = cov.deck_permutation(h, "edge")
        gf = cov.deck_permutation(h, "triangle")
        if not (np.array_equal(pv[gv], pv) and np.array_equal(pe[ge], pe)
                and np.array_equal(pf[gf], pf)):
            problems.append(f"deck map {tuple(h)} moves cells between fibers")
        if not np.array_equal(gv[tot.edges], tot.edges[ge]):
            problems.append(f"deck map {tuple(h)} does not commute with edge faces")
        if not np.array_equal(ge[tot.triangles], tot.triangles[gf]):
            problems.append(f"deck map {tuple(h)} does not commute with triangle faces")
    # simple transitivity on each fiber: the orbit of a sheet-0 vertex is its fiber
    G = cov.voltages.elements()
    for x in range(base.n_vertices):
        orbit = sorted(int(cov.deck_permutation(h, "vertex")[x * deg]) for h in G)
        if orbit != list(range(x * deg, (x + 1) * deg)):
            problems.append(f"deck group not simply transitive on fiber of vertex {x}")
    if euler_characteristic(tot) != deg * euler_characteristic(base):
        problems.append("Euler characteristic not multiplicative")
    if 2 * tot.n_edges != 3 * tot.n_faces:
        problems.append("2|E| != 3|F| on the cover")
    return problems


# ---------------------------------------------------------------------------
# files


def parse_voltages(text, c=None):
    p = k = None
    rows = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        try:
            if tok[0] == "group":
                if len(tok) != 3:
                    raise ParseError("'group' expects p and k", lineno)
                p, k = int(tok[1]), int(tok[2])
                if p < 2 or k < 0:
                    raise ParseError("group needs p >= 2 and k >= 0", lineno)
            elif tok[0] == "volt":
                if p is None:
                    raise ParseError("'volt' before 'group'", lineno)
                if len(tok) != 2 + k:
                    raise ParseError(f"'volt' expects an edge id and {k} residues", lineno)
                eid = int(tok[1])
                if eid in rows:
                    raise ParseError(f"duplicate voltage for edge {eid}", lineno)
                rows[eid] = [int(x) for x in tok[2:]]
            else:
                raise ParseError(f"unknown statement {tok[0]!r}", lineno)
        except ValueError as exc:
            if isinstance(exc, ParseError):
                raise
            raise ParseError(f"malformed number in {line!r}", lineno) from None
    if p is None:
        raise ParseError("missing 'group p k' statement")
    n = c.n_edges if c is not None else (max(rows) + 1 if rows else 0)
    if set(rows) != set(range(n)):
        missing = sorted(set(range(n)) - set(rows))
        raise ParseError(f"voltages missing for edges {missing[:10]}")
    alpha = np.array([rows[e] for e in range(n)], dtype=np.int64).reshape(n, k)
    return VoltageAssignment(p, k, alpha)


def format_voltages(va):
    out = [f"group {va.modulus} {va.rank}"]
    for e, row in enumerate(va.alpha):
        out.append(" ".join(["volt", str(e)] + [str(int(x)) for x in row]))
    return "\n".join(out) + "\n"


def cover_sidecar(cov):
    """JSON-ready map from total cell ids to ``(base id, group element)``."""
    G = cov.voltages.elements().tolist()
    deg = cov.degree

    def cells(n):
        return [{"id": i, "base": i // deg, "element": G[i % deg]} for i in range(n * deg)]

    return {
        "group": {"p": cov.voltages.modulus, "k": cov.voltages.rank},
        "degree": deg,
        "voltages": cov.voltages.alpha.tolist(),
        "vertices": cells(cov.base.n_vertices),
        "edges": cells(cov.base.n_edges),
        "triangles": cells(cov.base.n_faces),
    }

