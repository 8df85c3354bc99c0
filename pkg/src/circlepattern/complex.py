"""Delta-complex model of triangulated closed surfaces.

A complex stores dense integer ids only:

* ``edges[e] = (d0, d1)``: terminal and initial vertex of edge ``e``;
* ``triangles[t] = (d0, d1, d2)``: the edges opposite the 0th, 1st and 2nd
  vertex of triangle ``t``.

Loops and parallel edges are ordinary cells here. Nothing is deduplicated.
"""

from collections import deque
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DisconnectedError, InvariantError, NonOrientableError, ParseError

__all__ = [
    "DeltaComplex",
    "LinkPair",
    "SubcomplexSummary",
    "SimplicialReport",
    "parse_complex",
    "parse_triangulation",
    "format_triangulation",
    "is_simplicial",
    "boundary_matrices",
    "orientation",
    "euler_characteristic",
    "genus",
    "subcomplex_summary",
    "link_pairs",
    "is_connected",
]


def _frozen(a, shape_tail):
    a = np.array(a, dtype=np.int64).reshape((-1,) + shape_tail)
    a.setflags(write=False)
    return a


class DeltaComplex:
    """Validated, immutable Delta complex of a closed surface.

    Parameters
    ----------
    vertex_count : int
    edges : array_like, shape (E, 2)
        Rows ``(d0, d1)``.
    triangles : array_like, shape (F, 3)
        Rows ``(d0, d1, d2)``.
    min_degree : int
        Minimum vertex degree (loops count twice). The surface definition
        asks for 3; pass a smaller value for toy complexes such as the
        doubled triangle.
    """

    def __init__(self, vertex_count, edges, triangles, min_degree=3):
        self.vertex_count = int(vertex_count)
        self.edges = _frozen(edges, (2,))
        self.triangles = _frozen(triangles, (3,))
        self._validate(min_degree)

    @property
    def n_vertices(self):
        return self.vertex_count

    @property
    def n_edges(self):
        return len(self.edges)

    @property
    def n_faces(self):
        return len(self.triangles)

    @cached_property
    def vertex_triples(self):
        """Ordered vertices ``(v0, v1, v2)`` of every triangle, shape (F, 3)."""
        d0, d1, d2 = self.triangles.T
        v = np.stack(
            [self.edges[d2, 1], self.edges[d2, 0], self.edges[d1, 0]], axis=1
        )
        v.setflags(write=False)
        return v

    @cached_property
    def edge_incidences(self):
        """For each edge, the two ``(triangle, slot)`` pairs containing it."""
        inc = [[] for _ in range(self.n_edges)]
        for t, row in enumerate(self.triangles):
            for i, e in enumerate(row):
                inc[e].append((t, i))
        return tuple(tuple(x) for x in inc)

    @cached_property
    def vertex_degrees(self):
        return np.bincount(self.edges.ravel(), minlength=self.vertex_count)

    def __repr__(self):
        return (
            f"DeltaComplex(V={self.n_vertices}, E={self.n_edges}, F={self.n_faces})"
        )

    def __eq__(self, other):
        if not isinstance(other, DeltaComplex):
            return NotImplemented
        return (
            self.vertex_count == other.vertex_count
            and np.array_equal(self.edges, other.edges)
            and np.array_equal(self.triangles, other.triangles)
        )

    __hash__ = None

    def _validate(self, min_degree):
        nv, ne = self.vertex_count, self.n_edges
        if nv < 0:
            raise InvariantError("vertex-count", "vertex count must be non-negative")
        for e, (a, b) in enumerate(self.edges):
            for v in (a, b):
                if not 0 <= v < nv:
                    raise InvariantError(
                        "edge-reference",
                        f"edge {e} references missing vertex {v}",
                        ("edge", e),
                    )
        for t, row in enumerate(self.triangles):
            for e in row:
                if not 0 <= e < ne:
                    raise InvariantError(
                        "triangle-reference",
                        f"triangle {t} references missing edge {e}",
                        ("triangle", t),
                    )
        E = self.edges
        for t, (e0, e1, e2) in enumerate(self.triangles):
            # d_i o d_j = d_{j-1} o d_i for i < j
            if E[e1, 0] != E[e0, 0]:
                raise InvariantError(
                    "simplicial-identity",
                    f"triangle {t}: d0(d1) = {E[e1, 0]} but d0(d0) = {E[e0, 0]}",
                    ("triangle", t),
                )
            if E[e2, 0] != E[e0, 1]:
                raise InvariantError(
                    "simplicial-identity",
                    f"triangle {t}: d0(d2) = {E[e2, 0]} but d1(d0) = {E[e0, 1]}",
                    ("triangle", t),
                )
            if E[e2, 1] != E[e1, 1]:
                raise InvariantError(
                    "simplicial-identity",
                    f"triangle {t}: d1(d2) = {E[e2, 1]} but d1(d1) = {E[e1, 1]}",
                    ("triangle", t),
                )
        counts = np.bincount(self.triangles.ravel(), minlength=ne)
        for e, k in enumerate(counts):
            if k != 2:
                raise InvariantError(
                    "closed-surface",
                    f"edge {e} is a face of {k} triangle slots, expected 2",
                    ("edge", e),
                )
        deg = self.vertex_degrees
        for v in range(nv):
            if deg[v] < min_degree:
                raise InvariantError(
                    "vertex-degree",
                    f"vertex {v} has degree {deg[v]} < {min_degree}",
                    ("vertex", v),
                )


@dataclass(frozen=True)
class LinkPair:
    edge: int
    triangle: int
    slot: int


@dataclass(frozen=True)
class SubcomplexSummary:
    subset: frozenset
    edge_count: int
    face_count: int

    @property
    def euler_char(self):
        return len(self.subset) - self.edge_count + self.face_count


@dataclass(frozen=True)
class SimplicialReport:
    simplicial: bool
    loops: tuple
    parallel_pairs: tuple

    def __bool__(self):
        return self.simplicial

    def witnesses(self):
        return [{"kind": "loop", "edges": [e]} for e in self.loops] + [
            {"kind": "parallel", "edges": list(p)} for p in self.parallel_pairs
        ]


# ---------------------------------------------------------------------------
# text format


def parse_triangulation(text, min_degree=3):
    """Parse a triangulation file.

    Returns ``(complex, phi)`` where ``phi`` is a float array over edges, or
    ``None`` when the file carries no ``phi`` lines. Edges without a ``phi``
    line get 0 when at least one is present.
    """
    nverts = None
    edges = []
    triangles = []
    phis = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        kw = tok[0]
        if nverts is None and kw != "vertices":
            raise ParseError("expected 'vertices N' as the first statement", lineno)
        try:
            if kw == "vertices":
                if nverts is not None:
                    raise ParseError("duplicate 'vertices' statement", lineno)
                _arity(tok, 2, lineno)
                nverts = int(tok[1])
                if nverts < 0:
                    raise ParseError("vertex count must be non-negative", lineno)
            elif kw == "edge":
                _arity(tok, 4, lineno)
                if triangles:
                    raise ParseError("edges must precede triangles", lineno)
                eid, d0, d1 = map(int, tok[1:])
                if eid != len(edges):
                    raise ParseError(f"edge id {eid} out of order, expected {len(edges)}", lineno)
                edges.append((d0, d1))
            elif kw == "triangle":
                _arity(tok, 5, lineno)
                tid, *rest = map(int, tok[1:])
                if tid != len(triangles):
                    raise ParseError(
                        f"triangle id {tid} out of order, expected {len(triangles)}", lineno
                    )
                triangles.append(tuple(rest))
            elif kw == "phi":
                _arity(tok, 3, lineno)
                eid = int(tok[1])
                val = float(tok[2])
                if eid in phis:
                    raise ParseError(f"duplicate phi for edge {eid}", lineno)
                if not 0.0 <= val < np.pi:
                    raise ParseError(f"phi {val} for edge {eid} outside [0, pi)", lineno)
                phis[eid] = val
            else:
                raise ParseError(f"unknown statement {kw!r}", lineno)
        except ValueError as exc:
            if isinstance(exc, ParseError):
                raise
            raise ParseError(f"malformed number in {line!r}", lineno) from None
    if nverts is None:
        raise ParseError("empty triangulation file")
    c = DeltaComplex(nverts, edges, triangles, min_degree=min_degree)
    phi = None
    if phis:
        bad = [e for e in phis if not 0 <= e < c.n_edges]
        if bad:
            raise InvariantError(
                "edge-reference", f"phi given for missing edge {bad[0]}", ("edge", bad[0])
            )
        phi = np.zeros(c.n_edges)
        for e, v in phis.items():
            phi[e] = v
    return c, phi


def _arity(tok, n, lineno):
    if len(tok) != n:
        raise ParseError(f"{tok[0]!r} expects {n - 1} fields, got {len(tok) - 1}", lineno)


def parse_complex(text, min_degree=3):
    return parse_triangulation(text, min_degree=min_degree)[0]


def format_triangulation(c, phi=None, comment=None):
    out = []
    if comment:
        out.extend(f"# {line}" for line in comment.splitlines())
    out.append(f"vertices {c.n_vertices}")
    out.extend(f"edge {e} {a} {b}" for e, (a, b) in enumerate(c.edges))
    out.extend(f"triangle {t} {a} {b} {d}" for t, (a, b, d) in enumerate(c.triangles))
    if phi is not None:
        out.extend(f"phi {e} {float(v)!r}" for e, v in enumerate(phi))
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# combinatorics


def is_simplicial(c):
    """Check for loops and parallel edges; report every offender."""
    loops = tuple(int(e) for e in np.flatnonzero(c.edges[:, 0] == c.edges[:, 1]))
    by_pair = {}
    for e, (a, b) in enumerate(c.edges):
        if a != b:
            by_pair.setdefault((min(a, b), max(a, b)), []).append(e)
    parallel = []
    for group in by_pair.values():
        for i in range(len(group)):
            for j in range(i + 1, len(group)):
                parallel.append((group[i], group[j]))
    parallel.sort()
    return SimplicialReport(not loops and not parallel, loops, tuple(parallel))


def boundary_matrices(c):
    """Integer boundary matrices with ``d1(e) - d0(e)`` and ``d0 - d1 + d2``."""
    D1 = np.zeros((c.n_vertices, c.n_edges), dtype=np.int64)
    cols = np.arange(c.n_edges)
    np.add.at(D1, (c.edges[:, 1], cols), 1)
    np.add.at(D1, (c.edges[:, 0], cols), -1)
    D2 = np.zeros((c.n_edges, c.n_faces), dtype=np.int64)
    cols = np.arange(c.n_faces)
    for i, sign in enumerate((1, -1, 1)):
        np.add.at(D2, (c.triangles[:, i], cols), sign)
    return D1, D2


def is_connected(c):
    return len(_component_of(c, 0)) == c.n_vertices if c.n_vertices else True


def _component_of(c, root):
    adj = _vertex_adjacency(c)
    seen = {root}
    queue = deque([root])
    while queue:
        v = queue.popleft()
        for _, w in adj[v]:
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return seen


def _vertex_adjacency(c):
    """Per vertex, ``(edge, other endpoint)`` sorted by edge id."""
    adj = [[] for _ in range(c.n_vertices)]
    for e, (a, b) in enumerate(c.edges):
        adj[b].append((e, a))
        if a != b:
            adj[a].append((e, b))
    return adj


def _require_connected(c):
    if not is_connected(c):
        raise DisconnectedError("complex is not connected")


def orientation(c):
    """Signs ``eps`` over triangles with ``eps[0] = +1``.

    For each edge shared by ``(t, i)`` and ``(t', j)`` the signs satisfy
    ``eps[t] (-1)^i + eps[t'] (-1)^j = 0``. Raises ``NonOrientableError``
    carrying an edge cycle along which the signs contradict.
    """
    _require_connected(c)
    nf = c.n_faces
    eps = np.zeros(nf, dtype=np.int64)
    parent = [None] * nf  # (previous triangle, edge crossed)
    if nf == 0:
        return eps
    eps[0] = 1
    queue = deque([0])
    while queue:
        t = queue.popleft()
        for i, e in enumerate(c.triangles[t]):
            (t1, i1), (t2, i2) = c.edge_incidences[e]
            if (t1, i1) == (t, i):
                u, j = t2, i2
            else:
                u, j = t1, i1
            want = -eps[t] * (-1) ** i * (-1) ** j
            if eps[u] == 0:
                eps[u] = want
                parent[u] = (t, int(e))
                queue.append(u)
            elif eps[u] != want:
                cycle = _edge_path(parent, t)[::-1] + [int(e)] + _edge_path(parent, u)
                raise NonOrientableError(
                    f"sign propagation across edge {int(e)} contradicts an earlier choice",
                    _trim_common(cycle),
                )
    return eps


def _edge_path(parent, t):
    path = []
    while parent[t] is not None:
        t, e = parent[t]
        path.append(e)
    return path


def _trim_common(cycle):
    # the two tree paths share a prefix from the root; drop it from both ends
    while len(cycle) >= 3 and cycle[0] == cycle[-1]:
        cycle = cycle[1:-1]
    return cycle


def euler_characteristic(c):
    return c.n_vertices - c.n_edges + c.n_faces


def genus(c):
    chi = euler_characteristic(c)
    if chi % 2:
        raise InvariantError("euler-parity", f"odd Euler characteristic {chi}")
    orientation(c)
    return (2 - chi) // 2


def _subset(c, I, allow_full=True):
    I = frozenset(int(v) for v in I)
    if not I:
        raise ValueError("vertex subset must be non-empty")
    if any(not 0 <= v < c.n_vertices for v in I):
        raise ValueError("vertex subset references missing vertices")
    if not allow_full and len(I) == c.n_vertices:
        raise ValueError("vertex subset must be proper")
    return I


def subcomplex_summary(c, I):
    """Cells all of whose vertices (as a multiset) lie in ``I``."""
    I = _subset(c, I)
    n_e = sum(1 for a, b in c.edges if a in I and b in I)
    n_f = sum(1 for tri in c.vertex_triples if all(v in I for v in tri))
    return SubcomplexSummary(I, n_e, n_f)


def link_pairs(c, I, mode="simplicial"):
    """Link of a vertex subset.

    ``mode="simplicial"``: pairs ``(e, t)`` with ``e`` a side of ``t``, both
    endpoints of ``e`` outside ``I`` and some vertex of ``t`` in ``I``.

    ``mode="delta"``: triples ``(e, t, i)`` with ``v_i(t)`` in ``I``,
    ``d_i(t) = e`` and ``v_s(t)`` outside ``I`` for ``s != i``; one entry per
    qualifying slot.
    """
    I = _subset(c, I, allow_full=False)
    out = []
    if mode == "simplicial":
        if not is_simplicial(c):
            raise ValueError("simplicial-mode link needs a simplicial complex")
        seen = set()
        for t, (tri, sides) in enumerate(zip(c.vertex_triples, c.triangles)):
            if not any(v in I for v in tri):
                continue
            for i, e in enumerate(sides):
                a, b = c.edges[e]
                if a not in I and b not in I and (e, t) not in seen:
                    seen.add((e, t))
                    out.append(LinkPair(int(e), t, i))
    elif mode == "delta":
        for t, (tri, sides) in enumerate(zip(c.vertex_triples, c.triangles)):
            for i in range(3):
                if tri[i] in I and all(tri[s] not in I for s in range(3) if s != i):
                    out.append(LinkPair(int(sides[i]), t, i))
    else:
        raise ValueError(f"unknown link mode {mode!r}")
    return out
