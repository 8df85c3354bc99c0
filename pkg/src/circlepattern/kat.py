"""KAT inequalities: exhaustive feasibility checks for curvature vectors.

For a vertex subset ``I`` the constraint reads

    sum_{v in I} K_v  >  -sum_{(e, t) in Lk(I)} (pi - phi(e)) + 2 pi chi(Sigma(I))

Subsets are encoded as bitmasks over vertex ids and evaluated in vectorized
chunks; every proper non-empty subset is visited in increasing mask order.
"""

import time
from dataclasses import dataclass, field

import numpy as np

from .complex import euler_characteristic, is_simplicial, link_pairs, subcomplex_summary
from .covering import pullback_edge_data, pullback_vertex_data
from .errors import EnumerationCapError, NotSimplicialError
from .geometry import Background

__all__ = [
    "KatConstraint",
    "FeasibilityVerdict",
    "kat_rhs",
    "kat_constraint",
    "check_subsets",
    "check_cover",
    "check_base_necessary",
    "curvature_limit_base",
    "constant_curvature_interval",
    "gauss_bonnet",
    "DEFAULT_CAP",
    "BOUNDARY_TOL",
    "GB_TOL",
]

DEFAULT_CAP = 24
BOUNDARY_TOL = 1e-9
GB_TOL = 1e-9
_CHUNK = 1 << 15


@dataclass(frozen=True)
class KatConstraint:
    subset: tuple
    lhs: float
    rhs: float
    binding_rank: int = -1

    @property
    def slack(self):
        return self.lhs - self.rhs

    @property
    def satisfied(self):
        return self.slack > 0

    @property
    def boundary(self):
        return abs(self.slack) <= BOUNDARY_TOL

    def to_dict(self):
        return {
            "subset": list(self.subset),
            "lhs": self.lhs,
            "rhs": self.rhs,
            "slack": self.slack,
            "binding_rank": self.binding_rank,
        }


@dataclass
class FeasibilityVerdict:
    """Outcome of an exhaustive KAT check.

    A constraint counts as violated when its slack is at most
    ``BOUNDARY_TOL``; those with ``|slack| <= BOUNDARY_TOL`` are also listed
    as boundary cases.
    """

    feasible: bool
    gauss_bonnet_ok: bool
    gauss_bonnet: dict
    worst: KatConstraint | None
    violations: list
    violation_count: int
    boundary_count: int
    subsets_checked: int
    binding: list = field(default_factory=list)
    necessary_only: bool = False
    cone_positivity: dict | None = None
    wall_time: float = 0.0

    def to_dict(self):
        return {
            "verdict": "feasible" if self.feasible else "infeasible",
            "label": "NECESSARY-ONLY" if self.necessary_only else "CHARACTERIZATION",
            "gauss_bonnet": self.gauss_bonnet,
            "worst": self.worst.to_dict() if self.worst else None,
            "binding": [b.to_dict() for b in self.binding],
            "violations": [v.to_dict() for v in self.violations],
            "violation_count": self.violation_count,
            "boundary_cases": [v.to_dict() for v in self.violations if v.boundary],
            "boundary_count": self.boundary_count,
            "subsets_checked": self.subsets_checked,
            "cone_positivity": self.cone_positivity,
            "wall_time": self.wall_time,
        }


# ---------------------------------------------------------------------------
# single subsets (direct combinatorics, used as the reference path)


def kat_rhs(c, phi, I, mode="simplicial"):
    """Right-hand side for one subset from the link and the subcomplex."""
    if mode == "simplicial" and not is_simplicial(c):
        raise NotSimplicialError("KAT right-hand side on the complex needs it simplicial")
    phi = np.asarray(phi, dtype=float)
    link = link_pairs(c, I, mode=mode)
    chi = subcomplex_summary(c, I).euler_char
    return -sum(np.pi - phi[p.edge] for p in link) + 2 * np.pi * chi


def kat_constraint(c, phi, K, I, mode="simplicial"):
    I = tuple(sorted(int(v) for v in I))
    K = np.asarray(K, dtype=float)
    return KatConstraint(I, float(K[list(I)].sum()), float(kat_rhs(c, phi, I, mode)))


# ---------------------------------------------------------------------------
# exhaustive enumeration


class _Tables:
    def __init__(self, c, phi):
        self.n = c.n_vertices
        self.edge_ends = np.asarray(c.edges)
        self.slots = np.asarray(c.vertex_triples)
        # weight of slot i: pi - phi(d_i), counted when v_i is the only slot in I
        self.link_w = np.pi - np.asarray(phi, dtype=float)[c.triangles]

    def evaluate(self, masks, K):
        shifts = np.arange(self.n, dtype=np.int64)
        bits = ((masks[:, None] >> shifts[None, :]) & 1).astype(bool)
        n_in = bits.sum(axis=1)
        e_in = (bits[:, self.edge_ends[:, 0]] & bits[:, self.edge_ends[:, 1]]).sum(axis=1)
        b = bits[:, self.slots]  # (M, F, 3)
        f_in = b.all(axis=2).sum(axis=1)
        alone = b & ~np.roll(b, 1, axis=2) & ~np.roll(b, 2, axis=2)
        link = (alone * self.link_w[None]).sum(axis=(1, 2))
        rhs = -link + 2 * np.pi * (n_in - e_in + f_in)
        lhs = bits.astype(float) @ K
        return lhs, rhs


def _mask_to_subset(mask, n):
    return tuple(v for v in range(n) if (mask >> v) & 1)


def gauss_bonnet(c, K, bg):
    bg = Background(bg)
    total = float(np.sum(K))
    target = 2 * np.pi * euler_characteristic(c)
    if bg is Background.EUCLIDEAN:
        ok = abs(total - target) <= GB_TOL
        mode = "equality"
    else:
        ok = total - target > GB_TOL
        mode = "strict-greater"
    return ok, {"lhs": total, "rhs": target, "mode": mode, "ok": ok}


def check_subsets(c, phi, K, cap=DEFAULT_CAP, max_reported=100, n_binding=5):
    """Evaluate every proper non-empty vertex subset of ``c``.

    Uses the slot-wise link, which coincides with the simplicial link when
    ``c`` is simplicial. Returns ``(worst, violations, counts, binding)``.
    """
    n = c.n_vertices
    if n > cap:
        raise EnumerationCapError(n, cap)
    K = np.asarray(K, dtype=float)
    tables = _Tables(c, phi)
    total = (1 << n) - 2 if n >= 1 else 0
    worst = None
    best = []  # (slack, mask, lhs, rhs) for the n_binding smallest slacks
    violations = []
    n_viol = n_bound = 0
    start = 1
    stop = (1 << n) - 1
    while start < stop:
        end = min(start + _CHUNK, stop)
        masks = np.arange(start, end, dtype=np.int64)
        lhs, rhs = tables.evaluate(masks, K)
        slack = lhs - rhs
        bad = np.flatnonzero(slack <= BOUNDARY_TOL)
        n_viol += bad.size
        n_bound += int(np.count_nonzero(np.abs(slack) <= BOUNDARY_TOL))
        for i in bad[: max(0, max_reported - len(violations))]:
            violations.append(
                KatConstraint(_mask_to_subset(int(masks[i]), n), float(lhs[i]), float(rhs[i]))
            )
        k = min(n_binding, slack.size)
        idx = np.argpartition(slack, k - 1)[:k] if k < slack.size else np.arange(slack.size)
        best.extend((float(slack[i]), int(masks[i]), float(lhs[i]), float(rhs[i])) for i in idx)
        best = sorted(best)[:n_binding]
        start = end
    binding = [
        KatConstraint(_mask_to_subset(m, n), lh, rh, binding_rank=rank)
        for rank, (_, m, lh, rh) in enumerate(best)
    ]
    worst = binding[0] if binding else None
    return worst, violations, (total, n_viol, n_bound), binding


def _verdict(c, K, bg, worst, violations, counts, binding, cone_positivity, t0,
             necessary_only=False):
    gb_ok, gb = gauss_bonnet(c, K, bg)
    total, n_viol, n_bound = counts
    cone = None
    feasible = gb_ok and n_viol == 0
    if cone_positivity:
        over = [int(v) for v in np.flatnonzero(np.asarray(K) >= 2 * np.pi)]
        cone = {"ok": not over, "vertices_at_or_above_2pi": over}
        feasible = feasible and not over
    return FeasibilityVerdict(
        feasible=feasible,
        gauss_bonnet_ok=gb_ok,
        gauss_bonnet=gb,
        worst=worst,
        violations=violations,
        violation_count=n_viol,
        boundary_count=n_bound,
        subsets_checked=total,
        binding=binding,
        necessary_only=necessary_only,
        cone_positivity=cone,
        wall_time=time.perf_counter() - t0,
    )


def check_cover(cov, phi, K, bg, cap=DEFAULT_CAP, cone_positivity=False, max_reported=100):
    """Decide whether ``K`` (on the base) lies in the curvature image.

    ``phi`` and ``K`` are given on the base and pulled back to the simplicial
    cover, where all ``2^n - 2`` proper subsets are checked. The total
    curvature clause is checked on the base.
    """
    t0 = time.perf_counter()
    if not is_simplicial(cov.total):
        raise NotSimplicialError("the covering complex is not simplicial")
    if cov.total.n_vertices > cap:
        raise EnumerationCapError(cov.total.n_vertices, cap)
    K = np.asarray(K, dtype=float)
    phat = pullback_edge_data(cov, phi)
    Khat = pullback_vertex_data(cov, K)
    worst, viol, counts, binding = check_subsets(cov.total, phat, Khat, cap, max_reported)
    return _verdict(cov.base, K, bg, worst, viol, counts, binding, cone_positivity, t0)


def check_base_necessary(c, phi, K, bg, cap=DEFAULT_CAP, cone_positivity=False,
                         max_reported=100):
    """Base-level inequalities with slot-wise links; necessary but not sufficient."""
    t0 = time.perf_counter()
    K = np.asarray(K, dtype=float)
    worst, viol, counts, binding = check_subsets(c, phi, K, cap, max_reported)
    return _verdict(c, K, bg, worst, viol, counts, binding, cone_positivity, t0,
                    necessary_only=True)


# ---------------------------------------------------------------------------
# limits and the one-vertex demonstration


def curvature_limit_base(c, phi, I):
    """Limit of ``sum_{v in I} K_v`` as the radii on ``I`` shrink to zero."""
    I = frozenset(int(v) for v in I)
    if not I or len(I) >= c.n_vertices or any(not 0 <= v < c.n_vertices for v in I):
        raise ValueError("I must be a non-empty proper vertex subset")
    phi = np.asarray(phi, dtype=float)
    slots_in = np.isin(c.vertex_triples, list(I)).sum(axis=1)
    a2 = int(np.count_nonzero(slots_in == 2))
    a3 = int(np.count_nonzero(slots_in == 3))
    link = link_pairs(c, I, mode="delta")
    return 2 * np.pi * len(I) - (a2 + a3) * np.pi - sum(np.pi - phi[p.edge] for p in link)


def constant_curvature_interval(cov, phi, bg=Background.HYPERBOLIC, cap=DEFAULT_CAP):
    """Lower bound on a constant curvature over a one-vertex base.

    Each cover constraint becomes ``K > rhs(I) / |I|`` and the total
    curvature clause ``K > 2 pi chi / |V|``. Returns a dict with the supremum
    of these bounds, the subsets attaining it, and the (empty) base set.
    """
    if cov.base.n_vertices != 1:
        raise ValueError("the constant-curvature demonstration needs a one-vertex base")
    tot = cov.total
    n = tot.n_vertices
    if n > cap:
        raise EnumerationCapError(n, cap)
    tables = _Tables(tot, pullback_edge_data(cov, phi))
    masks = np.arange(1, (1 << n) - 1, dtype=np.int64)
    _, rhs = tables.evaluate(masks, np.zeros(n))
    sizes = np.array([bin(int(m)).count("1") for m in masks])
    bounds = rhs / sizes
    gb_bound = 2 * np.pi * euler_characteristic(cov.base) / cov.base.n_vertices
    sup_cover = float(bounds.max())
    attaining = [_mask_to_subset(int(m), n) for m in masks[bounds >= sup_cover - 1e-12]]
    if Background(bg) is Background.EUCLIDEAN:
        gb = {"mode": "equality", "value": gb_bound}
    else:
        gb = {"mode": "strict-greater", "value": gb_bound}
    lower = max(sup_cover, gb_bound)
    return {
        "lower_bound": lower,
        "binding": "gauss_bonnet" if gb_bound >= sup_cover else "cover_subsets",
        "cover_bound": sup_cover,
        "cover_binding_subsets": attaining,
        "gauss_bonnet": gb,
        "cover_subsets_checked": int(masks.size),
        "rhs_all_nonpositive": bool((rhs <= 0).all()),
        "non_preimage_subsets": int(masks.size),  # only {} and V-hat are preimages
        "base_constraints": [],
    }
