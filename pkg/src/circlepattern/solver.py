"""Prescribed-curvature solvers in u-coordinates.

``u = log r`` in the Euclidean background and ``u = log tanh(r / 2)`` in the
hyperbolic one. Euclidean solutions are reported in the gauge ``sum(u) = 0``.
"""

from dataclasses import dataclass, field

import numpy as np

from .complex import euler_characteristic
from .covering import (
    is_deck_invariant,
    pullback_edge_data,
    pullback_vertex_data,
    pushforward_average,
)
from .errors import CirclePatternError, DegenerateTriangleError
from .geometry import (
    Background,
    condition_S_all,
    curvature_jacobian,
    curvature_map,
    from_u,
    to_u,
)

__all__ = [
    "SolveOptions",
    "SolveResult",
    "solve_prescribed",
    "flow_to_target",
    "solve_on_cover",
    "CoverSolveResult",
    "gauge",
]


@dataclass(frozen=True)
class SolveOptions:
    method: str = "newton"
    tol: float = 1e-10
    max_iter: int | None = None  # 200 for Newton, 10**6 for the flow
    backtrack: float = 0.5
    min_step: float = 1e-12
    shift: float = 1e-12

    def __post_init__(self):
        if self.method not in ("newton", "flow"):
            raise ValueError(f"unknown method {self.method!r}")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if not 0 < self.backtrack < 1:
            raise ValueError("backtrack ratio must lie in (0, 1)")

    @property
    def iterations(self):
        if self.max_iter is not None:
            return self.max_iter
        return 200 if self.method == "newton" else 10**6


@dataclass
class SolveResult:
    """Solver outcome.

    ``status`` is ``"converged"``, ``"infeasible"`` (a precondition such as
    the total-curvature clause fails, so no iteration ran) or
    ``"budget_exhausted"``.
    """

    status: str
    radii: np.ndarray | None
    background: Background
    method: str
    iterations: int
    residual: float
    trajectory: list = field(default_factory=list)
    seed: int | None = None
    gauge: str | None = None
    diagnostics: dict = field(default_factory=dict)

    @property
    def converged(self):
        return self.status == "converged"

    def to_dict(self, max_points=50):
        traj = self.trajectory
        if len(traj) > max_points:
            idx = np.unique(np.linspace(0, len(traj) - 1, max_points).astype(int))
            traj = [traj[i] for i in idx]
        return {
            "status": self.status,
            "method": self.method,
            "background": self.background.value,
            "seed": self.seed,
            "iterations": self.iterations,
            "residual": self.residual,
            "trajectory": traj,
            "radii": None if self.radii is None else self.radii.tolist(),
            "gauge": self.gauge,
            "diagnostics": self.diagnostics,
        }


def gauge(u, bg):
    """Project Euclidean u-coordinates onto ``sum(u) = 0``."""
    u = np.asarray(u, dtype=float)
    if Background(bg) is Background.EUCLIDEAN:
        return u - u.mean()
    return u


def _precheck(c, phi, target, bg, cover=None):
    ok, failing = condition_S_all(c, phi)
    diag = {}
    if not ok:
        diag["condition_S_failing_triangles"] = failing
    total = float(np.sum(target))
    chi2pi = 2 * np.pi * euler_characteristic(c)
    diag["total_curvature"] = {"target_sum": total, "two_pi_chi": chi2pi}
    if Background(bg) is Background.EUCLIDEAN:
        if abs(total - chi2pi) > 1e-9:
            diag["reason"] = "target total curvature differs from 2*pi*chi"
            return False, diag
    elif not total > chi2pi:
        diag["reason"] = "target total curvature must exceed 2*pi*chi"
        return False, diag
    if cover is not None:
        diag["kat"] = _kat_diagnostics(cover, phi, target, bg)
        if diag["kat"].get("feasible") is False:
            diag["reason"] = "KAT check on the cover rejects the target"
            return False, diag
    return True, diag


def _residual(c, phi, u, target, bg):
    try:
        with np.errstate(all="ignore"):
            F = curvature_map(c, phi, from_u(u, bg), bg) - target
    except (DegenerateTriangleError, ValueError):
        return None
    return F if np.all(np.isfinite(F)) else None


def _divergence_pattern(u, bg):
    if Background(bg) is Background.EUCLIDEAN:
        small = np.flatnonzero(u < -20).tolist()
        large = np.flatnonzero(u > 20).tolist()
    else:
        small = np.flatnonzero(u < -20).tolist()
        large = np.flatnonzero(u > -1e-8).tolist()
    return {"radii_to_zero": small, "radii_to_infinity": large}


def _start(c, bg, r0):
    if r0 is None:
        r0 = np.ones(c.n_vertices)
    r0 = np.broadcast_to(np.asarray(r0, dtype=float), (c.n_vertices,))
    return gauge(to_u(r0, bg), bg)


def _fail_result(status, bg, method, diag, residual=np.inf, iterations=0, traj=None):
    return SolveResult(status, None, Background(bg), method, iterations, float(residual),
                       traj or [], diagnostics=diag)


def solve_prescribed(c, phi, target, bg=Background.EUCLIDEAN, opts=None, r0=None, cover=None):
    """Find radii with curvature ``target`` by damped Newton iteration.

    The Newton system is solved in the ``sum(u) = 0`` subspace for the
    Euclidean background (the kernel of the Jacobian is the constants).
    Steps are halved until the max-norm residual decreases and, in the
    hyperbolic background, ``u`` stays negative. Passing ``cover`` runs the
    KAT check first: a rejected target returns ``"infeasible"`` at once, and
    the nearest constraint is attached to the diagnostics either way.
    """
    opts = opts or SolveOptions()
    if opts.method == "flow":
        return flow_to_target(c, phi, target, bg, opts, r0=r0, cover=cover)
    bg = Background(bg)
    target = np.asarray(target, dtype=float)
    ok, diag = _precheck(c, phi, target, bg, cover)
    if not ok:
        return _fail_result("infeasible", bg, "newton", diag)
    n = c.n_vertices
    u = _start(c, bg, r0)
    F = _residual(c, phi, u, target, bg)
    if F is None:
        raise DegenerateTriangleError(-1, (), "degenerate configuration at the start point")
    res = float(np.abs(F).max())
    traj = [res]
    it = 0
    ones = np.ones((n, n)) / n
    while res > opts.tol and it < opts.iterations:
        with np.errstate(all="ignore"):
            J = curvature_jacobian(c, phi, from_u(u, bg), bg)
        if not np.all(np.isfinite(J)):
            diag.update(_divergence_pattern(u, bg))
            diag["reason"] = "Jacobian is singular (a triangle has collapsed)"
            return _budget(c, phi, target, bg, u, res, it, traj, diag, "newton", cover)
        A = J + opts.shift * np.eye(n)
        if bg is Background.EUCLIDEAN:
            A = A + ones
        delta = np.linalg.solve(A, -F)
        if bg is Background.EUCLIDEAN:
            delta -= delta.mean()
        step = 1.0
        while step >= opts.min_step:
            un = gauge(u + step * delta, bg)
            if bg is Background.HYPERBOLIC and not np.all(un < 0):
                step *= opts.backtrack
                continue
            Fn = _residual(c, phi, un, target, bg)
            if Fn is not None and np.abs(Fn).max() < res:
                break
            step *= opts.backtrack
        else:
            diag.update(_divergence_pattern(u, bg))
            diag["reason"] = "line search step underflow"
            return _budget(c, phi, target, bg, u, res, it, traj, diag, "newton", cover)
        u, F = un, Fn
        res = float(np.abs(F).max())
        traj.append(res)
        it += 1
    if res > opts.tol:
        diag.update(_divergence_pattern(u, bg))
        diag["reason"] = "iteration budget exhausted"
        return _budget(c, phi, target, bg, u, res, it, traj, diag, "newton", cover)
    return SolveResult("converged", from_u(u, bg), bg, "newton", it, res, traj,
                       gauge="sum_u_zero" if bg is Background.EUCLIDEAN else None,
                       diagnostics=diag)


def _kat_diagnostics(cover, phi, target, bg):
    from .kat import check_cover

    try:
        v = check_cover(cover, phi, target, bg)
    except CirclePatternError as exc:  # cap exceeded or non-simplicial cover
        return {"error": str(exc)}
    return {"feasible": v.feasible, "gauss_bonnet_ok": v.gauss_bonnet_ok,
            "nearest": v.worst.to_dict() if v.worst else None}


def _budget(c, phi, target, bg, u, res, it, traj, diag, method, cover):
    if cover is not None and "kat" not in diag:
        diag["kat"] = _kat_diagnostics(cover, phi, target, bg)
    return SolveResult("budget_exhausted", from_u(u, bg), Background(bg), method, it,
                       float(res), traj, diagnostics=diag)


def flow_to_target(c, phi, target, bg=Background.EUCLIDEAN, opts=None, r0=None, cover=None):
    """Explicit Euler on ``du/dt = -(K(u) - target)`` with adaptive step size.

    A step is accepted when it lowers the max-norm residual; the step size
    then grows by 10 percent, otherwise it is halved.
    """
    opts = opts or SolveOptions(method="flow")
    bg = Background(bg)
    target = np.asarray(target, dtype=float)
    ok, diag = _precheck(c, phi, target, bg, cover)
    if not ok:
        return _fail_result("infeasible", bg, "flow", diag)
    u = _start(c, bg, r0)
    F = _residual(c, phi, u, target, bg)
    if F is None:
        raise DegenerateTriangleError(-1, (), "degenerate configuration at the start point")
    res = float(np.abs(F).max())
    traj = [res]
    dt = 0.1
    it = 0
    while res > opts.tol and it < opts.iterations:
        un = gauge(u - dt * F, bg)
        Fn = None
        if bg is Background.EUCLIDEAN or np.all(un < 0):
            Fn = _residual(c, phi, un, target, bg)
        if Fn is not None and np.abs(Fn).max() < res:
            u, F = un, Fn
            res = float(np.abs(F).max())
            dt *= 1.1
        else:
            dt *= opts.backtrack
            if dt < opts.min_step:
                diag.update(_divergence_pattern(u, bg))
                diag["reason"] = "step underflow"
                return _budget(c, phi, target, bg, u, res, it, traj, diag, "flow", cover)
        traj.append(res)
        it += 1
    if res > opts.tol:
        diag.update(_divergence_pattern(u, bg))
        diag["reason"] = "iteration budget exhausted"
        return _budget(c, phi, target, bg, u, res, it, traj, diag, "flow", cover)
    return SolveResult("converged", from_u(u, bg), bg, "flow", it, res, traj,
                       gauge="sum_u_zero" if bg is Background.EUCLIDEAN else None,
                       diagnostics=diag)


@dataclass
class CoverSolveResult:
    result: SolveResult
    invariance_deviation: float
    pushforward_residual: float
    seed: int
    perturbation: float

    def to_dict(self):
        d = self.result.to_dict()
        d.update(
            invariance_deviation=self.invariance_deviation,
            pushforward_residual=self.pushforward_residual,
            seed=self.seed,
            perturbation=self.perturbation,
        )
        return d


def solve_on_cover(cov, phi, target, bg=Background.EUCLIDEAN, opts=None, seed=0,
                   perturbation=0.3, r0=None):
    """Solve on the cover from a deliberately non-invariant start.

    The start is the pulled-back ``r0`` (default 1) with every u-coordinate
    shifted by an independent uniform draw in ``[-perturbation, perturbation]``.
    Reports the largest orbit spread of the solution's u-coordinates (gauged)
    and ``max |pushforward(K_hat) - target|``.
    """
    bg = Background(bg)
    rng = np.random.default_rng(seed)
    phat = pullback_edge_data(cov, phi)
    That = pullback_vertex_data(cov, target)
    if r0 is None:
        r0 = np.ones(cov.base.n_vertices)
    start = pullback_vertex_data(cov, np.broadcast_to(r0, (cov.base.n_vertices,)))
    if perturbation > 0:
        u0 = to_u(start, bg) + rng.uniform(-perturbation, perturbation, start.shape)
        if bg is Background.HYPERBOLIC:
            u0 = np.minimum(u0, -1e-3)
        start = from_u(u0, bg)
    res = solve_prescribed(cov.total, phat, That, bg, opts, r0=start)
    res.seed = seed
    if not res.converged:
        return CoverSolveResult(res, np.inf, np.inf, seed, perturbation)
    uhat = gauge(to_u(res.radii, bg), bg)
    _, dev = is_deck_invariant(cov, uhat)
    Khat = curvature_map(cov.total, phat, res.radii, bg)
    push = float(np.abs(pushforward_average(cov, Khat) - target).max())
    return CoverSolveResult(res, dev, push, seed, perturbation)
