"""Three-circle configurations and the curvature map.

Angles and lengths inside a triangle are indexed by slot: ``theta[i]`` is the
angle at vertex ``v_i`` and ``l[i]`` is the length of the opposite side
``d_i``, whose intersection angle is ``phi[i]``.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DegenerateTriangleError

__all__ = [
    "Background",
    "Degenerate",
    "edge_length",
    "triangle_angles",
    "angles_from_lengths",
    "condition_S",
    "condition_S_all",
    "condition_W",
    "euclidean_E",
    "degenerate_witness",
    "triangle_lengths",
    "triangle_angle_table",
    "curvature_map",
    "curvature_jacobian",
    "to_u",
    "from_u",
    "CLAMP_TOL",
]

CLAMP_TOL = 1e-12
TWO_PI = 2.0 * np.pi


class Background(str, Enum):
    EUCLIDEAN = "euclidean"
    HYPERBOLIC = "hyperbolic"


def _bg(bg):
    return Background(bg)


@dataclass(frozen=True)
class Degenerate:
    """Lengths that do not bound a triangle in the chosen background.

    ``slot`` is the angle whose cosine left ``[-1, 1]`` and ``cosine`` its
    value.
    """

    lengths: tuple
    slot: int
    cosine: float

    def __bool__(self):
        return False


# ---------------------------------------------------------------------------
# lengths and angles


def edge_length(ra, rb, phi, bg=Background.EUCLIDEAN):
    """Distance between the centers of two circles meeting at angle ``phi``."""
    ra, rb, phi = np.asarray(ra, float), np.asarray(rb, float), np.asarray(phi, float)
    if _bg(bg) is Background.EUCLIDEAN:
        out = np.sqrt(ra * ra + rb * rb + 2.0 * ra * rb * np.cos(phi))
    else:
        # cosh l - 1 written without cancellation near tangency
        y = 2.0 * np.sinh(0.5 * (ra + rb)) ** 2 - 2.0 * np.sinh(ra) * np.sinh(rb) * np.sin(
            0.5 * phi
        ) ** 2
        out = np.log1p(y + np.sqrt(y * (y + 2.0)))
    return out[()] if out.ndim == 0 else out


def _half_angle_terms(L, bg):
    """Numerators of ``sin^2`` and ``cos^2`` of each half angle (common denominator)."""
    s = 0.5 * L.sum(axis=-1, keepdims=True)
    d = s - L  # s - l_i
    if bg is Background.HYPERBOLIC:
        s, d = np.sinh(s), np.sinh(d)
    A = np.stack([d[..., 1] * d[..., 2], d[..., 0] * d[..., 2], d[..., 0] * d[..., 1]], -1)
    return A, s * d


def angles_from_lengths(L, bg=Background.EUCLIDEAN):
    """Vectorized interior angles.

    ``L`` has shape (..., 3). Returns ``(theta, cosines, bad)`` where ``bad``
    flags triangles with a cosine outside ``[-1 - CLAMP_TOL, 1 + CLAMP_TOL]``.
    With ``A = sin^2(theta/2)`` and ``B = cos^2(theta/2)`` from the half-angle
    formulas, the cosine is ``(B - A) / (A + B)`` (the cosine law value) and
    the angle is ``2 atan2(sqrt(A), sqrt(B))``. Both stay accurate for tiny
    hyperbolic lengths, where the cosine law cancels catastrophically.
    """
    A, B = _half_angle_terms(np.asarray(L, dtype=float), _bg(bg))
    with np.errstate(invalid="ignore", divide="ignore"):
        C = (B - A) / (A + B)
    bad = np.any(~(np.abs(C) <= 1.0 + CLAMP_TOL), axis=-1)
    theta = 2.0 * np.arctan2(np.sqrt(np.clip(A, 0, None)), np.sqrt(np.clip(B, 0, None)))
    return theta, np.clip(C, -1.0, 1.0), bad


def triangle_angles(li, lj, lk, bg=Background.EUCLIDEAN):
    """Angles opposite ``li, lj, lk``, or a :class:`Degenerate` value."""
    L = np.array([li, lj, lk], dtype=float)
    theta, _, bad = angles_from_lengths(L, bg)
    if bad:
        A, B = _half_angle_terms(L, _bg(bg))
        with np.errstate(invalid="ignore", divide="ignore"):
            C = (B - A) / (A + B)
        slot = int(np.argmax(np.where(np.isfinite(C), np.abs(C), np.inf)))
        return Degenerate(tuple(L.tolist()), slot, float(C[slot]))
    return tuple(float(t) for t in theta)


# ---------------------------------------------------------------------------
# angle conditions


def condition_S(phi_i, phi_j, phi_k):
    ci, cj, ck = np.cos(phi_i), np.cos(phi_j), np.cos(phi_k)
    return bool(ci + cj * ck >= 0 and cj + ck * ci >= 0 and ck + ci * cj >= 0)


def condition_S_all(c, phi):
    """Check every triangle; returns ``(ok, failing_triangle_ids)``."""
    P = np.cos(np.asarray(phi, dtype=float)[c.triangles])
    ok = (
        (P[:, 0] + P[:, 1] * P[:, 2] >= 0)
        & (P[:, 1] + P[:, 2] * P[:, 0] >= 0)
        & (P[:, 2] + P[:, 0] * P[:, 1] >= 0)
    )
    failing = [int(t) for t in np.flatnonzero(~ok)]
    return not failing, failing


def condition_W(phi_i, phi_j, phi_k):
    pi = np.pi
    if phi_i + phi_j + phi_k <= pi:
        return True
    return bool(
        phi_i + phi_j < pi + phi_k and phi_j + phi_k < pi + phi_i and phi_k + phi_i < pi + phi_j
    )


def euclidean_E(r_i, r_j, r_k, phi_i, phi_j, phi_k):
    """Degeneracy polynomial; positive iff the center triangle is non-degenerate."""
    ci, cj, ck = np.cos(phi_i), np.cos(phi_j), np.cos(phi_k)
    return (
        4 * r_i**2 * r_j**2 * (1 - ck**2)
        + 4 * r_j**2 * r_k**2 * (1 - ci**2)
        + 4 * r_k**2 * r_i**2 * (1 - cj**2)
        + 8 * r_i * r_j * r_k * (
            r_i * (ci + cj * ck) + r_j * (cj + ck * ci) + r_k * (ck + ci * cj)
        )
    )


def degenerate_witness(phi_i, phi_j, phi_k):
    """Radii ``(t, t, 1)`` (in the caller's slot order) with ``E <= 0``.

    The angle pair whose sum exceeds ``pi`` plus the third angle gets radius
    ``t``; the third gets 1. ``t`` maximizes the quadratic obtained from
    ``E(t, t, 1)``.
    """
    phis = (float(phi_i), float(phi_j), float(phi_k))
    if condition_W(*phis):
        raise ValueError("angles satisfy condition W; no degenerate radii exist")
    for k in range(3):
        i, j = [s for s in range(3) if s != k]
        if phis[i] + phis[j] > np.pi + phis[k]:
            break
    else:
        raise ValueError("no pair exceeds pi plus the third angle strictly")
    ci, cj, ck = np.cos(phis[i]), np.cos(phis[j]), np.cos(phis[k])
    if not abs(ck) < 1:
        raise ValueError("cos of the small angle must lie strictly inside (-1, 1)")
    t = -(1 + ck) * (ci + cj) / (1 - ck * ck)
    r = [t, t, t]
    r[k] = 1.0
    return tuple(r)


# ---------------------------------------------------------------------------
# curvature


def triangle_lengths(c, phi, r, bg=Background.EUCLIDEAN):
    """Side lengths per triangle slot, shape (F, 3)."""
    R = np.asarray(r, dtype=float)[c.vertex_triples]
    P = np.asarray(phi, dtype=float)[c.triangles]
    return edge_length(R[:, [1, 0, 0]], R[:, [2, 2, 1]], P, bg)


def triangle_angle_table(c, phi, r, bg=Background.EUCLIDEAN):
    """Interior angles per triangle slot; raises on the first degenerate triangle."""
    _check_radii(c, r)
    L = triangle_lengths(c, phi, r, bg)
    theta, _, bad = angles_from_lengths(L, bg)
    if bad.any():
        t = int(np.flatnonzero(bad)[0])
        raise DegenerateTriangleError(t, L[t], "triangle inequality fails")
    return theta


def _check_radii(c, r):
    r = np.asarray(r, dtype=float)
    if r.shape != (c.n_vertices,):
        raise ValueError(f"expected {c.n_vertices} radii, got shape {r.shape}")
    if not np.all(r > 0):
        raise ValueError("radii must be positive")


def curvature_map(c, phi, r, bg=Background.EUCLIDEAN):
    """``K_v = 2 pi - sum of angles at every slot occupied by v``."""
    theta = triangle_angle_table(c, phi, r, bg)
    return TWO_PI - np.bincount(
        c.vertex_triples.ravel(), weights=theta.ravel(), minlength=c.n_vertices
    )


def to_u(r, bg=Background.EUCLIDEAN):
    r = np.asarray(r, dtype=float)
    if not np.all(r > 0):
        raise ValueError("radii must be positive")
    if _bg(bg) is Background.EUCLIDEAN:
        return np.log(r)
    return np.log(np.tanh(0.5 * r))


def from_u(u, bg=Background.EUCLIDEAN):
    u = np.asarray(u, dtype=float)
    if _bg(bg) is Background.EUCLIDEAN:
        return np.exp(u)
    if not np.all(u < 0):
        raise ValueError("hyperbolic u-coordinates must be negative")
    return 2.0 * np.arctanh(np.exp(u))


def _dr_du(r, bg):
    return r if bg is Background.EUCLIDEAN else np.sinh(r)


def curvature_jacobian(c, phi, r, bg=Background.EUCLIDEAN):
    """``J[a, b] = dK_a / du_b`` assembled per triangle by the chain rule."""
    bg = _bg(bg)
    _check_radii(c, r)
    r = np.asarray(r, dtype=float)
    V = c.vertex_triples
    R = r[V]
    P = np.asarray(phi, dtype=float)[c.triangles]
    L = triangle_lengths(c, phi, r, bg)
    theta, C, bad = angles_from_lengths(L, bg)
    if bad.any():
        t = int(np.flatnonzero(bad)[0])
        raise DegenerateTriangleError(t, L[t], "triangle inequality fails")

    # dl_s / dR_a for side s joining slots a, b
    ends = np.array([[1, 2], [0, 2], [0, 1]])
    dLdR = np.zeros(L.shape + (3,))
    for s, (a, b) in enumerate(ends):
        ra, rb, ph, ls = R[:, a], R[:, b], P[:, s], L[:, s]
        if bg is Background.EUCLIDEAN:
            ga = (ra + rb * np.cos(ph)) / ls
            gb = (rb + ra * np.cos(ph)) / ls
        else:
            shl = np.sinh(ls)
            ga = (np.sinh(ra) * np.cosh(rb) + np.cosh(ra) * np.sinh(rb) * np.cos(ph)) / shl
            gb = (np.sinh(rb) * np.cosh(ra) + np.cosh(rb) * np.sinh(ra) * np.cos(ph)) / shl
        dLdR[:, s, a] = ga
        dLdR[:, s, b] = gb

    # d cos(theta_i) / dl_x, then dtheta = -dcos / sin(theta)
    dC = np.zeros(L.shape + (3,))
    for i in range(3):
        j, k = (i + 1) % 3, (i + 2) % 3
        li, lj, lk, ci = L[:, i], L[:, j], L[:, k], C[:, i]
        if bg is Background.EUCLIDEAN:
            dC[:, i, i] = -li / (lj * lk)
            dC[:, i, j] = 1.0 / lk - ci / lj
            dC[:, i, k] = 1.0 / lj - ci / lk
        else:
            shi, shj, shk = np.sinh(li), np.sinh(lj), np.sinh(lk)
            dC[:, i, i] = -shi / (shj * shk)
            dC[:, i, j] = np.cosh(lk) / shk - ci * np.cosh(lj) / shj
            dC[:, i, k] = np.cosh(lj) / shj - ci * np.cosh(lk) / shk
    dTdL = -dC / np.sin(theta)[:, :, None]
    dTdU = np.einsum("fis,fsa->fia", dTdL, dLdR) * _dr_du(R, bg)[:, None, :]

    n = c.n_vertices
    J = np.zeros((n, n))
    rows = np.repeat(V, 3, axis=1).ravel()
    cols = np.tile(V, (1, 3)).ravel()
    np.add.at(J, (rows, cols), -dTdU.ravel())
    return J
