"""Raw-SVG drawing of a single Euclidean three-circle configuration."""

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateTriangleError
from .geometry import Background, edge_length, euclidean_E, triangle_angles

__all__ = ["TripleLayout", "layout_triple", "measured_angles", "triple_svg"]


@dataclass(frozen=True)
class TripleLayout:
    radii: tuple
    phi: tuple
    lengths: tuple  # l_i opposite center i
    centers: np.ndarray  # (3, 2)
    angles: tuple  # from triangle_angles


def layout_triple(r_i, r_j, r_k, phi_i, phi_j, phi_k):
    """Centers with ``i`` at the origin, ``j`` on the positive x-axis and ``k`` above it.

    ``phi_i`` is the intersection angle on the edge opposite center ``i``.
    """
    radii = (float(r_i), float(r_j), float(r_k))
    phi = (float(phi_i), float(phi_j), float(phi_k))
    if min(radii) <= 0:
        raise ValueError("radii must be positive")
    E = euclidean_E(*radii, *phi)
    li = float(edge_length(r_j, r_k, phi_i))
    lj = float(edge_length(r_i, r_k, phi_j))
    lk = float(edge_length(r_i, r_j, phi_k))
    ang = triangle_angles(li, lj, lk, Background.EUCLIDEAN)
    if not E > 0 or not ang:
        raise DegenerateTriangleError(0, (li, lj, lk), f"E = {E!r} <= 0")
    # k sits at distance l_j from i and l_i from j
    x = (lj * lj + lk * lk - li * li) / (2 * lk)
    y = np.sqrt(max(lj * lj - x * x, 0.0))
    centers = np.array([[0.0, 0.0], [lk, 0.0], [x, y]])
    return TripleLayout(radii, phi, (li, lj, lk), centers, ang)


def measured_angles(centers):
    """Interior angles of the center triangle read off the coordinates."""
    P = np.asarray(centers, dtype=float)
    out = []
    for a in range(3):
        u = P[(a + 1) % 3] - P[a]
        v = P[(a + 2) % 3] - P[a]
        out.append(float(np.arctan2(abs(u[0] * v[1] - u[1] * v[0]), u @ v)))
    return tuple(out)


def triple_svg(layout, size=480, margin=20):
    """SVG text: circles, center triangle and angle labels (y axis flipped)."""
    P = layout.centers
    R = np.array(layout.radii)
    lo = (P - R[:, None]).min(axis=0)
    hi = (P + R[:, None]).max(axis=0)
    scale = (size - 2 * margin) / float(max(hi - lo))
    width, height = (hi - lo) * scale + 2 * margin

    def xy(p):
        return (p[0] - lo[0]) * scale + margin, (hi[1] - p[1]) * scale + margin

    names = "ijk"
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.2f}" height="{height:.2f}" '
        f'viewBox="0 0 {width:.2f} {height:.2f}">',
        '<rect width="100%" height="100%" fill="white"/>',
    ]
    for a in range(3):
        cx, cy = xy(P[a])
        parts.append(
            f'<circle cx="{cx:.4f}" cy="{cy:.4f}" r="{R[a] * scale:.4f}" '
            'fill="none" stroke="steelblue" stroke-width="1.5"/>'
        )
    pts = " ".join("{:.4f},{:.4f}".format(*xy(p)) for p in P)
    parts.append(f'<polygon points="{pts}" fill="none" stroke="black" stroke-width="1"/>')
    centroid = P.mean(axis=0)
    for a in range(3):
        cx, cy = xy(P[a])
        parts.append(f'<circle cx="{cx:.4f}" cy="{cy:.4f}" r="2.5" fill="black"/>')
        lx, ly = xy(P[a] + 0.25 * (centroid - P[a]))
        parts.append(
            f'<text x="{lx:.4f}" y="{ly:.4f}" font-size="12" font-family="sans-serif" '
            f'text-anchor="middle">{names[a]}: {np.degrees(layout.angles[a]):.3f}&#176;</text>'
        )
    parts.append(
        f'<text x="{margin}" y="{height - 6:.2f}" font-size="11" font-family="sans-serif">'
        "phi = (" + ", ".join(f"{p:.4f}" for p in layout.phi) + ")</text>"
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
