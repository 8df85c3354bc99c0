"""Command-line front end.

Exit codes: 0 success, 1 domain failure (invalid input, infeasible target,
degenerate triangle, no cover), 2 I/O or usage error, 3 enumeration cap,
4 solver budget exhausted.
"""

import argparse
import json
import math
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import __version__
from .complex import (
    euler_characteristic,
    format_triangulation,
    genus,
    is_connected,
    is_simplicial,
    orientation,
    parse_triangulation,
)
from .covering import (
    cover_sidecar,
    derived_cover,
    homology_voltages,
    parse_voltages,
    unwrap,
    verify_covering,
)
from .errors import (
    CirclePatternError,
    CoverNotFoundError,
    DegenerateTriangleError,
    EnumerationCapError,
    ParseError,
)
from .geometry import Background, condition_S_all, curvature_map, triangle_angle_table
from .kat import DEFAULT_CAP, check_base_necessary, check_cover
from .render import layout_triple, measured_angles, triple_svg
from .solver import SolveOptions, solve_on_cover, solve_prescribed

EXIT_OK, EXIT_DOMAIN, EXIT_IO, EXIT_CAP, EXIT_BUDGET = 0, 1, 2, 3, 4


class CliError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


# ---------------------------------------------------------------------------
# I/O helpers


def atomic_write(path, text):
    """Write ``text`` to ``path`` through a temporary file and a rename."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else repr(x)
    if isinstance(x, (np.bool_,)):
        return bool(x)
    return x


def dump_json(report):
    # json serializes floats with repr, the shortest string that round-trips
    return json.dumps(_jsonable(report), indent=2) + "\n"


def emit(report, out):
    text = dump_json(report)
    if out:
        atomic_write(out, text)
    else:
        sys.stdout.write(text)


def read_text(path):
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror or exc}", EXIT_IO) from None


def load_triangulation(path, min_degree=3):
    return parse_triangulation(read_text(path), min_degree=min_degree)


def parse_vertex_values(source, n, what):
    """A constant, or a file of ``<vertex-id> <value>`` lines covering every vertex."""
    try:
        return np.full(n, float(source))
    except ValueError:
        pass
    vals = {}
    for lineno, raw in enumerate(read_text(source).splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        try:
            if len(tok) != 2:
                raise ValueError
            v, x = int(tok[0]), float(tok[1])
        except ValueError:
            raise ParseError(f"{what} file: expected '<vertex-id> <value>'", lineno) from None
        if not 0 <= v < n:
            raise ParseError(f"{what} file: vertex {v} out of range", lineno)
        if v in vals:
            raise ParseError(f"{what} file: duplicate vertex {v}", lineno)
        vals[v] = x
    missing = sorted(set(range(n)) - set(vals))
    if missing:
        raise ParseError(f"{what} file: no value for vertices {missing[:10]}")
    return np.array([vals[v] for v in range(n)])


def format_vertex_values(values):
    return "".join(f"{v} {float(x)!r}\n" for v, x in enumerate(values))


def _phi_or_default(c, phi, report):
    if phi is None:
        report["phi_default"] = "phi absent from input; using 0 (tangency) on every edge"
        return np.zeros(c.n_edges)
    return phi


def _complex_summary(c):
    return {"vertices": c.n_vertices, "edges": c.n_edges, "triangles": c.n_faces}


def get_cover(c, how, p_max):
    if how in (None, "auto"):
        return unwrap(c, p_max=p_max)
    va = parse_voltages(read_text(how), c)
    cov = derived_cover(c, va)
    rep = is_simplicial(cov.total)
    if not rep:
        raise CliError(
            f"cover from {how} is not simplicial: {rep.witnesses()[:5]}", EXIT_DOMAIN
        )
    return cov


# ---------------------------------------------------------------------------
# subcommands


def cmd_validate(args):
    c, phi = load_triangulation(args.file, args.min_degree)
    simp = is_simplicial(c)
    eps = orientation(c)
    report = {
        "valid": True,
        "cells": _complex_summary(c),
        "connected": is_connected(c),
        "orientable": True,
        "orientation": eps,
        "euler_characteristic": euler_characteristic(c),
        "genus": genus(c),
        "simplicial": bool(simp),
        "witnesses": simp.witnesses(),
        "phi_present": phi is not None,
    }
    if phi is not None:
        ok, failing = condition_S_all(c, phi)
        report["condition_S"] = {"holds": ok, "failing_triangles": failing}
    return report, EXIT_OK


def cmd_cover(args):
    c, phi = load_triangulation(args.file, args.min_degree)
    report = {"base": _complex_summary(c), "base_genus": genus(c)}
    if args.p is not None:
        cov = derived_cover(c, homology_voltages(c, args.p))
        report["mode"] = {"p": args.p}
    elif args.voltages:
        cov = derived_cover(c, parse_voltages(read_text(args.voltages), c))
        report["mode"] = {"voltages": args.voltages}
    else:
        try:
            cov = unwrap(c, p_max=args.auto)
        except CoverNotFoundError as exc:
            report["rejected"] = {str(p): r.witnesses() for p, r in exc.attempts.items()}
            report["error"] = str(exc)
            return report, EXIT_DOMAIN
        report["mode"] = {"auto": args.auto}
    simp = is_simplicial(cov.total)
    report.update(
        {
            "modulus": cov.voltages.modulus,
            "rank": cov.voltages.rank,
            "degree": cov.degree,
            "cells": _complex_summary(cov.total),
            "cover_genus": genus(cov.total),
            "genus_formula": cov.degree * (genus(c) - 1) + 1,
            "vertex_degrees": sorted(set(int(d) for d in cov.total.vertex_degrees)),
            "simplicial": bool(simp),
            "witnesses": simp.witnesses(),
            "rejected": {str(p): r.witnesses() for p, r in cov.rejected.items()},
            "verification_problems": verify_covering(cov),
        }
    )
    if args.out:
        tri = format_triangulation(
            cov.total,
            None if phi is None else phi[cov.proj_e],
            comment=f"degree {cov.degree} cover, p = {cov.voltages.modulus}",
        )
        atomic_write(args.out, tri)
        side = Path(str(args.out) + ".json")
        atomic_write(side, dump_json(cover_sidecar(cov)))
        report["written"] = {"complex": str(args.out), "sidecar": str(side)}
    return report, (EXIT_OK if simp else EXIT_DOMAIN)


def cmd_curvature(args):
    c, phi = load_triangulation(args.file, args.min_degree)
    report = {"background": args.bg}
    phi = _phi_or_default(c, phi, report)
    bg = Background(args.bg)
    r = parse_vertex_values(args.radii, c.n_vertices, "radii")
    if np.any(r <= 0):
        raise CliError("radii must be positive", EXIT_DOMAIN)
    ok, failing = condition_S_all(c, phi)
    if not ok:
        report["warnings"] = [f"condition (S) fails on triangles {failing}"]
    angles = triangle_angle_table(c, phi, r, bg)
    K = curvature_map(c, phi, r, bg)
    total = float(K.sum())
    chi2pi = 2 * np.pi * euler_characteristic(c)
    if bg is Background.EUCLIDEAN:
        gb_ok = abs(total - chi2pi) <= 1e-9
        line = f"sum K = {total!r} vs 2*pi*chi = {chi2pi!r} (equality expected)"
    else:
        gb_ok = total > chi2pi
        line = f"sum K = {total!r} vs 2*pi*chi = {chi2pi!r} (strict excess expected)"
    report.update(
        {
            "radii": r,
            "curvature": K,
            "angles": angles,
            "gauss_bonnet": {"ok": gb_ok, "sum_K": total, "two_pi_chi": chi2pi, "line": line},
        }
    )
    return report, EXIT_OK


def cmd_kat(args):
    c, phi = load_triangulation(args.file, args.min_degree)
    report = {"background": args.bg}
    phi = _phi_or_default(c, phi, report)
    bg = Background(args.bg)
    K = parse_vertex_values(args.K, c.n_vertices, "K")
    cov = get_cover(c, args.cover, args.p_max)
    cover_v = check_cover(cov, phi, K, bg, cap=args.cap, cone_positivity=args.cone_positivity)
    base_v = check_base_necessary(c, phi, K, bg, cap=args.cap,
                                  cone_positivity=args.cone_positivity)
    report.update(
        {
            "cover": {"p": cov.voltages.modulus, "degree": cov.degree,
                      "vertices": cov.total.n_vertices},
            "cover_check": cover_v.to_dict(),
            "base_check": base_v.to_dict(),
            "contrast": {
                "base_subsets": base_v.subsets_checked,
                "cover_subsets": cover_v.subsets_checked,
                "note": "base inequalities are necessary only; the verdict is the cover check",
            },
            "feasible": cover_v.feasible,
        }
    )
    return report, (EXIT_OK if cover_v.feasible else EXIT_DOMAIN)


def cmd_solve(args):
    c, phi = load_triangulation(args.file, args.min_degree)
    report = {"background": args.bg}
    phi = _phi_or_default(c, phi, report)
    bg = Background(args.bg)
    K = parse_vertex_values(args.K, c.n_vertices, "K")
    r0 = None if args.r0 is None else parse_vertex_values(args.r0, c.n_vertices, "start radii")
    opts = SolveOptions(method=args.method, tol=args.tol, max_iter=args.max_iter)
    cov = None
    if args.cover:
        try:
            cov = get_cover(c, args.cover, args.p_max)
        except CoverNotFoundError as exc:
            report["cover_error"] = str(exc)
    res = solve_prescribed(c, phi, K, bg, opts, r0=r0, cover=cov)
    res.seed = args.seed
    report["solve"] = res.to_dict()
    if cov is not None and res.converged:
        cres = solve_on_cover(cov, phi, K, bg, opts, seed=args.seed)
        report["cover_solve"] = {
            "degree": cov.degree,
            "status": cres.result.status,
            "iterations": cres.result.iterations,
            "residual": cres.result.residual,
            "invariance_deviation": cres.invariance_deviation,
            "pushforward_residual": cres.pushforward_residual,
            "seed": cres.seed,
        }
    if res.converged and args.radii_out:
        atomic_write(args.radii_out, format_vertex_values(res.radii))
        report["written"] = {"radii": args.radii_out}
    code = {"converged": EXIT_OK, "infeasible": EXIT_DOMAIN}.get(res.status, EXIT_BUDGET)
    return report, code


def cmd_render_triple(args):
    try:
        lay = layout_triple(args.r_i, args.r_j, args.r_k, args.phi_i, args.phi_j, args.phi_k)
    except DegenerateTriangleError as exc:
        raise CliError(
            f"{exc}; these radii are a degenerate configuration, as produced by "
            "degenerate_witness for angles violating condition (W)",
            EXIT_DOMAIN,
        ) from None
    atomic_write(args.out, triple_svg(lay))
    meas = measured_angles(lay.centers)
    report = {
        "svg": args.out,
        "centers": lay.centers,
        "lengths": lay.lengths,
        "angles": lay.angles,
        "measured_angles": meas,
        "max_angle_discrepancy": max(abs(a - b) for a, b in zip(lay.angles, meas)),
    }
    return report, EXIT_OK


# ---------------------------------------------------------------------------
# parser


def _positive_int(s):
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _prime(s):
    v = int(s)
    if v < 2 or any(v % d == 0 for d in range(2, int(v**0.5) + 1)):
        raise argparse.ArgumentTypeError(f"{s} is not a prime")
    return v


def build_parser():
    ap = argparse.ArgumentParser(
        prog="circlepattern",
        description="Quasi-simplicial triangulations, covers and circle-pattern curvature.",
    )
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, report=True):
        p.add_argument("file", help="triangulation file")
        p.add_argument("--min-degree", type=int, default=3,
                       help="minimum vertex degree accepted (default 3)")
        if report:
            p.add_argument("--out", help="write the JSON report here instead of stdout")

    def geometry_flags(p):
        p.add_argument("--bg", choices=[b.value for b in Background], default="euclidean")

    p = sub.add_parser("validate", help="parse and check a triangulation")
    common(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("cover", help="build a finite cover")
    common(p, report=False)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--p", type=_prime, help="mod-p homology cover for this prime")
    g.add_argument("--auto", type=_positive_int, nargs="?", const=31, default=31,
                   metavar="P_MAX", help="first simplicial homology cover with p <= P_MAX")
    g.add_argument("--voltages", help="explicit voltage file")
    p.add_argument("--out", help="write the cover triangulation here (sidecar: OUT.json)")
    p.add_argument("--report", help="write the JSON report here instead of stdout")
    p.set_defaults(func=cmd_cover)

    p = sub.add_parser("curvature", help="evaluate the curvature map")
    common(p)
    geometry_flags(p)
    p.add_argument("--radii", default="1", help="constant or '<vertex> <radius>' file")
    p.set_defaults(func=cmd_curvature)

    p = sub.add_parser("kat", help="decide feasibility of a curvature target")
    common(p)
    geometry_flags(p)
    p.add_argument("--K", default="0", help="constant or '<vertex> <K>' file")
    p.add_argument("--cover", default="auto", help="'auto' or a voltage file")
    p.add_argument("--p-max", type=_positive_int, default=31)
    p.add_argument("--cap", type=_positive_int, default=DEFAULT_CAP,
                   help="maximum cover vertex count for subset enumeration")
    p.add_argument("--cone-positivity", action="store_true",
                   help="also require every target K_v < 2 pi")
    p.set_defaults(func=cmd_kat)

    p = sub.add_parser("solve", help="solve for radii with a prescribed curvature")
    common(p)
    geometry_flags(p)
    p.add_argument("--K", default="0", help="constant or '<vertex> <K>' file")
    p.add_argument("--method", choices=["newton", "flow"], default="newton")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--max-iter", type=_positive_int, default=None)
    p.add_argument("--r0", help="start radii: constant or '<vertex> <radius>' file")
    p.add_argument("--cover", help="'auto' or a voltage file; also solve on the cover")
    p.add_argument("--p-max", type=_positive_int, default=31)
    p.add_argument("--radii-out", help="write the solved radii here")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("render-triple", help="draw one Euclidean three-circle configuration")
    for name in ("r_i", "r_j", "r_k", "phi_i", "phi_j", "phi_k"):
        p.add_argument(name, type=float)
    p.add_argument("--out", required=True, help="SVG output path")
    p.add_argument("--report", help="write the JSON report here instead of stdout")
    p.set_defaults(func=cmd_render_triple)
    return ap


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "bg", None) == "hyperbolic" and args.command == "render-triple":
        parser.error("render-triple is Euclidean only")
    out = getattr(args, "report", None) if args.command in ("cover", "render-triple") else args.out
    try:
        report, code = args.func(args)
    except CliError as exc:
        report, code = {"error": str(exc)}, exc.code
    except ParseError as exc:
        report, code = {"error": str(exc), "line": exc.line}, EXIT_DOMAIN
    except EnumerationCapError as exc:
        report = {"error": str(exc), "required": exc.required, "cap": exc.cap}
        code = EXIT_CAP
    except DegenerateTriangleError as exc:
        report = {"error": str(exc), "triangle": exc.triangle}
        code = EXIT_DOMAIN
    except CoverNotFoundError as exc:
        report, code = {"error": str(exc)}, EXIT_DOMAIN
    except CirclePatternError as exc:
        report, code = {"error": str(exc), "kind": type(exc).__name__}, EXIT_DOMAIN
    except OSError as exc:
        report, code = {"error": str(exc)}, EXIT_IO
    report = {"command": ["circlepattern", *argv], "exit_code": code, **report}
    if "error" in report:
        print(f"error: {report['error']}", file=sys.stderr)
    try:
        emit(report, out)
    except OSError as exc:
        print(f"error: cannot write report: {exc}", file=sys.stderr)
        return EXIT_IO
    return code


if __name__ == "__main__":
    sys.exit(main())
