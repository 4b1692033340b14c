"""fold-atlas command line.

Exit codes: 0 ok, 2 input error, 3 insufficient jet, 4 unsupported class,
5 internal invariant failure.
"""

from __future__ import annotations

import argparse
import hashlib
import io
import json
import sys
import time
from fractions import Fraction

import numpy as np

from . import bifurcation as bif
from .errors import FoldAtlasError, InputError, InvariantError, UndefinedFrameError
from .folding import FoldDirection, classify, geometric_report, rotation_unfolding_eval
from .jets import as_rational
from .surface import (
    FieldScan,
    Grid,
    SurfaceGerm,
    numeric_principal_fields,
    ridge_field_expansion,
    ridge_subparabolic_flags,
    umbilic_classify,
    umbilic_cubic,
)
from .versality import geometric_versality, is_versal_rotation

SCHEMA = "fold-atlas/1"


# -- input -------------------------------------------------------------------


def parse_surface_spec(doc) -> SurfaceGerm:
    if not isinstance(doc, dict) or "order" not in doc or "coefficients" not in doc:
        raise InputError('surface spec needs "order" and "coefficients"')
    order = doc["order"]
    if not isinstance(order, int) or isinstance(order, bool) or order < 0:
        raise InputError("order must be a non-negative integer")
    coeffs: dict[tuple[int, int], Fraction] = {}
    for entry in doc["coefficients"]:
        try:
            i, j, a = entry["i"], entry["j"], entry["a"]
        except (KeyError, TypeError):
            raise InputError(f"coefficient entry needs i, j, a: {entry!r}") from None
        if not all(isinstance(v, int) and not isinstance(v, bool) and v >= 0 for v in (i, j)):
            raise InputError(f"i and j must be non-negative integers: {entry!r}")
        if (i, j) in coeffs:
            raise InputError(f"duplicate coefficient ({i}, {j})")
        if i + j > order:
            raise InputError(f"coefficient ({i}, {j}) exceeds order {order}")
        try:
            coeffs[(i, j)] = as_rational(a)
        except (TypeError, ValueError, ZeroDivisionError):
            raise InputError(f"coefficient must be an exact rational string, got {a!r}") from None
    return SurfaceGerm.from_coefficients(coeffs, order)


def load_surface(path: str) -> SurfaceGerm:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: malformed JSON: {exc}") from exc
    except OSError as exc:
        raise InputError(f"{path}: {exc}") from exc
    return parse_surface_spec(doc)


def surface_echo(germ: SurfaceGerm) -> dict:
    return {
        "order": germ.order,
        "coefficients": [{"i": i, "j": j, "a": str(a)} for (i, j), a in germ.coefficients().items()],
    }


def _floats(text: str, n: int, what: str) -> list[float]:
    try:
        vals = [float(p) for p in text.split(",")]
    except ValueError:
        raise InputError(f"{what} must be {n} comma-separated numbers") from None
    if len(vals) != n:
        raise InputError(f"{what} must be {n} comma-separated numbers")
    return vals


# -- report envelope ---------------------------------------------------------------


def _jsonable(v):
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.bool_,)):
        return bool(v)
    if isinstance(v, tuple):
        return list(v)
    raise TypeError(f"not JSON serialisable: {type(v).__name__}")


def envelope(command: str, body: dict, timings: dict | None) -> str:
    canonical = json.dumps(body, sort_keys=True, separators=(",", ":"), default=_jsonable)
    doc = {
        "schema": SCHEMA,
        "command": command,
        "body": json.loads(canonical),
        "body_sha256": hashlib.sha256(canonical.encode()).hexdigest(),
    }
    if timings is not None:
        doc["timings"] = timings
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


# -- commands -----------------------------------------------------------------------


def cmd_classify(args) -> dict:
    germ = load_surface(args.surface)
    cls = classify(germ)
    return {"surface": surface_echo(germ), **cls.to_json()}


def cmd_versal(args) -> dict:
    germ = load_surface(args.surface)
    cls = classify(germ)
    try:
        rep = is_versal_rotation(germ, cls)
    except InvariantError as exc:
        if args.dump_matrix and exc.payload:
            exc.payload["dumped"] = True
        raise
    body = {"surface": surface_echo(germ), "class": cls.tag, "witness": cls.to_json()["witness"], **rep.to_json()}
    body["versal"] = rep.versal_by_rank
    if cls.tag == "S0":
        body["reason"] = "cross-cap is stable"
    else:
        geo, reason, detail = geometric_versality(germ, cls)
        if geo != rep.versal_by_rank:
            raise InvariantError(
                f"geometric verdict {geo} ({reason}) disagrees with the rank verdict",
                payload={"report": rep.to_json(), **detail},
            )
        body["versal_geometric"] = geo
        body["reason"] = reason
        body["geometry"] = detail
    if args.dump_matrix:
        from .versality import tangent_matrix_for

        body["matrix"] = tangent_matrix_for(germ, rep.k_used).to_json()
    body["tolerances"] = {"theta_samples": 4096, "deltoid_tol": 1e-9}
    return body


def _write_csv(path: str, header, rows) -> None:
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join("" if v == "" else repr(float(v)) for v in row) + "\n")
    bif.atomic_write(path, buf.getvalue())


def cmd_geometry(args) -> dict:
    germ = load_surface(args.surface)
    body: dict = {"surface": surface_echo(germ), "k1": str(germ.k1), "k2": str(germ.k2), "a11": str(germ.a(1, 1))}
    if germ.order >= 5:
        body["class"] = classify(germ).tag
    if germ.is_umbilic:
        rep = umbilic_classify(umbilic_cubic(germ), args.theta_samples, args.deltoid_tol)
        c = umbilic_cubic(germ)
        body["umbilic"] = True
        body["alpha"] = c.alpha.to_json()
        body["beta"] = c.beta.to_json()
        body["umbilic_report"] = rep.to_json()
    else:
        ridge, sub = ridge_subparabolic_flags(germ)
        exp = ridge_field_expansion(germ)
        body["umbilic"] = False
        body["v2_ridge"] = ridge
        body["v2_subparabolic"] = sub
        body["expansion"] = {
            name: {"const": str(f.const), "u": str(f.u), "v": str(f.v)}
            for name, f in (("v2_kappa2", exp.v2k2), ("v2_kappa1", exp.v2k1))
        }
        if body.get("class") in ("S1", "S2", "B2"):
            body["summary"] = geometric_report(germ)["summary"]
    if args.grid:
        scan: FieldScan = numeric_principal_fields(germ, Grid.parse(args.grid), args.umbilic_tol, args.step)
        body["grid"] = {"spec": args.grid, "umbilic_cells": scan.umbilic_count}
        if args.csv:
            _write_csv(args.csv, FieldScan.CSV_HEADER, scan.rows())
            body["grid"]["csv"] = args.csv
    body["tolerances"] = {
        "theta_samples": args.theta_samples,
        "deltoid_tol": args.deltoid_tol,
        "umbilic_tol": args.umbilic_tol,
        "step": args.step,
    }
    return body


def cmd_bifurcation(args) -> dict:
    fam = bif.UnfoldingFamily.standard(args.family, args.sign)
    curves = bif.trace_and_render(fam, (args.a_min, args.a_max), args.n, args.out)
    summary = {}
    for c in curves:
        item = {"samples": len(c.samples), "exact": c.exact}
        if c.note:
            item["note"] = c.note
        if c.samples:
            first, last = c.samples[0], c.samples[-1]
            item["first"] = {"a": first.a, "s": first.s, "t": first.t}
            item["last"] = {"a": last.a, "s": last.s, "t": last.t}
            item["max_residual"] = max(p.residual for p in c.samples)
        summary[c.branch] = item
    return {
        "family": fam.family_id,
        "a_range": [args.a_min, args.a_max],
        "n": args.n,
        "outputs": [args.out + ".csv", args.out + ".svg"],
        "branches": summary,
    }


def _source_function(args):
    if args.surface and args.fig1 is not None:
        raise InputError("give either --surface or --fig1, not both")
    if args.surface:
        return load_surface(args.surface).jet
    if args.fig1 is not None:
        return bif.figure_family(Fraction(args.fig1))
    raise InputError("need --surface PATH or --fig1 A")


def cmd_render_fold(args) -> dict:
    f = _source_function(args)
    xmin, xmax, ymin, ymax = _floats(args.region, 4, "region")
    n = args.resolution
    if n < 2:
        raise InputError("resolution must be at least 2")
    xs, ys = np.meshgrid(np.linspace(xmin, xmax, n), np.linspace(ymin, ymax, n), indexing="ij")
    xs, ys = xs.ravel(), ys.ravel()
    fn = f.to_float_function()
    if args.v:
        img = rotation_unfolding_eval(fn, xs, ys, FoldDirection.parse(args.v))
    else:
        img = np.stack([xs, ys * ys, np.asarray(fn(xs, ys), dtype=float)], axis=-1)
    rows = np.column_stack([xs, ys, img])
    _write_csv(args.out, ("x", "y", "X", "Y", "Z"), rows)
    return {"points": int(len(rows)), "region": [xmin, xmax, ymin, ymax], "resolution": n, "v": args.v, "output": args.out}


def cmd_self_tangency(args) -> dict:
    f = _source_function(args)
    region = _floats(args.region, 4, "region")
    pairs = bif.self_tangency_search(f, tuple(region), args.tol, args.seeds)
    return {
        "pairs": [{"point": list(p.point), "mirror": list(p.mirror), "residual": p.residual} for p in pairs],
        "tolerances": {"tol": args.tol, "seeds": args.seeds},
    }


COMMANDS = {
    "classify": cmd_classify,
    "versal": cmd_versal,
    "geometry": cmd_geometry,
    "bifurcation": cmd_bifurcation,
    "render-fold": cmd_render_fold,
    "self-tangency": cmd_self_tangency,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fold-atlas", description="Folding maps of surfaces: classes, versality, bifurcations.")
    p.add_argument("--no-timings", action="store_true", help="omit the timings field")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("classify", help="singularity class of the folding map")
    c.add_argument("surface")

    c = sub.add_parser("versal", help="versality of the rotation unfolding")
    c.add_argument("surface")
    c.add_argument("--dump-matrix", action="store_true")

    c = sub.add_parser("geometry", help="ridges, subparabolics, umbilic type")
    c.add_argument("surface")
    c.add_argument("--grid", help="umin,umax,vmin,vmax,n[,m]")
    c.add_argument("--csv", help="write the numeric principal field here")
    c.add_argument("--theta-samples", type=int, default=4096)
    c.add_argument("--deltoid-tol", type=float, default=1e-9)
    c.add_argument("--umbilic-tol", type=float, default=1e-8)
    c.add_argument("--step", type=float, default=1e-5)

    c = sub.add_parser("bifurcation", help="trace the standard S2/B2 bifurcation sets")
    c.add_argument("family", help="S2 or B2")
    c.add_argument("--a-min", type=float, default=-1.0)
    c.add_argument("--a-max", type=float, default=1.0)
    c.add_argument("-n", type=int, default=101)
    c.add_argument("--out", required=True, help="output prefix")
    c.add_argument("--sign", type=int, default=-1, choices=(-1, 1))

    for name, helptext in (("render-fold", "point cloud of the fold image"), ("self-tangency", "self-tangency search")):
        c = sub.add_parser(name, help=helptext)
        c.add_argument("--surface")
        c.add_argument("--fig1", help="a in y^5 - x^2 y + a^4 y - 2 a^2 y^3")
        if name == "render-fold":
            c.add_argument("--region", default="-1,1,-1,1")
            c.add_argument("--resolution", type=int, default=41)
            c.add_argument("--v", help="fold direction v1,v2,v3")
            c.add_argument("--out", required=True)
        else:
            c.add_argument("--region", default="-1,1,0.001,1")
            c.add_argument("--tol", type=float, default=1e-9)
            c.add_argument("--seeds", type=int, default=21)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    t0 = time.perf_counter()
    try:
        body = COMMANDS[args.command](args)
    except InvariantError as exc:
        print(f"fold-atlas: internal invariant failure: {exc}", file=sys.stderr)
        if exc.payload is not None:
            print(json.dumps(exc.payload, sort_keys=True, default=_jsonable), file=sys.stderr)
        return exc.exit_code
    except (FoldAtlasError, UndefinedFrameError) as exc:
        print(f"fold-atlas: {exc}", file=sys.stderr)
        return exc.exit_code
    timings = None if args.no_timings else {"seconds": round(time.perf_counter() - t0, 6)}
    sys.stdout.write(envelope(args.command, body, timings))
    return 0


if __name__ == "__main__":
    sys.exit(main())
