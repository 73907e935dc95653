"""Command-line front end: certification reports, exact spectra, parameter
sweeps, the two-eigenvalue region map, mesh dumps and the reproduction
harness.

Exit codes: 0 when every requested verdict is certified, 2 when at least one
is inconclusive, 1 on errors.  Output is deterministic: fixed field order and
floats printed with 17 significant digits.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import os
import platform
import sys

import numpy as np
import scipy

from . import __version__, certify, exact, fem, geom

EXIT_CERTIFIED = 0
EXIT_ERROR = 1
EXIT_INCONCLUSIVE = 2


def _apply_thread_cap() -> None:
    n = os.environ.get("STAR_SPECTRA_THREADS")
    if n:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            os.environ.setdefault(var, n)


def _fmt(x) -> str:
    if isinstance(x, float):
        if x != x:
            return "NaN"
        if x in (float("inf"), float("-inf")):
            return '"Infinity"' if x > 0 else '"-Infinity"'
        if x == int(x) and abs(x) < 1e16:
            return format(x, ".1f")
        return format(x, ".17g")
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    if x is None:
        return "null"
    if isinstance(x, str):
        return json.dumps(x)
    if isinstance(x, (list, tuple)):
        return "[" + ", ".join(_fmt(v) for v in x) + "]"
    if isinstance(x, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_fmt(v)}" for k, v in x.items()) + "}"
    raise TypeError(f"cannot serialize {type(x)}")


def dumps_report(obj: dict) -> str:
    """Deterministic JSON: insertion field order, 17-significant-digit floats."""
    return _fmt(obj) + "\n"


def _versions() -> dict:
    return {
        "package": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
    }


def _verdict_report(v: certify.Verdict) -> dict:
    d = v.to_dict()
    return {
        "name": d["name"],
        "nu": d["nu"],
        "verdict": d["verdict"],
        "n": d["n"],
        "rigor": d["rigor"],
        "margins": [{"name": k, "value": val} for k, val in d["margins"].items()],
        "reason": d["reason"],
        "budget": d["budget"],
        "trace": d["lower_bounds"] + d["upper_bounds"],
        "extra": d["extra"],
        "versions": _versions(),
    }


def _write(text: str, path: str | None) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w") as f:
            f.write(text)


def _load(path: str):
    vcfg = geom.load_config(path)
    return vcfg


def _plan_for(vcfg, args) -> certify.CertificationPlan:
    return certify.CertificationPlan(
        count_strategy=getattr(args, "count_strategy", "fem"),
        lower_strategy=args.lower_strategy,
        truncation_length=args.truncation,
        fem_h0=args.h0,
        fem_levels=args.levels,
        k_upper=args.k,
        count_stability=not getattr(args, "no_stability", False),
        params=json.loads(getattr(args, "params", "{}") or "{}"),
    )


def cmd_certify(args) -> int:
    if args.preset:
        kw = json.loads(args.params or "{}")
        vcfg, plan = certify.preset(args.preset, **kw)
        name = args.preset
    else:
        vcfg = _load(args.config)
        plan = _plan_for(vcfg, args)
        name = vcfg.name
    v = certify.certify(vcfg, plan, name=name)
    _write(dumps_report(_verdict_report(v)), args.output)
    return EXIT_CERTIFIED if v.certified else EXIT_INCONCLUSIVE


def cmd_spectrum(args) -> int:
    shape = args.shape
    if shape == "interval":
        eigs = exact.interval_eigs(args.length, args.bc.upper(), args.k)
    elif shape == "box":
        dims = tuple(args.dims)
        bcs = tuple(b.upper() for b in args.bcs)
        eigs = exact.box_eigs(dims, bcs, args.k)
    elif shape == "equilateral":
        eigs = exact.equilateral_eigs(args.side, args.bc.lower(), args.k)
    elif shape == "sector":
        eigs = exact.sector_dn_eigs(args.alpha, args.radius, args.k)
    else:
        raise ValueError(f"unknown shape {shape!r}")
    report = {
        "shape": shape,
        "k": args.k,
        "values": list(eigs.values),
        "provenance": list(eigs.provenance),
        "versions": _versions(),
    }
    _write(dumps_report(report), args.output)
    return EXIT_CERTIFIED


def _sweep_csv(rows: list[certify.SweepRow]) -> str:
    buf = io.StringIO()
    buf.write("param,nu,verdict,n,dn_margin\n")
    for r in rows:
        verdict = "CertifiedNoResonance" if r.certified else "Inconclusive"
        n = "" if r.n is None else str(r.n)
        buf.write(
            f"{format(r.param, '.17g')},{format(r.nu, '.17g')},{verdict},{n},{format(r.dn_margin, '.17g')}\n"
        )
    return buf.getvalue()


def cmd_sweep(args) -> int:
    grid = np.arange(args.start, args.stop + 1e-12, args.step)
    if args.family == "broken":
        rows = certify.sweep_broken(grid, existence_anchor=args.anchor)
    elif args.family == "y_alpha":
        rows = certify.sweep_y_alpha(grid)
    else:
        raise ValueError(f"unknown family {args.family!r}")
    _write(_sweep_csv(rows), args.output)
    first = certify.first_certified(rows)
    if first is not None:
        sys.stderr.write(f"first certified grid point: {format(first, '.17g')}\n")
    return EXIT_CERTIFIED if any(r.certified for r in rows) else EXIT_INCONCLUSIVE


def cmd_region(args) -> int:
    if args.nx < 10 or args.ny < 10:
        raise ValueError("grid resolution must be at least 10 per axis")
    rows = certify.region_rows(args.nx, args.ny)
    buf = io.StringIO()
    buf.write("x,y,inside,certified\n")
    for x, y, inside, cert in rows:
        buf.write(
            f"{format(x, '.17g')},{format(y, '.17g')},{str(inside).lower()},{str(cert).lower()}\n"
        )
    _write(buf.getvalue(), args.output)
    return EXIT_CERTIFIED


def cmd_mesh(args) -> int:
    vcfg = _load(args.config)
    poly = geom.truncate(vcfg, args.truncation) if args.truncate else vcfg.center
    mesh = fem.triangulate(poly, args.h0)
    for _ in range(args.levels - 1):
        mesh = fem.refine(mesh)
    if args.format == "svg":
        _write(fem.mesh_svg(mesh), args.output)
    else:
        _write(fem.mesh_text_dump(mesh), args.output)
    sys.stderr.write(
        f"nodes={mesh.nodes.shape[0]} triangles={mesh.triangles.shape[0]} "
        f"max_diameter={mesh.max_diameter():.6g} min_angle={mesh.min_angle_deg():.4g}\n"
    )
    return EXIT_CERTIFIED


REPRO_TARGETS = {
    "t_junction": 1,
    "y_junction": 1,
    "crossing": None,  # inconclusive by design without the symmetry plan
    "crossing_symmetric": 1,
    "rounded_corner": 1,
    "rect_two_eigs": 2,
    "cube_square": 1,
    "cube_disk": 1,
}


def cmd_repro(args) -> int:
    names = list(REPRO_TARGETS) if args.all else args.names
    failures = 0
    lines = []
    for name in names:
        target = REPRO_TARGETS.get(name)
        try:
            vcfg, plan = certify.preset(name)
            v = certify.certify(vcfg, plan, name=name)
            got = v.n_discrete if v.certified else None
            ok = got == target
        except Exception as e:  # keep the table going
            got, ok = f"error: {e}", False
        failures += 0 if ok else 1
        lines.append(
            f"{name:<22} expected n={target!s:<6} got n={got!s:<6} {'PASS' if ok else 'FAIL'}"
        )
    _write("\n".join(lines) + "\n", args.output)
    return EXIT_CERTIFIED if failures == 0 else EXIT_INCONCLUSIVE


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="starspec",
        description="Certify discrete-spectrum counts and absence of threshold "
        "resonances for star waveguides.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("certify", help="certify a configuration or preset")
    c.add_argument("config", nargs="?", help="JSON configuration file")
    c.add_argument("--preset", choices=certify.PRESET_NAMES, help="built-in example")
    c.add_argument("--lower-strategy", dest="lower_strategy", default="fem_estimate")
    c.add_argument("--count-strategy", dest="count_strategy", default="fem")
    c.add_argument("--truncation", type=float, default=3.0, help="branch truncation length")
    c.add_argument("--h0", type=float, default=0.25, help="target mesh size")
    c.add_argument("--levels", type=int, default=2, help="refinement levels")
    c.add_argument("-k", type=int, default=4, help="eigenvalues per solve")
    c.add_argument("--no-stability", action="store_true", help="skip truncation-doubling check")
    c.add_argument("--params", default="{}", help="extra plan parameters (JSON)")
    c.add_argument("-o", "--output", default="-")
    c.set_defaults(func=cmd_certify)

    s = sub.add_parser("spectrum", help="closed-form spectra of catalog shapes")
    s.add_argument("--shape", required=True, choices=["interval", "box", "equilateral", "sector"])
    s.add_argument("--bc", default="DD", help="interval pair (DD/NN/DN/ND) or dirichlet/neumann")
    s.add_argument("--length", type=float, default=1.0)
    s.add_argument("--side", type=float, default=1.0)
    s.add_argument("--dims", type=float, nargs="+", default=[1.0, 1.0])
    s.add_argument("--bcs", nargs="+", default=["DD", "DD"])
    s.add_argument("--alpha", type=float, default=math.pi / 2)
    s.add_argument("--radius", type=float, default=1.0)
    s.add_argument("-k", type=int, default=3)
    s.add_argument("-o", "--output", default="-")
    s.set_defaults(func=cmd_spectrum)

    w = sub.add_parser("sweep", help="parameter sweep over a preset family")
    w.add_argument("--family", required=True, choices=["broken", "y_alpha"])
    w.add_argument("--start", type=float, required=True)
    w.add_argument("--stop", type=float, required=True)
    w.add_argument("--step", type=float, default=0.005)
    w.add_argument("--anchor", type=float, default=1.0, help="angle for the existence anchor run")
    w.add_argument("-o", "--output", default="-")
    w.set_defaults(func=cmd_sweep)

    r = sub.add_parser("region", help="two-eigenvalue rectangle parameter region as CSV")
    r.add_argument("--nx", type=int, default=100)
    r.add_argument("--ny", type=int, default=50)
    r.add_argument("-o", "--output", default="-")
    r.set_defaults(func=cmd_region)

    m = sub.add_parser("mesh", help="triangulate a configuration and dump the mesh")
    m.add_argument("config")
    m.add_argument("--h0", type=float, default=0.25)
    m.add_argument("--levels", type=int, default=1)
    m.add_argument("--truncate", action="store_true", help="mesh the truncated waveguide")
    m.add_argument("--truncation", type=float, default=3.0)
    m.add_argument("--format", choices=["text", "svg"], default="text")
    m.add_argument("-o", "--output", default="-")
    m.set_defaults(func=cmd_mesh)

    rp = sub.add_parser("repro", help="run every preset against its expected count")
    rp.add_argument("--all", action="store_true")
    rp.add_argument("names", nargs="*", default=[])
    rp.add_argument("-o", "--output", default="-")
    rp.set_defaults(func=cmd_repro)

    return p


def run(argv=None) -> int:
    _apply_thread_cap()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_ERROR if e.code not in (0, None) else 0
    try:
        return args.func(args)
    except (
        ValueError,
        KeyError,
        OSError,
        geom.InvalidGeometry,
        geom.StubOverlap,
        certify.NoPipeline,
        certify.UnstableCount,
        fem.MeshFailure,
    ) as e:
        sys.stderr.write(f"error: {e}\n")
        return EXIT_ERROR


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
