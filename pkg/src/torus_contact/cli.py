"""Command-line front end.

    torus-contact homology --family linear:3 --class 1,0 --format json
    torus-contact fredholm --family linear:1 --smax 12.566
    torus-contact equivariant --p 1 --k 2 --class 1,0

Exit status: 0 when every check passes, 3 when some check fails, 1 on a
computation error and 2 on a usage error.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from .contact import (
    CLOSED_FORM_TOL,
    FD_TOL,
    ContactFamily,
    Giroux,
    Linear,
    ParametricH,
    SampledH,
    verify_structure,
)
from .errors import ContactHomologyError, InvalidFamilyError, UnsupportedGluingError
from .flows import CONJUGACY_TOL, FREDHOLM_TOL, conjugate_points, fredholm_scan
from .homology import build_complex, equivariant_reduction, euler_characteristic, homology_of, verify_diagram
from .manifold import IDENTITY, TWO_PI, GluingMatrix, HomotopyClass2, TorusPoint
from .orbits import ROOT_TOL, action_of, enumerate_orbits, root_residual
from .report import Report
from .stability import DiracDeformation, evaluate, random_deformation

EXIT_OK, EXIT_ERROR, EXIT_USAGE, EXIT_FAILED = 0, 1, 2, 3
STABILITY_TOL = 1e-10
POSITIVE_FLOOR = 1e-15


def _number(text: str) -> float:
    x = float(text)
    if not math.isfinite(x):
        raise ValueError(f"not a finite number: {text}")
    return x


def parse_family(text: str, gluing: GluingMatrix = IDENTITY) -> ContactFamily:
    """linear:N | giroux:n=..,eps=..,freq=..,slope=.. | giroux:file=PATH[,n=..] | giroux:PATH"""
    kind, _, rest = text.partition(":")
    kind = kind.strip().lower()
    if kind == "linear":
        if not gluing.is_identity:
            raise UnsupportedGluingError("the linear family lives on T^3; drop --gluing")
        try:
            n = int(rest)
        except ValueError:
            raise InvalidFamilyError(f"linear family needs an integer, got {rest!r}") from None
        return Linear(n)
    if kind != "giroux":
        raise InvalidFamilyError(f"unknown family {text!r}; use linear:N or giroux:...")
    if rest and "=" not in rest:
        rest = f"file={rest}"
    opts = {}
    for part in filter(None, (p.strip() for p in rest.split(","))):
        key, eq, val = part.partition("=")
        if not eq:
            raise InvalidFamilyError(f"malformed giroux option {part!r}")
        opts[key.strip().lower()] = val.strip()
    unknown = set(opts) - {"n", "eps", "freq", "slope", "file"}
    if unknown:
        raise InvalidFamilyError(f"unknown giroux options {sorted(unknown)}")
    try:
        if "file" in opts:
            h = SampledH.load(opts["file"])
            n = int(opts["n"]) if "n" in opts else int(math.floor(h.offset / TWO_PI + 1e-12))
        else:
            if "n" not in opts and "slope" not in opts:
                raise InvalidFamilyError("giroux family needs n=<int> (and optionally eps, freq, slope)")
            n = int(opts.get("n", opts.get("slope")))
            slope = int(opts.get("slope", n))
            h = ParametricH(slope, _number(opts.get("eps", "0")), int(opts.get("freq", "1")))
    except (ValueError, OSError) as exc:
        raise InvalidFamilyError(f"bad giroux family {text!r}: {exc}") from None
    return Giroux(h, n, gluing)


def _class(text: str) -> HomotopyClass2:
    try:
        return HomotopyClass2.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _gluing(text: str) -> GluingMatrix:
    try:
        return GluingMatrix.parse(text)
    except (ValueError, ContactHomologyError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _positive_int(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return n


def _tol(args, default: float) -> float:
    return default if args.tol is None else args.tol


# --- subcommands -----------------------------------------------------------


def cmd_verify_structure(args) -> Report:
    f = parse_family(args.family, args.gluing)
    cf = _tol(args, CLOSED_FORM_TOL)
    r = verify_structure(f, args.grid, closed_form_tol=cf, fd_tol=FD_TOL)
    names = [*r.CLOSED_FORM, *r.FINITE_DIFFERENCE]
    rows = [
        [k, "closed_form" if k in r.CLOSED_FORM else "finite_difference", getattr(r, k), r.checks()[k]]
        for k in names
    ]
    return Report(
        "verify-structure",
        f.descriptor(),
        {"grid": args.grid},
        {
            "points": args.grid**3,
            "volume_coefficient": r.volume_coefficient,
            "pinching_equality": r.pinching_equality,
        },
        {"closed_form": cf, "finite_difference": FD_TOL},
        r.checks(),
        ["quantity", "kind", "max_residual", "ok"],
        rows,
    )


def cmd_orbits(args) -> Report:
    f = parse_family(args.family, args.gluing)
    tol = _tol(args, ROOT_TOL)
    circles = enumerate_orbits(f, args.klass)
    rows = []
    for c in circles:
        rows.append([c.index, c.z_root, float(f.angle(c.z_root)), c.action, root_residual(c), action_of(c)])
    checks = {
        "roots_solve_direction": all(r[4] < tol for r in rows),
        "actions_match_quadrature": all(abs(r[5] - r[3]) < 1e-9 * max(1.0, r[3]) for r in rows),
        "roots_distinct": len({round(r[1], 9) for r in rows}) == len(rows),
    }
    return Report(
        "orbits",
        f.descriptor(),
        {"class": str(args.klass)},
        {"circles": len(circles), "direction": circles[0].theta if circles else None},
        {"root": tol},
        checks,
        ["circle", "z_root", "theta", "action", "root_residual", "action_quadrature"],
        rows,
    )


def cmd_conjugate(args) -> Report:
    f = parse_family(args.family, args.gluing)
    tol = _tol(args, CONJUGACY_TOL)
    q = TorusPoint(0.0, 0.0, args.z)
    lst = conjugate_points(f, q, args.window)
    rows = [
        [p.winding, p.s, p.z_shift, p.point.z, p.same_fiber, p.residual] for p in lst
    ]
    return Report(
        "conjugate",
        f.descriptor(),
        {"z": args.z, "window": lst.window},
        {"count": len(lst), "fiber_period": f.fiber_period},
        {"conjugacy": tol},
        {"all_conjugate": all(p.residual < tol for p in lst)},
        ["k", "s", "z_shift", "z", "same_fiber", "residual"],
        rows,
    )


def cmd_fredholm(args) -> Report:
    f = parse_family(args.family, args.gluing)
    tol = _tol(args, FREDHOLM_TOL)
    r = fredholm_scan(f, TorusPoint(0.0, 0.0, args.z), args.smax, args.samples, tol)
    return Report(
        "fredholm",
        f.descriptor(),
        {"z": args.z, "smax": r.s_max, "samples": r.samples},
        {"supremum": r.supremum, "argmax": list(r.argmax), "violated": r.violated,
         "cosine_identity_residual": r.cosine_identity_residual},
        {"fredholm": tol},
        {"cosine_identity": r.cosine_identity_residual < tol},
    )


def cmd_homology(args) -> Report:
    f = parse_family(args.family, args.gluing)
    c = build_complex(f, args.klass)
    groups = homology_of(c, top=3)
    circles = len(c.gens(0))
    cert = c.certificate
    checks = {
        "boundary_certified": bool(cert.certified and cert.is_zero),
        "boundary_squared_zero": bool(cert.d_per_squared_zero and c.squares_vanish()),
        "torsion_free": all(not h.torsion for h in groups),
        "ranks_match_circles": groups[0].rank == circles and groups[1].rank == circles,
        "higher_degrees_vanish": all(h.is_zero for h in groups[2:]),
    }
    return Report(
        "homology",
        f.descriptor(),
        {"class": str(args.klass)},
        {
            "circles": circles,
            "generators": {str(k): c.ids(k) for k in c.degrees},
            "euler_characteristic": euler_characteristic(c),
            "excluded_at_infinity": [list(e) for e in cert.excluded],
        },
        {},
        checks,
        ["degree", "rank", "torsion", "group"],
        [[h.degree, h.rank, list(h.torsion), str(h)] for h in groups],
    )


def cmd_equivariant(args) -> Report:
    r = equivariant_reduction(args.p, args.k, args.klass)
    rows = [
        [q.degree, r.source_counts.get(q.degree, 0), r.quotient_counts.get(q.degree, 0), q.rank, t.rank]
        for q, t in zip(r.quotient_homology, r.target_homology)
    ]
    return Report(
        "equivariant",
        f"linear:{args.k * args.p} / Z_{args.k}",
        {"p": args.p, "k": args.k, "class": str(args.klass)},
        {"quotient_ranks": [h.rank for h in r.quotient_homology[:2]],
         "target": f"linear:{args.p}"},
        {},
        r.checks(),
        ["degree", "source_generators", "quotient_generators", "quotient_rank", "target_rank"],
        rows,
    )


def cmd_diagram(args) -> Report:
    r = verify_diagram(args.p, args.q, args.klass)
    return Report(
        "diagram",
        f"linear:{args.p * args.q}",
        {"p": args.p, "q": args.q, "class": str(args.klass)},
        {"homology_ranks": {k: list(v) for k, v in r.homology_ranks.items()},
         "all_commute": r.all_commute},
        {},
        dict(r.squares),
    )


def cmd_stability(args) -> Report:
    tol = _tol(args, STABILITY_TOL)
    if args.jumps is not None:
        deformations = [DiracDeformation.load(args.jumps)]
        params = {"jumps": str(args.jumps)}
    else:
        seed = 0 if args.seed is None else args.seed
        rng = np.random.default_rng(seed)
        deformations = [random_deformation(rng) for _ in range(args.random)]
        params = {"random": args.random, "seed": seed}
    rows, agree, positive = [], True, True
    for i, d in enumerate(deformations):
        r = evaluate(d, args.samples)
        gap = r.max_relative_gap
        agree &= gap <= tol
        if r.proper:
            positive &= min(r.closed, r.quadrature, r.telescoping) > POSITIVE_FLOOR
        rows.append([i, len(d.jumps), r.closed, r.quadrature, r.telescoping, gap, r.proper, r.balanced])
    return Report(
        "stability",
        "",
        params | {"samples": args.samples},
        {"deformations": len(rows), "worst_relative_gap": max((r[5] for r in rows), default=0.0)},
        {"relative_agreement": tol, "positivity_floor": POSITIVE_FLOOR},
        {"three_way_agreement": bool(agree), "positive_when_proper": bool(positive)},
        ["id", "jumps", "closed", "quadrature", "telescoping", "relative_gap", "proper", "balanced"],
        rows,
    )


# --- parser ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv", "table"), default="table")
    common.add_argument("--tol", type=_number, default=None, help="override the command's main tolerance")
    common.add_argument("--seed", type=int, default=None, help="seed for randomized checks")
    common.add_argument("--gluing", type=_gluing, default=IDENTITY, metavar="a,b,c,d",
                        help="monodromy of Y_A for giroux families (default identity)")

    parser = argparse.ArgumentParser(prog="torus-contact", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.set_defaults(func=fn)
        return p

    p = add("verify-structure", cmd_verify_structure, "frame identities on a grid")
    p.add_argument("--family", required=True)
    p.add_argument("--grid", type=_positive_int, default=8)

    p = add("orbits", cmd_orbits, "periodic orbit circles of a class")
    p.add_argument("--family", required=True)
    p.add_argument("--class", dest="klass", type=_class, required=True, metavar="m,l")

    p = add("conjugate", cmd_conjugate, "conjugate points along a v-orbit")
    p.add_argument("--family", required=True)
    p.add_argument("--z", type=_number, required=True)
    p.add_argument("--window", type=_number, default=None)

    p = add("fredholm", cmd_fredholm, "supremum of the transported form on the Reeb field")
    p.add_argument("--family", required=True)
    p.add_argument("--smax", type=_number, default=2 * TWO_PI)
    p.add_argument("--samples", type=_positive_int, default=4096)
    p.add_argument("--z", type=_number, default=0.0)

    p = add("homology", cmd_homology, "homology of one class")
    p.add_argument("--family", required=True)
    p.add_argument("--class", dest="klass", type=_class, required=True, metavar="m,l")

    p = add("equivariant", cmd_equivariant, "Z_k quotient of linear:k*p")
    p.add_argument("--p", type=_positive_int, required=True)
    p.add_argument("--k", type=_positive_int, required=True)
    p.add_argument("--class", dest="klass", type=_class, required=True, metavar="m,l")

    p = add("diagram", cmd_diagram, "commuting cube of reductions")
    p.add_argument("--p", type=_positive_int, required=True)
    p.add_argument("--q", type=_positive_int, required=True)
    p.add_argument("--class", dest="klass", type=_class, required=True, metavar="m,l")

    p = add("stability", cmd_stability, "second variation three ways")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--random", type=_positive_int, default=200)
    src.add_argument("--jumps", type=Path, default=None)
    p.add_argument("--samples", type=_positive_int, default=64)
    return parser


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        report = args.func(args)
    except (ContactHomologyError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_ERROR
    stdout.write(report.render(args.format))
    return EXIT_OK if report.passed else EXIT_FAILED


def main(argv=None) -> int:
    return run(argv)


if __name__ == "__main__":
    sys.exit(main())
