"""Command-line entry point: ``a2lab build | verify | measure``.

Exit codes: 0 when every check passes, 1 on a mathematical violation,
2 on bad input or usage.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path
from typing import List, Sequence

from .building import BuildingBall, build_ball, bundled_presentation, load_presentation, sigma
from .errors import A2LabError, DepthInsufficientError, InputError, ViolationError

log = logging.getLogger("a2lab")

EXIT_OK, EXIT_VIOLATION, EXIT_INPUT = 0, 1, 2
TABLES = ("harmonic", "rn", "shadows", "projectivity")


def atomic_write(path, text: str) -> None:
    """Write via a temporary file in the target directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def thread_cap() -> int:
    raw = os.environ.get("A2LAB_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise InputError(f"A2LAB_THREADS must be an integer, got {raw!r}")


def load_ball(path) -> BuildingBall:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read ball {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise InputError("ball file must hold a JSON object")
    return BuildingBall.from_dict(data)


def fmt(x) -> str:
    """Exact rationals as p/q, integers bare."""
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    return str(x)


# -- build ----------------------------------------------------------------------


def cmd_build(args) -> int:
    if args.radius < 0:
        raise InputError("radius must be non-negative")
    tp = load_presentation(args.presentation) if args.presentation else bundled_presentation()
    try:
        ball = build_ball(tp, args.radius)
    except ViolationError as exc:
        witness = Path(str(args.out) + ".witness.json")
        atomic_write(witness, json.dumps({"error": str(exc), "witness": exc.witness}, indent=1, default=str))
        print(f"construction failed: {exc} (witness in {witness})", file=sys.stderr)
        return EXIT_VIOLATION
    atomic_write(args.out, json.dumps(ball.to_dict()))
    c = ball.complex
    print(f"vertices {c.n} edges {len(c.edges)} triangles {len(c.triangles)}")
    print(f"radius {ball.radius} q {ball.q} presentation {ball.provenance[:16]}")
    return EXIT_OK


# -- verify ---------------------------------------------------------------------


def _run_one(payload):
    from . import suites

    name, ball_dict, seed, corrected = payload
    ball = BuildingBall.from_dict(ball_dict)
    try:
        return suites.run_suite(name, ball, seed=seed, corrected=corrected).to_dict()
    except DepthInsufficientError as exc:
        return {"suite": name, "instances": 0, "passed": 0, "failed": 0, "witnesses": [],
                "notes": {"skipped": str(exc)}}
    except ViolationError as exc:
        return {"suite": name, "instances": 1, "passed": 0, "failed": 1,
                "witnesses": [{"error": str(exc), **exc.witness}], "notes": {}}


def parse_suites(names_arg: str) -> List[str]:
    from .suites import SUITES

    if names_arg == "all":
        return list(SUITES)
    names = [s.strip() for s in names_arg.split(",") if s.strip()]
    unknown = [s for s in names if s not in SUITES]
    if unknown or not names:
        raise InputError(f"unknown suite(s) {unknown}; choose from {', '.join(SUITES)} or 'all'")
    return names


def cmd_verify(args) -> int:
    names = parse_suites(args.suite)
    ball = load_ball(args.ball)
    if ball.radius < 1:
        raise InputError("verification needs a ball of radius at least 1")
    payload = [(n, ball.to_dict(), args.seed, args.corrected) for n in names]
    workers = min(thread_cap(), len(names))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_one, payload))
    else:
        results = [_run_one(p) for p in payload]
    ok = all(r["failed"] == 0 for r in results)
    for r in results:
        status = "PASS" if r["failed"] == 0 else "FAIL"
        print(f"{status} {r['suite']}: {r['passed']}/{r['instances']}")
    report = {
        "ball": ball.metadata(),
        "seed": args.seed,
        "corrected": args.corrected,
        "passed": ok,
        "suites": results,
    }
    if args.report:
        atomic_write(args.report, json.dumps(report, indent=1, default=str, sort_keys=True) + "\n")
    return EXIT_OK if ok else EXIT_VIOLATION


# -- measure --------------------------------------------------------------------


def table_harmonic(ball: BuildingBall, depth: int) -> List[List]:
    """μ^o(Ω_o(z)) for every z within ``depth`` of the centre, from depth-``depth`` germs."""
    from .measures import GermSet

    o = ball.center
    rows = [["z", "sigma_a", "sigma_b", "mass"]]
    if depth == 0:
        rows.append([o, 0, 0, fmt(Fraction(1))])
        return rows
    gs = GermSet(ball.complex, o, depth, ball)
    n = len(gs)
    for z in range(ball.complex.n):
        if ball.depth(z) > depth:
            continue
        s = sigma(ball, o, z)
        if s[0] + s[1] > depth:
            continue
        rows.append([z, s[0], s[1], fmt(Fraction(int(gs.containing(z).sum()), n))])
    return rows


def table_rn(ball: BuildingBall, depth: int) -> List[List]:
    """Cylinder-wise μ^x/μ^y next to q^{±2ℓ(h)} for the centre and each neighbour."""
    from .measures import GermSet, radon_nikodym_rows

    rows = [["x", "y", "cylinder", "h_a", "h_b", "lhs", "q^(2l(h))", "q^(-2l(h))"]]
    x = ball.center
    gx = GermSet(ball.complex, x, 3, ball)
    for y in ball.complex.neighbors[x]:
        for r in radon_nikodym_rows(ball, x, int(y), gx):
            if r.h is None:
                continue
            rows.append([x, y, " ".join(map(str, r.cylinder)), r.h[0], r.h[1], fmt(r.lhs),
                         fmt(r.rhs(ball.q, 1)), fmt(r.rhs(ball.q, -1))])
    return rows


def table_shadows(ball: BuildingBall, depth: int) -> List[List]:
    """Masses of Ω_{m,n}, Ω_{m,n+1} and E_{m,n}, and how often Ω_{m,n} ∩ E_n = E_{m,n}."""
    from .measures import GermSet, shadow_identities

    gs = GermSet(ball.complex, ball.center, depth, ball)
    rows = [["m", "n", "mu_omega", "mu_omega_next", "mu_e", "e_over_omega", "equality_rows", "inclusion_rows", "rows"]]
    for m in range(depth):
        for n in range(depth - m):
            masses = set()
            eq = inc = 0
            for row in range(len(gs)):
                out = shadow_identities(gs, row, m, n)
                masses.add((out["mu_omega"], out["mu_omega_next"], out["mu_e"]))
                eq += out["identity"]
                inc += out["inclusion"]
            if len(masses) != 1:
                raise ViolationError("shadow masses depend on the germ", {"m": m, "n": n})
            a, b, e = masses.pop()
            rows.append([m, n, fmt(a), fmt(b), fmt(e), fmt(e / a), eq, inc, len(gs)])
    return rows


def table_projectivity(ball: BuildingBall, depth: int) -> List[List]:
    """Projectivity group of each line of the link plane and its orbit on ordered triples."""
    from itertools import permutations

    from .boundary import ordered_triple_orbit, plane_projectivity_group

    plane = ball.presentation.plane
    rows = [["line", "points", "group_order", "orbit_size", "ordered_triples"]]
    for i, line in enumerate(plane.lines):
        grp = plane_projectivity_group(plane, i)
        pts = tuple(sorted(line))
        triples = list(permutations(pts, 3))
        orbit = ordered_triple_orbit(grp, triples[0])
        rows.append([i, " ".join(map(str, pts)), len(grp), len(orbit), len(triples)])
    return rows


def cmd_measure(args) -> int:
    ball = load_ball(args.ball)
    depth = args.depth
    if depth is None:
        depth = {"harmonic": 2, "rn": 2, "shadows": 3, "projectivity": 0}[args.table]
    if depth < 0:
        raise InputError("depth must be non-negative")
    if args.table in ("harmonic", "shadows") and depth > ball.radius:
        raise InputError(f"depth {depth} exceeds ball radius {ball.radius}")
    if args.table == "shadows" and depth < 1:
        raise InputError("shadow table needs depth at least 1")
    if args.table == "rn":
        if depth != 2:
            raise InputError("the Radon-Nikodym table uses depth-2 cylinders only")
        if ball.radius < 3:
            raise InputError("the Radon-Nikodym table needs a ball of radius at least 3")
    fn = {"harmonic": table_harmonic, "rn": table_rn, "shadows": table_shadows,
          "projectivity": table_projectivity}[args.table]
    rows = fn(ball, depth)
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    if args.csv:
        atomic_write(args.csv, buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())
    print(f"{args.table}: {len(rows) - 1} rows", file=sys.stderr)
    return EXIT_OK


# -- entry point -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="a2lab", description="Finite verification toolkit for rank-2 affine buildings.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", help="build a ball around the identity vertex")
    b.add_argument("--presentation", type=Path, help="triangle presentation JSON (default: bundled q=2)")
    b.add_argument("--radius", type=int, required=True)
    b.add_argument("--out", type=Path, required=True)
    b.set_defaults(func=cmd_build)

    v = sub.add_parser("verify", help="run verification suites on a ball")
    v.add_argument("--ball", type=Path, required=True)
    v.add_argument("--suite", default="all", help="comma-separated suite names or 'all'")
    v.add_argument("--report", type=Path)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--corrected", action="store_true",
                   help="check the amended forms of the statements that fail as written")
    v.set_defaults(func=cmd_verify)

    m = sub.add_parser("measure", help="write an exact measure table as CSV")
    m.add_argument("--ball", type=Path, required=True)
    m.add_argument("--table", choices=TABLES, required=True)
    m.add_argument("--depth", type=int)
    m.add_argument("--csv", type=Path)
    m.set_defaults(func=cmd_measure)
    return p


def main(argv: Sequence[str] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (InputError, DepthInsufficientError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ViolationError as exc:
        print(f"violation: {exc}", file=sys.stderr)
        if exc.witness:
            print(json.dumps(exc.witness, default=str), file=sys.stderr)
        return EXIT_VIOLATION
    except A2LabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
